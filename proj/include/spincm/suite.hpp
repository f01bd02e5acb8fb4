#ifndef SPINCM_SUITE_HPP
#define SPINCM_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spincm/independence.hpp"

namespace spincm {

struct ToleranceSet {
    double commute_tol = 1e-7;
    double flow_tol = 1e-6;
    double det_tol = 1e-6;
};

// One family instance bound to an algebra; also reused for flow specs.
struct FamilySpec {
    FamilyKind kind = FamilyKind::rational;
    std::string algebra = "A2";
    bool full_subset = true;
    std::vector<int> subset;  // 1-based simple-root indices when !full_subset
    cplx omega1{0.5, 0.0}, omega2{0.0, 0.65};
    double T = 1.0;
    double flow_tol = 1e-10;

    std::string label() const;
};

struct RunConfig {
    std::uint64_t seed = 7;
    int n_samples = 5;
    ToleranceSet tol;
    std::vector<std::string> algebras;         // root-combinatorics checks
    std::vector<std::string> matrix_algebras;  // realization + invariant checks
    std::vector<FamilySpec> families;
    std::vector<FamilySpec> flows;
    std::vector<std::string> independence_algebras;
    int rank_points = 3;
    std::string output = "spincm_report.json";
    std::string format = "json";  // json | text
};

// The configuration the acceptance suite runs; also used by `verify` when no
// config file is given.
RunConfig default_config();

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

std::pair<char, int> parse_algebra(const std::string& name);  // "B2" -> ('B', 2)

struct CheckResult {
    std::string name;
    int criterion = 0;  // acceptance criterion this check belongs to, 0 = extra
    bool pass = false;
    double measured = 0;
    double threshold = 0;
    std::string mode;  // "max" (measured <= threshold), "min", "exact", "range"
    std::string details;
};

struct Report {
    std::vector<CheckResult> checks;
    nlohmann::json recorded;  // constants, chosen generators, fitted combos
    std::vector<std::pair<std::string, std::string>> side_files;  // name -> CSV content
    std::uint64_t seed = 0;
    double wall_ms = 0;

    bool all_pass() const;
    std::vector<const CheckResult*> by_criterion(int c) const;
    nlohmann::json to_json(const RunConfig& cfg) const;
    std::string to_text() const;
};

// Runs every suite section in order (root data, realization, invariant
// identities, per-family Lax identities, Poisson commutation and flows,
// independence) and optionally writes the report plus flow CSV side files.
Report run_suite(const RunConfig& cfg);

// Writes report (and flow time series CSVs next to it) to cfg.output,
// honoring the SPINCM_OUTPUT_DIR override.  Returns the resolved path.
std::string write_report(const Report& rep, const RunConfig& cfg);

}  // namespace spincm

#endif
