#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "spincm/suite.hpp"

namespace {

using namespace spincm;
using nlohmann::json;

std::vector<int> parse_subset(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

FamilySpec spec_from_flags(const std::string& family, const std::string& algebra,
                           const std::string& subset, double om1_re, double om1_im, double om2_re,
                           double om2_im) {
    FamilySpec spec;
    spec.kind = family == "rational"        ? FamilyKind::rational
                : family == "trigonometric" ? FamilyKind::trigonometric
                : family == "elliptic"
                    ? FamilyKind::elliptic
                    : throw std::invalid_argument("unknown family '" + family + "'");
    spec.algebra = algebra;
    if (subset != "full") {
        spec.full_subset = false;
        spec.subset = parse_subset(subset);
    }
    spec.omega1 = cplx(om1_re, om1_im);
    spec.omega2 = cplx(om2_re, om2_im);
    return spec;
}

json table_to_json(const IntegralTable& tab) {
    json jt;
    jt["basis"] = tab.basis;
    jt["entries"] = json::array();
    for (const auto& row : tab.entries) {
        json jr = json::array();
        for (const cplx& v : row) jr.push_back(json::array({v.real(), v.imag()}));
        jt["entries"].push_back(jr);
    }
    if (tab.basis == "weierstrass") {
        jt["condition"] = tab.elliptic_condition;
        jt["residual"] = tab.elliptic_residual;
    }
    return jt;
}

int cmd_verify(const std::string& config_path, std::uint64_t seed, bool seed_set, int samples,
               bool samples_set, double commute_tol, bool tol_set, const std::string& out,
               const std::string& format) {
    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "cannot open config file " << config_path << "\n";
            return 2;
        }
        json j;
        f >> j;
        cfg = config_from_json(j);
    } else {
        cfg = default_config();
    }
    if (seed_set) cfg.seed = seed;
    if (samples_set) cfg.n_samples = samples;
    if (tol_set) cfg.tol.commute_tol = commute_tol;
    if (!out.empty()) cfg.output = out;
    if (!format.empty()) cfg.format = format;

    const Report rep = run_suite(cfg);
    const std::string path = write_report(rep, cfg);
    int failures = 0;
    for (const auto& c : rep.checks) {
        if (!c.pass) {
            ++failures;
            std::cout << "FAIL " << c.name << " measured=" << c.measured
                      << " threshold=" << c.threshold << " (" << c.mode << ")\n";
        }
    }
    std::cout << rep.checks.size() - failures << "/" << rep.checks.size()
              << " checks passed; report written to " << path << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin Calogero-Moser integrability harness"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "run the full verification suite");
    std::string config_path, out, format;
    std::uint64_t seed = 7;
    int samples = 5;
    double commute_tol = 1e-7;
    auto* seed_opt = verify->add_option("--seed", seed, "random seed");
    auto* samples_opt = verify->add_option("--samples", samples, "samples per suite");
    auto* tol_opt = verify->add_option(
        "--tol", commute_tol, "commutation tolerance (config files set each tolerance)");
    verify->add_option("--config", config_path, "JSON config file");
    verify->add_option("--out", out, "report output path");
    verify->add_option("--format", format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));

    // exponents
    auto* exponents = app.add_subcommand("exponents", "print the exponents of a simple type");
    std::string etype;
    int erank = 0;
    exponents->add_option("type", etype, "simple type letter A-G")->required();
    exponents->add_option("rank", erank, "rank")->required();

    // shared family flags
    std::string family = "rational", algebra = "A2", subset = "full";
    double om1_re = 0.5, om1_im = 0.0, om2_re = 0.0, om2_im = 0.65;
    double flow_T = 1.0, flow_tol = 1e-10;
    bool on_shell = false;
    std::uint64_t fseed = 7;
    std::string fout, fformat = "text";

    auto add_family_flags = [&](CLI::App* cmd) {
        cmd->add_option("--family", family, "rational | trigonometric | elliptic");
        cmd->add_option("--algebra", algebra, "algebra, e.g. A2");
        cmd->add_option("--subset", subset,
                        "comma-separated 1-based simple root indices, or 'full'");
        cmd->add_option("--omega1-re", om1_re, "elliptic half period 1, real part");
        cmd->add_option("--omega1-im", om1_im, "elliptic half period 1, imaginary part");
        cmd->add_option("--omega2-re", om2_re, "elliptic half period 2, real part");
        cmd->add_option("--omega2-im", om2_im, "elliptic half period 2, imaginary part");
        cmd->add_option("--seed", fseed, "random seed");
        cmd->add_option("--out", fout, "output path");
    };

    // integrals
    auto* integrals = app.add_subcommand("integrals", "extract an integral table at a sample");
    add_family_flags(integrals);
    std::string point_path;
    integrals->add_flag("--on-shell", on_shell, "sample on the zero momentum level");
    integrals->add_option("--point", point_path,
                          "JSON file with q, p, xi coordinate arrays ([re, im] pairs) "
                          "instead of a sampled point");
    integrals->add_option("--format", fformat, "json or text")
        ->check(CLI::IsMember({"json", "text"}));

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "integrate a trajectory and report drifts");
    add_family_flags(flow_cmd);
    flow_cmd->add_option("--T", flow_T, "integration time");
    flow_cmd->add_option("--tol", flow_tol, "integrator local tolerance");

    // independence
    auto* indep = app.add_subcommand("independence", "rank and determinant report");
    add_family_flags(indep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(verify))
            return cmd_verify(config_path, seed, seed_opt->count() > 0, samples,
                              samples_opt->count() > 0, commute_tol, tol_opt->count() > 0, out,
                              format);

        if (app.got_subcommand(exponents)) {
            const ExponentData ed = exponent_data(build_root_system(etype.at(0), erank));
            std::cout << "[";
            for (std::size_t i = 0; i < ed.exponents.size(); ++i)
                std::cout << (i ? ", " : "") << ed.exponents[i];
            std::cout << "]\n";
            return 0;
        }

        const FamilySpec spec =
            spec_from_flags(family, algebra, subset, om1_re, om1_im, om2_re, om2_im);
        const auto [t, r] = parse_algebra(spec.algebra);
        const AlgebraRealization alg = realize(build_root_system(t, r));
        const auto gens = primitive_invariants(alg);
        LaxFamily fam;
        {
            std::vector<int> zero_based;
            for (int s : spec.subset) zero_based.push_back(s - 1);
            if (spec.kind == FamilyKind::rational)
                fam = spec.full_subset ? rational_family_full(alg)
                                       : rational_family_span(alg, zero_based);
            else if (spec.kind == FamilyKind::trigonometric)
                fam = spec.full_subset ? trigonometric_family_full(alg)
                                       : trigonometric_family(alg, zero_based);
            else
                fam = elliptic_family(alg, make_lattice(spec.omega1, spec.omega2));
        }

        if (app.got_subcommand(integrals)) {
            Rng rng = Rng(fseed).stream(0);
            PhasePoint pt = sample_phase_point(fam, alg, rng, on_shell);
            if (!point_path.empty()) {
                std::ifstream pf(point_path);
                if (!pf) throw std::invalid_argument("cannot open point file " + point_path);
                json pj;
                pf >> pj;
                auto vec = [&](const char* key, int size) {
                    const auto& arr = pj.at(key);
                    if (static_cast<int>(arr.size()) != size)
                        throw std::invalid_argument(std::string(key) + " must have " +
                                                    std::to_string(size) + " entries");
                    Vector v(size);
                    for (int i = 0; i < size; ++i)
                        v[i] = cplx(arr[i][0].get<double>(), arr[i][1].get<double>());
                    return v;
                };
                pt.q = vec("q", alg.roots.rank);
                pt.p = vec("p", alg.roots.rank);
                pt.xi = alg.element(vec("xi", alg.dim));
            }
            const IntegralTable tab = extract_integrals(fam, alg, gens, pt);
            if (fformat == "json") {
                json j = table_to_json(tab);
                if (fout.empty()) {
                    std::cout << j.dump(2) << "\n";
                } else {
                    std::ofstream f(fout);
                    f << j.dump(2) << "\n";
                }
            } else {
                std::cout << "basis: " << tab.basis << "\n";
                for (std::size_t k = 0; k < tab.entries.size(); ++k) {
                    std::cout << "I_" << k + 1 << "j:";
                    for (const cplx& v : tab.entries[k])
                        std::cout << " (" << v.real() << "," << v.imag() << ")";
                    std::cout << "\n";
                }
            }
            return 0;
        }

        if (app.got_subcommand(flow_cmd)) {
            Rng rng = Rng(fseed).stream(0);
            const PhasePoint start = sample_phase_point(fam, alg, rng, true);
            const Observable h = hamiltonian_observable(fam, alg);
            const FlowResult fr = flow(h, fam, alg, gens, start, flow_T, flow_tol);
            std::cout << (fr.completed ? "completed" : ("stopped: " + fr.stop_reason)) << "\n"
                      << "steps accepted " << fr.steps_accepted << ", rejected "
                      << fr.steps_rejected << "\n"
                      << "max integral drift " << fr.max_integral_drift << "\n"
                      << "momentum drift " << fr.momentum_drift << "\n"
                      << "energy drift " << fr.hamiltonian_drift << "\n";
            if (!fout.empty()) {
                std::ofstream f(fout);
                f << "t";
                for (int i = 0; i < alg.roots.rank; ++i) f << ",q" << i + 1 << "_re,q" << i + 1 << "_im";
                for (int i = 0; i < alg.roots.rank; ++i) f << ",p" << i + 1 << "_re,p" << i + 1 << "_im";
                for (int i = 0; i < alg.dim; ++i) f << ",xi" << i << "_re,xi" << i << "_im";
                f << "\n";
                for (const auto& st : fr.trajectory) {
                    f << st.t;
                    for (int i = 0; i < alg.roots.rank; ++i)
                        f << "," << st.q[i].real() << "," << st.q[i].imag();
                    for (int i = 0; i < alg.roots.rank; ++i)
                        f << "," << st.p[i].real() << "," << st.p[i].imag();
                    for (int i = 0; i < alg.dim; ++i)
                        f << "," << st.xi[i].real() << "," << st.xi[i].imag();
                    f << "\n";
                }
                std::cout << "time series written to " << fout << "\n";
            }
            return fr.completed ? 0 : 1;
        }

        if (app.got_subcommand(indep)) {
            Rng rng = Rng(fseed).stream(0);
            std::vector<Vector> samples2;
            const int N = alg.roots.rank;
            while (samples2.size() < 5) {
                Vector p(N);
                for (int i = 0; i < N; ++i) p[i] = rng.annulus(0.5, 1.5);
                bool regular = true;
                for (int rr2 = 0; rr2 < alg.positive_count(); ++rr2)
                    if (std::abs(alg.root_value(rr2, p)) <= 0.12) regular = false;
                if (regular) samples2.push_back(p);
            }
            const DetFormulaReport dr = verify_det_formula(alg, gens, samples2);
            std::cout << "block triangularity off-mass " << dr.max_off_block_mass << "\n";
            for (std::size_t j = 0; j < dr.ratio_mean.size(); ++j)
                std::cout << "det(D_" << j << ") / prod_{ht>j} alpha(p) = ("
                          << dr.ratio_mean[j].real() << "," << dr.ratio_mean[j].imag()
                          << "), rel std " << dr.ratio_rel_std[j] << "\n";
            const PhasePoint pt = sample_phase_point(fam, alg, rng, false);
            const RankReport rr = jacobian_rank(fam, alg, gens, pt);
            std::cout << "Jacobian rank " << rr.rank << " (expected " << rr.expected
                      << "), margin " << rr.margin << "\n";
            const LiouvilleReport lr = liouville_count(alg, fam.kind);
            std::cout << "leaf dim " << lr.leaf_dim << ", required " << lr.required
                      << ", provided " << lr.provided << (lr.ok ? " (ok)" : " (MISMATCH)")
                      << "\n";
            return lr.ok && rr.rank == rr.expected ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
