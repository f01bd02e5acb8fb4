#ifndef SPINCM_INDEPENDENCE_HPP
#define SPINCM_INDEPENDENCE_HPP

#include <string>
#include <vector>

#include "spincm/lax.hpp"
#include "spincm/poisson.hpp"

namespace spincm {

// Ordering of the coefficient functions F_kj (j = 0 then j = 2..d_k, grouped
// by j with the k range shrinking as j grows) and of the variables
// (p_1..p_N, then xi_alpha over positive roots grouped by height).  With this
// ordering the derivative matrix D is block lower-triangular.
struct OrderedIndexing {
    std::vector<std::pair<int, int>> functions;  // (k, j), k 1-based
    std::vector<int> xi_variables;               // positive-root indices, by height
    std::vector<int> block_sizes;                // [N, b_1, ..., b_{h-1}]
};

OrderedIndexing ordered_indexing(const AlgebraRealization& alg);

struct DerivativeBlocks {
    Eigen::MatrixXcd full;                    // functions x (p, xi) in the above order
    std::vector<Eigen::MatrixXcd> blocks;     // D_0 (N x N), D_j (b_j x b_j)
    double off_block_mass = 0;                // max above-diagonal entry / diagonal scale
};

// Partial derivatives of the F_kj at (p, xi = eps) by central differences.
// Requires |alpha(p)| > 0.1 for every positive root.
DerivativeBlocks build_derivative_blocks(const AlgebraRealization& alg,
                                         const std::vector<PrimitiveInvariant>& invs,
                                         const Vector& p);

struct DetFormulaReport {
    // per block j = 0..h-1: det(D_j)/prod_{ht>j} alpha(p) across samples
    std::vector<cplx> ratio_mean;
    std::vector<double> ratio_rel_std;
    std::vector<double> recursion_rel_std;  // |D_j| prod_{ht=j} alpha vs |D_{j-1}|, j >= 1
    double total_rel_std = 0;               // det D / prod alpha(p)^{ht alpha}
    double min_abs_det = 1e300;             // smallest |det D_j| seen at a regular p
    double max_off_block_mass = 0;
    bool dets_nonzero = true;
    bool ok(double tol) const;
};

DetFormulaReport verify_det_formula(const AlgebraRealization& alg,
                                    const std::vector<PrimitiveInvariant>& invs,
                                    const std::vector<Vector>& p_samples, double tol = 1e-6);

// Expansion of [e_alpha, eps] for the height-j roots alpha over the
// height-(j-1) root vectors; b_{j-1} x b_j, full column rank.  Requires
// 2 <= j <= h-1.  Throws std::logic_error if the bracket leaves the
// height-(j-1) span.
Eigen::MatrixXcd lowering_matrix(const AlgebraRealization& alg, int j);

int lowering_rank(const Eigen::MatrixXcd& a);  // SVD rank at 1e-10 relative

struct RankReport {
    int rank = 0;
    int expected = 0;
    double margin = 0;  // sigma_rank / sigma_{rank+1}, 0 if full
    std::vector<double> singular_values;
};

// Numerical rank (SVD, threshold 1e-8 * sigma_max) of the Jacobian of the
// retained I_kj with respect to all 2N + dim g coordinates.  include_j1
// keeps the j = 1 entries, which drops the rank expectation by nothing (they
// are dependent); the default excludes them.
RankReport jacobian_rank(const LaxFamily& fam, const AlgebraRealization& alg,
                         const std::vector<PrimitiveInvariant>& invs, const PhasePoint& pt,
                         bool include_j1 = false);

struct LiouvilleReport {
    int dim_g = 0, rank = 0;
    int leaf_dim = 0;        // dim g - N = 2 sum m_k
    int required = 0;        // sum m_k
    int table_entries = 0;   // per family below
    int casimirs = 0;        // I_{k,d_k}
    int dependent = 0;       // I_k1 (rational: zero on shell; trig: Eq-type relation;
                             // elliptic: slot absent)
    int provided = 0;        // table_entries - casimirs - dependent
    bool ok = false;
};

LiouvilleReport liouville_count(const AlgebraRealization& alg, FamilyKind kind);

struct RemainderDegreeReport {
    struct Entry {
        int k, j;
        int degree_bound;      // d_k - j - 1
        double excess;         // max |coefficient| above the bound / scale
    };
    std::vector<Entry> entries;
    double max_excess = 0;
};

// Degree in p of R_kj = I_kj - F_kj along random rays p = t p0, by exact
// polynomial interpolation in t.  For the elliptic j = 0 entries the best
// linear combination of the even j >= 4 integrals is projected out first.
RemainderDegreeReport remainder_degree_check(const LaxFamily& fam, const AlgebraRealization& alg,
                                             const std::vector<PrimitiveInvariant>& invs,
                                             Rng& rng);

}  // namespace spincm

#endif
