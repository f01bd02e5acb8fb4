#ifndef SPINCM_LIEALG_HPP
#define SPINCM_LIEALG_HPP

#include <memory>
#include <utility>
#include <vector>

#include "spincm/rootdata.hpp"

namespace spincm {

class AlgebraElement;

// Concrete matrix realization of a classical simple Lie algebra in its
// defining representation, with a Killing-normalized basis:
//
//   basis order:  x_1..x_N (orthonormal Cartan), e_alpha for alpha > 0
//                 (height order), e_{-alpha} in the matching order.
//
// Normalization: kappa(x_i, x_j) = delta_ij, kappa(e_alpha, e_{-alpha}) = 1,
// so [e_alpha, e_{-alpha}] = H_alpha, the Killing dual of alpha.  Only the
// negative root vectors are rescaled; the positive ones keep integer entries.
class AlgebraRealization {
public:
    RootSystem roots;
    ExponentData exps;
    int matrix_dim = 0;  // n of the defining representation
    int dim = 0;         // 2|D+| + N

    // Signed root indices: r in [0, P) is the r-th positive root, r in [P, 2P)
    // is its negative.  Coordinate index of e_r is N + r; Cartan is [0, N).
    int positive_count() const { return roots.positive_count(); }
    int negate_root(int r) const {
        const int P = positive_count();
        return r < P ? r + P : r - P;
    }
    bool is_positive(int r) const { return r < positive_count(); }
    int root_height(int r) const;            // signed height
    RootVec root_coeffs(int r) const;        // signed coefficient vector
    int root_index(const RootVec& r) const;  // -1 if not a root

    const Matrix& basis_matrix(int idx) const { return basis_[idx]; }
    int cartan_coord(int i) const { return i; }
    int root_coord(int r) const { return roots.rank + r; }

    // alpha(h) for h given by Cartan coordinates (over the orthonormal x_i)
    cplx root_value(int r, const Vector& cartan_coords) const;
    double root_on_x(int r, int i) const { return root_on_x_[r][i]; }

    // Killing form in coordinates (kappa(x_i,x_j)=delta, kappa(e_a,e_{-a})=1)
    cplx killing(const AlgebraElement& a, const AlgebraElement& b) const;
    // Independent route: fixed multiple of the defining-representation trace
    // form, with the multiple measured at construction time.
    cplx killing_via_trace(const Matrix& a, const Matrix& b) const;
    double trace_form_ratio() const { return trace_ratio_; }
    double trace_form_ratio_spread() const { return trace_ratio_spread_; }

    AlgebraElement element(Vector coords) const;
    AlgebraElement zero() const;
    AlgebraElement cartan_element(const Vector& cartan_coords) const;
    AlgebraElement basis_element(int idx) const;
    AlgebraElement coroot(int r) const;           // H_alpha for signed root r
    AlgebraElement grading_element() const;       // x_0 with alpha_i(x_0) = 1
    AlgebraElement principal_nilpotent_neg() const;  // sum of e_{-alpha_i}

    // Casimir element of kappa as its dual-basis pair list: (x_i, x_i) over
    // the Cartan and (e_alpha, e_{-alpha}) over all roots, as coordinate
    // index pairs.
    std::vector<std::pair<int, int>> casimir_pairs() const;

    AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) const;

    // Expand an arbitrary matrix of the realization in the basis.
    Vector coords_of(const Matrix& m) const;

    // The map fixing the Cartan part and scaling e_alpha by exp(alpha(h)).
    AlgebraElement torus_adjoint(const Vector& h_cartan, const AlgebraElement& x) const;
    // exp of the (diagonal) matrix form of a Cartan element
    Matrix torus_matrix(const Vector& h_cartan) const;

    // Transports xi in { all xi_{-alpha_i} != 0 } to the slice
    // eps + sum_{alpha in D - pi} C e_alpha by a torus action.  Returns the
    // Cartan logarithm h* and the slice point s.  Throws std::domain_error
    // if some xi_{-alpha_i} vanishes.
    std::pair<Vector, AlgebraElement> slice_normalize(const AlgebraElement& xi) const;

    // indices of simple roots among the positive roots
    const std::vector<int>& simple_positions() const { return simple_positions_; }

private:
    friend AlgebraRealization realize(const RootSystem& rs);

    std::vector<Matrix> basis_;
    std::vector<std::vector<double>> root_on_x_;  // [2P][N]
    // sparse structure constants: bracket_table_[i][j] with i < j
    std::vector<std::vector<std::vector<std::pair<int, cplx>>>> bracket_table_;
    Vector grading_coords_;
    std::vector<int> simple_positions_;
    double trace_ratio_ = 0.0;
    double trace_ratio_spread_ = 0.0;
};

// Builds the realization; type must be one of A, B, C, D (CapabilityError
// otherwise).  All basis invariants are validated internally to 1e-9.
AlgebraRealization realize(const RootSystem& rs);

// Element of the algebra in basis coordinates; plain value type.
class AlgebraElement {
public:
    AlgebraElement() = default;
    AlgebraElement(const AlgebraRealization* alg, Vector coords)
        : alg_(alg), coords_(std::move(coords)) {}

    const Vector& coords() const { return coords_; }
    Vector& coords() { return coords_; }
    const AlgebraRealization& algebra() const { return *alg_; }

    cplx cartan(int i) const { return coords_[i]; }
    cplx root(int r) const { return coords_[alg_->root_coord(r)]; }
    Vector cartan_part() const { return coords_.head(alg_->roots.rank); }

    Matrix matrix() const;
    double frobenius() const;

    AlgebraElement operator+(const AlgebraElement& o) const {
        return AlgebraElement(alg_, coords_ + o.coords_);
    }
    AlgebraElement operator-(const AlgebraElement& o) const {
        return AlgebraElement(alg_, coords_ - o.coords_);
    }
    AlgebraElement operator*(cplx s) const { return AlgebraElement(alg_, s * coords_); }

private:
    const AlgebraRealization* alg_ = nullptr;
    Vector coords_;
};

inline AlgebraElement operator*(cplx s, const AlgebraElement& x) { return x * s; }

}  // namespace spincm

#endif
