#ifndef SPINCM_INVARIANTS_HPP
#define SPINCM_INVARIANTS_HPP

#include <vector>

#include "spincm/liealg.hpp"

namespace spincm {

// One homogeneous generator of the invariant polynomial ring, evaluated in
// the defining representation.  Type A uses trace(x^{k+1}); B and C use
// trace(x^{2k}); D uses the even trace powers plus the Pfaffian of the
// defining matrix (degree n), which fills one of the two equal-degree slots.
struct PrimitiveInvariant {
    enum class Kind { trace_power, pfaffian };
    int index = 0;   // k, 1-based, in degree order
    int degree = 0;  // d_k
    Kind kind = Kind::trace_power;
    int power = 0;  // matrix power for trace generators

    cplx eval(const Matrix& m) const;
    cplx operator()(const AlgebraElement& x) const { return eval(x.matrix()); }
};

// Generators with degrees matching ExponentData::degrees exactly; throws
// std::logic_error on a mismatch.
std::vector<PrimitiveInvariant> primitive_invariants(const AlgebraRealization& alg);

// Pfaffian of an even-dimensional antisymmetric matrix by recursive expansion.
cplx pfaffian(const Matrix& a);

// Multiset of derivative directions with multiplicities.
struct DirectionMultiset {
    std::vector<std::pair<AlgebraElement, int>> items;
    int total_degree() const;
};

struct PairingResult {
    cplx value = 0;
    bool degree_matched = false;  // false => value is 0 by homogeneity
};

// Mixed directional derivative <d_{v1}...d_{vd}, I> at 0 via the exact
// polarization identity, with multinomial grouping over repeated directions.
// Directions are scaled to unit Frobenius norm internally and the scale is
// restored through homogeneity.
PairingResult pairing(const DirectionMultiset& ds, const PrimitiveInvariant& inv);

// A multiset made of one Cartan direction and root-vector directions, for the
// weight selection rule: the pairing vanishes unless sum(m_alpha alpha) = 0.
struct WeightedMultiset {
    Vector cartan_dir;  // Cartan coordinates
    int cartan_mult = 0;
    std::vector<std::pair<int, int>> root_dirs;  // (signed root index, multiplicity)
};

DirectionMultiset to_directions(const AlgebraRealization& alg, const WeightedMultiset& wm);

// True iff either the weight sum(m_alpha alpha) is zero (rule is vacuous) or
// the pairing vanishes to tol.
bool check_weight_selection(const AlgebraRealization& alg, const WeightedMultiset& wm,
                            const PrimitiveInvariant& inv, double tol = 1e-10);

struct TransferCheck {
    cplx lhs = 0, rhs = 0;
    bool ok = false;
};

// <d_x^m d_{[x,y]} d_z^n, I> = (n/(m+1)) <d_x^{m+1} d_{[y,z]} d_z^{n-1}, I>,
// with the right side zero when n = 0.
TransferCheck check_transfer_identity(const AlgebraRealization& alg, const AlgebraElement& x,
                                      const AlgebraElement& y, const AlgebraElement& z, int m,
                                      int n, const PrimitiveInvariant& inv, double tol = 1e-9);

// Coefficients of u^j in I(p + u xi), j = 0..d, recovered by evaluation at
// the (d+1)-st roots of unity and an exact inverse-DFT solve.
std::vector<cplx> f_coefficients(const AlgebraRealization& alg, const Vector& p_cartan,
                                 const AlgebraElement& xi, const PrimitiveInvariant& inv);

}  // namespace spincm

#endif
