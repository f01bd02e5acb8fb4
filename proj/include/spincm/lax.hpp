#ifndef SPINCM_LAX_HPP
#define SPINCM_LAX_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spincm/invariants.hpp"
#include "spincm/weierstrass.hpp"

namespace spincm {

enum class FamilyKind { rational, trigonometric, elliptic };

std::string family_name(FamilyKind k);

// One of the three spectral-parameter families.  The rational family is
// parametrized by a subset of roots closed under addition and negation, the
// trigonometric one by a subset of the simple system, the elliptic one by a
// period lattice.
struct LaxFamily {
    FamilyKind kind = FamilyKind::rational;
    std::vector<char> member;    // signed-root membership: rational Delta', trig root span
    std::vector<int> pi_prime;   // trig only: simple-root indices
    std::shared_ptr<const Lattice> lattice;  // elliptic only

    bool in_subset(int signed_root) const { return member[signed_root] != 0; }
    std::string describe() const;
};

LaxFamily rational_family(const AlgebraRealization& alg, const std::vector<RootVec>& delta_prime);
LaxFamily rational_family_full(const AlgebraRealization& alg);
// Delta' = all roots supported on the given simple subset
LaxFamily rational_family_span(const AlgebraRealization& alg, const std::vector<int>& simple_subset);
LaxFamily trigonometric_family(const AlgebraRealization& alg, const std::vector<int>& pi_prime);
LaxFamily trigonometric_family_full(const AlgebraRealization& alg);
LaxFamily elliptic_family(const AlgebraRealization& alg, const Lattice& lattice);

// Point (q, p, xi) of TU x g in coordinates over the orthonormal Cartan basis
// and the root basis.
struct PhasePoint {
    Vector q, p;  // Cartan coordinates, size N
    AlgebraElement xi;

    bool on_shell(double tol = 1e-12) const;
};

// Minimal |denominator| of the family at q over its singular set:
// |alpha(q)| (rational), |sin alpha(q)| (trigonometric), or the lattice
// distance of alpha(q) (elliptic).
double denominator_margin(const LaxFamily& fam, const AlgebraRealization& alg, const Vector& q);

// The Lax operator L(q,p,xi)(z).  Throws PoleProximityError when z or q is
// within 1e-8 of the singular set.
AlgebraElement lax_matrix(const LaxFamily& fam, const AlgebraRealization& alg,
                          const PhasePoint& pt, cplx z);

// Contraction of the family's r-matrix against xi in the second tensor slot;
// satisfies lax_matrix(...) = p + r_contraction(...).  Computed from the
// r-matrix kernels directly, with Killing pairings through the trace form, so
// it is an independent route from lax_matrix.
AlgebraElement r_contraction(const LaxFamily& fam, const AlgebraRealization& alg, const Vector& q,
                             const AlgebraElement& xi, cplx z);

cplx hamiltonian(const LaxFamily& fam, const AlgebraRealization& alg, const PhasePoint& pt);

// Coefficients of the spectral expansion of I_k(L(z)): powers of 1/z
// (rational), powers of cot z (trigonometric), or the Weierstrass basis
// {1, wp, wp', ...} with the (-1)^j/(j-1)! weights (elliptic, where the j=1
// slot does not exist and is stored as zero).
struct IntegralTable {
    std::vector<std::vector<cplx>> entries;  // entries[k-1][j], j = 0..d_k
    std::string basis;
    double elliptic_condition = 0;
    double elliptic_residual = 0;

    cplx at(int k, int j) const { return entries[k - 1][j]; }
};

IntegralTable extract_integrals(const LaxFamily& fam, const AlgebraRealization& alg,
                                const std::vector<PrimitiveInvariant>& invs, const PhasePoint& pt);

// Rejection-samples a phase point with all family denominators and all
// |alpha(p)| above 0.1, coordinates in the complex annulus [0.5, 1.5].
// on_shell forces the Cartan part of xi to zero; slice forces xi into
// eps + n^+.  Throws SamplingError after 1000 rejected draws.
PhasePoint sample_phase_point(const LaxFamily& fam, const AlgebraRealization& alg, Rng& rng,
                              bool on_shell, bool slice = false);

}  // namespace spincm

#endif
