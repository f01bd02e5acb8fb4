#ifndef SPINCM_WEIERSTRASS_HPP
#define SPINCM_WEIERSTRASS_HPP

#include <vector>

#include "spincm/common.hpp"

namespace spincm {

// Period lattice 2*omega1 Z + 2*omega2 Z with Im(omega2/omega1) > 0, carrying
// everything needed to evaluate wp, zeta and sigma: the invariants g2, g3
// (from the Eisenstein series in their geometrically convergent nome
// expansion), the Laurent coefficients c_k of wp around 0, and the
// quasi-period constants eta_i = zeta(omega_i).
//
// Evaluation reduces z modulo the lattice to a minimal representative and
// sums the series there; this requires a lattice that is not too elongated
// (the reduced cell must stay inside the convergence disk), which
// make_lattice checks up front.  Truncated lattice sums are deliberately not
// used here; they only appear as an oracle in the test suite.
struct Lattice {
    cplx omega1, omega2;  // half periods
    cplx g2, g3;
    cplx eta1, eta2;  // zeta(omega1), zeta(omega2)

    std::vector<cplx> c;       // c[k] for k >= 2; c[0], c[1] unused
    double nearest_nonzero;    // min |lambda|, lambda in Lattice \ {0}
    double legendre_residual;  // |eta1*omega2 - eta2*omega1 - i pi/2|

    struct Reduced {
        cplx z;     // minimal representative
        long n, m;  // z_original = z + 2n*omega1 + 2m*omega2
    };
    Reduced reduce(cplx z) const;
    double lattice_distance(cplx z) const { return std::abs(reduce(z).z); }
};

// Throws std::invalid_argument if Im(omega2/omega1) <= 0, the discriminant
// vanishes, or the lattice is too elongated for series evaluation.
Lattice make_lattice(cplx omega1, cplx omega2);

// j-th derivative of wp (j = 0 is wp itself).  Throws PoleProximityError
// when z is within 1e-8 of a lattice point.
cplx wp(const Lattice& lat, cplx z, int order = 0);

cplx weier_zeta(const Lattice& lat, cplx z);  // quasi-periodic, poles on the lattice
cplx weier_sigma(const Lattice& lat, cplx z);  // entire

// (-1)^j (j-1)!, the coefficient of z^{-j} in the principal part of
// wp^{(j-2)}; requires j >= 2.
double principal_part_coefficient(int j);

}  // namespace spincm

#endif
