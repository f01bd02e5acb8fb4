#ifndef SPINCM_TESTS_ORACLES_HPP
#define SPINCM_TESTS_ORACLES_HPP

// Independent reference implementations used only by the test suite: direct
// lattice summation for the elliptic functions and nested central differences
// for mixed directional derivatives.  These deliberately avoid the series
// code paths of the library.

#include <complex>
#include <functional>

#include "spincm/common.hpp"
#include "spincm/weierstrass.hpp"

namespace spincm::oracle {

// Enumerates one representative of each +/- lattice pair within the index
// block max(|m|, |n|) <= K.
template <typename F>
void for_lattice_pairs(int K, const F& f) {
    for (int n = 1; n <= K; ++n) f(0, n);
    for (int m = 1; m <= K; ++m)
        for (int n = -K; n <= K; ++n) f(m, n);
}

// sum over all nonzero lambda of lambda^-4 inside the block (both signs)
inline cplx block_sum_pow4(cplx w1, cplx w2, int K) {
    cplx s = 0;
    for_lattice_pairs(K, [&](int m, int n) {
        const cplx lam = 2.0 * (static_cast<double>(m) * w1 + static_cast<double>(n) * w2);
        s += 2.0 / (lam * lam * lam * lam);
    });
    return s;
}

inline cplx g2_lattice_sum(cplx w1, cplx w2, int K) { return 60.0 * block_sum_pow4(w1, w2, K); }

inline cplx g3_lattice_sum(cplx w1, cplx w2, int K) {
    cplx s = 0;
    for_lattice_pairs(K, [&](int m, int n) {
        const cplx lam = 2.0 * (static_cast<double>(m) * w1 + static_cast<double>(n) * w2);
        const cplx l2 = lam * lam;
        s += 2.0 / (l2 * l2 * l2);
    });
    return 140.0 * s;
}

// wp by direct summation over +/- pairs, with the quartic tail replaced by
// its exact value through g2 (computed independently via the nome series).
inline cplx wp_lattice_sum(const Lattice& lat, cplx z, int K = 120) {
    cplx acc = 1.0 / (z * z);
    cplx partial4 = 0;
    for_lattice_pairs(K, [&](int m, int n) {
        const cplx lam =
            2.0 * (static_cast<double>(m) * lat.omega1 + static_cast<double>(n) * lat.omega2);
        const cplx l2 = lam * lam, z2 = z * z;
        acc += (6.0 * l2 * z2 - 2.0 * z2 * z2) / (l2 * (l2 - z2) * (l2 - z2));
        partial4 += 2.0 / (l2 * l2);
    });
    const cplx tail4 = lat.g2 / 60.0 - partial4;
    return acc + 3.0 * z * z * tail4;
}

inline cplx zeta_lattice_sum(const Lattice& lat, cplx z, int K = 120) {
    cplx acc = 1.0 / z;
    cplx partial4 = 0;
    for_lattice_pairs(K, [&](int m, int n) {
        const cplx lam =
            2.0 * (static_cast<double>(m) * lat.omega1 + static_cast<double>(n) * lat.omega2);
        const cplx l2 = lam * lam, z2 = z * z;
        acc += 2.0 * z * z2 / (l2 * (z2 - l2));
        partial4 += 2.0 / (l2 * l2);
    });
    const cplx tail4 = lat.g2 / 60.0 - partial4;
    return acc - z * z * z * tail4;
}

inline cplx sigma_lattice_sum(const Lattice& lat, cplx z, int K = 120) {
    cplx logacc = std::log(z);
    cplx partial4 = 0;
    for_lattice_pairs(K, [&](int m, int n) {
        const cplx lam =
            2.0 * (static_cast<double>(m) * lat.omega1 + static_cast<double>(n) * lat.omega2);
        const cplx u = z / lam;
        logacc += std::log(1.0 - u) + std::log(1.0 + u) + u * u;
        partial4 += 2.0 / (lam * lam * lam * lam);
    });
    const cplx tail4 = lat.g2 / 60.0 - partial4;
    return std::exp(logacc - z * z * z * z * tail4 / 4.0);
}

// third-order mixed directional derivative of f at 0 by nested central
// differences; exact for cubic polynomials
inline cplx third_mixed_fd(const std::function<cplx(const Matrix&)>& f, const Matrix& a,
                           const Matrix& b, const Matrix& c, double h = 0.5) {
    cplx acc = 0;
    for (int sa = -1; sa <= 1; sa += 2)
        for (int sb = -1; sb <= 1; sb += 2)
            for (int sc = -1; sc <= 1; sc += 2) {
                const Matrix x = h * (static_cast<double>(sa) * a + static_cast<double>(sb) * b +
                                      static_cast<double>(sc) * c);
                acc += static_cast<double>(sa * sb * sc) * f(x);
            }
    return acc / (8.0 * h * h * h);
}

}  // namespace spincm::oracle

#endif
