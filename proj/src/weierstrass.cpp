#include "spincm/weierstrass.hpp"

#include <cmath>

namespace spincm {

namespace {

constexpr int max_series_terms = 320;
constexpr double pole_tol = 1e-8;

// sum_{k>=1} k^pow q2^k / (1 - q2^k)
cplx eisenstein_q_sum(cplx q2, int pow) {
    cplx acc = 0, qk = 1.0;
    for (int k = 1; k < 4000; ++k) {
        qk *= q2;
        const cplx term = std::pow(static_cast<double>(k), pow) * qk / (1.0 - qk);
        acc += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(acc)) && k > 4) return acc;
    }
    throw std::invalid_argument("lattice nome series did not converge (Im(omega2/omega1) too small)");
}

cplx zeta_series(const Lattice& lat, cplx z) {
    const cplx z2 = z * z;
    cplx acc = 1.0 / z;
    cplx zpow = z;  // z^{2k-1}
    int small_run = 0;
    for (std::size_t k = 2; k < lat.c.size(); ++k) {
        zpow *= z2;
        const cplx term = lat.c[k] * zpow / static_cast<double>(2 * k - 1);
        acc -= term;
        if (std::abs(term) < 1e-17 * std::abs(acc)) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
    }
    return acc;
}

cplx log_sigma_over_z_series(const Lattice& lat, cplx z) {
    const cplx z2 = z * z;
    cplx acc = 0;
    cplx zpow = 1.0;  // z^{2k-2}
    int small_run = 0;
    for (std::size_t k = 2; k < lat.c.size(); ++k) {
        zpow *= z2;
        const cplx term = lat.c[k] * zpow * z2 / static_cast<double>(2 * k * (2 * k - 1));
        acc -= term;
        if (std::abs(term) < 1e-17 * (1.0 + std::abs(acc))) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
    }
    return acc;
}

}  // namespace

Lattice::Reduced Lattice::reduce(cplx z) const {
    const cplx p1 = 2.0 * omega1, p2 = 2.0 * omega2;
    const double det = p1.real() * p2.imag() - p2.real() * p1.imag();
    const double a = (p2.imag() * z.real() - p2.real() * z.imag()) / det;
    const double b = (-p1.imag() * z.real() + p1.real() * z.imag()) / det;
    long n = std::lround(a), m = std::lround(b);
    cplx zr = z - static_cast<double>(n) * p1 - static_cast<double>(m) * p2;
    // greedy cleanup for skew bases
    static constexpr int offsets[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                          {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
    bool moved = true;
    int guard = 0;
    while (moved && guard++ < 16) {
        moved = false;
        for (const auto& off : offsets) {
            const int dn = off[0], dm = off[1];
            const cplx cand = zr - static_cast<double>(dn) * p1 - static_cast<double>(dm) * p2;
            if (std::abs(cand) < std::abs(zr) * (1.0 - 1e-15)) {
                zr = cand;
                n += dn;
                m += dm;
                moved = true;
            }
        }
    }
    return {zr, n, m};
}

Lattice make_lattice(cplx omega1, cplx omega2) {
    Lattice lat;
    lat.omega1 = omega1;
    lat.omega2 = omega2;
    const cplx tau = omega2 / omega1;
    if (!(tau.imag() > 0))
        throw std::invalid_argument("make_lattice: Im(omega2/omega1) must be positive");

    // Eisenstein series of weight 4 and 6 through the nome q = exp(i pi tau).
    const cplx q = std::exp(cplx(0, pi) * tau);
    const cplx q2 = q * q;
    const cplx e4 = 1.0 + 240.0 * eisenstein_q_sum(q2, 3);
    const cplx e6 = 1.0 - 504.0 * eisenstein_q_sum(q2, 5);
    const cplx w1_4 = std::pow(omega1, 4), w1_6 = std::pow(omega1, 6);
    lat.g2 = std::pow(pi, 4) / (12.0 * w1_4) * e4;
    lat.g3 = std::pow(pi, 6) / (216.0 * w1_6) * e6;

    const cplx disc = lat.g2 * lat.g2 * lat.g2 - 27.0 * lat.g3 * lat.g3;
    const double disc_scale = std::pow(std::abs(omega1), -12.0);
    if (std::abs(disc) < 1e-12 * std::max(1.0, disc_scale))
        throw std::invalid_argument("make_lattice: vanishing discriminant g2^3 - 27 g3^2");

    lat.nearest_nonzero = 1e300;
    for (int n = -3; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m) {
            if (n == 0 && m == 0) continue;
            lat.nearest_nonzero = std::min(
                lat.nearest_nonzero, std::abs(2.0 * (static_cast<double>(n) * omega1 +
                                                     static_cast<double>(m) * omega2)));
        }

    // c_k recursion for the Laurent tail of wp around 0
    lat.c.assign(max_series_terms, 0.0);
    lat.c[2] = lat.g2 / 20.0;
    lat.c[3] = lat.g3 / 28.0;
    for (int k = 4; k < max_series_terms; ++k) {
        cplx s = 0;
        for (int m = 2; m <= k - 2; ++m) s += lat.c[m] * lat.c[k - m];
        lat.c[k] = 3.0 / ((2 * k + 1) * (k - 3)) * s;
    }

    // The series at the reduced representative must converge everywhere in the
    // cell; reject lattices whose covering radius reaches the disk boundary.
    double worst = 0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const cplx z = (i / 20.0 - 0.5) * 2.0 * omega1 + (j / 20.0 - 0.5) * 2.0 * omega2;
            worst = std::max(worst, std::abs(lat.reduce(z).z));
        }
    if (worst > 0.985 * lat.nearest_nonzero)
        throw std::invalid_argument(
            "make_lattice: lattice too elongated for series evaluation in the reduced cell");

    lat.eta1 = zeta_series(lat, omega1);
    lat.eta2 = zeta_series(lat, omega2);
    lat.legendre_residual =
        std::abs(lat.eta1 * omega2 - lat.eta2 * omega1 - cplx(0, pi / 2.0));
    if (lat.legendre_residual > 1e-9)
        throw std::logic_error("make_lattice: Legendre relation residual too large");
    return lat;
}

cplx wp(const Lattice& lat, cplx z, int order) {
    if (order < 0) throw std::invalid_argument("wp: negative derivative order");
    const auto red = lat.reduce(z);
    z = red.z;
    if (std::abs(z) < pole_tol)
        throw PoleProximityError("wp: z within 1e-8 of a lattice point");
    // principal part: d^j/dz^j z^{-2} = (-1)^j (j+1)! z^{-(j+2)}
    double fact = 1.0;
    for (int q = 2; q <= order + 1; ++q) fact *= q;
    const double psign = order % 2 == 0 ? 1.0 : -1.0;
    cplx acc = psign * fact * std::pow(z, -(order + 2));
    int small_run = 0;
    for (std::size_t k = 2; k < lat.c.size(); ++k) {
        const int e = static_cast<int>(2 * k - 2);
        if (e < order) continue;
        double deriv = 1.0;
        for (int q = 0; q < order; ++q) deriv *= (e - q);
        const cplx term = lat.c[k] * deriv * std::pow(z, e - order);
        acc += term;
        if (std::abs(term) < 1e-17 * (1.0 + std::abs(acc)) && e > order + 2) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
    }
    return acc;
}

cplx weier_zeta(const Lattice& lat, cplx z) {
    const auto red = lat.reduce(z);
    if (std::abs(red.z) < pole_tol)
        throw PoleProximityError("zeta: z within 1e-8 of a lattice point");
    return zeta_series(lat, red.z) + 2.0 * static_cast<double>(red.n) * lat.eta1 +
           2.0 * static_cast<double>(red.m) * lat.eta2;
}

cplx weier_sigma(const Lattice& lat, cplx z) {
    const auto red = lat.reduce(z);
    const cplx sig_red = red.z * std::exp(log_sigma_over_z_series(lat, red.z));
    if (red.n == 0 && red.m == 0) return sig_red;
    const cplx lam = 2.0 * (static_cast<double>(red.n) * lat.omega1 +
                            static_cast<double>(red.m) * lat.omega2);
    const cplx eta = 2.0 * (static_cast<double>(red.n) * lat.eta1 +
                            static_cast<double>(red.m) * lat.eta2);
    const double sign = (red.n + red.m + red.n * red.m) % 2 == 0 ? 1.0 : -1.0;
    return sign * sig_red * std::exp(eta * (red.z + lam / 2.0));
}

double principal_part_coefficient(int j) {
    if (j < 2) throw std::invalid_argument("principal_part_coefficient: j must be >= 2");
    double fact = 1.0;
    for (int q = 2; q <= j - 1; ++q) fact *= q;
    return (j % 2 == 0 ? 1.0 : -1.0) * fact;
}

}  // namespace spincm
