#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spincm/weierstrass.hpp"

using namespace spincm;

namespace {
const Lattice& test_lattice() {
    // generic rectangular lattice, tau = 1.3i
    static const Lattice lat = make_lattice(cplx(0.5, 0), cplx(0, 0.65));
    return lat;
}
}  // namespace

TEST_CASE("lattice construction and the Legendre relation") {
    const Lattice& lat = test_lattice();
    CHECK(lat.legendre_residual < 1e-9);
    CHECK(std::abs(lat.g2 * lat.g2 * lat.g2 - 27.0 * lat.g3 * lat.g3) > 1.0);
    CHECK_THROWS_AS(make_lattice(cplx(0.5, 0), cplx(0.65, 0)), std::invalid_argument);
    // elongated lattices are outside the series evaluation region
    CHECK_THROWS_AS(make_lattice(cplx(0.5, 0), cplx(0, 12.0)), std::invalid_argument);
}

TEST_CASE("invariants agree with direct lattice sums") {
    const Lattice& lat = test_lattice();
    // plain block sums converge slowly; generous K and loose tolerance
    const cplx g2_sum = oracle::g2_lattice_sum(lat.omega1, lat.omega2, 300);
    const cplx g3_sum = oracle::g3_lattice_sum(lat.omega1, lat.omega2, 300);
    CHECK(std::abs(lat.g2 - g2_sum) < 1e-5 * std::abs(lat.g2));
    CHECK(std::abs(lat.g3 - g3_sum) < 1e-6 * std::abs(lat.g3));
}

TEST_CASE("wp, zeta and sigma against the lattice-sum oracle") {
    const Lattice& lat = test_lattice();
    Rng rng(31);
    for (int s = 0; s < 10; ++s) {
        cplx z;
        do {
            z = rng.annulus(0.1, 0.55);
        } while (lat.lattice_distance(z) < 0.08);
        const cplx pw = wp(lat, z);
        CHECK(std::abs(pw - oracle::wp_lattice_sum(lat, z)) < 1e-7 * std::max(1.0, std::abs(pw)));
        const cplx zw = weier_zeta(lat, z);
        CHECK(std::abs(zw - oracle::zeta_lattice_sum(lat, z)) <
              1e-7 * std::max(1.0, std::abs(zw)));
        const cplx sw = weier_sigma(lat, z);
        CHECK(std::abs(sw - oracle::sigma_lattice_sum(lat, z)) <
              1e-7 * std::max(1.0, std::abs(sw)));
    }
}

TEST_CASE("wp basics") {
    const Lattice& lat = test_lattice();
    Rng rng(32);
    const cplx z = cplx(0.21, 0.17);

    SUBCASE("evenness and double periodicity") {
        CHECK(std::abs(wp(lat, -z) - wp(lat, z)) < 1e-12 * std::abs(wp(lat, z)));
        for (int j = 0; j <= 2; ++j) {
            const cplx base = wp(lat, z, j);
            CHECK(std::abs(wp(lat, z + 2.0 * lat.omega1, j) - base) < 1e-8 * std::abs(base));
            CHECK(std::abs(wp(lat, z + 2.0 * lat.omega2, j) - base) < 1e-8 * std::abs(base));
        }
    }
    SUBCASE("Laurent behavior near zero") {
        const cplx small(1e-3, 0);
        const cplx rem = wp(lat, small) - 1.0 / (small * small) - lat.g2 / 20.0 * small * small;
        CHECK(std::abs(rem) < 1e-9);
    }
    SUBCASE("differential equation") {
        for (int s = 0; s < 5; ++s) {
            cplx w;
            do {
                w = rng.annulus(0.12, 0.5);
            } while (lat.lattice_distance(w) < 0.08);
            const cplx p0 = wp(lat, w), p1 = wp(lat, w, 1);
            const cplx res = p1 * p1 - (4.0 * p0 * p0 * p0 - lat.g2 * p0 - lat.g3);
            CHECK(std::abs(res) < 1e-8 * std::max(1.0, std::abs(p1 * p1)));
        }
    }
    SUBCASE("derivatives consistent with finite differences") {
        const double h = 1e-5;
        for (int j = 0; j <= 3; ++j) {
            const cplx fd = (wp(lat, z + h, j) - wp(lat, z - h, j)) / (2.0 * h);
            CHECK(std::abs(fd - wp(lat, z, j + 1)) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
    SUBCASE("pole proximity raises") {
        CHECK_THROWS_AS(wp(lat, cplx(1e-9, 0)), PoleProximityError);
        CHECK_THROWS_AS(wp(lat, cplx(1.0, 1.3) + cplx(1e-9, 0)), PoleProximityError);
        CHECK_THROWS_AS(weier_zeta(lat, cplx(0, 1e-10)), PoleProximityError);
    }
}

TEST_CASE("zeta and sigma") {
    const Lattice& lat = test_lattice();
    const cplx z(0.17, 0.21);

    SUBCASE("zeta is odd, zeta' = -wp") {
        CHECK(std::abs(weier_zeta(lat, -z) + weier_zeta(lat, z)) < 1e-12);
        const double h = 1e-5;
        const cplx zd = (weier_zeta(lat, z + h) - weier_zeta(lat, z - h)) / (2.0 * h);
        CHECK(std::abs(zd + wp(lat, z)) < 1e-6 * std::abs(wp(lat, z)));
    }
    SUBCASE("zeta quasi-periodicity") {
        CHECK(std::abs(weier_zeta(lat, z + 2.0 * lat.omega1) - weier_zeta(lat, z) -
                       2.0 * lat.eta1) < 1e-8);
        CHECK(std::abs(weier_zeta(lat, z + 2.0 * lat.omega2) - weier_zeta(lat, z) -
                       2.0 * lat.eta2) < 1e-8);
    }
    SUBCASE("sigma normalization and quasi-periodicity") {
        const cplx tiny(1e-4, 0);
        CHECK(std::abs(weier_sigma(lat, tiny) / tiny - 1.0) < 1e-6);
        const cplx lhs = weier_sigma(lat, z + 2.0 * lat.omega1);
        const cplx rhs =
            -weier_sigma(lat, z) * std::exp(2.0 * lat.eta1 * (z + lat.omega1));
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(lhs));
    }
}

TEST_CASE("principal part coefficients") {
    CHECK(principal_part_coefficient(2) == 1.0);
    CHECK(principal_part_coefficient(3) == -2.0);
    // (-1)^5 4! = -24; cross-checked below against the actual derivative
    CHECK(principal_part_coefficient(5) == -24.0);
    CHECK_THROWS_AS(principal_part_coefficient(1), std::invalid_argument);

    // wp^{(j-2)}(z) ~ ppc(j) / z^j near zero
    const Lattice& lat = test_lattice();
    const cplx z(4e-3, 3e-3);
    for (int j = 2; j <= 5; ++j) {
        const cplx lead = principal_part_coefficient(j) / std::pow(z, j);
        CHECK(std::abs(wp(lat, z, j - 2) - lead) < 1e-4 * std::abs(lead));
    }
}
