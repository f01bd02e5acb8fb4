#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spincm/invariants.hpp"

using namespace spincm;

namespace {

AlgebraElement random_element(const AlgebraRealization& alg, Rng& rng, bool unit = true) {
    Vector c(alg.dim);
    for (int i = 0; i < alg.dim; ++i) c[i] = rng.annulus(0.3, 1.0);
    AlgebraElement x = alg.element(std::move(c));
    if (unit) x = x * (1.0 / x.frobenius());
    return x;
}

}  // namespace

TEST_CASE("generator degrees match the exponent data") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const auto g1 = primitive_invariants(a1);
    REQUIRE(g1.size() == 1);
    CHECK(g1[0].degree == 2);
    CHECK(g1[0].power == 2);

    const auto g2 = primitive_invariants(realize(build_root_system('A', 2)));
    CHECK(g2[0].degree == 2);
    CHECK(g2[1].degree == 3);

    const auto gd = primitive_invariants(realize(build_root_system('D', 4)));
    REQUIRE(gd.size() == 4);
    CHECK(gd[0].degree == 2);
    CHECK(gd[1].degree == 4);
    CHECK(gd[2].degree == 4);
    CHECK(gd[3].degree == 6);
    CHECK(gd[2].kind == PrimitiveInvariant::Kind::pfaffian);
}

TEST_CASE("pfaffian by recursive expansion") {
    Matrix a = Matrix::Zero(4, 4);
    a(0, 1) = 2.0;
    a(1, 0) = -2.0;
    a(2, 3) = cplx(0, 3);
    a(3, 2) = cplx(0, -3);
    CHECK(std::abs(pfaffian(a) - cplx(0, 6)) < 1e-14);  // pf = a01 a23

    // pf(A)^2 = det(A) on a random antisymmetric matrix
    Rng rng(21);
    Matrix b = Matrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            b(i, j) = rng.annulus(0.3, 1.0);
            b(j, i) = -b(i, j);
        }
    const cplx pf = pfaffian(b);
    CHECK(std::abs(pf * pf - b.determinant()) < 1e-10 * std::abs(b.determinant()));
}

TEST_CASE("invariants are homogeneous and invariant under conjugation") {
    Rng rng(22);
    for (auto [t, r] : {std::pair<char, int>{'A', 2}, {'B', 2}, {'D', 4}}) {
        const AlgebraRealization alg = realize(build_root_system(t, r));
        const auto gens = primitive_invariants(alg);
        for (int s = 0; s < 5; ++s) {
            const AlgebraElement x = random_element(alg, rng);
            const cplx tt = rng.annulus(0.5, 1.5);
            for (const auto& g : gens) {
                CHECK(std::abs(g(x * tt) - std::pow(tt, g.degree) * g(x)) <
                      1e-9 * std::abs(g(x * tt)) + 1e-12);
                // invariance under the torus
                Vector h(alg.roots.rank);
                for (int i = 0; i < alg.roots.rank; ++i) h[i] = rng.annulus(0.1, 0.4);
                CHECK(std::abs(g(alg.torus_adjoint(h, x)) - g(x)) <
                      1e-9 * std::max(1.0, std::abs(g(x))));
            }
        }
    }
    // cross-check invariance under conjugation by exp of a nilpotent matrix
    const AlgebraRealization alg = realize(build_root_system('A', 2));
    const auto gens = primitive_invariants(alg);
    Rng rng2(23);
    const AlgebraElement x = random_element(alg, rng2);
    Matrix nil = Matrix::Zero(3, 3);
    nil(0, 1) = rng2.annulus(0.2, 0.6);
    nil(0, 2) = rng2.annulus(0.2, 0.6);
    nil(1, 2) = rng2.annulus(0.2, 0.6);
    const Matrix g = (Matrix::Identity(3, 3) + nil + 0.5 * nil * nil);  // exp, nil^3 = 0
    const Matrix conj = g * x.matrix() * g.inverse();
    for (const auto& gen : gens)
        CHECK(std::abs(gen.eval(conj) - gen(x)) < 1e-9 * std::max(1.0, std::abs(gen(x))));
}

TEST_CASE("polarization pairing reproduces the Taylor identity") {
    Rng rng(24);
    const AlgebraRealization alg = realize(build_root_system('A', 2));
    const auto gens = primitive_invariants(alg);
    for (const auto& g : gens) {
        const AlgebraElement x = random_element(alg, rng, false);
        DirectionMultiset ds;
        ds.items.push_back({x, g.degree});
        double fact = 1;
        for (int q = 2; q <= g.degree; ++q) fact *= q;
        const auto pr = pairing(ds, g);
        CHECK(pr.degree_matched);
        CHECK(std::abs(pr.value / fact - g(x)) < 1e-10 * std::max(1.0, std::abs(g(x))));
    }
}

TEST_CASE("pairing with mismatched total degree is zero and flagged") {
    Rng rng(25);
    const AlgebraRealization alg = realize(build_root_system('A', 2));
    const auto gens = primitive_invariants(alg);
    DirectionMultiset ds;
    ds.items.push_back({random_element(alg, rng), gens[1].degree - 1});
    const auto pr = pairing(ds, gens[1]);
    CHECK_FALSE(pr.degree_matched);
    CHECK(pr.value == cplx(0, 0));
}

TEST_CASE("pairing agrees with a nested finite-difference oracle at degree 3") {
    const AlgebraRealization alg = realize(build_root_system('A', 2));
    const auto gens = primitive_invariants(alg);
    const PrimitiveInvariant& cubic = gens[1];
    Rng rng(26);

    Vector pc(2);
    pc[0] = rng.annulus(0.5, 1.0);
    pc[1] = rng.annulus(0.5, 1.0);
    const AlgebraElement p = alg.cartan_element(pc);
    const AlgebraElement ea = alg.basis_element(alg.root_coord(alg.root_index({1, 0})));
    const AlgebraElement en = alg.basis_element(alg.root_coord(alg.root_index({-1, 0})));

    DirectionMultiset ds;
    ds.items.push_back({p, 1});
    ds.items.push_back({ea, 1});
    ds.items.push_back({en, 1});
    const cplx via_pairing = pairing(ds, cubic).value;
    const cplx via_fd = oracle::third_mixed_fd(
        [&](const Matrix& m) { return cubic.eval(m); }, p.matrix(), ea.matrix(), en.matrix());
    CHECK(std::abs(via_pairing - via_fd) < 1e-6 * std::max(1.0, std::abs(via_fd)));
}

TEST_CASE("weight selection rule") {
    const AlgebraRealization alg = realize(build_root_system('A', 2));
    const auto gens = primitive_invariants(alg);
    Rng rng(27);
    Vector h(2);
    h[0] = rng.annulus(0.5, 1.0);
    h[1] = rng.annulus(0.5, 1.0);

    SUBCASE("nonzero weight forces a vanishing pairing") {
        WeightedMultiset wm;  // d_p^2 d_{e_alpha1}: weight alpha1 != 0
        wm.cartan_dir = h;
        wm.cartan_mult = 2;
        wm.root_dirs = {{alg.root_index({1, 0}), 1}};
        CHECK(check_weight_selection(alg, wm, gens[1]));
        const auto pr = pairing(to_directions(alg, wm), gens[1]);
        CHECK(std::abs(pr.value) < 1e-10);
    }
    SUBCASE("weight zero is allowed to be nonzero") {
        WeightedMultiset wm;  // d_p d_{e_a} d_{e_-a}
        wm.cartan_dir = h;
        wm.cartan_mult = 1;
        wm.root_dirs = {{alg.root_index({1, 0}), 1}, {alg.root_index({-1, 0}), 1}};
        CHECK(check_weight_selection(alg, wm, gens[1]));  // vacuously true
        const auto pr = pairing(to_directions(alg, wm), gens[1]);
        CHECK(std::abs(pr.value) > 1e-3);  // generically nonzero
    }
}

TEST_CASE("derivative transfer identity") {
    Rng rng(28);
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const auto g1 = primitive_invariants(a1);

    SUBCASE("n = 0 makes the left side vanish") {
        for (int s = 0; s < 5; ++s) {
            const AlgebraElement x = random_element(a1, rng);
            const AlgebraElement y = random_element(a1, rng);
            const AlgebraElement z = random_element(a1, rng);
            const auto tc = check_transfer_identity(a1, x, y, z, g1[0].degree - 1, 0, g1[0]);
            CHECK(tc.ok);
            CHECK(std::abs(tc.lhs) < 1e-9);
        }
    }
    SUBCASE("m = 0, n = 1 on the quadratic invariant") {
        const AlgebraElement x = random_element(a1, rng);
        const AlgebraElement y = random_element(a1, rng);
        const AlgebraElement z = random_element(a1, rng);
        const auto tc = check_transfer_identity(a1, x, y, z, 0, 1, g1[0]);
        CHECK(tc.ok);
    }
    SUBCASE("commuting x, y gives zero on both sides") {
        const AlgebraRealization a2 = realize(build_root_system('A', 2));
        const auto g2 = primitive_invariants(a2);
        const AlgebraElement x = a2.basis_element(0);  // Cartan
        const AlgebraElement y = a2.basis_element(1);  // Cartan, commutes with x
        const AlgebraElement z = random_element(a2, rng);
        const auto tc = check_transfer_identity(a2, x, y, z, 1, 1, g2[1]);
        CHECK(tc.ok);
        CHECK(std::abs(tc.lhs) < 1e-10);
        CHECK(std::abs(tc.rhs) < 1e-10);
    }
    SUBCASE("random cases across algebras") {
        for (auto [t, r] : {std::pair<char, int>{'A', 2}, {'B', 2}}) {
            const AlgebraRealization alg = realize(build_root_system(t, r));
            for (const auto& g : primitive_invariants(alg)) {
                for (int n = 0; n < g.degree; ++n) {
                    const AlgebraElement x = random_element(alg, rng);
                    const AlgebraElement y = random_element(alg, rng);
                    const AlgebraElement z = random_element(alg, rng);
                    CHECK(check_transfer_identity(alg, x, y, z, g.degree - 1 - n, n, g).ok);
                }
            }
        }
    }
}

TEST_CASE("interpolation coefficients of I(p + u xi)") {
    Rng rng(29);
    for (auto [t, r] : {std::pair<char, int>{'A', 2}, {'C', 2}}) {
        const AlgebraRealization alg = realize(build_root_system(t, r));
        const auto gens = primitive_invariants(alg);
        Vector p(alg.roots.rank);
        for (int i = 0; i < alg.roots.rank; ++i) p[i] = rng.annulus(0.5, 1.5);
        AlgebraElement xi = random_element(alg, rng, false);

        SUBCASE("endpoints") {
            for (const auto& g : gens) {
                const auto coef = f_coefficients(alg, p, xi, g);
                REQUIRE(static_cast<int>(coef.size()) == g.degree + 1);
                CHECK(std::abs(coef[0] - g(alg.cartan_element(p))) <
                      1e-10 * std::max(1.0, std::abs(coef[0])));
                CHECK(std::abs(coef[g.degree] - g(xi)) <
                      1e-10 * std::max(1.0, std::abs(coef[g.degree])));
            }
        }
        SUBCASE("vanishing linear term on h-perp") {
            Vector c = xi.coords();
            for (int i = 0; i < alg.roots.rank; ++i) c[i] = 0;
            const AlgebraElement xiperp = alg.element(std::move(c));
            for (const auto& g : gens) {
                const auto coef = f_coefficients(alg, p, xiperp, g);
                CHECK(std::abs(coef[1]) < 1e-10 * std::max(1.0, std::abs(coef[0])));
            }
        }
        SUBCASE("coefficients agree with the polarization pairing") {
            for (const auto& g : gens) {
                const auto coef = f_coefficients(alg, p, xi, g);
                for (int j = 0; j <= g.degree; ++j) {
                    DirectionMultiset ds;
                    if (g.degree - j > 0)
                        ds.items.push_back({alg.cartan_element(p), g.degree - j});
                    if (j > 0) ds.items.push_back({xi, j});
                    double jf = 1, djf = 1;
                    for (int q = 2; q <= j; ++q) jf *= q;
                    for (int q = 2; q <= g.degree - j; ++q) djf *= q;
                    const cplx via_pairing = pairing(ds, g).value / (jf * djf);
                    CHECK(std::abs(via_pairing - coef[j]) <
                          1e-9 * std::max(1.0, std::abs(coef[j])));
                }
            }
        }
    }
}
