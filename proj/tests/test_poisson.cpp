#include <doctest.h>

#include <cmath>

#include "spincm/poisson.hpp"

using namespace spincm;

namespace {

PhasePoint sample(const AlgebraRealization& alg, std::uint64_t seed, bool on_shell) {
    Rng rng(seed);
    return sample_phase_point(rational_family_full(alg), alg, rng, on_shell);
}

AlgebraElement random_element(const AlgebraRealization& alg, Rng& rng) {
    Vector c(alg.dim);
    for (int i = 0; i < alg.dim; ++i) c[i] = rng.annulus(0.3, 1.0);
    return alg.element(std::move(c));
}

}  // namespace

TEST_CASE("canonical pairs") {
    const AlgebraRealization a2 = realize(build_root_system('A', 2));
    const PhasePoint pt = sample(a2, 61, false);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const cplx qp = poisson_bracket(coordinate_observable(a2, i),
                                            coordinate_observable(a2, 2 + j), a2, pt);
            CHECK(std::abs(qp - (i == j ? 1.0 : 0.0)) < 1e-12);
            const cplx qq = poisson_bracket(coordinate_observable(a2, i),
                                            coordinate_observable(a2, j), a2, pt);
            CHECK(std::abs(qq) < 1e-12);
        }
}

TEST_CASE("antisymmetry and the Lie-Poisson defining property") {
    const AlgebraRealization a2 = realize(build_root_system('A', 2));
    const PhasePoint pt = sample(a2, 62, false);
    Rng rng(63);

    Observable f;
    f.eval = [](const PhasePoint& p) { return p.q[0] * p.p[1] + p.xi.root(0) * p.xi.root(3); };
    CHECK(std::abs(poisson_bracket(f, f, a2, pt)) < 1e-10);

    for (int s = 0; s < 5; ++s) {
        const AlgebraElement a = random_element(a2, rng);
        const AlgebraElement b = random_element(a2, rng);
        Observable fa, fb;
        fa.eval = [&](const PhasePoint& p) { return a2.killing(p.xi, a); };
        fb.eval = [&](const PhasePoint& p) { return a2.killing(p.xi, b); };
        const cplx lhs = poisson_bracket(fa, fb, a2, pt);
        // spin-factor orientation is opposite to the canonical pairs
        const cplx rhs = a2.killing(pt.xi, a2.bracket(b, a));
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("differenced gradients match a Richardson-extrapolated oracle") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const PhasePoint pt = sample(a1, 64, false);
    const LaxFamily fam = rational_family_full(a1);
    Observable h = hamiltonian_observable(fam, a1);
    const Vector g = observable_gradient(h, a1, pt);
    const int C = phase_coord_count(a1);
    for (int c = 0; c < C; ++c) {
        auto diff = [&](double step) {
            return (h.eval(shift_coord(a1, pt, c, step)) -
                    h.eval(shift_coord(a1, pt, c, -step))) /
                   (2.0 * step);
        };
        const cplx d1 = diff(1e-3), d2 = diff(5e-4);
        const cplx rich = (4.0 * d2 - d1) / 3.0;
        CHECK(std::abs(g[c] - rich) < 1e-6 * std::max(1.0, std::abs(rich)));
    }
}

TEST_CASE("Leibniz rule") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const PhasePoint pt = sample(a1, 65, false);
    Observable f, g, h;
    f.eval = [](const PhasePoint& p) { return p.q[0]; };
    g.eval = [&a1](const PhasePoint& p) { return p.p[0] + p.xi.root(0); };
    h.eval = [&a1](const PhasePoint& p) { return p.p[0] * p.xi.root(1); };
    Observable fg;
    fg.eval = [&](const PhasePoint& p) { return f.eval(p) * g.eval(p); };
    const cplx lhs = poisson_bracket(fg, h, a1, pt);
    const cplx rhs =
        f.eval(pt) * poisson_bracket(g, h, a1, pt) + poisson_bracket(f, h, a1, pt) * g.eval(pt);
    CHECK(std::abs(lhs - rhs) < 1e-7 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("Jacobi identity on polynomial observables") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const PhasePoint pt = sample(a1, 66, false);
    Rng rng(67);
    const AlgebraElement a = random_element(a1, rng);
    const AlgebraElement b = random_element(a1, rng);
    Observable f, g, h;
    f.eval = [&a1, a](const PhasePoint& p) { return a1.killing(p.xi, a); };
    g.eval = [&a1, b](const PhasePoint& p) { return a1.killing(p.xi, b) + p.q[0] * p.q[0]; };
    h.eval = [](const PhasePoint& p) { return p.p[0] * p.p[0] + p.q[0]; };
    auto bracket_obs = [&](const Observable& u, const Observable& v) {
        Observable w;
        w.eval = [&a1, u, v](const PhasePoint& p) { return poisson_bracket(u, v, a1, p); };
        w.step = 1e-3;
        return w;
    };
    const cplx jac = poisson_bracket(f, bracket_obs(g, h), a1, pt) +
                     poisson_bracket(g, bracket_obs(h, f), a1, pt) +
                     poisson_bracket(h, bracket_obs(f, g), a1, pt);
    CHECK(std::abs(jac) < 1e-6);
}

TEST_CASE("momentum map") {
    const AlgebraRealization a2 = realize(build_root_system('A', 2));
    PhasePoint pt = sample(a2, 68, true);
    CHECK(momentum_map(pt).norm() < 1e-12);  // xi in h-perp
    Vector c = Vector::Zero(a2.dim);
    c[0] = 1.0;  // xi = x_1
    pt.xi = a2.element(std::move(c));
    const Vector j = momentum_map(pt);
    CHECK(std::abs(j[0] + 1.0) < 1e-15);
    CHECK(std::abs(j[1]) < 1e-15);
}

TEST_CASE("free motion when xi = 0") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const LaxFamily fam = rational_family_full(a1);
    const auto gens = primitive_invariants(a1);
    PhasePoint start = sample(a1, 69, true);
    start.xi = a1.zero();
    const Observable h = hamiltonian_observable(fam, a1);
    const FlowResult fr = flow(h, fam, a1, gens, start, 1.0, 1e-10);
    REQUIRE(fr.completed);
    const auto& last = fr.trajectory.back();
    CHECK(std::abs(last.t - 1.0) < 1e-12);
    CHECK((last.q - (start.q + start.p)).norm() < 1e-8);
    CHECK((last.p - start.p).norm() < 1e-10);
}

TEST_CASE("time derivative along the flow equals the bracket with H") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const LaxFamily fam = rational_family_full(a1);
    const auto gens = primitive_invariants(a1);
    const PhasePoint start = sample(a1, 70, true);
    const Observable h = hamiltonian_observable(fam, a1);

    Observable f;
    f.eval = [&a1](const PhasePoint& p) { return p.q[0] * p.q[0] + p.xi.root(0) * p.p[0]; };

    const double dt = 1e-4;
    const FlowResult fwd = flow(h, fam, a1, gens, start, dt, 1e-12);
    REQUIRE(fwd.completed);
    const auto& st = fwd.trajectory.back();
    const PhasePoint moved{st.q, st.p, a1.element(st.xi)};
    const cplx rate = (f.eval(moved) - f.eval(start)) / dt;
    const cplx br = poisson_bracket(f, h, a1, start);
    CHECK(std::abs(rate - br) < 1e-6 * std::max(1.0, std::abs(br)) + 5e-4 * std::abs(rate));
}

TEST_CASE("conservation along an on-shell rational flow") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const LaxFamily fam = rational_family_full(a1);
    const auto gens = primitive_invariants(a1);
    Rng rng(71);
    const PhasePoint start = sample_phase_point(fam, a1, rng, true);
    const Observable h = hamiltonian_observable(fam, a1);
    const FlowResult fr = flow(h, fam, a1, gens, start, 1.0, 1e-10);
    REQUIRE(fr.completed);
    CHECK(fr.max_integral_drift < 1e-6);
    CHECK(fr.momentum_drift < 1e-8);
    CHECK(fr.hamiltonian_drift < 1e-6);
}

TEST_CASE("flow velocity agrees with per-coordinate brackets against H") {
    // rank 2 so the spin part actually moves (at rank 1 it is constant on shell)
    const AlgebraRealization a2 = realize(build_root_system('A', 2));
    const LaxFamily fam = rational_family_full(a2);
    const auto gens = primitive_invariants(a2);
    const PhasePoint start = sample(a2, 72, true);
    const Observable h = hamiltonian_observable(fam, a2);

    // very short exact step to read the velocity off the trajectory
    const double dt = 1e-5;
    const FlowResult fr = flow(h, fam, a2, gens, start, dt, 1e-13);
    REQUIRE(fr.completed);
    const auto& st = fr.trajectory.back();
    const int C = phase_coord_count(a2);
    Vector y0(C), y1(C);
    y0.head(2) = start.q;
    y0.segment(2, 2) = start.p;
    y0.tail(a2.dim) = start.xi.coords();
    y1.head(2) = st.q;
    y1.segment(2, 2) = st.p;
    y1.tail(a2.dim) = st.xi;
    double moved = 0;
    for (int c = 0; c < C; ++c) {
        const cplx vel = (y1[c] - y0[c]) / dt;
        const cplx br = poisson_bracket(coordinate_observable(a2, c), h, a2, start);
        CHECK(std::abs(vel - br) < 1e-4 * std::max(1.0, std::abs(br)));
        if (c >= 4) moved = std::max(moved, std::abs(vel));
    }
    CHECK(moved > 1e-3);  // nontrivial spin dynamics
}

TEST_CASE("conservation along an on-shell rational flow at rank 2") {
    const AlgebraRealization a2 = realize(build_root_system('A', 2));
    const LaxFamily fam = rational_family_full(a2);
    const auto gens = primitive_invariants(a2);
    Rng rng(73);
    const PhasePoint start = sample_phase_point(fam, a2, rng, true);
    const Observable h = hamiltonian_observable(fam, a2);
    const FlowResult fr = flow(h, fam, a2, gens, start, 1.0, 1e-10);
    REQUIRE(fr.completed);
    CHECK(fr.max_integral_drift < 1e-6);
    CHECK(fr.momentum_drift < 1e-8);
}

TEST_CASE("flow refuses a singular start and stops early at the singular set") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const LaxFamily fam = rational_family_full(a1);
    const auto gens = primitive_invariants(a1);
    const Observable h = hamiltonian_observable(fam, a1);

    SUBCASE("singular initial point") {
        Vector q = Vector::Zero(1), p(1);
        p[0] = 1.0;
        const FlowResult fr = flow(h, fam, a1, gens, PhasePoint{q, p, a1.zero()}, 1.0, 1e-8);
        CHECK_FALSE(fr.completed);
        CHECK(fr.stop_reason == "initial point is singular");
    }
    SUBCASE("attractive spin coupling drives q into the singular set") {
        Vector q(1), p(1);
        q[0] = 1.0;
        p[0] = -1.0;
        Vector xi = Vector::Zero(a1.dim);
        xi[a1.root_coord(0)] = 0.5;
        xi[a1.root_coord(1)] = 0.5;  // xi_a xi_-a > 0: potential -c/alpha(q)^2
        const FlowResult fr =
            flow(h, fam, a1, gens, PhasePoint{q, p, a1.element(std::move(xi))}, 5.0, 1e-8);
        CHECK_FALSE(fr.completed);
        CHECK(fr.stop_reason == "trajectory approached the singular set");
        REQUIRE(fr.trajectory.size() > 1);  // partial data reported
        CHECK(fr.trajectory.back().t > 0.0);
        CHECK(fr.trajectory.back().t < 5.0);
    }
}

TEST_CASE("commutation report on the smallest rational case") {
    const AlgebraRealization a1 = realize(build_root_system('A', 1));
    const LaxFamily fam = rational_family_full(a1);
    const auto gens = primitive_invariants(a1);
    const CommutationReport cr = commutation_report(fam, a1, gens, 2, 77);
    CHECK(cr.max_on_shell < 1e-7);
    CHECK(cr.off_shell_witness > 10.0 * cr.max_on_shell);
    CHECK(cr.off_shell_witness > 1e-3);
    // rank 1 entries are quadratic, so order-2 differencing is already exact:
    // the convergence probe must report roundoff-level residuals instead of a ratio
    CHECK_FALSE(cr.convergence_meaningful);
    CHECK(cr.coarse_residual < 1e-11);
}

TEST_CASE("commutation convergence ratio is quadratic where differencing truncates") {
    const AlgebraRealization a2 = realize(build_root_system('A', 2));
    const LaxFamily fam = rational_family_full(a2);
    const auto gens = primitive_invariants(a2);
    const CommutationReport cr = commutation_report(fam, a2, gens, 1, 78);
    CHECK(cr.convergence_meaningful);
    CHECK(cr.convergence_ratio > 2.0);
    CHECK(cr.convergence_ratio < 8.0);
}
