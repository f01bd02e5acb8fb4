#include "spincm/poisson.hpp"

#include <cmath>
#include <sstream>

namespace spincm {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double dp_c[7] = {0, 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1., 1.};
constexpr double dp_a[7][6] = {
    {},
    {1. / 5},
    {3. / 40, 9. / 40},
    {44. / 45, -56. / 15, 32. / 9},
    {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
    {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
    {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
constexpr double dp_b5[7] = {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84, 0.};
constexpr double dp_b4[7] = {5179. / 57600,    0.,           7571. / 16695, 393. / 640,
                             -92097. / 339200, 187. / 2100., 1. / 40};

Vector pack(const AlgebraRealization& alg, const PhasePoint& pt) {
    const int N = alg.roots.rank;
    Vector y(phase_coord_count(alg));
    y.head(N) = pt.q;
    y.segment(N, N) = pt.p;
    y.tail(alg.dim) = pt.xi.coords();
    return y;
}

PhasePoint unpack(const AlgebraRealization& alg, const Vector& y) {
    const int N = alg.roots.rank;
    return PhasePoint{y.head(N), y.segment(N, N), alg.element(y.tail(alg.dim))};
}

}  // namespace

int phase_coord_count(const AlgebraRealization& alg) { return 2 * alg.roots.rank + alg.dim; }

PhasePoint shift_coord(const AlgebraRealization& alg, const PhasePoint& pt, int coord,
                       double delta) {
    const int N = alg.roots.rank;
    PhasePoint out = pt;
    if (coord < N)
        out.q[coord] += delta;
    else if (coord < 2 * N)
        out.p[coord - N] += delta;
    else {
        Vector c = pt.xi.coords();
        c[coord - 2 * N] += delta;
        out.xi = alg.element(std::move(c));
    }
    return out;
}

Vector observable_gradient(const Observable& f, const AlgebraRealization& alg,
                           const PhasePoint& pt) {
    if (f.grad) return f.grad(pt);
    const int C = phase_coord_count(alg);
    const double h = f.step;
    Vector g(C);
    for (int c = 0; c < C; ++c) {
        if (f.order >= 4) {
            const cplx f2p = f.eval(shift_coord(alg, pt, c, 2 * h));
            const cplx f1p = f.eval(shift_coord(alg, pt, c, h));
            const cplx f1m = f.eval(shift_coord(alg, pt, c, -h));
            const cplx f2m = f.eval(shift_coord(alg, pt, c, -2 * h));
            g[c] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
        } else {
            const cplx f1p = f.eval(shift_coord(alg, pt, c, h));
            const cplx f1m = f.eval(shift_coord(alg, pt, c, -h));
            g[c] = (f1p - f1m) / (2.0 * h);
        }
    }
    return g;
}

cplx poisson_bracket_grads(const AlgebraRealization& alg, const PhasePoint& pt, const Vector& gf,
                           const Vector& gg) {
    const int N = alg.roots.rank, P = alg.positive_count();
    cplx canonical = 0;
    for (int i = 0; i < N; ++i) canonical += gf[i] * gg[N + i] - gf[N + i] * gg[i];

    // xi-gradient as an algebra element through the dual basis:
    // d/dxi_i -> x_i, d/dxi_alpha -> e_{-alpha}
    auto lift = [&](const Vector& g) {
        Vector c = Vector::Zero(alg.dim);
        for (int i = 0; i < N; ++i) c[i] = g[2 * N + i];
        for (int r = 0; r < 2 * P; ++r)
            c[alg.root_coord(alg.negate_root(r))] = g[2 * N + alg.root_coord(r)];
        return alg.element(std::move(c));
    };
    const AlgebraElement nf = lift(gf), ng = lift(gg);
    // The spin term carries the opposite orientation to the canonical pairs;
    // with both terms positive the Lax pullbacks fail to commute on the zero
    // momentum level, with this relative sign they commute to differencing
    // accuracy.
    return canonical - alg.killing(pt.xi, alg.bracket(nf, ng));
}

cplx poisson_bracket(const Observable& f, const Observable& g, const AlgebraRealization& alg,
                     const PhasePoint& pt) {
    return poisson_bracket_grads(alg, pt, observable_gradient(f, alg, pt),
                                 observable_gradient(g, alg, pt));
}

Vector momentum_map(const PhasePoint& pt) { return -pt.xi.cartan_part(); }

Observable hamiltonian_observable(const LaxFamily& fam, const AlgebraRealization& alg) {
    Observable h;
    h.eval = [&fam, &alg](const PhasePoint& pt) { return hamiltonian(fam, alg, pt); };
    return h;
}

Observable coordinate_observable(const AlgebraRealization& alg, int coord) {
    Observable f;
    const int C = phase_coord_count(alg);
    const int N = alg.roots.rank;
    f.eval = [coord, N, &alg](const PhasePoint& pt) -> cplx {
        if (coord < N) return pt.q[coord];
        if (coord < 2 * N) return pt.p[coord - N];
        return pt.xi.coords()[coord - 2 * N];
    };
    f.grad = [coord, C](const PhasePoint&) {
        Vector g = Vector::Zero(C);
        g[coord] = 1.0;
        return g;
    };
    return f;
}

Observable table_entry_observable(const LaxFamily& fam, const AlgebraRealization& alg,
                                  const std::vector<PrimitiveInvariant>& invs, int k, int j) {
    Observable f;
    f.eval = [&fam, &alg, &invs, k, j](const PhasePoint& pt) {
        return extract_integrals(fam, alg, invs, pt).at(k, j);
    };
    return f;
}

namespace {

// Gradient of the whole integral table in one sweep: one extraction per
// perturbed point instead of one per (k, j) pair.
struct TableJet {
    std::vector<std::pair<int, int>> labels;  // (k, j)
    std::vector<Vector> grads;                // per label, length C
    std::vector<double> grad_norms;
};

TableJet table_jet(const LaxFamily& fam, const AlgebraRealization& alg,
                   const std::vector<PrimitiveInvariant>& invs, const PhasePoint& pt, double step,
                   int order) {
    const int C = phase_coord_count(alg);
    TableJet jet;
    for (std::size_t k = 0; k < invs.size(); ++k)
        for (int j = 0; j <= invs[k].degree; ++j)
            jet.labels.push_back({static_cast<int>(k) + 1, j});
    jet.grads.assign(jet.labels.size(), Vector::Zero(C));
    for (int c = 0; c < C; ++c) {
        if (order >= 4) {
            const auto t2p = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, 2 * step));
            const auto t1p = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, step));
            const auto t1m = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, -step));
            const auto t2m = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, -2 * step));
            for (std::size_t e = 0; e < jet.labels.size(); ++e) {
                const auto [k, j] = jet.labels[e];
                jet.grads[e][c] = (-t2p.at(k, j) + 8.0 * t1p.at(k, j) - 8.0 * t1m.at(k, j) +
                                   t2m.at(k, j)) /
                                  (12.0 * step);
            }
        } else {
            const auto t1p = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, step));
            const auto t1m = extract_integrals(fam, alg, invs, shift_coord(alg, pt, c, -step));
            for (std::size_t e = 0; e < jet.labels.size(); ++e) {
                const auto [k, j] = jet.labels[e];
                jet.grads[e][c] = (t1p.at(k, j) - t1m.at(k, j)) / (2.0 * step);
            }
        }
    }
    jet.grad_norms.resize(jet.labels.size());
    for (std::size_t e = 0; e < jet.labels.size(); ++e) jet.grad_norms[e] = jet.grads[e].norm();
    return jet;
}

// max over pairs of the normalized bracket residual
std::pair<double, std::string> jet_max_residual(const AlgebraRealization& alg,
                                                const PhasePoint& pt, const TableJet& jet) {
    double best = 0;
    std::string label = "-";
    for (std::size_t a = 0; a < jet.labels.size(); ++a)
        for (std::size_t b = a + 1; b < jet.labels.size(); ++b) {
            const double denom = std::max(jet.grad_norms[a] * jet.grad_norms[b], 1e-12);
            const double r =
                std::abs(poisson_bracket_grads(alg, pt, jet.grads[a], jet.grads[b])) / denom;
            if (r > best) {
                best = r;
                std::ostringstream os;
                os << "(" << jet.labels[a].first << "," << jet.labels[a].second << ")x("
                   << jet.labels[b].first << "," << jet.labels[b].second << ")";
                label = os.str();
            }
        }
    return {best, label};
}

}  // namespace

CommutationReport commutation_report(const LaxFamily& fam, const AlgebraRealization& alg,
                                     const std::vector<PrimitiveInvariant>& invs, int n_samples,
                                     std::uint64_t seed) {
    CommutationReport rep;
    rep.n_samples = n_samples;
    const Rng base(seed);
    for (int s = 0; s < n_samples; ++s) {
        Rng rng = base.stream(s);
        const PhasePoint pt = sample_phase_point(fam, alg, rng, /*on_shell=*/true);
        const TableJet jet = table_jet(fam, alg, invs, pt, 1e-4, 4);
        const auto [r, label] = jet_max_residual(alg, pt, jet);
        if (r > rep.max_on_shell) {
            rep.max_on_shell = r;
            rep.argmax_pair = label;
        }
    }
    // order-2 differencing at a coarse step and half of it: the truncation
    // term dominates there and shrinks by ~4
    {
        Rng rng = base.stream(0);
        const PhasePoint pt = sample_phase_point(fam, alg, rng, /*on_shell=*/true);
        rep.coarse_step = 2e-2;
        rep.coarse_residual =
            jet_max_residual(alg, pt, table_jet(fam, alg, invs, pt, rep.coarse_step, 2)).first;
        rep.half_step_residual =
            jet_max_residual(alg, pt, table_jet(fam, alg, invs, pt, rep.coarse_step / 2, 2)).first;
        rep.convergence_ratio = rep.coarse_residual / std::max(rep.half_step_residual, 1e-300);
        rep.convergence_meaningful =
            std::max(rep.coarse_residual, rep.half_step_residual) > 1e-11;
    }
    {
        Rng rng = base.stream(1u << 20);
        const PhasePoint pt = sample_phase_point(fam, alg, rng, /*on_shell=*/false);
        const TableJet jet = table_jet(fam, alg, invs, pt, 1e-4, 4);
        rep.off_shell_witness = jet_max_residual(alg, pt, jet).first;
    }
    return rep;
}

FlowResult flow(const Observable& h, const LaxFamily& fam, const AlgebraRealization& alg,
                const std::vector<PrimitiveInvariant>& invs, const PhasePoint& start, double T,
                double tol) {
    const int N = alg.roots.rank, C = phase_coord_count(alg);
    FlowResult res;

    // dxi_c/dt = {xi_c, H}, evaluated through the bracket itself so the sign
    // convention lives in exactly one place.  Coordinate functions carry
    // their analytic one-hot gradients; grad H is computed once per call.
    std::vector<Vector> coord_grads(alg.dim);
    for (int c = 0; c < alg.dim; ++c) {
        coord_grads[c] = Vector::Zero(C);
        coord_grads[c][2 * N + c] = 1.0;
    }
    // The singular guard must cover the differencing stencil of the H
    // gradient, not just the 1e-6 pole band, or the forces turn into noise
    // before the stop fires.
    const double singular_guard = std::max(1e-6, 5.0 * h.step);
    auto velocity = [&](const Vector& y, Vector& dy) -> bool {
        const PhasePoint pt = unpack(alg, y);
        if (denominator_margin(fam, alg, pt.q) < singular_guard) return false;
        const Vector gh = observable_gradient(h, alg, pt);
        dy.resize(C);
        for (int i = 0; i < N; ++i) {
            dy[i] = gh[N + i];   // dq/dt = dH/dp = {q_i, H}
            dy[N + i] = -gh[i];  // dp/dt = -dH/dq = {p_i, H}
        }
        for (int c = 0; c < alg.dim; ++c)
            dy[2 * N + c] = poisson_bracket_grads(alg, pt, coord_grads[c], gh);
        return true;
    };

    Vector y = pack(alg, start);
    double t = 0;
    double dt = std::min(1e-2, T / 10);
    res.trajectory.push_back({0.0, start.q, start.p, start.xi.coords()});

    std::vector<Vector> k(7);
    Vector dy0(C);
    if (!velocity(y, dy0)) {
        res.stop_reason = "initial point is singular";
        return res;
    }
    const int max_steps = 2000000;
    while (t < T && res.steps_accepted + res.steps_rejected < max_steps) {
        dt = std::min(dt, T - t);
        bool singular = false;
        k[0] = dy0;
        for (int s = 1; s < 7 && !singular; ++s) {
            Vector ys = y;
            for (int q = 0; q < s; ++q)
                if (dp_a[s][q] != 0.0) ys += dt * dp_a[s][q] * k[q];
            k[s].resize(C);
            singular = !velocity(ys, k[s]);
        }
        if (singular) {
            res.stop_reason = "trajectory approached the singular set";
            break;
        }
        Vector y5 = y, y4 = y;
        for (int s = 0; s < 7; ++s) {
            if (dp_b5[s] != 0.0) y5 += dt * dp_b5[s] * k[s];
            if (dp_b4[s] != 0.0) y4 += dt * dp_b4[s] * k[s];
        }
        double err = 0;
        for (int c = 0; c < C; ++c) {
            const double scale = tol + tol * std::max(std::abs(y[c]), std::abs(y5[c]));
            err = std::max(err, std::abs(y5[c] - y4[c]) / scale);
        }
        if (err <= 1.0) {
            t += dt;
            y = y5;
            dy0 = k[6];  // FSAL
            ++res.steps_accepted;
            const PhasePoint pt = unpack(alg, y);
            res.trajectory.push_back({t, pt.q, pt.p, pt.xi.coords()});
        } else {
            ++res.steps_rejected;
        }
        const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        dt *= std::min(5.0, std::max(0.2, factor));
    }
    res.completed = t >= T;
    if (res.completed) res.stop_reason = "reached T";

    // conservation at evenly spaced checkpoints along the recorded trajectory
    const IntegralTable t0 = extract_integrals(fam, alg, invs, start);
    res.integral_drift.resize(t0.entries.size());
    for (std::size_t kk = 0; kk < t0.entries.size(); ++kk)
        res.integral_drift[kk].assign(t0.entries[kk].size(), 0.0);
    const cplx h0 = h.eval(start);
    const double xi_scale = std::max(start.xi.coords().norm(), 1e-12);
    const Vector j0 = momentum_map(start);
    const int n_check = 10;
    for (int c = 1; c <= n_check; ++c) {
        const std::size_t idx =
            std::min(res.trajectory.size() - 1,
                     static_cast<std::size_t>(std::llround(static_cast<double>(c) /
                                                           n_check * (res.trajectory.size() - 1))));
        const auto& st = res.trajectory[idx];
        const PhasePoint pt{st.q, st.p, alg.element(st.xi)};
        const IntegralTable tc = extract_integrals(fam, alg, invs, pt);
        for (std::size_t kk = 0; kk < t0.entries.size(); ++kk) {
            double scale_k = 1e-12;
            for (const cplx& v : t0.entries[kk]) scale_k = std::max(scale_k, std::abs(v));
            for (std::size_t j = 0; j < t0.entries[kk].size(); ++j) {
                const double drift = std::abs(tc.entries[kk][j] - t0.entries[kk][j]) / scale_k;
                res.integral_drift[kk][j] = std::max(res.integral_drift[kk][j], drift);
                res.max_integral_drift = std::max(res.max_integral_drift, drift);
            }
        }
        res.momentum_drift =
            std::max(res.momentum_drift, (momentum_map(pt) - j0).norm() / xi_scale);
        res.hamiltonian_drift = std::max(
            res.hamiltonian_drift, std::abs(h.eval(pt) - h0) / std::max(std::abs(h0), 1e-12));
    }
    return res;
}

}  // namespace spincm
