#ifndef SPINCM_POISSON_HPP
#define SPINCM_POISSON_HPP

#include <functional>
#include <string>

#include "spincm/lax.hpp"

namespace spincm {

// Scalar observable on phase space.  Gradients default to 4th-order central
// differences with step 1e-4 on the flattened coordinates
// (q_1..q_N, p_1..p_N, xi-coordinates); an analytic gradient can be attached
// instead.  Observables are holomorphic in every coordinate, so real-step
// differencing recovers the complex derivative.
struct Observable {
    std::function<cplx(const PhasePoint&)> eval;
    std::function<Vector(const PhasePoint&)> grad;  // optional override
    double step = 1e-4;
    int order = 4;  // 2 or 4
};

int phase_coord_count(const AlgebraRealization& alg);  // 2N + dim g
PhasePoint shift_coord(const AlgebraRealization& alg, const PhasePoint& pt, int coord,
                       double delta);

Vector observable_gradient(const Observable& f, const AlgebraRealization& alg,
                           const PhasePoint& pt);

// Product bracket: canonical on (q, p), oriented so that {q_i, p_j} = +delta,
// plus the Lie-Poisson term on the spin factor, which then carries the
// opposite orientation, (xi, [grad g, grad f]).  The xi-gradient is read
// through the dual basis (kappa(e_alpha, e_{-alpha}) = 1).  This relative
// sign is what makes the Lax-pullback integrals commute on J^{-1}(0).
cplx poisson_bracket(const Observable& f, const Observable& g, const AlgebraRealization& alg,
                     const PhasePoint& pt);
// Same bracket from precomputed gradients.
cplx poisson_bracket_grads(const AlgebraRealization& alg, const PhasePoint& pt, const Vector& gf,
                           const Vector& gg);

// J(q,p,xi) = -Pi_h xi, as Cartan coordinates.
Vector momentum_map(const PhasePoint& pt);

// Observable wrappers.
Observable hamiltonian_observable(const LaxFamily& fam, const AlgebraRealization& alg);
Observable coordinate_observable(const AlgebraRealization& alg, int coord);  // analytic gradient
Observable table_entry_observable(const LaxFamily& fam, const AlgebraRealization& alg,
                                  const std::vector<PrimitiveInvariant>& invs, int k, int j);

struct CommutationReport {
    int n_samples = 0;
    double max_on_shell = 0;            // max normalized |{I_kj, I_lm}| over pairs/samples
    std::string argmax_pair;            // "(k,j)x(l,m)" attaining the max
    double coarse_residual = 0;     // order-2 differencing at step coarse_step
    double half_step_residual = 0;  // same at coarse_step/2
    double convergence_ratio = 0;   // coarse / half-step, ~4 for O(h^2)
    // false when both residuals sit at roundoff (all entries of degree <= 2,
    // where central differences are exact); the ratio is meaningless there
    bool convergence_meaningful = true;
    double coarse_step = 0;
    double off_shell_witness = 0;       // same statistic at one off-shell point
};

// Normalization divides each |{f,g}| by the product of gradient norms.
CommutationReport commutation_report(const LaxFamily& fam, const AlgebraRealization& alg,
                                     const std::vector<PrimitiveInvariant>& invs, int n_samples,
                                     std::uint64_t seed);

struct FlowResult {
    struct State {
        double t;
        Vector q, p, xi;
    };
    std::vector<State> trajectory;  // accepted steps
    bool completed = false;
    std::string stop_reason;
    int steps_accepted = 0;
    int steps_rejected = 0;
    // conservation across checkpoints, relative to the initial table scale
    std::vector<std::vector<double>> integral_drift;  // [k-1][j]
    double max_integral_drift = 0;
    double momentum_drift = 0;     // max |J(t) - J(0)| / ||xi(0)||
    double hamiltonian_drift = 0;  // relative
};

// Integrates dq/dt = dH/dp, dp/dt = -dH/dq, dxi_c/dt = {xi_c, H} with an
// adaptive embedded Dormand-Prince 5(4) pair at local tolerance tol.  The
// xi equations come from the bracket itself, coordinate by coordinate.
// Stops early (partial data, completed = false) if a family denominator
// falls below 1e-6.
FlowResult flow(const Observable& h, const LaxFamily& fam, const AlgebraRealization& alg,
                const std::vector<PrimitiveInvariant>& invs, const PhasePoint& start, double T,
                double tol);

}  // namespace spincm

#endif
