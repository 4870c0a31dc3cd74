#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pseudomarket/types.hpp"

namespace pseudomarket {

// Best achievable long-run utility for one agent holding a capacity share,
// with nobody competing. Decision variable f_theta is the stationary rate of
// *allocated* type-theta requests per round; the availability coupling makes
// request probabilities nonlinear in f, so the program is solved in f-space
// where everything is linear:
//
//   maximize   sum_theta value*duration*f_theta
//   subject to sum_theta duration*f_theta <= cap
//              f_theta + p_theta * sum_theta' (duration'-1) f_theta' <= p_theta
//              f >= 0
//
// The box rows are the linear rewrite of f_theta <= p_theta * (fraction of
// rounds the agent is not already holding).

struct LPInstance {
    double cap = 0.0;
    std::vector<double> objective;
    // rows[0] is the capacity row; rows[1 + theta] the box row for theta.
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
};

enum class SolveStatus { Optimal, Degenerate };

struct LPSolution {
    std::vector<double> f;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Optimal;
};

struct EpochStats {
    double v_star = 0.0;  // ideal utility per round
    double beta = 0.0;    // ideal utilization (fraction of rounds holding)
    double q = 0.0;       // request probability per available round
    double kappa = 0.0;   // mean requested duration; 0 with kappa_defined=false when q=0
    bool kappa_defined = false;
};

struct RequestPolicy {
    // x_theta: probability the agent holds nothing and requests theta in a
    // round; request_prob_theta = x_theta / p_theta is what a bidder samples.
    std::vector<double> x;
    std::vector<double> request_prob;
    EpochStats stats;
};

// Share of capacity an agent may target: fair_share per unit, clamped at 1.
inline double ideal_cap(double fair_share, int units) {
    const double c = fair_share * units;
    return c < 1.0 ? c : 1.0;
}

// Throws CapOutOfRange unless 0 < cap <= 1; validates the type space.
LPInstance build_ideal_lp(const TypeSpace& ts, double cap);

// Dense simplex with Bland's rule; checks feasibility residuals (1e-9)
// before returning. Throws NumericalFailure on violations.
LPSolution solve_lp(const LPInstance& lp);

// Independent check: enumerate all basic feasible points of the same
// polytope and take the best. Exponential; guarded to at most 6 types
// (throws TooManyTypes).
LPSolution vertex_enumeration_oracle(const LPInstance& lp);

// f-space -> request space. Throws DegenerateDenominator if the availability
// denominator underflows (cannot happen for feasible f; guarded anyway).
RequestPolicy f_to_x(const LPSolution& sol, const TypeSpace& ts);

std::vector<double> x_to_f(std::span<const double> x, const TypeSpace& ts);

EpochStats epoch_stats(std::span<const double> x, const TypeSpace& ts);

// build + solve + convert in one step.
RequestPolicy ideal_policy(const TypeSpace& ts, double cap);

struct RenewalEstimate {
    double utility_rate = 0.0;  // should approach stats.v_star
    double utilization = 0.0;   // should approach stats.beta
};

// Single agent, no competition, no payments: sample types, request per the
// policy, hold for the sampled duration. Long-run averages estimate the
// LP's v_star and beta.
RenewalEstimate simulate_no_competition(const RequestPolicy& policy, const TypeSpace& ts,
                                        std::int64_t horizon, std::uint64_t seed);

// Loose upper bound on total welfare of any allocation: every round gives
// every agent her ideal rate.
inline double welfare_upper_bound(double v_star, int n_agents, std::int64_t horizon) {
    return v_star * n_agents * static_cast<double>(horizon);
}

}  // namespace pseudomarket
