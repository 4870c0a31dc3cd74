#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pseudomarket/engine.hpp"
#include "pseudomarket/ideal.hpp"
#include "pseudomarket/types.hpp"

namespace pseudomarket {

enum class Allocator { Mechanism, RoundRobin, GreedyOmniscient };

// A runnable experiment: market plus trial count plus which allocator moves
// the item. The preset tag decides which analytic bounds the summary carries.
struct ExperimentSpec {
    MarketConfig config;
    int trials = 200;
    Allocator allocator = Allocator::Mechanism;
    std::string preset;  // "", "ideal", "guarantee", "impossibility", "hardness", "multi", "roundrobin"
};

struct TrialRow {
    int trial = 0;
    int agent = 0;
    double total_utility = 0.0;
    double total_payment = 0.0;
    double utilization = 0.0;
    std::int64_t blocked_rounds = 0;
};

struct AgentStats {
    double mean_utility = 0.0, se_utility = 0.0;
    double mean_payment = 0.0, se_payment = 0.0;
    double mean_utilization = 0.0, se_utilization = 0.0;
    double mean_blocked = 0.0, se_blocked = 0.0;
};

// One bound or identity evaluated against the sample; lhs is the measured
// side, rhs the analytic side.
struct Check {
    std::string name;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ExperimentSummary {
    int trials = 0;
    std::int64_t horizon = 0;
    int units = 1;
    std::string preset;
    int protagonist = 0;  // agent the preset's theorem speaks about

    std::vector<AgentStats> agents;
    std::vector<double> v_star;  // per agent, from her own fair share
    std::vector<double> beta;
    double welfare_ub = 0.0;

    std::optional<double> guarantee_lb;
    std::optional<double> impossibility_ub;
    std::optional<double> analytic_fraction;   // hardness instance
    std::optional<double> empirical_fraction;  // sum of mean utilizations
    std::optional<double> bpb_reference;       // v*/(beta*r) for the protagonist
    std::optional<double> bpb_empirical;       // mean U / mean P

    std::vector<Check> checks;
    std::vector<TrialRow> rows;  // trial-major, agent-minor

    const AgentStats& hero() const { return agents[static_cast<std::size_t>(protagonist)]; }
};

// Runs spec.trials independent trials (seeds derived from config.seed and the
// trial index), aggregates means and standard errors, and attaches the
// preset's analytic references. Deterministic for fixed seed, independent of
// jobs; jobs > 1 spreads trials over that many threads.
ExperimentSummary monte_carlo(const ExperimentSpec& spec, int jobs = 1);

// Mean aggregate utility over mean aggregate payment for one agent.
// Throws ZeroPaymentAggregate when no payment was ever made.
double bpb_ratio(const ExperimentSummary& summary, int agent);

// v*·T·(min{1/r, 1−c/r} − slack·k_max/(β√T)); c = 1 normally, 1−α when the
// protagonist bids against blockers on all of several units.
double guarantee_lower_bound(double v_star, std::int64_t horizon, double reserve, double alpha,
                             double beta, int k_max, bool multi, double slack_const = 3.0);

// v*·T·(1 − (1−α)/max{1,r} + 1/k_max) + v*·(k_max − 1); k_max ≥ 2 required.
double impossibility_upper_bound(double v_star, std::int64_t horizon, double reserve, double alpha,
                                 int k_max);

// Symmetric congestion instance: n agents, each wanting k_max rounds at value
// 1 with probability p = 1/(k_max(n−1)+1), else nothing. Under a greedy
// omniscient allocator the long-run allocated-round fraction is
// k_max/(k_max−1+1/p′) with p′ = 1−(1−p)^n.
struct HardnessProfile {
    MarketConfig config;
    double p = 0.0;
    double p_prime = 0.0;
    double fraction = 0.0;
};

HardnessProfile hardness_instance(int n, int k_max, std::int64_t horizon = 100000,
                                  std::uint64_t seed = 0);

// First agent that is neither blocker nor silent; 0 when there is none.
int protagonist_agent(const MarketConfig& config);

}  // namespace pseudomarket
