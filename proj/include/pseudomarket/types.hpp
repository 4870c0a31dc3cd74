#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pseudomarket/errors.hpp"
#include "pseudomarket/rng.hpp"

namespace pseudomarket {

// One way an agent can want the resource in a round: per-round value, number
// of consecutive rounds needed, and how often that want arrives.
struct DemandType {
    double value = 0.0;    // >= 0, per held round
    int duration = 1;      // >= 1 rounds
    double probability = 0.0;
};

struct TypeSpace {
    std::vector<DemandType> types;

    int k_max() const;
    // Probabilities must form a distribution (sum within 1e-12 of 1).
    void validate() const;
};

// Index into TypeSpace.types; one uniform draw, cumulative scan.
int sample_type_index(const TypeSpace& ts, RngStream& rng);

enum class StrategyKind { Robust, Blocker, Sniper, Silent };

struct StrategySpec {
    StrategyKind kind = StrategyKind::Silent;
    // Blocker: rounds per reservation attempt.
    int blocker_k_max = 0;
    // Sniper: single-round price; defaults to max(1, reserve) + 0.01.
    std::optional<double> sniper_price;
};

const char* strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);  // SchemaError on unknown

struct AgentSpec {
    double fair_share = 0.0;  // in (0, 1]; zero shares are rejected
    TypeSpace type_space;
    StrategySpec strategy;
};

enum class TieBreak { LowestIndex, SeededRandom };

struct MarketConfig {
    std::int64_t horizon = 10000;  // rounds are 1-indexed, t in [1, horizon]
    int units = 1;
    double reserve = 2.0;  // price floor for multi-round reservations, >= 0
    TieBreak tie_break = TieBreak::LowestIndex;
    std::uint64_t seed = 0;
    std::vector<AgentSpec> agents;

    int n_agents() const { return static_cast<int>(agents.size()); }

    // Budget endowment: fair_share * units * horizon credits.
    double initial_budget(int agent) const {
        return agents[static_cast<std::size_t>(agent)].fair_share * units *
               static_cast<double>(horizon);
    }

    // Largest duration the market can see: sampled types and blocker
    // reservation lengths both count.
    int k_max() const;
};

// Throws ConfigError subclasses; a config that passes is safe to run.
void validate_config(const MarketConfig& config);

struct Bid {
    int agent = -1;
    double per_round_bid = 0.0;
    int duration = 1;

    double cost() const { return per_round_bid * duration; }
};

struct MarketState {
    std::int64_t round = 1;
    std::vector<double> budgets;
    // Unit u is occupied at rounds < unit_free_at[u] (holder[u] says by whom)
    // and free from unit_free_at[u] on.
    std::vector<std::int64_t> unit_free_at;
    std::vector<int> holder;  // -1 when free
    std::vector<std::int64_t> blocked_rounds;  // per-agent counters
    // Identifies the trial's random stream; seeded tie-breaks draw from it.
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;

    static MarketState initial(const MarketConfig& config);
    static MarketState initial(const MarketConfig& config, std::uint64_t trial);

    int free_units(std::int64_t round_now) const;
    bool is_holder(int agent, std::int64_t round_now) const;
};

}  // namespace pseudomarket
