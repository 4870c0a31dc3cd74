#include "pseudomarket/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pseudomarket {

namespace {
constexpr double kMassTol = 1e-12;
constexpr double kShareTol = 1e-9;
}  // namespace

int TypeSpace::k_max() const {
    int k = 1;
    for (const auto& t : types) k = std::max(k, t.duration);
    return k;
}

void TypeSpace::validate() const {
    if (types.empty()) throw ConfigError("type space must contain at least one type");
    double mass = 0.0;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const auto& t = types[i];
        if (!std::isfinite(t.value) || t.value < 0.0) {
            std::ostringstream os;
            os << "type " << i << ": value must be finite and nonnegative";
            throw ConfigError(os.str());
        }
        if (t.duration < 1) {
            std::ostringstream os;
            os << "type " << i << ": duration must be >= 1";
            throw ConfigError(os.str());
        }
        if (!std::isfinite(t.probability) || t.probability < 0.0 || t.probability > 1.0) {
            std::ostringstream os;
            os << "type " << i << ": probability must lie in [0, 1]";
            throw ConfigError(os.str());
        }
        mass += t.probability;
    }
    if (std::abs(mass - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "type probabilities sum to " << mass << ", expected 1";
        throw ProbabilityMassError(os.str());
    }
}

int sample_type_index(const TypeSpace& ts, RngStream& rng) {
    const double u = rng.next_unit();
    double acc = 0.0;
    const int n = static_cast<int>(ts.types.size());
    for (int i = 0; i < n; ++i) {
        acc += ts.types[static_cast<std::size_t>(i)].probability;
        if (u < acc) return i;
    }
    // Roundoff can leave u just above the accumulated mass; the tail type
    // absorbs it.
    return n - 1;
}

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Robust: return "robust";
        case StrategyKind::Blocker: return "blocker";
        case StrategyKind::Sniper: return "sniper";
        case StrategyKind::Silent: return "silent";
    }
    return "unknown";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "robust") return StrategyKind::Robust;
    if (name == "blocker") return StrategyKind::Blocker;
    if (name == "sniper") return StrategyKind::Sniper;
    if (name == "silent") return StrategyKind::Silent;
    throw SchemaError("unknown strategy '" + name + "'");
}

int MarketConfig::k_max() const {
    int k = 1;
    for (const auto& a : agents) {
        k = std::max(k, a.type_space.k_max());
        if (a.strategy.kind == StrategyKind::Blocker)
            k = std::max(k, a.strategy.blocker_k_max);
    }
    return k;
}

void validate_config(const MarketConfig& config) {
    if (config.horizon < 1) throw NonPositiveHorizon("horizon must be >= 1");
    if (config.units < 1) throw ConfigError("units must be >= 1");
    if (!std::isfinite(config.reserve) || config.reserve < 0.0)
        throw ConfigError("reserve must be finite and nonnegative");
    if (config.agents.empty()) throw ConfigError("at least one agent is required");

    double share_sum = 0.0;
    for (std::size_t i = 0; i < config.agents.size(); ++i) {
        const auto& a = config.agents[i];
        if (!std::isfinite(a.fair_share) || a.fair_share <= 0.0) {
            std::ostringstream os;
            os << "agent " << i << ": fair_share must be positive";
            throw ConfigError(os.str());
        }
        share_sum += a.fair_share;
        a.type_space.validate();
        if (a.strategy.kind == StrategyKind::Blocker && a.strategy.blocker_k_max < 1) {
            std::ostringstream os;
            os << "agent " << i << ": blocker needs kmax >= 1";
            throw ConfigError(os.str());
        }
        if (a.strategy.sniper_price && *a.strategy.sniper_price <= 0.0) {
            std::ostringstream os;
            os << "agent " << i << ": sniper price must be positive";
            throw ConfigError(os.str());
        }
    }
    if (std::abs(share_sum - 1.0) > kShareTol) {
        std::ostringstream os;
        os << "fair shares sum to " << share_sum << ", expected 1";
        throw FairShareSumError(os.str());
    }
}

MarketState MarketState::initial(const MarketConfig& config) { return initial(config, 0); }

MarketState MarketState::initial(const MarketConfig& config, std::uint64_t trial) {
    MarketState s;
    s.round = 1;
    const int n = config.n_agents();
    s.budgets.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.budgets[static_cast<std::size_t>(i)] = config.initial_budget(i);
    s.unit_free_at.assign(static_cast<std::size_t>(config.units), 1);
    s.holder.assign(static_cast<std::size_t>(config.units), -1);
    s.blocked_rounds.assign(static_cast<std::size_t>(n), 0);
    s.seed = config.seed;
    s.trial = trial;
    return s;
}

int MarketState::free_units(std::int64_t round_now) const {
    int m = 0;
    for (auto f : unit_free_at)
        if (f <= round_now) ++m;
    return m;
}

bool MarketState::is_holder(int agent, std::int64_t round_now) const {
    for (std::size_t u = 0; u < holder.size(); ++u)
        if (holder[u] == agent && unit_free_at[u] > round_now) return true;
    return false;
}

}  // namespace pseudomarket
