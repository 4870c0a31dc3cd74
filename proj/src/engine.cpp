#include "pseudomarket/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pseudomarket {

namespace {

struct RankedBid {
    double per_round_bid = 0.0;
    std::uint64_t priority = 0;
    int agent = -1;
    std::size_t bid_index = 0;
};

Trace make_trace(const MarketConfig& config, TraceDetail detail) {
    Trace tr;
    tr.horizon = config.horizon;
    tr.units = config.units;
    tr.totals.assign(static_cast<std::size_t>(config.n_agents()), AgentTotals{});
    if (detail == TraceDetail::Full) {
        const auto T = static_cast<std::size_t>(config.horizon);
        tr.series.assign(static_cast<std::size_t>(config.n_agents()), AgentSeries{});
        for (auto& s : tr.series) {
            s.value.assign(T, std::numeric_limits<double>::quiet_NaN());
            s.duration.assign(T, 0);
            s.utility.assign(T, 0.0);
            s.payment.assign(T, 0.0);
            s.blocked.assign(T, 0);
            s.won.assign(T, 0);
        }
        tr.rounds.reserve(T);
    }
    return tr;
}

}  // namespace

RoundOutcome step(MarketState& state, std::span<const Bid> bids, const MarketConfig& config) {
    const std::int64_t t = state.round;
    if (t < 1 || t > config.horizon) throw Error("step called outside the horizon");
    const int n = config.n_agents();
    const int units = static_cast<int>(state.unit_free_at.size());

    for (int u = 0; u < units; ++u)
        if (state.unit_free_at[static_cast<std::size_t>(u)] <= t)
            state.holder[static_cast<std::size_t>(u)] = -1;

    // Reservations made in earlier rounds; their holders sit out this round.
    std::vector<std::uint8_t> held_before(static_cast<std::size_t>(n), 0);
    int m = 0;
    for (int u = 0; u < units; ++u) {
        if (state.unit_free_at[static_cast<std::size_t>(u)] <= t) {
            ++m;
        } else {
            held_before[static_cast<std::size_t>(state.holder[static_cast<std::size_t>(u)])] = 1;
        }
    }

    RoundOutcome out;
    out.round = t;
    out.available_units = m;
    out.blocked.assign(static_cast<std::size_t>(n), 0);

    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
    for (const Bid& b : bids) {
        if (b.agent < 0 || b.agent >= n) throw Error("bid from unknown agent index");
        if (seen[static_cast<std::size_t>(b.agent)]) {
            std::ostringstream os;
            os << "agent " << b.agent << " submitted more than one bid in round " << t;
            throw DuplicateBid(os.str());
        }
        seen[static_cast<std::size_t>(b.agent)] = 1;
        if (held_before[static_cast<std::size_t>(b.agent)]) {
            std::ostringstream os;
            os << "agent " << b.agent << " bid in round " << t << " while holding a unit";
            throw BidFromHolder(os.str());
        }
        if (!std::isfinite(b.per_round_bid) || b.per_round_bid < 0.0 || b.duration < 1)
            throw Error("malformed bid");
    }
    if (m == 0 && !bids.empty())
        throw Error("bids submitted in a round with no free unit");

    if (m > 0) {
        std::vector<RankedBid> valid;
        valid.reserve(bids.size());
        for (std::size_t bi = 0; bi < bids.size(); ++bi) {
            const Bid& b = bids[bi];
            if (b.cost() > state.budgets[static_cast<std::size_t>(b.agent)]) continue;
            if (b.duration > 1 && b.per_round_bid < config.reserve) continue;
            valid.push_back({b.per_round_bid, static_cast<std::uint64_t>(b.agent), b.agent, bi});
        }
        if (config.tie_break == TieBreak::SeededRandom && valid.size() > 1) {
            // Draw priorities in agent order so the outcome does not depend
            // on bid arrival order.
            std::sort(valid.begin(), valid.end(),
                      [](const RankedBid& a, const RankedBid& b) { return a.agent < b.agent; });
            RngStream rng(state.seed, state.trial, kMechanismAgent,
                          static_cast<std::uint64_t>(t));
            for (auto& v : valid) v.priority = rng.next_u64();
        }
        std::sort(valid.begin(), valid.end(), [](const RankedBid& a, const RankedBid& b) {
            if (a.per_round_bid != b.per_round_bid) return a.per_round_bid > b.per_round_bid;
            if (a.priority != b.priority) return a.priority < b.priority;
            return a.agent < b.agent;
        });

        const auto take = std::min<std::size_t>(static_cast<std::size_t>(m), valid.size());
        bool winners_cover_reserve = true;
        for (std::size_t w = 0; w < take; ++w) {
            const Bid& b = bids[valid[w].bid_index];
            const double cost = b.cost();
            state.budgets[static_cast<std::size_t>(b.agent)] -= cost;
            for (int u = 0; u < units; ++u) {
                if (state.unit_free_at[static_cast<std::size_t>(u)] <= t) {
                    state.holder[static_cast<std::size_t>(u)] = b.agent;
                    state.unit_free_at[static_cast<std::size_t>(u)] = t + b.duration;
                    break;
                }
            }
            out.winners.push_back({b.agent, b.per_round_bid, b.duration, cost});
            if (b.per_round_bid < config.reserve) winners_cover_reserve = false;
        }
        out.no_allocation = out.winners.empty();

        // Every free unit went to someone else bidding at or above the
        // reserve: the rest of the field was priced out this round.
        if (take == static_cast<std::size_t>(m) && winners_cover_reserve) {
            std::vector<std::uint8_t> won(static_cast<std::size_t>(n), 0);
            for (const auto& w : out.winners) won[static_cast<std::size_t>(w.agent)] = 1;
            for (int i = 0; i < n; ++i)
                if (!won[static_cast<std::size_t>(i)]) out.blocked[static_cast<std::size_t>(i)] = 1;
        }
    } else {
        out.no_allocation = true;
        // All units reserved by others; cross-round holds always paid at
        // least the reserve per round, so non-holders count as blocked.
        for (int i = 0; i < n; ++i)
            if (!held_before[static_cast<std::size_t>(i)])
                out.blocked[static_cast<std::size_t>(i)] = 1;
    }

    for (int i = 0; i < n; ++i)
        if (held_before[static_cast<std::size_t>(i)]) out.blocked[static_cast<std::size_t>(i)] = 1;

    for (int i = 0; i < n; ++i)
        state.blocked_rounds[static_cast<std::size_t>(i)] +=
            out.blocked[static_cast<std::size_t>(i)];
    state.round = t + 1;
    return out;
}

Trace run_mechanism(const MarketConfig& config, std::span<const BidFn> bidders, TrialKey key,
                    TraceDetail detail) {
    validate_config(config);
    const int n = config.n_agents();
    if (static_cast<int>(bidders.size()) != n) throw Error("one bidder per agent required");
    const std::int64_t T = config.horizon;

    MarketState st = MarketState::initial(config, key.trial);
    st.seed = key.seed;
    Trace tr = make_trace(config, detail);
    TrialRng trng{key.seed, key.trial};

    std::vector<Bid> bids;
    bids.reserve(static_cast<std::size_t>(n));
    std::vector<DemandType> sampled(static_cast<std::size_t>(n));

    for (std::int64_t t = 1; t <= T; ++t) {
        bids.clear();
        if (st.free_units(t) >= 1) {
            for (int i = 0; i < n; ++i) {
                if (st.is_holder(i, t)) continue;
                const auto ai = static_cast<std::size_t>(i);
                RngStream rng = trng.stream(static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(t));
                const TypeSpace& ts = config.agents[ai].type_space;
                const int idx = sample_type_index(ts, rng);
                const DemandType& ty = ts.types[static_cast<std::size_t>(idx)];
                sampled[ai] = ty;
                if (detail == TraceDetail::Full) {
                    tr.series[ai].value[static_cast<std::size_t>(t - 1)] = ty.value;
                    tr.series[ai].duration[static_cast<std::size_t>(t - 1)] = ty.duration;
                }
                StrategyContext ctx{t, st.budgets[ai], ty, idx, true, config.reserve};
                std::optional<Bid> bid = bidders[ai](ctx, rng);
                if (bid) {
                    bid->agent = i;  // engine owns identity; strategies cannot spoof
                    bids.push_back(*bid);
                }
            }
        }
        RoundOutcome out = step(st, bids, config);
        for (const WinRecord& w : out.winners) {
            const auto ai = static_cast<std::size_t>(w.agent);
            const DemandType& ty = sampled[ai];
            const double gain = ty.value * ty.duration;
            tr.totals[ai].utility += gain;
            tr.totals[ai].wins += 1;
            tr.totals[ai].held_rounds += std::min<std::int64_t>(w.duration, T - t + 1);
            if (detail == TraceDetail::Full) {
                tr.series[ai].utility[static_cast<std::size_t>(t - 1)] = gain;
                tr.series[ai].payment[static_cast<std::size_t>(t - 1)] = w.total_payment;
                tr.series[ai].won[static_cast<std::size_t>(t - 1)] = 1;
            }
        }
        if (detail == TraceDetail::Full) {
            for (int i = 0; i < n; ++i)
                tr.series[static_cast<std::size_t>(i)].blocked[static_cast<std::size_t>(t - 1)] =
                    out.blocked[static_cast<std::size_t>(i)];
            tr.rounds.push_back(std::move(out));
        }
    }

    for (int i = 0; i < n; ++i) {
        const auto ai = static_cast<std::size_t>(i);
        // Budget delta rather than a float sum of per-round costs: keeps
        // total payment <= endowment exactly.
        tr.totals[ai].payment = config.initial_budget(i) - st.budgets[ai];
        tr.totals[ai].blocked_rounds = st.blocked_rounds[ai];
    }
    tr.final_budgets = std::move(st.budgets);
    return tr;
}

Trace run_round_robin(const MarketConfig& config, TrialKey key, TraceDetail detail) {
    validate_config(config);
    if (config.units != 1) throw ConfigError("round-robin baseline requires a single unit");
    const int n = config.n_agents();
    const std::int64_t T = config.horizon;

    Trace tr = make_trace(config, detail);
    TrialRng trng{key.seed, key.trial};
    std::int64_t free_at = 1;

    for (std::int64_t t = 1; t <= T; ++t) {
        RoundOutcome out;
        out.round = t;
        out.blocked.assign(static_cast<std::size_t>(n), 0);
        if (t >= free_at) {
            out.available_units = 1;
            const int agent = static_cast<int>((t - 1) % n);
            const auto ai = static_cast<std::size_t>(agent);
            RngStream rng = trng.stream(static_cast<std::uint64_t>(agent),
                                        static_cast<std::uint64_t>(t));
            const TypeSpace& ts = config.agents[ai].type_space;
            const int idx = sample_type_index(ts, rng);
            const DemandType& ty = ts.types[static_cast<std::size_t>(idx)];
            const double gain = ty.value * ty.duration;
            tr.totals[ai].utility += gain;
            tr.totals[ai].wins += 1;
            tr.totals[ai].held_rounds += std::min<std::int64_t>(ty.duration, T - t + 1);
            free_at = t + ty.duration;
            out.winners.push_back({agent, 0.0, ty.duration, 0.0});
            out.no_allocation = false;
            if (detail == TraceDetail::Full) {
                auto& s = tr.series[ai];
                s.value[static_cast<std::size_t>(t - 1)] = ty.value;
                s.duration[static_cast<std::size_t>(t - 1)] = ty.duration;
                s.utility[static_cast<std::size_t>(t - 1)] = gain;
                s.won[static_cast<std::size_t>(t - 1)] = 1;
            }
        }
        if (detail == TraceDetail::Full) tr.rounds.push_back(std::move(out));
    }

    tr.final_budgets.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        tr.final_budgets[static_cast<std::size_t>(i)] = config.initial_budget(i);
    return tr;
}

Trace run_greedy_omniscient(const MarketConfig& config, TrialKey key, TraceDetail detail) {
    validate_config(config);
    if (config.units != 1) throw ConfigError("greedy baseline requires a single unit");
    const int n = config.n_agents();
    const std::int64_t T = config.horizon;

    Trace tr = make_trace(config, detail);
    TrialRng trng{key.seed, key.trial};
    std::int64_t free_at = 1;

    for (std::int64_t t = 1; t <= T; ++t) {
        RoundOutcome out;
        out.round = t;
        out.blocked.assign(static_cast<std::size_t>(n), 0);
        if (t >= free_at) {
            out.available_units = 1;
            int winner = -1;
            DemandType winner_type;
            for (int i = 0; i < n; ++i) {
                const auto ai = static_cast<std::size_t>(i);
                RngStream rng = trng.stream(static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(t));
                const TypeSpace& ts = config.agents[ai].type_space;
                const int idx = sample_type_index(ts, rng);
                const DemandType& ty = ts.types[static_cast<std::size_t>(idx)];
                if (detail == TraceDetail::Full) {
                    tr.series[ai].value[static_cast<std::size_t>(t - 1)] = ty.value;
                    tr.series[ai].duration[static_cast<std::size_t>(t - 1)] = ty.duration;
                }
                if (winner < 0 && ty.value > 0.0) {
                    winner = i;
                    winner_type = ty;
                }
            }
            if (winner >= 0) {
                const auto ai = static_cast<std::size_t>(winner);
                const double gain = winner_type.value * winner_type.duration;
                tr.totals[ai].utility += gain;
                tr.totals[ai].wins += 1;
                tr.totals[ai].held_rounds +=
                    std::min<std::int64_t>(winner_type.duration, T - t + 1);
                free_at = t + winner_type.duration;
                out.winners.push_back({winner, 0.0, winner_type.duration, 0.0});
                out.no_allocation = false;
                if (detail == TraceDetail::Full) {
                    tr.series[ai].utility[static_cast<std::size_t>(t - 1)] = gain;
                    tr.series[ai].won[static_cast<std::size_t>(t - 1)] = 1;
                }
            }
        }
        if (detail == TraceDetail::Full) tr.rounds.push_back(std::move(out));
    }

    tr.final_budgets.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        tr.final_budgets[static_cast<std::size_t>(i)] = config.initial_budget(i);
    return tr;
}

}  // namespace pseudomarket
