#pragma once

// Shared test oracles: a direct transcription of the single-unit auction with
// jump advancement, an exact trace comparator, and a random market generator.
// Kept free of any test framework so every test binary can use them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "instances.hpp"
#include "pseudomarket/engine.hpp"
#include "pseudomarket/strategies.hpp"

namespace pmtest {

using namespace pseudomarket;

inline pseudomarket::Trace run_jump_reference(const MarketConfig& cfg, const std::vector<BidFn>& bidders,
                         TrialKey key) {
    if (cfg.units != 1) throw std::logic_error("jump reference is single-unit only");
    const int n = cfg.n_agents();
    const std::int64_t T = cfg.horizon;

    Trace tr;
    tr.horizon = T;
    tr.units = 1;
    tr.totals.assign(static_cast<std::size_t>(n), AgentTotals{});
    tr.series.assign(static_cast<std::size_t>(n), AgentSeries{});
    for (auto& s : tr.series) {
        s.value.assign(static_cast<std::size_t>(T), std::numeric_limits<double>::quiet_NaN());
        s.duration.assign(static_cast<std::size_t>(T), 0);
        s.utility.assign(static_cast<std::size_t>(T), 0.0);
        s.payment.assign(static_cast<std::size_t>(T), 0.0);
        s.blocked.assign(static_cast<std::size_t>(T), 0);
        s.won.assign(static_cast<std::size_t>(T), 0);
    }
    tr.rounds.resize(static_cast<std::size_t>(T));
    for (std::int64_t t = 1; t <= T; ++t) {
        auto& out = tr.rounds[static_cast<std::size_t>(t - 1)];
        out.round = t;
        out.blocked.assign(static_cast<std::size_t>(n), 0);
    }

    std::vector<double> budgets(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) budgets[static_cast<std::size_t>(i)] = cfg.initial_budget(i);
    TrialRng trng{key.seed, key.trial};

    auto mark_blocked = [&](int agent, std::int64_t round) {
        tr.totals[static_cast<std::size_t>(agent)].blocked_rounds += 1;
        tr.series[static_cast<std::size_t>(agent)].blocked[static_cast<std::size_t>(round - 1)] = 1;
        tr.rounds[static_cast<std::size_t>(round - 1)].blocked[static_cast<std::size_t>(agent)] = 1;
    };

    std::int64_t t = 1;
    while (t <= T) {
        // Item is free here by construction.
        std::vector<Bid> bids;
        std::vector<DemandType> sampled(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto ai = static_cast<std::size_t>(i);
            RngStream rng = trng.stream(static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(t));
            const TypeSpace& ts = cfg.agents[ai].type_space;
            const int idx = sample_type_index(ts, rng);
            const DemandType& ty = ts.types[static_cast<std::size_t>(idx)];
            sampled[ai] = ty;
            tr.series[ai].value[static_cast<std::size_t>(t - 1)] = ty.value;
            tr.series[ai].duration[static_cast<std::size_t>(t - 1)] = ty.duration;
            StrategyContext ctx{t, budgets[ai], ty, idx, true, cfg.reserve};
            std::optional<Bid> bid = bidders[ai](ctx, rng);
            if (bid) {
                bid->agent = i;
                bids.push_back(*bid);
            }
        }

        struct Cand {
            double bid;
            std::uint64_t priority;
            int agent;
            std::size_t index;
        };
        std::vector<Cand> valid;
        for (std::size_t bi = 0; bi < bids.size(); ++bi) {
            const Bid& b = bids[bi];
            if (b.cost() > budgets[static_cast<std::size_t>(b.agent)]) continue;
            if (b.duration > 1 && b.per_round_bid < cfg.reserve) continue;
            valid.push_back({b.per_round_bid, static_cast<std::uint64_t>(b.agent), b.agent, bi});
        }
        if (cfg.tie_break == TieBreak::SeededRandom && valid.size() > 1) {
            std::sort(valid.begin(), valid.end(),
                      [](const Cand& a, const Cand& b) { return a.agent < b.agent; });
            RngStream rng(key.seed, key.trial, kMechanismAgent, static_cast<std::uint64_t>(t));
            for (auto& v : valid) v.priority = rng.next_u64();
        }
        std::sort(valid.begin(), valid.end(), [](const Cand& a, const Cand& b) {
            if (a.bid != b.bid) return a.bid > b.bid;
            if (a.priority != b.priority) return a.priority < b.priority;
            return a.agent < b.agent;
        });

        auto& out = tr.rounds[static_cast<std::size_t>(t - 1)];
        out.available_units = 1;
        if (valid.empty()) {
            out.no_allocation = true;
            t += 1;
            continue;
        }

        const Bid& wb = bids[valid.front().index];
        const auto wa = static_cast<std::size_t>(wb.agent);
        const double cost = wb.cost();
        budgets[wa] -= cost;
        out.no_allocation = false;
        out.winners.push_back({wb.agent, wb.per_round_bid, wb.duration, cost});

        const DemandType& ty = sampled[wa];
        tr.totals[wa].utility += ty.value * ty.duration;
        tr.totals[wa].wins += 1;
        tr.totals[wa].held_rounds += std::min<std::int64_t>(wb.duration, T - t + 1);
        tr.series[wa].utility[static_cast<std::size_t>(t - 1)] = ty.value * ty.duration;
        tr.series[wa].payment[static_cast<std::size_t>(t - 1)] = cost;
        tr.series[wa].won[static_cast<std::size_t>(t - 1)] = 1;

        // Winning round: the field was priced out only if the price met the
        // reserve.
        if (wb.per_round_bid >= cfg.reserve) {
            for (int i = 0; i < n; ++i)
                if (i != wb.agent) mark_blocked(i, t);
        }
        // Held rounds: holder sits out (self-reservation), everyone else is
        // shut out by a reservation paid at or above the reserve.
        for (std::int64_t s = t + 1; s <= std::min<std::int64_t>(t + wb.duration - 1, T); ++s) {
            auto& held_out = tr.rounds[static_cast<std::size_t>(s - 1)];
            held_out.available_units = 0;
            held_out.no_allocation = true;
            for (int i = 0; i < n; ++i) mark_blocked(i, s);
        }
        t += wb.duration;
    }

    for (int i = 0; i < n; ++i)
        tr.totals[static_cast<std::size_t>(i)].payment =
            cfg.initial_budget(i) - budgets[static_cast<std::size_t>(i)];
    tr.final_budgets = std::move(budgets);
    return tr;
}

inline bool same_double(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return a == b;
}

// Empty string when equal, else a description of the first difference.
inline std::string trace_diff(const Trace& a, const Trace& b) {
    std::ostringstream os;
    if (a.horizon != b.horizon) return "horizon differs";
    if (a.units != b.units) return "units differs";
    if (a.totals.size() != b.totals.size()) return "agent count differs";
    for (std::size_t i = 0; i < a.totals.size(); ++i) {
        const auto& x = a.totals[i];
        const auto& y = b.totals[i];
        if (x.utility != y.utility || x.payment != y.payment || x.held_rounds != y.held_rounds ||
            x.blocked_rounds != y.blocked_rounds || x.wins != y.wins) {
            os << "totals differ for agent " << i << ": (" << x.utility << "," << x.payment << ","
               << x.held_rounds << "," << x.blocked_rounds << "," << x.wins << ") vs ("
               << y.utility << "," << y.payment << "," << y.held_rounds << "," << y.blocked_rounds
               << "," << y.wins << ")";
            return os.str();
        }
        if (a.final_budgets[i] != b.final_budgets[i]) {
            os << "final budget differs for agent " << i;
            return os.str();
        }
    }
    if (a.series.size() != b.series.size()) return "series count differs";
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        const auto& x = a.series[i];
        const auto& y = b.series[i];
        for (std::size_t t = 0; t < x.value.size(); ++t) {
            if (!same_double(x.value[t], y.value[t]) || x.duration[t] != y.duration[t] ||
                x.utility[t] != y.utility[t] || x.payment[t] != y.payment[t] ||
                x.blocked[t] != y.blocked[t] || x.won[t] != y.won[t]) {
                os << "series differ for agent " << i << " at round " << (t + 1);
                return os.str();
            }
        }
    }
    if (a.rounds.size() != b.rounds.size()) return "round count differs";
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
        const auto& x = a.rounds[t];
        const auto& y = b.rounds[t];
        if (x.round != y.round || x.available_units != y.available_units ||
            x.no_allocation != y.no_allocation || x.winners.size() != y.winners.size() ||
            x.blocked != y.blocked) {
            os << "round outcome differs at round " << (t + 1);
            return os.str();
        }
        for (std::size_t w = 0; w < x.winners.size(); ++w) {
            const auto& u = x.winners[w];
            const auto& v = y.winners[w];
            if (u.agent != v.agent || u.per_round_bid != v.per_round_bid ||
                u.duration != v.duration || u.total_payment != v.total_payment) {
                os << "winner record differs at round " << (t + 1);
                return os.str();
            }
        }
    }
    return "";
}


inline pseudomarket::MarketConfig random_market_config(std::mt19937_64& g) {
    MarketConfig cfg;
    std::uniform_int_distribution<int> n_dist(2, 4);
    std::uniform_real_distribution<double> r_dist(0.5, 2.5);
    std::uniform_int_distribution<int> t_dist(200, 400);
    std::uniform_int_distribution<int> kind_dist(0, 3);
    std::uniform_int_distribution<int> kmax_dist(1, 4);
    const int n = n_dist(g);
    cfg.horizon = t_dist(g);
    cfg.reserve = r_dist(g);
    cfg.seed = g();

    std::vector<double> raw(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& x : raw) {
        x = std::uniform_real_distribution<double>(0.2, 1.0)(g);
        sum += x;
    }
    for (int i = 0; i < n; ++i) {
        AgentSpec a;
        a.fair_share = raw[static_cast<std::size_t>(i)] / sum;
        RngStream ts_rng(g(), g(), g(), g());
        a.type_space = pmtest::random_instance(ts_rng, 4, 4);
        const StrategyKind kinds[] = {StrategyKind::Robust, StrategyKind::Blocker,
                                      StrategyKind::Sniper, StrategyKind::Silent};
        a.strategy.kind = (i == 0) ? StrategyKind::Robust : kinds[kind_dist(g)];
        if (a.strategy.kind == StrategyKind::Blocker) a.strategy.blocker_k_max = kmax_dist(g);
        cfg.agents.push_back(std::move(a));
    }
    return cfg;
}


}  // namespace pmtest
