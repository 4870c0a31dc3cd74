#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pseudomarket/strategies.hpp"
#include "pseudomarket/types.hpp"

namespace pseudomarket {

// First-price pseudo-auction with multi-round reserves, for L >= 1 identical
// units. Each round with a free unit: every non-holding agent samples a type
// and may bid (per_round_bid, duration). Valid bids satisfy
//
//   cost = bid * duration <= remaining budget,  and  duration = 1 or bid >= reserve.
//
// The top-m valid per-round bids win the m free units, pay their full cost
// immediately, and hold a unit for `duration` rounds. Rounds advance one at a
// time; since no bids are collected while all units are held, a single-unit
// run is trace-equivalent to the jump-ahead formulation (tested).

struct WinRecord {
    int agent = -1;
    double per_round_bid = 0.0;
    int duration = 1;
    double total_payment = 0.0;  // per_round_bid * duration
};

struct RoundOutcome {
    std::int64_t round = 0;
    int available_units = 0;
    bool no_allocation = true;
    std::vector<WinRecord> winners;
    // Per-agent flags for this round. An agent is blocked when she holds a
    // unit from an earlier win, when every unit is reserved by others (who
    // necessarily pay >= reserve per round), or when others bidding >= reserve
    // won every free unit. Winners are never blocked in their winning round.
    std::vector<std::uint8_t> blocked;
};

// Advances exactly one round: releases expired holds, validates bids, runs
// the auction if any unit is free, charges winners, marks blocked agents.
// Bids while no unit is free are a caller bug and throw.
RoundOutcome step(MarketState& state, std::span<const Bid> bids, const MarketConfig& config);

struct TrialKey {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

enum class TraceDetail {
    Totals,  // per-agent aggregates only; constant memory in T
    Full,    // plus per-round series and outcomes
};

struct AgentTotals {
    double utility = 0.0;
    double payment = 0.0;
    std::int64_t held_rounds = 0;  // occupancy within [1, T]
    std::int64_t blocked_rounds = 0;
    std::int64_t wins = 0;
};

struct AgentSeries {
    std::vector<double> value;           // sampled value; NaN on rounds without a sample
    std::vector<std::int32_t> duration;  // sampled duration; 0 without a sample
    std::vector<double> utility;
    std::vector<double> payment;
    std::vector<std::uint8_t> blocked;
    std::vector<std::uint8_t> won;
};

struct Trace {
    std::int64_t horizon = 0;
    int units = 1;
    std::vector<AgentTotals> totals;
    std::vector<double> final_budgets;
    std::vector<AgentSeries> series;   // one per agent when Full
    std::vector<RoundOutcome> rounds;  // one per round when Full

    double utilization(int agent) const {
        return static_cast<double>(totals[static_cast<std::size_t>(agent)].held_rounds) /
               static_cast<double>(horizon);
    }
};

// Runs the auction for one trial. Winners realize utility value*duration of
// their sampled type at the winning round and pay bid*duration, even when
// the reservation runs past the horizon.
Trace run_mechanism(const MarketConfig& config, std::span<const BidFn> bidders, TrialKey key,
                    TraceDetail detail = TraceDetail::Full);

// Baseline: cycles through agents; the scheduled agent takes the item for
// her sampled duration whenever it is free, value or no value. No payments.
// Single-unit only.
Trace run_round_robin(const MarketConfig& config, TrialKey key,
                      TraceDetail detail = TraceDetail::Full);

// Baseline: sees every sampled value and hands the free item to the
// lowest-index agent with positive value. No payments. Single-unit only.
Trace run_greedy_omniscient(const MarketConfig& config, TrialKey key,
                            TraceDetail detail = TraceDetail::Full);

}  // namespace pseudomarket
