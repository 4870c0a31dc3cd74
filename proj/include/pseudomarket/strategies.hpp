#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pseudomarket/ideal.hpp"
#include "pseudomarket/types.hpp"

namespace pseudomarket {

// Everything a bidder is allowed to see when deciding: the market never
// leaks other agents' budgets, types or bids.
struct StrategyContext {
    std::int64_t round = 0;
    double budget = 0.0;
    DemandType type;
    int type_index = 0;
    bool item_available = false;
    double reserve = 0.0;
};

// Reserve-price bidding driven by the ideal request policy: when the sampled
// type says "request" (a fresh Bernoulli(request_prob) draw), bid exactly the
// reserve for the type's full duration, budget permitting. Never emits an
// invalid bid.
std::optional<Bid> robust_bid(const StrategyContext& ctx, const RequestPolicy& policy,
                              RngStream& rng);

// Adversary that burns budget to keep the resource busy: bids max(1, reserve)
// for k_max rounds whenever anything is free, dropping to the largest
// affordable duration as budget runs out.
std::optional<Bid> blocker_bid(const StrategyContext& ctx, int k_max);

// Opportunist: single-round bid at a fixed price whenever its own value is
// positive. Single-round bids duck the reserve rule, so any price works.
std::optional<Bid> sniper_bid(const StrategyContext& ctx, double price);

inline std::optional<Bid> silent_bid(const StrategyContext&) { return std::nullopt; }

inline double default_sniper_price(double reserve) {
    return (reserve > 1.0 ? reserve : 1.0) + 0.01;
}

// A bidder bound to one agent: the engine calls it once per round in which
// that agent may bid. Robust bidders carry their solved policy.
using BidFn = std::function<std::optional<Bid>(const StrategyContext&, RngStream&)>;

// Solves the robust agents' programs and binds each agent's strategy; the
// returned vector is indexed by agent.
std::vector<BidFn> make_bidders(const MarketConfig& config);

}  // namespace pseudomarket
