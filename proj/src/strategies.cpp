#include "pseudomarket/strategies.hpp"

#include <cmath>

namespace pseudomarket {

std::optional<Bid> robust_bid(const StrategyContext& ctx, const RequestPolicy& policy,
                              RngStream& rng) {
    if (!ctx.item_available) return std::nullopt;
    const double r = ctx.reserve;
    const int k = ctx.type.duration;
    if (ctx.budget < r * k) return std::nullopt;
    if (!rng.bernoulli(policy.request_prob[static_cast<std::size_t>(ctx.type_index)]))
        return std::nullopt;
    return Bid{-1, r, k};
}

std::optional<Bid> blocker_bid(const StrategyContext& ctx, int k_max) {
    if (!ctx.item_available) return std::nullopt;
    const double price = ctx.reserve > 1.0 ? ctx.reserve : 1.0;
    int d = k_max;
    if (ctx.budget < price * d) d = static_cast<int>(std::floor(ctx.budget / price));
    if (d < 1) return std::nullopt;
    return Bid{-1, price, d};
}

std::optional<Bid> sniper_bid(const StrategyContext& ctx, double price) {
    if (!ctx.item_available) return std::nullopt;
    if (ctx.type.value <= 0.0) return std::nullopt;
    if (ctx.budget < price) return std::nullopt;
    return Bid{-1, price, 1};
}

std::vector<BidFn> make_bidders(const MarketConfig& config) {
    std::vector<BidFn> bidders;
    bidders.reserve(config.agents.size());
    for (int i = 0; i < config.n_agents(); ++i) {
        const auto& spec = config.agents[static_cast<std::size_t>(i)];
        switch (spec.strategy.kind) {
            case StrategyKind::Robust: {
                const double cap = ideal_cap(spec.fair_share, config.units);
                RequestPolicy policy = ideal_policy(spec.type_space, cap);
                bidders.push_back([i, policy = std::move(policy)](const StrategyContext& ctx,
                                                                  RngStream& rng) {
                    auto bid = robust_bid(ctx, policy, rng);
                    if (bid) bid->agent = i;
                    return bid;
                });
                break;
            }
            case StrategyKind::Blocker: {
                const int k_max = spec.strategy.blocker_k_max;
                bidders.push_back([i, k_max](const StrategyContext& ctx, RngStream&) {
                    auto bid = blocker_bid(ctx, k_max);
                    if (bid) bid->agent = i;
                    return bid;
                });
                break;
            }
            case StrategyKind::Sniper: {
                const double price =
                    spec.strategy.sniper_price.value_or(default_sniper_price(config.reserve));
                bidders.push_back([i, price](const StrategyContext& ctx, RngStream&) {
                    auto bid = sniper_bid(ctx, price);
                    if (bid) bid->agent = i;
                    return bid;
                });
                break;
            }
            case StrategyKind::Silent:
                bidders.push_back([](const StrategyContext&, RngStream&) {
                    return std::optional<Bid>{};
                });
                break;
        }
    }
    return bidders;
}

}  // namespace pseudomarket
