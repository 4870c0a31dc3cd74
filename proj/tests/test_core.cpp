#include <doctest.h>

#include <cmath>
#include <vector>

#include "instances.hpp"
#include "pseudomarket/types.hpp"

using namespace pseudomarket;

TEST_CASE("substreams depend only on their key") {
    RngStream a(7, 3, 2, 11);
    // Drawing from unrelated streams in between must not matter.
    RngStream noise(7, 3, 1, 11);
    (void)noise.next_u64();
    RngStream b(7, 3, 2, 11);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct keys give distinct sequences") {
    RngStream base(1, 0, 0, 1);
    RngStream other_agent(1, 0, 1, 1);
    RngStream other_round(1, 0, 0, 2);
    RngStream other_trial(1, 1, 0, 1);
    const auto x = base.next_u64();
    CHECK(x != other_agent.next_u64());
    CHECK(x != other_round.next_u64());
    CHECK(x != other_trial.next_u64());
}

TEST_CASE("unit draws are uniform-ish") {
    RngStream rng(42, 0, 0, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    // 4 sigma band around 0.5, sigma = sqrt(1/12/n)
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("sample_type_index matches the distribution") {
    const TypeSpace ts = pmtest::mixed_duration_instance();
    std::vector<int> counts(ts.types.size(), 0);
    const int n = 1000000;
    for (int t = 1; t <= n; ++t) {
        RngStream rng(5, 0, 0, static_cast<std::uint64_t>(t));
        ++counts[static_cast<std::size_t>(sample_type_index(ts, rng))];
    }
    // 4 sigma ~= 0.002 at p = 0.5
    CHECK(std::abs(counts[0] / double(n) - 0.5) < 0.002);
    CHECK(std::abs(counts[1] / double(n) - 0.5) < 0.002);
}

TEST_CASE("sample_type_index on a point mass") {
    const TypeSpace ts = pmtest::point_mass_instance();
    for (int t = 1; t <= 100; ++t) {
        RngStream rng(9, 0, 0, static_cast<std::uint64_t>(t));
        CHECK(sample_type_index(ts, rng) == 0);
    }
}

TEST_CASE("type space validation") {
    TypeSpace bad_mass{{DemandType{1.0, 1, 0.6}, DemandType{0.0, 1, 0.6}}};
    CHECK_THROWS_AS(bad_mass.validate(), ProbabilityMassError);

    TypeSpace bad_duration{{DemandType{1.0, 0, 1.0}}};
    CHECK_THROWS_AS(bad_duration.validate(), ConfigError);

    TypeSpace negative_value{{DemandType{-0.5, 1, 1.0}}};
    CHECK_THROWS_AS(negative_value.validate(), ConfigError);

    TypeSpace empty;
    CHECK_THROWS_AS(empty.validate(), ConfigError);

    // All-zero values are a legal degenerate space.
    TypeSpace all_zero{{DemandType{0.0, 1, 1.0}}};
    CHECK_NOTHROW(all_zero.validate());

    CHECK(pmtest::mixed_duration_instance().k_max() == 2);
}

namespace {

MarketConfig small_config() {
    MarketConfig c;
    c.horizon = 100;
    c.units = 1;
    c.reserve = 2.0;
    c.agents.resize(2);
    c.agents[0].fair_share = 0.4;
    c.agents[0].type_space = pmtest::mixed_duration_instance();
    c.agents[0].strategy.kind = StrategyKind::Robust;
    c.agents[1].fair_share = 0.6;
    c.agents[1].type_space = TypeSpace{{DemandType{0.0, 1, 1.0}}};
    c.agents[1].strategy.kind = StrategyKind::Blocker;
    c.agents[1].strategy.blocker_k_max = 5;
    return c;
}

}  // namespace

TEST_CASE("validate_config accepts a sound market") {
    CHECK_NOTHROW(validate_config(small_config()));
}

TEST_CASE("validate_config rejects broken markets") {
    auto c = small_config();
    c.horizon = 0;
    CHECK_THROWS_AS(validate_config(c), NonPositiveHorizon);

    c = small_config();
    c.agents[0].fair_share = 0.5;  // sum 1.1
    CHECK_THROWS_AS(validate_config(c), FairShareSumError);

    c = small_config();
    c.agents[0].fair_share = 0.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.agents[0].type_space.types[0].probability = 0.7;
    CHECK_THROWS_AS(validate_config(c), ProbabilityMassError);

    c = small_config();
    c.units = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.reserve = -1.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.agents[1].strategy.blocker_k_max = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("budgets scale with share, units and horizon") {
    auto c = small_config();
    CHECK(c.initial_budget(0) == doctest::Approx(0.4 * 100).epsilon(1e-12));
    c.units = 4;
    CHECK(c.initial_budget(0) == doctest::Approx(0.4 * 4 * 100).epsilon(1e-12));
}

TEST_CASE("market k_max sees both types and blocker reservations") {
    auto c = small_config();
    CHECK(c.k_max() == 5);  // blocker kmax dominates the 2-round type
    c.agents[1].strategy.blocker_k_max = 1;
    CHECK(c.k_max() == 2);
}

TEST_CASE("initial market state") {
    const auto c = small_config();
    const auto s = MarketState::initial(c);
    CHECK(s.round == 1);
    CHECK(s.free_units(1) == 1);
    CHECK(s.budgets[0] == doctest::Approx(40.0));
    CHECK(s.holder[0] == -1);
    CHECK_FALSE(s.is_holder(0, 1));
}

TEST_CASE("strategy names round-trip") {
    CHECK(strategy_from_name("robust") == StrategyKind::Robust);
    CHECK(strategy_from_name(strategy_name(StrategyKind::Sniper)) == StrategyKind::Sniper);
    CHECK_THROWS_AS(strategy_from_name("bold"), SchemaError);
}
