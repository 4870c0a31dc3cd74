#include "pseudomarket/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace pseudomarket {

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const auto n = xs.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    out.se = std::sqrt(var / static_cast<double>(n));
    return out;
}

double positive_value_mass(const TypeSpace& ts) {
    double p = 0.0;
    for (const auto& t : ts.types)
        if (t.value > 0.0) p += t.probability;
    return p;
}

void attach_analytics(ExperimentSummary& s, const ExperimentSpec& spec) {
    const MarketConfig& cfg = spec.config;
    const int n = cfg.n_agents();
    const auto T = static_cast<double>(cfg.horizon);
    s.protagonist = protagonist_agent(cfg);

    for (int i = 0; i < n; ++i) {
        const auto& a = cfg.agents[static_cast<std::size_t>(i)];
        const RequestPolicy pol =
            ideal_policy(a.type_space, ideal_cap(a.fair_share, cfg.units));
        s.v_star.push_back(pol.stats.v_star);
        s.beta.push_back(pol.stats.beta);
    }
    s.welfare_ub = 0.0;
    for (double v : s.v_star) s.welfare_ub += v * T;

    const auto hero_i = static_cast<std::size_t>(s.protagonist);
    const AgentStats& hero = s.agents[hero_i];
    const double vs = s.v_star[hero_i];
    const double bt = s.beta[hero_i];
    const double alpha = cfg.agents[hero_i].fair_share;

    if (hero.mean_payment > 0.0) {
        s.bpb_empirical = hero.mean_utility / hero.mean_payment;
        if (bt > 0.0 && cfg.reserve > 0.0) s.bpb_reference = vs / (bt * cfg.reserve);
    }

    if (spec.preset == "guarantee" || spec.preset == "multi") {
        const bool multi = spec.preset == "multi";
        const double lb = guarantee_lower_bound(vs, cfg.horizon, cfg.reserve, alpha, bt,
                                                cfg.k_max(), multi);
        s.guarantee_lb = lb;
        s.checks.push_back(
            {"mean_utility_ge_guarantee_lb", hero.mean_utility >= lb, hero.mean_utility, lb});
        s.checks.push_back({"mean_utility_le_vstar_T", hero.mean_utility <= vs * T,
                            hero.mean_utility, vs * T});
    } else if (spec.preset == "impossibility") {
        const double ub =
            impossibility_upper_bound(vs, cfg.horizon, cfg.reserve, alpha, cfg.k_max());
        s.impossibility_ub = ub;
        const double rhs = ub + 3.0 * hero.se_utility;
        s.checks.push_back({"mean_utility_le_impossibility_ub_plus_3se",
                            hero.mean_utility <= rhs, hero.mean_utility, rhs});
    } else if (spec.preset == "hardness") {
        const int k = cfg.k_max();
        const double p = positive_value_mass(cfg.agents[0].type_space);
        const double p_prime = 1.0 - std::pow(1.0 - p, n);
        const double fraction = k / (k - 1.0 + 1.0 / p_prime);
        s.analytic_fraction = fraction;
        double emp = 0.0;
        for (const auto& st : s.agents) emp += st.mean_utilization;
        s.empirical_fraction = emp;
        s.checks.push_back({"fraction_within_0.01", std::abs(emp - fraction) <= 0.01,
                            std::abs(emp - fraction), 0.01});
        // The allocator cannot give every agent more than her slice of the
        // allocated rounds: the average agent sits at fraction*T/n, and the
        // worst-off agent at or below it. (Individual agents can exceed the
        // slice; lowest-index tie-breaking favors agent 0.)
        double mean_welfare = 0.0;
        double min_utility = std::numeric_limits<double>::infinity();
        double min_se = 0.0;
        double welfare_se = 0.0;
        for (const auto& st : s.agents) {
            mean_welfare += st.mean_utility;
            welfare_se += st.se_utility;  // conservative: correlations ignored
            if (st.mean_utility < min_utility) {
                min_utility = st.mean_utility;
                min_se = st.se_utility;
            }
        }
        const double share = fraction * T / n;
        s.checks.push_back({"mean_agent_utility_le_fraction_share_plus_3se",
                            mean_welfare / n <= share + 3.0 * welfare_se / n,
                            mean_welfare / n, share + 3.0 * welfare_se / n});
        s.checks.push_back({"min_agent_utility_le_fraction_share_plus_3se",
                            min_utility <= share + 3.0 * min_se, min_utility,
                            share + 3.0 * min_se});
    } else if (spec.preset == "roundrobin") {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto ai = static_cast<std::size_t>(i);
            const double target = s.v_star[ai] / n;
            if (target <= 0.0) continue;
            const double rate = s.agents[ai].mean_utility / T;
            worst = std::max(worst, std::abs(rate - target) / target);
        }
        s.checks.push_back(
            {"per_agent_rate_within_10pct_of_ideal_over_n", worst <= 0.10, worst, 0.10});
    }
}

}  // namespace

int protagonist_agent(const MarketConfig& config) {
    for (int i = 0; i < config.n_agents(); ++i) {
        const auto kind = config.agents[static_cast<std::size_t>(i)].strategy.kind;
        if (kind != StrategyKind::Blocker && kind != StrategyKind::Silent) return i;
    }
    return 0;
}

ExperimentSummary monte_carlo(const ExperimentSpec& spec, int jobs) {
    validate_config(spec.config);
    if (spec.trials < 1) throw ConfigError("trials must be >= 1");
    const MarketConfig& cfg = spec.config;
    const int n = cfg.n_agents();
    const int trials = spec.trials;

    std::vector<BidFn> bidders;
    if (spec.allocator == Allocator::Mechanism) bidders = make_bidders(cfg);

    ExperimentSummary s;
    s.trials = trials;
    s.horizon = cfg.horizon;
    s.units = cfg.units;
    s.preset = spec.preset;
    s.rows.assign(static_cast<std::size_t>(trials) * static_cast<std::size_t>(n), TrialRow{});

    auto run_one = [&](int trial) {
        Trace tr;
        const TrialKey key{cfg.seed, static_cast<std::uint64_t>(trial)};
        switch (spec.allocator) {
            case Allocator::Mechanism:
                tr = run_mechanism(cfg, bidders, key, TraceDetail::Totals);
                break;
            case Allocator::RoundRobin:
                tr = run_round_robin(cfg, key, TraceDetail::Totals);
                break;
            case Allocator::GreedyOmniscient:
                tr = run_greedy_omniscient(cfg, key, TraceDetail::Totals);
                break;
        }
        for (int i = 0; i < n; ++i) {
            const auto& tot = tr.totals[static_cast<std::size_t>(i)];
            TrialRow& row = s.rows[static_cast<std::size_t>(trial) * static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(i)];
            row.trial = trial;
            row.agent = i;
            row.total_utility = tot.utility;
            row.total_payment = tot.payment;
            row.utilization = tr.utilization(i);
            row.blocked_rounds = tot.blocked_rounds;
        }
    };

    const int workers = std::clamp(jobs, 1, trials);
    if (workers == 1) {
        for (int t = 0; t < trials; ++t) run_one(t);
    } else {
        std::atomic<int> next{0};
        std::mutex err_mu;
        std::exception_ptr err;
        auto drain = [&] {
            while (true) {
                const int t = next.fetch_add(1);
                if (t >= trials) break;
                try {
                    run_one(t);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                    break;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }

    s.agents.resize(static_cast<std::size_t>(n));
    std::vector<double> scratch(static_cast<std::size_t>(trials));
    for (int i = 0; i < n; ++i) {
        auto& st = s.agents[static_cast<std::size_t>(i)];
        auto col = [&](auto&& get) {
            for (int t = 0; t < trials; ++t)
                scratch[static_cast<std::size_t>(t)] =
                    get(s.rows[static_cast<std::size_t>(t) * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(i)]);
            return mean_se(scratch);
        };
        MeanSe m = col([](const TrialRow& r) { return r.total_utility; });
        st.mean_utility = m.mean;
        st.se_utility = m.se;
        m = col([](const TrialRow& r) { return r.total_payment; });
        st.mean_payment = m.mean;
        st.se_payment = m.se;
        m = col([](const TrialRow& r) { return r.utilization; });
        st.mean_utilization = m.mean;
        st.se_utilization = m.se;
        m = col([](const TrialRow& r) { return static_cast<double>(r.blocked_rounds); });
        st.mean_blocked = m.mean;
        st.se_blocked = m.se;
    }

    attach_analytics(s, spec);
    return s;
}

double bpb_ratio(const ExperimentSummary& summary, int agent) {
    const auto& st = summary.agents.at(static_cast<std::size_t>(agent));
    if (st.mean_payment <= 0.0)
        throw ZeroPaymentAggregate("aggregate payment is zero; utility-per-credit undefined");
    return st.mean_utility / st.mean_payment;
}

double guarantee_lower_bound(double v_star, std::int64_t horizon, double reserve, double alpha,
                             double beta, int k_max, bool multi, double slack_const) {
    if (reserve < 1.0) throw ReserveBelowOne("guarantee bound requires reserve >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (beta <= 0.0)
        throw DegenerateDenominator("utilization must be positive for the concentration term");
    const double c = multi ? (1.0 - alpha) : 1.0;
    const double lead = std::min(1.0 / reserve, 1.0 - c / reserve);
    const double slack =
        slack_const * static_cast<double>(k_max) / (beta * std::sqrt(static_cast<double>(horizon)));
    return v_star * static_cast<double>(horizon) * (lead - slack);
}

double impossibility_upper_bound(double v_star, std::int64_t horizon, double reserve, double alpha,
                                 int k_max) {
    if (k_max < 2) throw KmaxTooSmall("impossibility bound requires k_max >= 2");
    const double floor_price = std::max(1.0, reserve);
    return v_star * static_cast<double>(horizon) *
               (1.0 - (1.0 - alpha) / floor_price + 1.0 / static_cast<double>(k_max)) +
           v_star * static_cast<double>(k_max - 1);
}

HardnessProfile hardness_instance(int n, int k_max, std::int64_t horizon, std::uint64_t seed) {
    if (n < 2) throw ConfigError("hardness instance needs n >= 2");
    if (k_max < 1) throw ConfigError("hardness instance needs k_max >= 1");
    HardnessProfile hp;
    hp.p = 1.0 / (static_cast<double>(k_max) * (n - 1) + 1.0);
    hp.p_prime = 1.0 - std::pow(1.0 - hp.p, n);
    hp.fraction = k_max / (k_max - 1.0 + 1.0 / hp.p_prime);

    MarketConfig cfg;
    cfg.horizon = horizon;
    cfg.units = 1;
    cfg.reserve = 2.0;
    cfg.seed = seed;
    cfg.agents.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        AgentSpec a;
        a.fair_share = 1.0 / n;
        a.type_space.types = {{1.0, k_max, hp.p}, {0.0, 1, 1.0 - hp.p}};
        a.strategy.kind = StrategyKind::Silent;
        cfg.agents.push_back(std::move(a));
    }
    hp.config = std::move(cfg);
    return hp;
}

}  // namespace pseudomarket
