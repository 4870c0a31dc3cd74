#include "pseudomarket/ideal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pseudomarket/simplex.hpp"

namespace pseudomarket {

namespace {
constexpr double kFeasTol = 1e-9;
constexpr int kOracleMaxTypes = 6;
}  // namespace

LPInstance build_ideal_lp(const TypeSpace& ts, double cap) {
    ts.validate();
    if (!std::isfinite(cap) || cap <= 0.0 || cap > 1.0) {
        std::ostringstream os;
        os << "cap " << cap << " outside (0, 1]";
        throw CapOutOfRange(os.str());
    }
    const std::size_t n = ts.types.size();
    LPInstance lp;
    lp.cap = cap;
    lp.objective.resize(n);
    lp.rows.assign(n + 1, std::vector<double>(n, 0.0));
    lp.rhs.resize(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        lp.objective[j] = ts.types[j].value * ts.types[j].duration;
        lp.rows[0][j] = static_cast<double>(ts.types[j].duration);
    }
    lp.rhs[0] = cap;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = ts.types[i].probability;
        for (std::size_t j = 0; j < n; ++j)
            lp.rows[i + 1][j] = p * (ts.types[j].duration - 1) + (i == j ? 1.0 : 0.0);
        lp.rhs[i + 1] = p;
    }
    return lp;
}

namespace {

void check_residuals(const LPInstance& lp, const std::vector<double>& f) {
    for (double v : f)
        if (v < -kFeasTol) throw NumericalFailure("LP solution has negative component");
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) lhs += lp.rows[i][j] * f[j];
        if (lhs > lp.rhs[i] + kFeasTol)
            throw NumericalFailure("LP solution violates a constraint");
    }
}

}  // namespace

LPSolution solve_lp(const LPInstance& lp) {
    SimplexResult r = simplex_maximize(lp.rows, lp.rhs, lp.objective);
    check_residuals(lp, r.x);
    LPSolution sol;
    sol.f = std::move(r.x);
    for (double& v : sol.f) v = std::max(v, 0.0);
    sol.objective = r.objective;
    sol.status = r.degenerate ? SolveStatus::Degenerate : SolveStatus::Optimal;
    return sol;
}

LPSolution vertex_enumeration_oracle(const LPInstance& lp) {
    const int n = static_cast<int>(lp.objective.size());
    if (n > kOracleMaxTypes) {
        std::ostringstream os;
        os << "vertex enumeration is capped at " << kOracleMaxTypes << " types, got " << n;
        throw TooManyTypes(os.str());
    }

    // All constraints as g.f <= h: the LP rows plus -f_j <= 0.
    std::vector<std::vector<double>> g = lp.rows;
    std::vector<double> h = lp.rhs;
    for (int j = 0; j < n; ++j) {
        std::vector<double> row(static_cast<std::size_t>(n), 0.0);
        row[static_cast<std::size_t>(j)] = -1.0;
        g.push_back(std::move(row));
        h.push_back(0.0);
    }
    const int total = static_cast<int>(g.size());

    LPSolution best;
    best.f.assign(static_cast<std::size_t>(n), 0.0);
    best.objective = 0.0;  // f = 0 is always feasible
    bool tie_seen = false;

    std::vector<int> pick(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) pick[static_cast<std::size_t>(j)] = j;

    auto advance = [&]() {
        int i = n - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == total - n + i) --i;
        if (i < 0) return false;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        return true;
    };

    std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n + 1)));
    do {
        // Solve the n active constraints as equalities.
        for (int i = 0; i < n; ++i) {
            const auto& row = g[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
            for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)];
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] =
                h[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
        }
        bool singular = false;
        for (int col = 0; col < n && !singular; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                    std::abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                    piv = r;
            if (std::abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < 1e-11) {
                singular = true;
                break;
            }
            std::swap(m[static_cast<std::size_t>(col)], m[static_cast<std::size_t>(piv)]);
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                const double factor = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                                      m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
                if (factor == 0.0) continue;
                for (int j = col; j <= n; ++j)
                    m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -=
                        factor * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
            }
        }
        if (singular) continue;

        std::vector<double> f(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            f[static_cast<std::size_t>(j)] = m[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)] /
                                             m[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];

        bool feasible = true;
        for (int i = 0; i < total && feasible; ++i) {
            double lhs = 0.0;
            for (int j = 0; j < n; ++j)
                lhs += g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(j)];
            if (lhs > h[static_cast<std::size_t>(i)] + 1e-10) feasible = false;
        }
        if (!feasible) continue;

        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += lp.objective[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(j)];
        if (obj > best.objective + 1e-10) {
            best.f = f;
            best.objective = obj;
            tie_seen = false;
        } else if (obj > best.objective - 1e-10) {
            double dist = 0.0;
            for (int j = 0; j < n; ++j)
                dist = std::max(dist, std::abs(f[static_cast<std::size_t>(j)] - best.f[static_cast<std::size_t>(j)]));
            if (dist > 1e-8) tie_seen = true;
        }
    } while (advance());

    for (double& v : best.f) v = std::max(v, 0.0);
    best.status = tie_seen ? SolveStatus::Degenerate : SolveStatus::Optimal;
    return best;
}

RequestPolicy f_to_x(const LPSolution& sol, const TypeSpace& ts) {
    const std::size_t n = ts.types.size();
    double hold = 0.0;  // sum (duration-1) * f = fraction of rounds spent holding past the first
    for (std::size_t j = 0; j < n; ++j) hold += (ts.types[j].duration - 1) * sol.f[j];
    const double denom = 1.0 - hold;
    if (denom <= 1e-9)
        throw DegenerateDenominator("availability denominator underflow; f is not feasible");

    RequestPolicy policy;
    policy.x.resize(n);
    policy.request_prob.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        policy.x[j] = std::max(sol.f[j] / denom, 0.0);
        const double p = ts.types[j].probability;
        if (p > 0.0) {
            const double rp = policy.x[j] / p;
            if (rp > 1.0 + 1e-9)
                throw NumericalFailure("request probability exceeds 1; LP solution inconsistent");
            policy.request_prob[j] = std::clamp(rp, 0.0, 1.0);
        } else {
            policy.request_prob[j] = 0.0;
        }
    }
    policy.stats = epoch_stats(policy.x, ts);
    return policy;
}

std::vector<double> x_to_f(std::span<const double> x, const TypeSpace& ts) {
    double hold = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) hold += (ts.types[j].duration - 1) * x[j];
    std::vector<double> f(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) f[j] = x[j] / (1.0 + hold);
    return f;
}

EpochStats epoch_stats(std::span<const double> x, const TypeSpace& ts) {
    EpochStats s;
    double q = 0.0, kx = 0.0, vkx = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        q += x[j];
        kx += ts.types[j].duration * x[j];
        vkx += ts.types[j].value * ts.types[j].duration * x[j];
    }
    if (q <= 0.0) return s;  // never requests: all rates are 0, kappa undefined
    s.q = q;
    s.kappa = kx / q;
    s.kappa_defined = true;
    // Renewal epochs: 1/q - 1 idle rounds on average, then kappa held rounds.
    const double denom = 1.0 / q - 1.0 + s.kappa;
    s.v_star = (vkx / q) / denom;
    s.beta = s.kappa / denom;
    return s;
}

RequestPolicy ideal_policy(const TypeSpace& ts, double cap) {
    return f_to_x(solve_lp(build_ideal_lp(ts, cap)), ts);
}

RenewalEstimate simulate_no_competition(const RequestPolicy& policy, const TypeSpace& ts,
                                        std::int64_t horizon, std::uint64_t seed) {
    if (horizon < 1) throw NonPositiveHorizon("horizon must be >= 1");
    const TrialRng trial{seed, 0};
    double utility = 0.0;
    std::int64_t held = 0;
    std::int64_t free_at = 1;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        if (t < free_at) continue;  // still holding; demands in between are lost
        RngStream rng = trial.stream(0, static_cast<std::uint64_t>(t));
        const int idx = sample_type_index(ts, rng);
        if (!rng.bernoulli(policy.request_prob[static_cast<std::size_t>(idx)])) continue;
        const auto& ty = ts.types[static_cast<std::size_t>(idx)];
        utility += ty.value * ty.duration;
        held += std::min<std::int64_t>(ty.duration, horizon - t + 1);
        free_at = t + ty.duration;
    }
    RenewalEstimate est;
    est.utility_rate = utility / static_cast<double>(horizon);
    est.utilization = static_cast<double>(held) / static_cast<double>(horizon);
    return est;
}

}  // namespace pseudomarket
