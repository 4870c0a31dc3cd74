#include "pseudomarket/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "pseudomarket/errors.hpp"

namespace pseudomarket {

namespace {
constexpr double kReducedCostTol = 1e-10;
constexpr double kPivotTol = 1e-11;
constexpr int kMaxIterations = 10000;
}  // namespace

SimplexResult simplex_maximize(const std::vector<std::vector<double>>& a,
                               const std::vector<double>& b,
                               const std::vector<double>& c) {
    const int m = static_cast<int>(a.size());
    const int n = static_cast<int>(c.size());
    if (static_cast<int>(b.size()) != m)
        throw NumericalFailure("simplex: rhs size does not match row count");
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != n)
            throw NumericalFailure("simplex: ragged constraint matrix");
    for (double bi : b)
        if (!(bi >= 0.0))
            throw NumericalFailure("simplex: negative rhs, slack basis infeasible");

    // Tableau: m constraint rows + objective row; columns are n structural
    // variables, m slacks, rhs. Objective row holds reduced costs.
    const int cols = n + m + 1;
    std::vector<std::vector<double>> t(static_cast<std::size_t>(m + 1),
                                       std::vector<double>(static_cast<std::size_t>(cols), 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = b[i];
    }
    for (int j = 0; j < n; ++j) t[m][j] = c[j];

    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Bland: entering variable is the lowest-index column that improves.
        int enter = -1;
        for (int j = 0; j < n + m; ++j) {
            if (t[m][j] > kReducedCostTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) {
            SimplexResult res;
            res.x.assign(static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < m; ++i)
                if (basis[i] < n) res.x[static_cast<std::size_t>(basis[i])] = t[i][cols - 1];
            // pivoting drives the objective row rhs to -z
            res.objective = -t[m][cols - 1];
            for (int j = 0; j < n + m; ++j) {
                bool in_basis = false;
                for (int i = 0; i < m; ++i)
                    if (basis[i] == j) in_basis = true;
                if (!in_basis && std::abs(t[m][j]) <= kReducedCostTol) {
                    res.degenerate = true;
                    break;
                }
            }
            return res;
        }

        // Ratio test; ties go to the smallest basic variable index (Bland).
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (t[i][enter] <= kPivotTol) continue;
            const double ratio = t[i][cols - 1] / t[i][enter];
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0)
            throw NumericalFailure("simplex: unbounded direction in a bounded program");

        // Pivot (Gauss-Jordan on the entering column).
        const double piv = t[leave][enter];
        for (int j = 0; j < cols; ++j) t[leave][j] /= piv;
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    throw NumericalFailure("simplex: iteration limit exceeded");
}

}  // namespace pseudomarket
