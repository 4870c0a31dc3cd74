#pragma once

#include <vector>

namespace pseudomarket {

// Dense primal simplex for: maximize c.x subject to A x <= b, x >= 0,
// with b >= 0 so the slack basis is the starting vertex. Bland's rule keeps
// it cycle-free. Built for tiny, well-scaled instances where exact control
// of tolerances matters more than speed.
struct SimplexResult {
    std::vector<double> x;
    double objective = 0.0;
    // true when a nonbasic column has ~zero reduced cost at the optimum,
    // i.e. other optimal vertices exist.
    bool degenerate = false;
};

SimplexResult simplex_maximize(const std::vector<std::vector<double>>& a,
                               const std::vector<double>& b,
                               const std::vector<double>& c);

}  // namespace pseudomarket
