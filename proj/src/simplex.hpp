#pragma once

#include <utility>
#include <vector>

namespace sam3r::detail {

// Linear relaxation in the solver's native shape: minimize obj over
// lo <= x <= hi subject to sparse <= rows. All bounds finite.
struct LpProblem {
    int num_vars = 0;
    std::vector<double> lo, hi;
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> rhs;
    std::vector<double> obj;
};

enum class LpStatus { Optimal, Infeasible, IterLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

// Two-phase primal simplex on a dense tableau with upper-bounded variables.
LpResult solve_lp(const LpProblem& p);

}  // namespace sam3r::detail
