#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sam3r {

enum class VarKind { Binary, Integer };

struct IpVariable {
    std::string name;
    long long lo = 0;
    long long hi = 0;
    VarKind kind = VarKind::Integer;
};

// One <= row: sum(coef * var) <= rhs.
struct IpConstraint {
    std::vector<std::pair<int, double>> terms;  // (var index, coefficient), sorted
    double rhs = 0.0;
    std::string label;
};

// Bounded-integer linear minimization with <=-constraints only. Planners
// pre-linearize everything (logs of constants folded before model build).
class IntegerProgram {
public:
    int add_variable(std::string name, long long lo, long long hi, VarKind kind);
    void add_constraint(std::vector<std::pair<int, double>> terms, double rhs,
                        std::string label = {});
    void set_objective(int var, double coef);

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }
    const std::vector<IpVariable>& variables() const { return vars_; }
    const std::vector<IpConstraint>& constraints() const { return rows_; }
    const std::vector<double>& objective() const { return obj_; }

    double objective_value(const std::vector<long long>& assignment) const;
    double row_activity(int row, const std::vector<long long>& assignment) const;

private:
    std::vector<IpVariable> vars_;
    std::vector<IpConstraint> rows_;
    std::vector<double> obj_;
};

enum class SolveStatus { Optimal, Infeasible, Aborted };
const char* solve_status_name(SolveStatus s);

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<long long> assignment;  // meaningful for Optimal, or best incumbent on Aborted
    double objective = 0.0;
    bool has_incumbent = false;
    std::uint64_t nodes = 0;  // nodes explored (bnb) or assignments enumerated (exhaustive)
};

// Certification oracle: enumerates every assignment. Refuses (BudgetError)
// when the product of domain sizes exceeds domain_budget.
Solution solve_exhaustive(const IntegerProgram& ip, std::uint64_t domain_budget = 1u << 22);

// Depth-first branch and bound with an LP-relaxation bound per node (bounded
// simplex; coefficient-sign bound when the relaxation is unavailable).
// Deterministic for a fixed variable order. Exhausting node_budget returns
// Aborted carrying the best incumbent.
Solution solve_bnb(const IntegerProgram& ip, std::uint64_t node_budget = 1000000);

struct FeasibilityViolation {
    enum class Kind { Row, Bound } kind = Kind::Row;
    int index = 0;       // constraint index or variable index
    double slack = 0.0;  // amount by which the row/bound is exceeded
    std::string label;
};

struct FeasibilityReport {
    bool ok = true;
    std::vector<FeasibilityViolation> violations;
};

// Independent re-evaluation of every constraint and bound at 1e-6 tolerance.
FeasibilityReport check_feasible(const IntegerProgram& ip,
                                 const std::vector<long long>& assignment);

// Diagnostic LP-format dump for cross-checking with external solvers.
std::string to_lp_format(const IntegerProgram& ip);

}  // namespace sam3r
