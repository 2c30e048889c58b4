#include "sam3r/ip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sam3r/errors.hpp"
#include "simplex.hpp"

namespace sam3r {

int IntegerProgram::add_variable(std::string name, long long lo, long long hi, VarKind kind) {
    if (lo > hi) throw ConfigError("variable " + name + ": lower bound exceeds upper bound");
    if (kind == VarKind::Binary && (lo < 0 || hi > 1))
        throw ConfigError("variable " + name + ": binary bounds must lie in {0,1}");
    vars_.push_back({std::move(name), lo, hi, kind});
    obj_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
}

void IntegerProgram::add_constraint(std::vector<std::pair<int, double>> terms, double rhs,
                                    std::string label) {
    for (auto [v, c] : terms) {
        (void)c;
        if (v < 0 || v >= num_variables())
            throw ConfigError("constraint " + label + ": unknown variable index");
    }
    std::sort(terms.begin(), terms.end());
    rows_.push_back({std::move(terms), rhs, std::move(label)});
}

void IntegerProgram::set_objective(int var, double coef) {
    if (var < 0 || var >= num_variables()) throw ConfigError("objective: unknown variable index");
    obj_[var] = coef;
}

double IntegerProgram::objective_value(const std::vector<long long>& assignment) const {
    double z = 0.0;
    for (int j = 0; j < num_variables(); ++j) z += obj_[j] * static_cast<double>(assignment[j]);
    return z;
}

double IntegerProgram::row_activity(int row, const std::vector<long long>& assignment) const {
    double act = 0.0;
    for (auto [v, c] : rows_[row].terms) act += c * static_cast<double>(assignment[v]);
    return act;
}

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Aborted: return "Aborted";
    }
    return "?";
}

FeasibilityReport check_feasible(const IntegerProgram& ip,
                                 const std::vector<long long>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(ip.num_variables()))
        throw ConfigError("check_feasible: assignment does not cover all variables");
    FeasibilityReport report;
    const auto& vars = ip.variables();
    for (int j = 0; j < ip.num_variables(); ++j) {
        if (assignment[j] < vars[j].lo || assignment[j] > vars[j].hi) {
            const double slack = assignment[j] < vars[j].lo
                                     ? static_cast<double>(vars[j].lo - assignment[j])
                                     : static_cast<double>(assignment[j] - vars[j].hi);
            report.violations.push_back(
                {FeasibilityViolation::Kind::Bound, j, slack, vars[j].name});
        }
    }
    for (int r = 0; r < ip.num_constraints(); ++r) {
        const double act = ip.row_activity(r, assignment);
        const double rhs = ip.constraints()[r].rhs;
        if (act > rhs + 1e-6)
            report.violations.push_back(
                {FeasibilityViolation::Kind::Row, r, act - rhs, ip.constraints()[r].label});
    }
    report.ok = report.violations.empty();
    return report;
}

Solution solve_exhaustive(const IntegerProgram& ip, std::uint64_t domain_budget) {
    const auto& vars = ip.variables();
    const int n = ip.num_variables();

    long double product = 1.0L;
    for (const auto& v : vars) product *= static_cast<long double>(v.hi - v.lo + 1);
    if (product > static_cast<long double>(domain_budget))
        throw BudgetError("solve_exhaustive: domain product exceeds budget of " +
                          std::to_string(domain_budget));

    Solution best;
    best.status = SolveStatus::Infeasible;
    std::vector<long long> cur(n);
    for (int j = 0; j < n; ++j) cur[j] = vars[j].lo;

    const int m = ip.num_constraints();
    while (true) {
        ++best.nodes;
        bool feasible = true;
        for (int r = 0; r < m && feasible; ++r)
            if (ip.row_activity(r, cur) > ip.constraints()[r].rhs + 1e-6) feasible = false;
        if (feasible) {
            const double z = ip.objective_value(cur);
            if (!best.has_incumbent || z < best.objective - 1e-12) {
                best.has_incumbent = true;
                best.objective = z;
                best.assignment = cur;
                best.status = SolveStatus::Optimal;
            }
        }
        // Odometer.
        int j = n - 1;
        while (j >= 0 && cur[j] == vars[j].hi) {
            cur[j] = vars[j].lo;
            --j;
        }
        if (j < 0) break;
        ++cur[j];
    }
    return best;
}

namespace {

// Box lower bound ignoring the constraints; valid whenever the LP is
// unavailable.
double coefficient_sign_bound(const IntegerProgram& ip, const std::vector<long long>& lo,
                              const std::vector<long long>& hi) {
    double bound = 0.0;
    for (int j = 0; j < ip.num_variables(); ++j) {
        const double c = ip.objective()[j];
        bound += std::min(c * static_cast<double>(lo[j]), c * static_cast<double>(hi[j]));
    }
    return bound;
}

struct Node {
    std::vector<long long> lo, hi;
};

}  // namespace

Solution solve_bnb(const IntegerProgram& ip, std::uint64_t node_budget) {
    const int n = ip.num_variables();
    const auto& vars = ip.variables();

    detail::LpProblem lp;
    lp.num_vars = n;
    lp.lo.resize(n);
    lp.hi.resize(n);
    lp.obj = ip.objective();
    lp.rows.reserve(ip.num_constraints());
    lp.rhs.reserve(ip.num_constraints());
    for (const auto& row : ip.constraints()) {
        lp.rows.push_back(row.terms);
        lp.rhs.push_back(row.rhs);
    }

    Solution best;
    best.status = SolveStatus::Infeasible;

    Node root;
    root.lo.resize(n);
    root.hi.resize(n);
    for (int j = 0; j < n; ++j) {
        root.lo[j] = vars[j].lo;
        root.hi[j] = vars[j].hi;
    }
    std::vector<Node> stack;
    stack.push_back(std::move(root));

    bool aborted = false;
    while (!stack.empty()) {
        if (best.nodes >= node_budget) {
            aborted = true;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        ++best.nodes;

        for (int j = 0; j < n; ++j) {
            lp.lo[j] = static_cast<double>(node.lo[j]);
            lp.hi[j] = static_cast<double>(node.hi[j]);
        }
        detail::LpResult rel = detail::solve_lp(lp);
        if (rel.status == detail::LpStatus::Infeasible) continue;

        const bool have_point = rel.status == detail::LpStatus::Optimal;
        const double lower_bound =
            have_point ? rel.objective : coefficient_sign_bound(ip, node.lo, node.hi);
        if (best.has_incumbent && lower_bound >= best.objective - 1e-7) continue;

        // Branch variable: most fractional LP value, lowest index on ties.
        int branch_var = -1;
        double best_frac_dist = 1.0;
        if (have_point) {
            for (int j = 0; j < n; ++j) {
                const double x = rel.x[j];
                const double frac = x - std::floor(x);
                if (std::min(frac, 1.0 - frac) <= 1e-6) continue;
                const double dist = std::abs(frac - 0.5);
                if (dist < best_frac_dist - 1e-12) {
                    best_frac_dist = dist;
                    branch_var = j;
                }
            }
        }

        if (branch_var < 0 && have_point) {
            // Integral relaxation: round, verify exactly, adopt as incumbent.
            std::vector<long long> cand(n);
            for (int j = 0; j < n; ++j)
                cand[j] = std::clamp(static_cast<long long>(std::llround(rel.x[j])), node.lo[j],
                                     node.hi[j]);
            if (check_feasible(ip, cand).ok) {
                const double z = ip.objective_value(cand);
                if (!best.has_incumbent || z < best.objective - 1e-12) {
                    best.has_incumbent = true;
                    best.objective = z;
                    best.assignment = cand;
                }
                continue;
            }
            // Rounded point failed the exact check (numerical edge); fall
            // through to a domain split so no solution is lost.
        }

        if (branch_var < 0) {
            for (int j = 0; j < n; ++j) {
                if (node.lo[j] < node.hi[j]) {
                    branch_var = j;
                    break;
                }
            }
            if (branch_var < 0) continue;  // fully fixed and not feasible
            Node down = node, up = node;
            const long long mid = node.lo[branch_var] +
                                  (node.hi[branch_var] - node.lo[branch_var]) / 2;
            down.hi[branch_var] = mid;
            up.lo[branch_var] = mid + 1;
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
            continue;
        }

        const double x = rel.x[branch_var];
        Node down = node, up = node;
        down.hi[branch_var] = static_cast<long long>(std::floor(x));
        up.lo[branch_var] = static_cast<long long>(std::floor(x)) + 1;
        stack.push_back(std::move(up));
        stack.push_back(std::move(down));  // explore the floor branch first
    }

    if (aborted) {
        best.status = SolveStatus::Aborted;
    } else {
        best.status = best.has_incumbent ? SolveStatus::Optimal : SolveStatus::Infeasible;
    }
    return best;
}

std::string to_lp_format(const IntegerProgram& ip) {
    std::ostringstream out;
    out.precision(17);
    auto term = [&](double c, const std::string& name, bool first) {
        if (first) {
            out << (c < 0 ? "- " : "");
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        out << std::abs(c) << ' ' << name;
    };
    out << "Minimize\n obj:";
    bool first = true;
    for (int j = 0; j < ip.num_variables(); ++j) {
        if (ip.objective()[j] == 0.0) continue;
        out << ' ';
        term(ip.objective()[j], ip.variables()[j].name, first);
        first = false;
    }
    if (first) out << " 0 " << (ip.num_variables() ? ip.variables()[0].name : "x0");
    out << "\nSubject To\n";
    for (int r = 0; r < ip.num_constraints(); ++r) {
        const auto& row = ip.constraints()[r];
        out << ' ' << (row.label.empty() ? "c" + std::to_string(r) : row.label) << ':';
        bool f = true;
        for (auto [v, c] : row.terms) {
            if (c == 0.0) continue;
            out << ' ';
            term(c, ip.variables()[v].name, f);
            f = false;
        }
        if (f) out << " 0 " << ip.variables()[0].name;
        out << " <= " << row.rhs << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : ip.variables())
        out << ' ' << v.lo << " <= " << v.name << " <= " << v.hi << '\n';
    out << "Generals\n";
    for (const auto& v : ip.variables())
        if (v.kind == VarKind::Integer) out << ' ' << v.name << '\n';
    out << "Binaries\n";
    for (const auto& v : ip.variables())
        if (v.kind == VarKind::Binary) out << ' ' << v.name << '\n';
    out << "End\n";
    return out.str();
}

}  // namespace sam3r
