#include "sam3r/plan_robustness.hpp"

#include <cmath>

#include "sam3r/errors.hpp"

namespace sam3r {

void RobustnessParams::validate() const {
    if (!(sigma > 0.0) || !(sigma < 1.0)) throw ConfigError("robustness: sigma must be in (0,1)");
    if (static_cast<int>(R_u.size()) != num_steps)
        throw ConfigError("robustness: R_u size mismatch");
    if (max_vert < 1) throw ConfigError("robustness: MaxVert must be >= 1");
    const auto nt = static_cast<std::size_t>(num_types);
    if (vert.size() != nt || max_sets.size() != nt || unit_cost.size() != nt)
        throw ConfigError("robustness: per-type parameter size mismatch");
    if (theta.size() !=
        static_cast<std::size_t>(num_sites) * num_types * num_aircraft * num_steps)
        throw ConfigError("robustness: theta size mismatch");
    if (present.size() != static_cast<std::size_t>(num_aircraft) * num_steps)
        throw ConfigError("robustness: presence size mismatch");
    for (double th : theta)
        if (!(th > 0.0) || th > 1.0) throw ConfigError("robustness: theta outside (0,1]");
}

RobustnessParams robustness_params_from_tensor(const DetectionTensor& tensor,
                                               const std::vector<SensorSpec>& catalog,
                                               double sigma, int max_vert) {
    if (static_cast<int>(catalog.size()) != tensor.num_types())
        throw ConfigError("robustness params: catalog does not match tensor");
    RobustnessParams p;
    p.sigma = sigma;
    p.max_vert = max_vert;
    p.num_sites = tensor.num_sites();
    p.num_types = tensor.num_types();
    p.num_aircraft = tensor.num_aircraft();
    p.num_steps = tensor.num_steps();
    for (int t = 0; t < p.num_steps; ++t) p.R_u.push_back(tensor.rho_u(t));
    for (const auto& s : catalog) {
        p.vert.push_back(s.vert_units);
        p.max_sets.push_back(s.max_sets);
        p.unit_cost.push_back(s.unit_cost);
    }
    p.theta.resize(static_cast<std::size_t>(p.num_sites) * p.num_types * p.num_aircraft *
                   p.num_steps);
    std::size_t idx = 0;
    for (int i = 0; i < p.num_sites; ++i)
        for (int s = 0; s < p.num_types; ++s)
            for (int k = 0; k < p.num_aircraft; ++k)
                for (int t = 0; t < p.num_steps; ++t) p.theta[idx++] = tensor.m(i, s, k, t);
    p.present.resize(static_cast<std::size_t>(p.num_aircraft) * p.num_steps);
    for (int k = 0; k < p.num_aircraft; ++k)
        for (int t = 0; t < p.num_steps; ++t)
            p.present[k * p.num_steps + t] = tensor.present(k, t) ? 1 : 0;
    return p;
}

namespace {

struct Layout {
    int ni = 0, ns = 0;
    int add_var(int i, int s) const { return i * ns + s; }
    int beta_var(int i) const { return ni * ns + i; }
};

void check_existing(const DeploymentPlan& existing, const RobustnessParams& p) {
    if (static_cast<int>(existing.sets.size()) != p.num_sites)
        throw ConfigError("robustness: existing plan site count mismatch");
    for (const auto& row : existing.sets)
        if (static_cast<int>(row.size()) != p.num_types)
            throw ConfigError("robustness: existing plan type count mismatch");
    for (int i = 0; i < p.num_sites; ++i) {
        int vert_used = 0;
        for (int s = 0; s < p.num_types; ++s) {
            if (existing.sets[i][s] > p.max_sets[s])
                throw ConfigError("robustness: existing sets exceed MaxSets at site " +
                                  std::to_string(i));
            vert_used += p.vert[s] * existing.sets[i][s];
        }
        if (vert_used > p.max_vert)
            throw ConfigError("robustness: existing sensors exceed MaxVert at site " +
                              std::to_string(i));
    }
}

}  // namespace

IntegerProgram build_robustness_model(const DeploymentPlan& existing,
                                      const RobustnessParams& p) {
    p.validate();
    check_existing(existing, p);
    for (int t = 0; t < p.num_steps; ++t)
        if (p.sigma >= p.R_u[t])
            throw InfeasibleError("detection threshold unreachable given server reliability "
                                  "at step " + std::to_string(t));

    Layout lay{p.num_sites, p.num_types};
    IntegerProgram ip;
    for (int i = 0; i < p.num_sites; ++i)
        for (int s = 0; s < p.num_types; ++s) {
            const long long room = std::max(0, p.max_sets[s] - existing.sets[i][s]);
            const int v = ip.add_variable("add_i" + std::to_string(i) + "_s" + std::to_string(s),
                                          0, room, VarKind::Integer);
            ip.set_objective(v, p.unit_cost[s] * p.vert[s]);
        }
    for (int i = 0; i < p.num_sites; ++i) {
        bool has_existing = false;
        for (int s = 0; s < p.num_types; ++s)
            if (existing.sets[i][s] > 0) has_existing = true;
        // Sites that already host sensors stay active; the model must not
        // force removal of deployed hardware.
        ip.add_variable("beta_i" + std::to_string(i), has_existing ? 1 : 0, 1, VarKind::Binary);
    }

    // Coverage rows per present (aircraft, step) with existing sensors folded
    // into the constant term.
    for (int k = 0; k < p.num_aircraft; ++k) {
        for (int t = 0; t < p.num_steps; ++t) {
            if (!p.present_at(k, t)) continue;
            double rhs = std::log(1.0 - p.sigma / p.R_u[t]);
            std::vector<std::pair<int, double>> terms;
            bool any_visible = false;
            for (int i = 0; i < p.num_sites; ++i)
                for (int s = 0; s < p.num_types; ++s) {
                    const double log_theta = std::log(p.theta_at(i, s, k, t));
                    if (log_theta == 0.0) continue;
                    any_visible = true;
                    terms.push_back({lay.add_var(i, s), log_theta});
                    rhs -= existing.sets[i][s] * log_theta;
                }
            if (!any_visible) {
                if (rhs < -1e-12)
                    throw InfeasibleError("structurally infeasible: aircraft " +
                                          std::to_string(k) + " invisible to every site at step " +
                                          std::to_string(t));
                continue;
            }
            ip.add_constraint(std::move(terms), rhs,
                              "cover_k" + std::to_string(k) + "_t" + std::to_string(t));
        }
    }

    for (int i = 0; i < p.num_sites; ++i) {
        int vert_exist = 0, total_exist = 0;
        for (int s = 0; s < p.num_types; ++s) {
            vert_exist += p.vert[s] * existing.sets[i][s];
            total_exist += existing.sets[i][s];
        }
        // Vertical stacking: sum vert_s n_total <= MaxVert beta.
        std::vector<std::pair<int, double>> vrow;
        for (int s = 0; s < p.num_types; ++s)
            vrow.push_back({lay.add_var(i, s), static_cast<double>(p.vert[s])});
        vrow.push_back({lay.beta_var(i), -static_cast<double>(p.max_vert)});
        ip.add_constraint(std::move(vrow), -static_cast<double>(vert_exist),
                          "vert_i" + std::to_string(i));

        // Per-type stack limit: n_total <= MaxSets_s beta.
        for (int s = 0; s < p.num_types; ++s)
            ip.add_constraint({{lay.add_var(i, s), 1.0},
                               {lay.beta_var(i), -static_cast<double>(p.max_sets[s])}},
                              -static_cast<double>(existing.sets[i][s]),
                              "stack_i" + std::to_string(i) + "_s" + std::to_string(s));

        // Activated sites host at least one sensor: beta <= sum n_total.
        std::vector<std::pair<int, double>> mindep{{lay.beta_var(i), 1.0}};
        for (int s = 0; s < p.num_types; ++s) mindep.push_back({lay.add_var(i, s), -1.0});
        ip.add_constraint(std::move(mindep), static_cast<double>(total_exist),
                          "mindeploy_i" + std::to_string(i));
    }
    return ip;
}

AugmentationPlan augment(const DeploymentPlan& existing, const RobustnessParams& p,
                         std::uint64_t node_budget) {
    IntegerProgram ip = build_robustness_model(existing, p);
    Solution sol = solve_bnb(ip, node_budget);
    if (sol.status == SolveStatus::Aborted)
        throw BudgetError("robustness solve: node budget exhausted");
    if (sol.status == SolveStatus::Infeasible)
        throw InfeasibleError("robustness model infeasible at sigma = " + std::to_string(p.sigma));

    Layout lay{p.num_sites, p.num_types};
    AugmentationPlan plan;
    plan.n_exist = existing.sets;
    plan.n_add.assign(p.num_sites, std::vector<int>(p.num_types, 0));
    plan.n_total.assign(p.num_sites, std::vector<int>(p.num_types, 0));
    plan.active.assign(p.num_sites, 0);
    for (int i = 0; i < p.num_sites; ++i) {
        for (int s = 0; s < p.num_types; ++s) {
            plan.n_add[i][s] = static_cast<int>(sol.assignment[lay.add_var(i, s)]);
            plan.n_total[i][s] = plan.n_exist[i][s] + plan.n_add[i][s];
            plan.add_cost += p.unit_cost[s] * p.vert[s] * plan.n_add[i][s];
        }
        plan.active[i] = static_cast<uint8_t>(sol.assignment[lay.beta_var(i)]);
    }

    AugmentationCheck check = validate_augmentation(plan, p);
    if (!check.ok)
        throw InfeasibleError("validator rejected an optimal augmentation plan");
    return plan;
}

AugmentationCheck validate_augmentation(const AugmentationPlan& plan,
                                        const RobustnessParams& p) {
    if (static_cast<int>(plan.n_total.size()) != p.num_sites)
        throw ConfigError("validate_augmentation: plan site count mismatch");
    AugmentationCheck check;
    for (int k = 0; k < p.num_aircraft; ++k) {
        for (int t = 0; t < p.num_steps; ++t) {
            AugmentationRow row;
            row.aircraft = k;
            row.step = t;
            row.present = p.present_at(k, t);
            if (row.present) {
                row.rhs = std::log(1.0 - p.sigma / p.R_u[t]);
                for (int i = 0; i < p.num_sites; ++i)
                    for (int s = 0; s < p.num_types; ++s)
                        row.lhs += plan.n_total[i][s] * std::log(p.theta_at(i, s, k, t));
                row.satisfied = row.lhs <= row.rhs + 1e-9;
            }
            if (!row.satisfied) check.ok = false;
            check.rows.push_back(row);
        }
    }
    return check;
}

}  // namespace sam3r
