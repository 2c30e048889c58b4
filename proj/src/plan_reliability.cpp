#include "sam3r/plan_reliability.hpp"

#include <cmath>

#include "sam3r/errors.hpp"

namespace sam3r {

int DeploymentPlan::total_sets() const {
    int n = 0;
    for (const auto& row : sets)
        for (int v : row) n += v;
    return n;
}

int DeploymentPlan::total_sensors(const std::vector<SensorSpec>& catalog) const {
    int n = 0;
    for (const auto& row : sets)
        for (std::size_t s = 0; s < row.size(); ++s) n += row[s] * catalog[s].set_size;
    return n;
}

std::vector<CandidateSite> sample_candidate_sites(const CorridorPath& corridor,
                                                  double spacing_m, double mast_height_m,
                                                  int capacity, const TerrainCloud* cloud,
                                                  double ground_radius_m) {
    if (!(spacing_m > 0.0)) throw ConfigError("site spacing must be > 0");
    std::vector<CandidateSite> sites;
    const double length = corridor.length_m();
    const int count = static_cast<int>(std::floor(length / spacing_m)) + 1;
    for (int i = 0; i < count; ++i) {
        CandidateSite site;
        site.id = i;
        site.position = corridor.point_at(i * spacing_m);
        site.mast_height_m = mast_height_m;
        site.capacity = capacity;
        if (cloud && !cloud->empty()) {
            Vec3 local = cloud->frame().to_local(site.position);
            if (auto ground = cloud->ground_altitude(local.x, local.y, ground_radius_m))
                site.position.alt_m = *ground;
        }
        sites.push_back(site);
    }
    return sites;
}

namespace {

struct VarLayout {
    int ni = 0, ns = 0;
    int n_var(int i, int s) const { return i * ns + s; }
    int beta_var(int i) const { return ni * ns + i; }
};

VarLayout make_layout(const DetectionTensor& tensor) {
    return {tensor.num_sites(), tensor.num_types()};
}

void add_structural_rows(IntegerProgram& ip, const VarLayout& lay,
                         const std::vector<SensorSpec>& catalog,
                         const std::vector<CandidateSite>& sites) {
    for (int i = 0; i < lay.ni; ++i) {
        // Site capacity: sum_s C_s n_i^s <= M beta_i.
        std::vector<std::pair<int, double>> cap;
        for (int s = 0; s < lay.ns; ++s)
            cap.push_back({lay.n_var(i, s), static_cast<double>(catalog[s].set_size)});
        cap.push_back({lay.beta_var(i), -static_cast<double>(sites[i].capacity)});
        ip.add_constraint(std::move(cap), 0.0, "capacity_i" + std::to_string(i));

        // Linking: n_i^s <= M_s beta_i.
        for (int s = 0; s < lay.ns; ++s)
            ip.add_constraint({{lay.n_var(i, s), 1.0},
                               {lay.beta_var(i), -static_cast<double>(catalog[s].max_sets)}},
                              0.0, "link_i" + std::to_string(i) + "_" + catalog[s].id);

        // Min deployment: beta_i <= sum_s n_i^s.
        std::vector<std::pair<int, double>> mindep{{lay.beta_var(i), 1.0}};
        for (int s = 0; s < lay.ns; ++s) mindep.push_back({lay.n_var(i, s), -1.0});
        ip.add_constraint(std::move(mindep), 0.0, "mindeploy_i" + std::to_string(i));
    }
}

}  // namespace

IntegerProgram build_reliability_model(const DetectionTensor& tensor,
                                       const std::vector<SensorSpec>& catalog,
                                       const std::vector<CandidateSite>& sites,
                                       const ReliabilityOptions& opts) {
    if (static_cast<int>(catalog.size()) != tensor.num_types())
        throw ConfigError("reliability model: catalog size does not match tensor");
    if (static_cast<int>(sites.size()) != tensor.num_sites())
        throw ConfigError("reliability model: site list does not match tensor");
    if (!(opts.target > 0.0) || !(opts.target < 1.0))
        throw ConfigError("reliability model: H must be in (0,1)");
    for (int t = 0; t < tensor.num_steps(); ++t) {
        if (opts.target >= tensor.rho_u(t))
            throw InfeasibleError(
                "reliability target unreachable given server reliability at step " +
                std::to_string(t));
    }

    const VarLayout lay = make_layout(tensor);
    IntegerProgram ip;
    for (int i = 0; i < lay.ni; ++i)
        for (int s = 0; s < lay.ns; ++s) {
            const int v = ip.add_variable("n_i" + std::to_string(i) + "_" + catalog[s].id, 0,
                                          catalog[s].max_sets, VarKind::Integer);
            ip.set_objective(v, catalog[s].unit_cost * catalog[s].set_size);
        }
    for (int i = 0; i < lay.ni; ++i)
        ip.add_variable("beta_i" + std::to_string(i), 0, 1, VarKind::Binary);

    // Detection rows: pooled per step, or split per (aircraft, step).
    for (int t = 0; t < tensor.num_steps(); ++t) {
        if (!tensor.any_present(t)) continue;  // no traffic, no requirement
        const double rhs = std::log(1.0 - opts.target / tensor.rho_u(t));
        if (opts.per_aircraft_rows) {
            for (int k = 0; k < tensor.num_aircraft(); ++k) {
                if (!tensor.present(k, t)) continue;
                std::vector<std::pair<int, double>> terms;
                for (int i = 0; i < lay.ni; ++i)
                    for (int s = 0; s < lay.ns; ++s)
                        if (tensor.detected(i, s, k, t))
                            terms.push_back({lay.n_var(i, s), std::log(tensor.m(i, s, k, t))});
                if (terms.empty() && rhs < -1e-12)
                    throw InfeasibleError("structurally infeasible: aircraft " +
                                          std::to_string(k) + " undetectable at step " +
                                          std::to_string(t));
                if (!terms.empty())
                    ip.add_constraint(std::move(terms), rhs,
                                      "miss_k" + std::to_string(k) + "_t" + std::to_string(t));
            }
        } else {
            std::vector<std::pair<int, double>> terms;
            std::vector<double> coeff(static_cast<std::size_t>(lay.ni) * lay.ns, 0.0);
            bool any = false;
            for (int i = 0; i < lay.ni; ++i)
                for (int s = 0; s < lay.ns; ++s)
                    for (int k = 0; k < tensor.num_aircraft(); ++k)
                        if (tensor.detected(i, s, k, t)) {
                            coeff[lay.n_var(i, s)] += std::log(tensor.m(i, s, k, t));
                            any = true;
                        }
            if (!any && rhs < -1e-12)
                throw InfeasibleError("structurally infeasible: no aircraft detectable at step " +
                                      std::to_string(t));
            if (!any) continue;
            for (std::size_t v = 0; v < coeff.size(); ++v)
                if (coeff[v] != 0.0) terms.push_back({static_cast<int>(v), coeff[v]});
            ip.add_constraint(std::move(terms), rhs, "miss_t" + std::to_string(t));
        }
    }

    add_structural_rows(ip, lay, catalog, sites);
    return ip;
}

std::vector<double> validate_plan(const DeploymentPlan& plan, const DetectionTensor& tensor,
                                  bool per_aircraft_rows) {
    if (static_cast<int>(plan.sets.size()) != tensor.num_sites())
        throw ConfigError("validate_plan: plan site count does not match tensor");
    for (const auto& row : plan.sets)
        if (static_cast<int>(row.size()) != tensor.num_types())
            throw ConfigError("validate_plan: plan type count does not match tensor");

    std::vector<double> achieved(tensor.num_steps(), 0.0);
    for (int t = 0; t < tensor.num_steps(); ++t) {
        if (!tensor.any_present(t)) continue;
        if (per_aircraft_rows) {
            double worst = 1.0;
            for (int k = 0; k < tensor.num_aircraft(); ++k) {
                if (!tensor.present(k, t)) continue;
                double prod = 1.0;
                for (int i = 0; i < tensor.num_sites(); ++i)
                    for (int s = 0; s < tensor.num_types(); ++s)
                        if (tensor.detected(i, s, k, t) && plan.sets[i][s] > 0)
                            prod *= std::pow(tensor.m(i, s, k, t), plan.sets[i][s]);
                worst = std::min(worst, tensor.rho_u(t) * (1.0 - prod));
            }
            achieved[t] = worst;
        } else {
            double prod = 1.0;
            for (int i = 0; i < tensor.num_sites(); ++i)
                for (int s = 0; s < tensor.num_types(); ++s) {
                    if (plan.sets[i][s] <= 0) continue;
                    for (int k = 0; k < tensor.num_aircraft(); ++k)
                        if (tensor.detected(i, s, k, t))
                            prod *= std::pow(tensor.m(i, s, k, t), plan.sets[i][s]);
                }
            achieved[t] = tensor.rho_u(t) * (1.0 - prod);
        }
    }
    return achieved;
}

DeploymentPlan plan_reliability(const DetectionTensor& tensor,
                                const std::vector<SensorSpec>& catalog,
                                const std::vector<CandidateSite>& sites,
                                const ReliabilityOptions& opts) {
    IntegerProgram ip = build_reliability_model(tensor, catalog, sites, opts);
    Solution sol = solve_bnb(ip, opts.node_budget);
    if (sol.status == SolveStatus::Aborted)
        throw BudgetError("reliability solve: node budget exhausted");
    if (sol.status == SolveStatus::Infeasible)
        throw InfeasibleError("reliability model infeasible at H = " + std::to_string(opts.target));

    const VarLayout lay = make_layout(tensor);
    DeploymentPlan plan;
    plan.sets.assign(lay.ni, std::vector<int>(lay.ns, 0));
    plan.active.assign(lay.ni, 0);
    for (int i = 0; i < lay.ni; ++i) {
        for (int s = 0; s < lay.ns; ++s) {
            plan.sets[i][s] = static_cast<int>(sol.assignment[lay.n_var(i, s)]);
            plan.total_cost += catalog[s].unit_cost * catalog[s].set_size * plan.sets[i][s];
        }
        plan.active[i] = static_cast<uint8_t>(sol.assignment[lay.beta_var(i)]);
    }

    plan.achieved = validate_plan(plan, tensor, opts.per_aircraft_rows);
    plan.min_achieved = 1.0;
    for (int t = 0; t < tensor.num_steps(); ++t)
        if (tensor.any_present(t)) plan.min_achieved = std::min(plan.min_achieved, plan.achieved[t]);
    if (plan.min_achieved < opts.target - 1e-9)
        throw InfeasibleError("validator rejected an optimal plan (achieved " +
                              std::to_string(plan.min_achieved) + " < H)");
    return plan;
}

}  // namespace sam3r
