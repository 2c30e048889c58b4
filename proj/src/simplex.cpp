#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sam3r::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;

// Dense tableau with explicit variable values so nonbasic variables can rest
// at either bound. Columns: structural (shifted to [0, u]), slacks, then
// artificials for rows that start infeasible.
struct Tableau {
    int m = 0;      // rows
    int ncols = 0;  // structural + slack + artificial
    std::vector<std::vector<double>> tab;  // m x ncols, equals B^{-1} * A_all
    std::vector<double> upper;             // per column, kInf when unbounded
    std::vector<double> value;             // current value per column
    std::vector<int> basis;                // basic column per row
    std::vector<char> is_basic;
    std::vector<char> at_upper;

    bool pivot_iterate(const std::vector<double>& cost, long max_iters);
};

bool Tableau::pivot_iterate(const std::vector<double>& cost, long max_iters) {
    const long bland_after = max_iters / 2;
    std::vector<double> y(m), lim(m);
    std::vector<char> lim_to_upper(m);
    for (long iter = 0; iter < max_iters; ++iter) {
        // Reduced costs d_j = c_j - y . col_j with y_r = cost of row r's basic.
        for (int r = 0; r < m; ++r) y[r] = cost[basis[r]];

        // Entering: most negative effective reduced cost (Dantzig), lowest
        // index on ties; plain Bland's rule once iterations pile up.
        int enter = -1;
        double best_score = -kCostTol;
        const bool bland = iter >= bland_after;
        for (int j = 0; j < ncols; ++j) {
            if (is_basic[j]) continue;
            if (upper[j] == 0.0) continue;  // pinned (fixed vars, retired artificials)
            double d = cost[j];
            for (int r = 0; r < m; ++r) {
                if (y[r] != 0.0) d -= y[r] * tab[r][j];
            }
            const double score = at_upper[j] ? -d : d;
            if (score < best_score) {
                best_score = score;
                enter = j;
                if (bland) break;
            }
        }
        if (enter < 0) return true;  // optimal

        const double sigma = at_upper[enter] ? -1.0 : 1.0;

        // Ratio test, pass 1: per-row step limits and the bound-flip distance.
        double delta = upper[enter];
        for (int r = 0; r < m; ++r) {
            const double rate = sigma * tab[r][enter];
            const int bv = basis[r];
            if (rate > kPivotTol) {
                lim[r] = std::max(value[bv], 0.0) / rate;  // basic drops to 0
                lim_to_upper[r] = 0;
            } else if (rate < -kPivotTol && upper[bv] != kInf) {
                lim[r] = std::max(upper[bv] - value[bv], 0.0) / (-rate);
                lim_to_upper[r] = 1;
            } else {
                lim[r] = kInf;
                continue;
            }
            delta = std::min(delta, lim[r]);
        }
        if (delta == kInf) return false;  // unbounded; callers treat as failure

        // Pass 2: leaving row among the tied minimum limits, smallest basic
        // variable index for determinism (and Bland's anti-cycling).
        int leave_row = -1;
        if (upper[enter] > delta + 1e-12) {
            for (int r = 0; r < m; ++r) {
                if (lim[r] > delta + 1e-12) continue;
                if (leave_row < 0 || basis[r] < basis[leave_row]) leave_row = r;
            }
        }

        // Move the entering variable and update basic values.
        for (int r = 0; r < m; ++r)
            value[basis[r]] -= sigma * tab[r][enter] * delta;

        if (leave_row < 0) {
            // Bound flip (or the flip ties the row limits): no basis change.
            at_upper[enter] = !at_upper[enter];
            value[enter] = at_upper[enter] ? upper[enter] : 0.0;
            continue;
        }
        value[enter] = (at_upper[enter] ? upper[enter] : 0.0) + sigma * delta;

        const int leave = basis[leave_row];
        value[leave] = lim_to_upper[leave_row] ? upper[leave] : 0.0;
        at_upper[leave] = lim_to_upper[leave_row];
        is_basic[leave] = 0;
        is_basic[enter] = 1;
        at_upper[enter] = 0;
        basis[leave_row] = enter;

        // Gauss-Jordan on the pivot element.
        auto& prow = tab[leave_row];
        const double inv = 1.0 / prow[enter];
        for (int j = 0; j < ncols; ++j) prow[j] *= inv;
        for (int r = 0; r < m; ++r) {
            if (r == leave_row) continue;
            const double f = tab[r][enter];
            if (f == 0.0) continue;
            auto& row = tab[r];
            for (int j = 0; j < ncols; ++j) row[j] -= f * prow[j];
        }
    }
    return false;  // iteration limit
}

}  // namespace

LpResult solve_lp(const LpProblem& p) {
    const int n = p.num_vars;
    const int m = static_cast<int>(p.rows.size());

    // Trivial cases.
    for (int j = 0; j < n; ++j)
        if (p.lo[j] > p.hi[j] + 1e-12) return {LpStatus::Infeasible, 0.0, {}};
    if (n == 0 || m == 0) {
        LpResult res;
        res.x.resize(n);
        res.objective = 0.0;
        for (int j = 0; j < n; ++j) {
            // Each variable goes to whichever bound minimizes the objective.
            res.x[j] = p.obj[j] >= 0.0 ? p.lo[j] : p.hi[j];
            res.objective += p.obj[j] * res.x[j];
        }
        for (int r = 0; r < m; ++r) {
            double act = 0.0;  // constraints must hold at the chosen corner,
            for (auto [v, c] : p.rows[r]) act += c * res.x[v];  // only hit when n == 0
            if (act > p.rhs[r] + 1e-9) return {LpStatus::Infeasible, 0.0, {}};
        }
        res.status = LpStatus::Optimal;
        return res;
    }

    // Shift x = lo + y so structural variables live in [0, u].
    std::vector<double> shifted_rhs(p.rhs);
    double obj_shift = 0.0;
    for (int j = 0; j < n; ++j) obj_shift += p.obj[j] * p.lo[j];
    for (int r = 0; r < m; ++r)
        for (auto [v, c] : p.rows[r]) shifted_rhs[r] -= c * p.lo[v];

    std::vector<int> art_of_row(m, -1);
    int num_art = 0;
    for (int r = 0; r < m; ++r)
        if (shifted_rhs[r] < 0.0) art_of_row[r] = num_art++;

    Tableau T;
    T.m = m;
    T.ncols = n + m + num_art;
    T.tab.assign(m, std::vector<double>(T.ncols, 0.0));
    T.upper.assign(T.ncols, kInf);
    T.value.assign(T.ncols, 0.0);
    T.is_basic.assign(T.ncols, 0);
    T.at_upper.assign(T.ncols, 0);
    T.basis.resize(m);

    for (int j = 0; j < n; ++j) T.upper[j] = p.hi[j] - p.lo[j];

    for (int r = 0; r < m; ++r) {
        const double sign = art_of_row[r] >= 0 ? -1.0 : 1.0;  // flip infeasible rows
        for (auto [v, c] : p.rows[r]) T.tab[r][v] += sign * c;
        T.tab[r][n + r] = sign;  // slack
        double bval = sign * shifted_rhs[r];
        if (art_of_row[r] >= 0) {
            const int aj = n + m + art_of_row[r];
            T.tab[r][aj] = 1.0;
            T.basis[r] = aj;
        } else {
            T.basis[r] = n + r;
        }
        T.is_basic[T.basis[r]] = 1;
        T.value[T.basis[r]] = bval;
    }

    const long max_iters = 200L * (T.ncols + m) + 2000;

    if (num_art > 0) {
        std::vector<double> phase1(T.ncols, 0.0);
        for (int a = 0; a < num_art; ++a) phase1[n + m + a] = 1.0;
        if (!T.pivot_iterate(phase1, max_iters)) return {LpStatus::IterLimit, 0.0, {}};
        double infeas = 0.0;
        for (int a = 0; a < num_art; ++a) infeas += T.value[n + m + a];
        if (infeas > kPhase1Tol) return {LpStatus::Infeasible, 0.0, {}};
        // Pin artificials at zero for phase 2.
        for (int a = 0; a < num_art; ++a) T.upper[n + m + a] = 0.0;
        for (int r = 0; r < m; ++r) {
            if (T.basis[r] < n + m) continue;
            // Drive a basic artificial out on any usable pivot; if the row has
            // none it is redundant and the artificial stays pinned at 0.
            for (int j = 0; j < n + m; ++j) {
                if (T.is_basic[j] || std::abs(T.tab[r][j]) <= kPivotTol) continue;
                const int art = T.basis[r];
                const double piv = T.tab[r][j];
                const double inv = 1.0 / piv;
                for (int c2 = 0; c2 < T.ncols; ++c2) T.tab[r][c2] *= inv;
                for (int r2 = 0; r2 < m; ++r2) {
                    if (r2 == r) continue;
                    const double f = T.tab[r2][j];
                    if (f == 0.0) continue;
                    for (int c2 = 0; c2 < T.ncols; ++c2) T.tab[r2][c2] -= f * T.tab[r][c2];
                }
                T.basis[r] = j;
                T.is_basic[j] = 1;
                T.is_basic[art] = 0;
                T.value[j] = T.value[art];
                T.value[art] = 0.0;
                T.at_upper[j] = 0;
                break;
            }
        }
    }

    std::vector<double> phase2(T.ncols, 0.0);
    for (int j = 0; j < n; ++j) phase2[j] = p.obj[j];
    if (!T.pivot_iterate(phase2, max_iters)) return {LpStatus::IterLimit, 0.0, {}};

    LpResult res;
    res.status = LpStatus::Optimal;
    res.x.resize(n);
    res.objective = obj_shift;
    for (int j = 0; j < n; ++j) {
        res.x[j] = p.lo[j] + T.value[j];
        res.objective += p.obj[j] * T.value[j];
    }
    return res;
}

}  // namespace sam3r::detail
