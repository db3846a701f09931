#include "taillab/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "taillab/parallel.hpp"
#include "taillab/rng.hpp"

namespace taillab {

Grid::Grid(int m_points) : m(m_points) {
    if (m < 256) throw std::invalid_argument("Grid: need at least 256 points");
}

BrownianPath simulate_brownian(const Grid& g, std::mt19937_64& rng) {
    BrownianPath p;
    p.m = g.m;
    p.w.resize(static_cast<std::size_t>(g.m));
    NormalSampler normal;
    const double sd = std::sqrt(1.0 / g.m);
    double acc = 0.0;
    for (int i = 0; i < g.m; ++i) {
        acc += sd * normal(rng);
        p.w[static_cast<std::size_t>(i)] = acc;
    }
    return p;
}

namespace {

void prepare(const BrownianPath& p, LimitWorkspace& ws) {
    const int m = p.m;
    ws.scaled.resize(static_cast<std::size_t>(m));
    for (int g = 1; g <= m; ++g)
        ws.scaled[static_cast<std::size_t>(g) - 1] = p.w[static_cast<std::size_t>(g) - 1] *
                                                     (static_cast<double>(m) / g);
    if (ws.prepared_m != m) {
        ws.log_idx.resize(static_cast<std::size_t>(m));
        for (int g = 1; g <= m; ++g)
            ws.log_idx[static_cast<std::size_t>(g) - 1] = std::log(static_cast<double>(g));
        ws.prepared_m = m;
    }
}

// sup over s in (first grid point)/t .. 1 of |Z(s, t_g)|, written as
//   Z(s,t) = W(st)/t - A s + B s log s,   A = W(t)/t,  B = I(t) - W(t)/t.
// W is known on the grid only, so between its points it is held at the last
// known value while the smooth part moves: every cell contributes both of its
// endpoint values, and the single stationary point of the smooth part
// (log s* = A/B - 1) adds one candidate in the cell containing it, where the
// row value collapses to W(s_i t)/t - B s*.
double sup_row(const double* w, const double* logi, double* e, int m, int g, double A,
               double B) {
    const double invg = 1.0 / g;
    const double logg = logi[g - 1];
    const double scale = static_cast<double>(m) / g;
    for (int i = 1; i <= g; ++i) {
        const double s = i * invg;
        e[i - 1] = s * (B * (logi[i - 1] - logg) - A);
    }
    double mx = 0.0;
    for (int i = 1; i < g; ++i) {
        const double u = w[i - 1] * scale;
        mx = std::max(mx, std::max(std::fabs(u + e[i - 1]), std::fabs(u + e[i])));
    }
    mx = std::max(mx, std::fabs(w[g - 1] * scale + e[g - 1]));  // s = 1, zero up to rounding
    if (B != 0.0) {
        const double lstar = A / B - 1.0;
        if (lstar > -logg && lstar < 0.0) {
            const double sstar = std::exp(lstar);
            int cell = static_cast<int>(sstar * g);
            cell = std::clamp(cell, 1, g - 1);
            mx = std::max(mx, std::fabs(w[cell - 1] * scale - B * sstar));
        }
    }
    return mx;
}

}  // namespace

double z_sup(const BrownianPath& p, int g, LimitWorkspace& ws) {
    if (g < 1 || g > p.m) throw std::out_of_range("z_sup: grid index out of range");
    prepare(p, ws);
    double sum = 0.0;
    for (int i = 1; i <= g; ++i) sum += ws.scaled[static_cast<std::size_t>(i) - 1];
    const double Ag = ws.scaled[static_cast<std::size_t>(g) - 1];
    ws.row_e.resize(static_cast<std::size_t>(g));
    return sup_row(p.w.data(), ws.log_idx.data(), ws.row_e.data(), p.m, g, Ag,
                   sum / g - Ag);
}

double z_sup_at(const BrownianPath& p, double t, LimitWorkspace& ws) {
    const double raw = t * p.m;
    const int g = static_cast<int>(std::lround(raw));
    if (g < 1 || t <= 0.0) throw std::out_of_range("z_sup_at: t below grid resolution");
    if (g > p.m) throw std::out_of_range("z_sup_at: t above 1");
    return z_sup(p, g, ws);
}

namespace {

struct ScanResult {
    int best_g = 0;
    double best_sup = 0.0;
    double best_hill = 0.0;
};

// Minimizes the sup over grid indices 2..g_hi, streaming the prefix mean.
ScanResult scan_argmin(const BrownianPath& p, LimitWorkspace& ws, int g_hi,
                       std::vector<double>* curve) {
    const double* A = ws.scaled.data();
    const double* logi = ws.log_idx.data();
    ws.row_e.resize(static_cast<std::size_t>(g_hi));
    ScanResult r;
    r.best_sup = std::numeric_limits<double>::infinity();
    double sum = A[0];
    for (int g = 2; g <= g_hi; ++g) {
        sum += A[g - 1];
        const double mean_g = sum / g;
        const double Ag = A[g - 1];
        const double sup = sup_row(p.w.data(), logi, ws.row_e.data(), p.m, g, Ag,
                                   mean_g - Ag);
        if (curve) (*curve)[static_cast<std::size_t>(g) - 2] = sup;
        if (sup < r.best_sup) {
            r.best_sup = sup;
            r.best_g = g;
            r.best_hill = mean_g - Ag;
        }
    }
    return r;
}

}  // namespace

LimitDraw draw_T(const BrownianPath& p, LimitWorkspace& ws, bool keep_curve) {
    prepare(p, ws);
    LimitDraw d;
    if (keep_curve) d.sup_curve.resize(static_cast<std::size_t>(p.m) - 1);
    const ScanResult r = scan_argmin(p, ws, p.m, keep_curve ? &d.sup_curve : nullptr);
    d.g = r.best_g;
    d.T = static_cast<double>(r.best_g) / p.m;
    d.sup_at_T = r.best_sup;
    d.hill_error = r.best_hill;
    return d;
}

BreakLimitDraw draw_Tstar(const BrownianPath& p, double t0, double alpha, double h0,
                          const UGrid& u, LimitWorkspace& ws) {
    if (h0 == 0.0) throw std::invalid_argument("draw_Tstar: h0 must be non-zero");
    if (u.points < 2 || !(u.range > 0.0))
        throw std::invalid_argument("draw_Tstar: invalid u grid");
    const int m = p.m;
    int g0 = static_cast<int>(std::lround(t0 * m));
    g0 = std::clamp(g0, 2, m);
    prepare(p, ws);
    const double* A = ws.scaled.data();
    const double* logi = ws.log_idx.data();

    BreakLimitDraw d;

    // Restricted pure-model argmin over (0, t0].
    const ScanResult r = scan_argmin(p, ws, g0, nullptr);
    d.T = static_cast<double>(r.best_g) / m;
    d.sup_at_T = r.best_sup;

    // Per-point pieces of the break row at t0: with V = alpha h0 (u + ...)^+,
    //   Ztilde(s,u) = W(s t0)/t0 + (smooth part at c = 0) + V s (1 + log s),
    // so each swept V only shifts the smooth part by V b_i.
    ws.jump_u.resize(static_cast<std::size_t>(g0));
    ws.smooth_e.resize(static_cast<std::size_t>(g0));
    ws.s_shape.resize(static_cast<std::size_t>(g0));
    ws.row_f.resize(static_cast<std::size_t>(g0));
    double sum = 0.0;
    for (int i = 1; i <= g0; ++i) sum += A[i - 1];
    const double A0 = A[g0 - 1];
    const double B0 = sum / g0 - A0;
    const double logg0 = logi[g0 - 1];
    const double invg0 = 1.0 / g0;
    const double scale0 = static_cast<double>(m) / g0;
    for (int i = 1; i <= g0; ++i) {
        const double s = i * invg0;
        const double logs = logi[i - 1] - logg0;
        ws.jump_u[static_cast<std::size_t>(i) - 1] = p.w[static_cast<std::size_t>(i) - 1] * scale0;
        ws.smooth_e[static_cast<std::size_t>(i) - 1] = s * (B0 * logs - A0);
        ws.s_shape[static_cast<std::size_t>(i) - 1] = s * (1.0 + logs);
    }
    const double sup0 =
        sup_row(p.w.data(), logi, ws.row_f.data(), m, g0, A0, B0);  // c = 0 row

    // W(t0) - t0 W(1); the positive-part argument is u plus this.
    const double shift = p.at(g0) - (static_cast<double>(g0) / m) * p.at(m);

    const double du = 2.0 * u.range / (u.points - 1);
    double zmin = std::numeric_limits<double>::infinity();
    double vmin = 0.0;
    double vmax_at_min = 0.0;
    bool saw_min = false;
    for (int j = 0; j < u.points; ++j) {
        const double uj = -u.range + j * du;
        const double pos = uj + shift;
        double sup;
        double v;
        if (pos <= 0.0) {
            sup = sup0;
            v = 0.0;
        } else {
            v = alpha * h0 * pos;
            const double* uu = ws.jump_u.data();
            const double* ee = ws.smooth_e.data();
            const double* bb = ws.s_shape.data();
            double* ff = ws.row_f.data();
            for (int i = 0; i < g0; ++i) ff[i] = ee[i] + v * bb[i];
            sup = 0.0;
            for (int i = 0; i + 1 < g0; ++i)
                sup = std::max(sup,
                               std::max(std::fabs(uu[i] + ff[i]), std::fabs(uu[i] + ff[i + 1])));
            sup = std::max(sup, std::fabs(uu[g0 - 1] + ff[g0 - 1]));
            // stationary point of the shifted smooth part
            const double Bv = B0 + v;
            if (Bv != 0.0) {
                const double lstar = (A0 - v) / Bv - 1.0;
                if (lstar > -logg0 && lstar < 0.0) {
                    const double sstar = std::exp(lstar);
                    int cell = static_cast<int>(sstar * g0);
                    cell = std::clamp(cell, 1, g0 - 1);
                    sup = std::max(sup, std::fabs(uu[cell - 1] - Bv * sstar));
                }
            }
        }
        if (sup < zmin) {
            zmin = sup;
            vmin = v;
            vmax_at_min = v;
            saw_min = true;
        } else if (sup == zmin && saw_min) {
            vmax_at_min = std::max(vmax_at_min, std::max(v, vmin));
            vmin = std::min(vmin, v);
        }
    }
    d.z_t0_min = zmin;
    // All minimizing u should produce one V*; disagreement is recorded, not fatal.
    d.vstar_consistent = std::fabs(vmax_at_min - vmin) <= 1e-6;

    if (zmin > d.sup_at_T) {
        d.T_star = d.T;
        d.V_star = 0.0;
        d.hill_error = r.best_hill;
        d.atom = false;
    } else {
        d.T_star = static_cast<double>(g0) / m;
        d.V_star = vmin;
        d.hill_error = B0 + d.V_star;
        d.atom = true;
    }
    return d;
}

double empirical_quantile(std::vector<double> x, double p) {
    if (x.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("empirical_quantile: p must be in (0,1)");
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    std::size_t idx = static_cast<std::size_t>(std::ceil(p * n));
    if (idx < 1) idx = 1;
    if (idx > n) idx = n;
    return x[idx - 1];
}

LimitMcResult mc_limit(int n_reps, const Grid& grid, const LimitScenario& scenario,
                       std::uint64_t seed, int threads) {
    if (n_reps < 100) throw std::invalid_argument("mc_limit: need at least 100 replicates");
    LimitMcResult res;
    res.reps = n_reps;
    res.grid_m = grid.m;
    res.scenario = scenario;
    res.T.resize(static_cast<std::size_t>(n_reps));
    res.sup_at_T.resize(static_cast<std::size_t>(n_reps));
    res.hill_error.resize(static_cast<std::size_t>(n_reps));
    std::vector<std::uint8_t> atom, inconsistent;
    if (scenario.break_model) {
        res.V_star.resize(static_cast<std::size_t>(n_reps));
        res.z_t0_min.resize(static_cast<std::size_t>(n_reps));
        res.T_restricted.resize(static_cast<std::size_t>(n_reps));
        atom.assign(static_cast<std::size_t>(n_reps), 0);
        inconsistent.assign(static_cast<std::size_t>(n_reps), 0);
        const int g0 = static_cast<int>(std::lround(scenario.t0 * grid.m));
        if (std::fabs(static_cast<double>(g0) / grid.m - scenario.t0) > 1e-12) {
            res.t0_snapped = true;
            std::cerr << "mc_limit: t0 = " << scenario.t0 << " snapped to grid point "
                      << static_cast<double>(std::clamp(g0, 2, grid.m)) / grid.m << "\n";
        }
    }

    std::vector<LimitWorkspace> workspaces(
        static_cast<std::size_t>(resolve_threads(threads)));

    parallel_for_workers(n_reps, threads, [&](int worker, int rep) {
        LimitWorkspace& ws = workspaces[static_cast<std::size_t>(worker)];
        auto rng = make_stream(seed, static_cast<std::uint64_t>(rep));
        const BrownianPath path = simulate_brownian(grid, rng);
        const std::size_t r = static_cast<std::size_t>(rep);
        if (scenario.break_model) {
            BreakLimitDraw d =
                draw_Tstar(path, scenario.t0, scenario.alpha, scenario.h0, scenario.u_grid, ws);
            res.T[r] = d.T_star;
            res.sup_at_T[r] = d.atom ? d.z_t0_min : d.sup_at_T;
            res.hill_error[r] = scenario.alpha * d.hill_error;
            res.V_star[r] = d.V_star;
            res.z_t0_min[r] = d.z_t0_min;
            res.T_restricted[r] = d.T;
            atom[r] = d.atom ? 1 : 0;
            inconsistent[r] = d.vstar_consistent ? 0 : 1;
        } else {
            LimitDraw d = draw_T(path, ws);
            res.T[r] = d.T;
            res.sup_at_T[r] = d.sup_at_T;
            res.hill_error[r] = scenario.alpha * d.hill_error;
        }
    });

    if (scenario.break_model) {
        for (auto a : atom) res.atom_count += a;
        for (auto i : inconsistent) res.vstar_inconsistent += i;
        if (res.vstar_inconsistent > 0) {
            std::cerr << "mc_limit: " << res.vstar_inconsistent
                      << " draws had minimizing u values disagreeing on V*\n";
        }
    }

    std::vector<double> abs_err(res.hill_error.size());
    for (std::size_t i = 0; i < abs_err.size(); ++i) abs_err[i] = std::fabs(res.hill_error[i]);
    res.quantile_levels = scenario.levels;
    res.quantiles.reserve(scenario.levels.size());
    // c* at level l is the two-sided critical value: the (2l - 1) quantile of
    // |error|, which for the (symmetric-in-law) limit equals the l-quantile of
    // the signed error and makes P(|error| > c*) = 2(1 - l). Folding the two
    // tails also halves the Monte Carlo noise of the estimate.
    for (double lvl : scenario.levels) {
        if (!(lvl > 0.5 && lvl < 1.0))
            throw std::invalid_argument("mc_limit: quantile levels must be in (0.5, 1)");
        res.quantiles.push_back(empirical_quantile(abs_err, 2.0 * lvl - 1.0));
    }
    return res;
}

}  // namespace taillab
