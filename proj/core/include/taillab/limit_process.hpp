#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace taillab {

// Uniform grid t_g = g/m, g = 1..m, shared by both arguments of the limit
// field Z(s,t).
struct Grid {
    explicit Grid(int m_points);
    int m = 0;
    double t(int g) const { return static_cast<double>(g) / m; }
};

// Discretized Brownian motion on the grid: w[g-1] = W(g/m). Increments are
// iid Normal(0, 1/m) by construction.
struct BrownianPath {
    int m = 0;
    std::vector<double> w;
    double at(int g) const { return w[static_cast<std::size_t>(g) - 1]; }
};

BrownianPath simulate_brownian(const Grid& g, std::mt19937_64& rng);

// Reusable buffers for the per-path scans; one per worker thread.
struct LimitWorkspace {
    std::vector<double> scaled;   // W(t_g)/t_g
    std::vector<double> log_idx;  // log(g)
    std::vector<double> row_e;    // smooth-part values along one row
    std::vector<double> jump_u;   // W(s_i t)/t along the break row
    std::vector<double> smooth_e; // smooth part at c = 0 along the break row
    std::vector<double> s_shape;  // s (1 + log s) on the break row
    std::vector<double> row_f;    // smooth part at the swept c
    int prepared_m = 0;
};

// sup over the s-grid {i/g : i = 1..g} of |Z(s, t_g)|, where
//   Z(s,t) = (W(st)/(st) - W(t)/t) s + (I(t) - W(t)/t) s log s
// and I(t) is the Riemann mean of W(t_j)/t_j over grid points t_j <= t.
// g is the 1-based grid index of t.
double z_sup(const BrownianPath& p, int g, LimitWorkspace& ws);

// Convenience overload for t given as a real; t must be at least the first
// grid point.
double z_sup_at(const BrownianPath& p, double t, LimitWorkspace& ws);

struct LimitDraw {
    double T = 0.0;          // argmin location, on the grid
    int g = 0;               // its grid index
    double sup_at_T = 0.0;   // minimal sup
    double hill_error = 0.0; // I(T) - W(T)/T; multiply by the tail index alpha
    std::vector<double> sup_curve;  // sup_curve[g-2] = z_sup at grid index g, g = 2..m
};

// Minimizes z_sup over grid indices g = 2..m (ties to the smallest g). The
// single-point index g = 1 is excluded: its s-grid is {1} alone where Z
// vanishes identically, the degenerate analogue of k < 2. Pass keep_curve to
// retain the per-t sup curve.
LimitDraw draw_T(const BrownianPath& p, LimitWorkspace& ws, bool keep_curve = false);

struct UGrid {
    double range = 6.0;  // symmetric sweep over [-range, range]
    int points = 1025;
};

struct BreakLimitDraw {
    double T_star = 0.0;
    double V_star = 0.0;      // alpha h0 (u + W(t0) - t0 W(1))^+ at the minimizing u
    double hill_error = 0.0;  // I(T*) - W(T*)/T* + V* 1{T* = t0}; multiply by alpha
    double z_t0_min = 0.0;    // min over u of sup_s |Z(s,t0) + c(u) s (1 + log s)|
    double T = 0.0;           // argmin of z_sup restricted to (0, t0]
    double sup_at_T = 0.0;
    bool atom = false;              // T_star == t0
    bool vstar_consistent = true;   // all grid minimizers of u agreed on V_star
};

// Break-model draw at break point t0 (snapped to the nearest grid index if
// needed): sweeps u over the grid, forms z_t0_min, and applies the selection
// rule: T* = T if z_t0_min exceeds the restricted minimum sup, else T* = t0
// with the bias term V*.
BreakLimitDraw draw_Tstar(const BrownianPath& p, double t0, double alpha, double h0,
                          const UGrid& u, LimitWorkspace& ws);

struct LimitScenario {
    double alpha = 1.0;
    bool break_model = false;
    double t0 = 0.5;
    double h0 = -2.0;
    UGrid u_grid;
    std::vector<double> levels = {0.975, 0.995};
};

struct LimitMcResult {
    int reps = 0;
    int grid_m = 0;
    LimitScenario scenario;
    std::vector<double> T;           // T, or T* for the break model
    std::vector<double> sup_at_T;
    std::vector<double> hill_error;  // already scaled by alpha
    std::vector<double> V_star;      // empty for the pure model
    std::vector<double> z_t0_min;    // empty for the pure model
    std::vector<double> T_restricted;  // break model: argmin over (0, t0]
    std::vector<double> quantile_levels;
    std::vector<double> quantiles;   // empirical quantiles of |hill_error|
    int atom_count = 0;              // draws with T* = t0
    int vstar_inconsistent = 0;      // draws whose minimizing u disagreed on V*
    bool t0_snapped = false;
};

// Runs n_reps independent paths (stream r of `seed` for replicate r) and
// collects the draws plus the |hill_error| quantile table. Deterministic for
// a given seed at any thread count.
LimitMcResult mc_limit(int n_reps, const Grid& grid, const LimitScenario& scenario,
                       std::uint64_t seed, int threads = 0);

// Empirical quantile (order statistic at ceil(p n)).
double empirical_quantile(std::vector<double> sorted_or_not, double p);

}  // namespace taillab
