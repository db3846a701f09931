#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace taillab {

// Exact Pareto tail: P(X > x) = c x^{-alpha} on x >= c^{1/alpha}.
struct ParetoModel {
    double alpha = 1.0;
    double c = 1.0;
};

// Quantile at upper-tail probability t: (t/c)^{-1/alpha}, 0 < t < 1.
double pareto_quantile(const ParetoModel& m, double t);

// Inverse-transform sample of size n; reproducible given the stream.
std::vector<double> sample_pareto(const ParetoModel& m, int n, std::mt19937_64& rng);

// Multiplicative break applied to the Pareto quantile below the break point
// t0 (on the upper-tail probability scale). Zero on (0, t0) always.
//   kink:   (t/t0)^{1/alpha - 1/beta} - 1        continuous, kinked at t0
//   jump:   (t/t0)^{1/alpha - 1/beta} - 1 + jump discontinuous at t0
//   smooth: -(t - t0)^2                          continuously differentiable
//   none:   0 everywhere (exact Pareto)
enum class BreakKind { none, kink, jump, smooth };

struct BreakFunction {
    BreakKind kind = BreakKind::none;
    double alpha = 1.0;  // tail index above the break
    double beta = 0.5;   // index implied below the break (kink/jump)
    double t0 = 0.5;     // break point in (0,1)
    double jump = -1.0;  // discontinuity size (jump kind only)
};

double break_eval(const BreakFunction& h, double t);

// Right derivative of the break function at t0 where it has an analytic
// value: (1/alpha - 1/beta)/t0 for kink and jump, 0 for smooth.
double break_right_slope(const BreakFunction& h);

const char* break_kind_name(BreakKind k);
BreakKind break_kind_from_name(const std::string& name);

struct PiecewiseParetoModel {
    double alpha = 1.0;
    double c = 1.0;
    BreakFunction h;
    double t0 = 0.5;
    double h0 = 0.0;
};

struct QuantileViolation {
    double t = 0.0;
    std::string what;
};

// Scans the quantile function on a dense grid (>= grid_points points of (0,1),
// plus t0 and t0 +- eps) for positivity and monotone non-increase. Returns the
// first violation instead of throwing so a harness can log and skip.
std::optional<QuantileViolation> validate_quantile(const PiecewiseParetoModel& m,
                                                   int grid_points = 10000);

// Validates at construction; throws std::invalid_argument describing the
// first violating t for models whose quantile function is not positive and
// non-increasing.
PiecewiseParetoModel make_piecewise(double alpha, double c, const BreakFunction& h);

// (t/c)^{-1/alpha} (1 + H(t)).
double piecewise_quantile(const PiecewiseParetoModel& m, double t);

std::vector<double> sample_piecewise(const PiecewiseParetoModel& m, int n,
                                     std::mt19937_64& rng);

}  // namespace taillab
