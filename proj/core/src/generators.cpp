#include "taillab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "taillab/rng.hpp"

namespace taillab {

double pareto_quantile(const ParetoModel& m, double t) {
    if (!(m.alpha > 0.0) || !(m.c > 0.0))
        throw std::invalid_argument("pareto_quantile: alpha and c must be positive");
    if (!(t > 0.0 && t < 1.0)) throw std::out_of_range("pareto_quantile: t must be in (0,1)");
    return std::pow(t / m.c, -1.0 / m.alpha);
}

std::vector<double> sample_pareto(const ParetoModel& m, int n, std::mt19937_64& rng) {
    if (n < 1) throw std::invalid_argument("sample_pareto: n must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = pareto_quantile(m, uniform_open01(rng));
    return out;
}

double break_eval(const BreakFunction& h, double t) {
    if (t < h.t0 || h.kind == BreakKind::none) return 0.0;
    switch (h.kind) {
        case BreakKind::kink:
            return std::pow(t / h.t0, 1.0 / h.alpha - 1.0 / h.beta) - 1.0;
        case BreakKind::jump:
            return std::pow(t / h.t0, 1.0 / h.alpha - 1.0 / h.beta) - 1.0 + h.jump;
        case BreakKind::smooth:
            return -(t - h.t0) * (t - h.t0);
        case BreakKind::none:
            return 0.0;
    }
    return 0.0;
}

double break_right_slope(const BreakFunction& h) {
    switch (h.kind) {
        case BreakKind::kink:
        case BreakKind::jump:
            return (1.0 / h.alpha - 1.0 / h.beta) / h.t0;
        case BreakKind::smooth:
            return 0.0;
        case BreakKind::none:
            throw std::logic_error("break_right_slope: undefined for the trivial break");
    }
    return 0.0;
}

const char* break_kind_name(BreakKind k) {
    switch (k) {
        case BreakKind::none: return "none";
        case BreakKind::kink: return "kink";
        case BreakKind::jump: return "jump";
        case BreakKind::smooth: return "smooth";
    }
    return "none";
}

BreakKind break_kind_from_name(const std::string& name) {
    if (name == "none") return BreakKind::none;
    if (name == "kink") return BreakKind::kink;
    if (name == "jump") return BreakKind::jump;
    if (name == "smooth") return BreakKind::smooth;
    throw std::invalid_argument("unknown break kind: " + name);
}

namespace {

double quantile_unchecked(const PiecewiseParetoModel& m, double t) {
    return std::pow(t / m.c, -1.0 / m.alpha) * (1.0 + break_eval(m.h, t));
}

}  // namespace

std::optional<QuantileViolation> validate_quantile(const PiecewiseParetoModel& m,
                                                   int grid_points) {
    if (grid_points < 2) grid_points = 2;
    constexpr double kEps = 1e-9;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(grid_points) + 3);
    for (int i = 1; i <= grid_points; ++i)
        grid.push_back(static_cast<double>(i) / (grid_points + 1));
    for (double t : {m.t0 - kEps, m.t0, m.t0 + kEps})
        if (t > 0.0 && t < 1.0) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double prev = std::numeric_limits<double>::infinity();
    // Slack of a few ulps keeps exactly-flat stretches from tripping the scan.
    constexpr double kSlack = 1e-12;
    for (double t : grid) {
        const double q = quantile_unchecked(m, t);
        if (!(q > 0.0) || !std::isfinite(q))
            return QuantileViolation{t, "quantile not strictly positive"};
        if (q > prev * (1.0 + kSlack))
            return QuantileViolation{t, "quantile increasing in t"};
        prev = q;
    }
    return std::nullopt;
}

PiecewiseParetoModel make_piecewise(double alpha, double c, const BreakFunction& h) {
    if (!(alpha > 0.0) || !(c > 0.0))
        throw std::invalid_argument("make_piecewise: alpha and c must be positive");
    if (h.kind != BreakKind::none && !(h.t0 > 0.0 && h.t0 < 1.0))
        throw std::invalid_argument("make_piecewise: t0 must be in (0,1)");
    PiecewiseParetoModel m;
    m.alpha = alpha;
    m.c = c;
    m.h = h;
    m.h.alpha = alpha;  // the break shares the model's tail index
    m.t0 = h.t0;
    m.h0 = h.kind == BreakKind::none ? 0.0 : break_right_slope(m.h);
    if (auto v = validate_quantile(m)) {
        throw std::invalid_argument("make_piecewise: invalid quantile function (" + v->what +
                                    " at t = " + std::to_string(v->t) + ")");
    }
    return m;
}

double piecewise_quantile(const PiecewiseParetoModel& m, double t) {
    if (!(t > 0.0 && t < 1.0)) throw std::out_of_range("piecewise_quantile: t must be in (0,1)");
    return quantile_unchecked(m, t);
}

std::vector<double> sample_piecewise(const PiecewiseParetoModel& m, int n,
                                     std::mt19937_64& rng) {
    if (n < 1) throw std::invalid_argument("sample_piecewise: n must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = quantile_unchecked(m, uniform_open01(rng));
    return out;
}

}  // namespace taillab
