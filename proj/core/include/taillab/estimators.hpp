#pragma once

#include "taillab/ordered_sample.hpp"

namespace taillab {

struct HillEstimate {
    int k = 0;
    double alpha_hat = 0.0;  // +infinity when degenerate
    double threshold = 0.0;  // the k-th largest observation
    bool degenerate = false;  // all top-k values equal; no slope information
};

// Hill estimator from the top k order statistics, k in [2, n]. Uses the
// cached log prefix sums, so each call is O(1).
HillEstimate hill_estimate(const OrderedSample& s, int k);

// Kolmogorov-Smirnov distance between the empirical law of the top-k ratios
// and the fitted Pareto tail y^{-alpha_hat}. The supremum over y >= 1 is
// attained at the jump points of the empirical cdf, which the max over j
// enumerates exactly; result is grid-free and deterministic. O(k), or
// O(#distinct values) on tied samples.
double ks_distance(const OrderedSample& s, int k, double alpha_hat);

struct KsProfile {
    std::vector<double> d;      // d[k-2] = D_k for k = 2..n
    std::vector<double> alpha;  // alpha[k-2] = Hill estimate at k (+inf if degenerate)
    int n = 0;

    double at_k(int k) const { return d[static_cast<std::size_t>(k) - 2]; }
    double alpha_at_k(int k) const { return alpha[static_cast<std::size_t>(k) - 2]; }
};

// D_k and the Hill estimate for every k in {2,..,n}. Degenerate k (all top-k
// values equal) get D_k = 1: the empirical mass sits entirely at ratio 1,
// where the fitted tail assigns survival 1. Cost O(n^2) overall.
KsProfile ks_profile(const OrderedSample& s);

struct MdspResult {
    int k_star = 0;
    double d_min = 0.0;
    double alpha_at_kstar = 0.0;
    double threshold = 0.0;
};

// Argmin of D_k over [k_min, k_max], ties broken to the smallest k.
// k_max < 0 means n.
MdspResult mdsp_select(const KsProfile& p, const OrderedSample& s, int k_min = 2,
                       int k_max = -1);

struct ConfidenceInterval {
    enum class Kind { naive, corrected };
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0;
    Kind kind = Kind::naive;
};

// [alpha_hat (1 - w), alpha_hat (1 + w)] with w = k^{-1/2} * z_{1-beta/2}.
// Treats the selected k as if it were deterministic.
ConfidenceInterval naive_ci(const HillEstimate& h, double beta);

// Same shape but w = n^{-1/2} * c_star, where c_star is the (1 - beta/2)
// quantile of the limit law of the standardized estimation error under the
// data-driven threshold (see limit_process.hpp / mc_limit).
ConfidenceInterval corrected_ci(const HillEstimate& h, int n, double beta, double c_star);

// Bundled c_star values for the two standard levels, alpha = 1; reproduced by
// `taillab limit-mc` (see tools/) and pinned by the acceptance suite.
inline constexpr double kCorrectedQuantile975 = 2.74;
inline constexpr double kCorrectedQuantile995 = 4.09;

// Inverse standard normal cdf (Wichura's PPND16 rational approximation).
double normal_quantile(double p);

}  // namespace taillab
