#include "taillab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "taillab/vexp.hpp"

namespace taillab {

HillEstimate hill_estimate(const OrderedSample& s, int k) {
    const int n = s.n();
    if (k < 2 || k > n) throw std::out_of_range("hill_estimate: k must be in [2, n]");
    // sum of log(X_(j) / X_(k)) over the top k-1 values; non-negative because
    // the values are sorted, zero exactly when the top k values are all equal.
    const double sum = s.log_prefix[static_cast<std::size_t>(k) - 2] -
                       (k - 1) * s.log_values[static_cast<std::size_t>(k) - 1];
    HillEstimate h;
    h.k = k;
    h.threshold = s.values[static_cast<std::size_t>(k) - 1];
    if (sum <= 0.0) {
        h.degenerate = true;
        h.alpha_hat = std::numeric_limits<double>::infinity();
    } else {
        h.alpha_hat = (k - 1) / sum;
    }
    return h;
}

namespace {

// Grouped scan over maximal runs of tied values. Within a run the fitted tail
// value p is constant while both empirical grid terms are monotone in j, so
// only the run endpoints can attain the max.
double ks_distance_grouped(const OrderedSample& s, int k, double alpha_hat) {
    const double lk = s.log_values[static_cast<std::size_t>(k) - 1];
    const double inv = 1.0 / (k - 1);
    const int jmax = k - 1;
    double d = 0.0;
    int idx = 0;  // 0-based position; 1-based rank j = idx + 1
    while (idx < jmax) {
        const int end = std::min<int>(static_cast<int>(s.run_end[idx]), jmax);
        const double p = std::exp(-alpha_hat * (s.log_values[idx] - lk));
        d = std::max(d, std::max(p - idx * inv, end * inv - p));
        idx = end;
    }
    return d;
}

double ks_distance_dense(const OrderedSample& s, int k, double alpha_hat,
                         std::vector<double>& scratch) {
    const double lk = s.log_values[static_cast<std::size_t>(k) - 1];
    const double inv = 1.0 / (k - 1);
    const int kk = k - 1;
    if (scratch.size() < static_cast<std::size_t>(kk)) scratch.resize(kk);
    double* q = scratch.data();
    const double* lv = s.log_values.data();
    for (int j = 0; j < kk; ++j) q[j] = -alpha_hat * (lv[j] - lk);
    exp_inplace(q, static_cast<std::size_t>(kk));
    double d = 0.0;
    for (int j = 0; j < kk; ++j) {
        const double hi = q[j] - j * inv;
        const double lo = (j + 1) * inv - q[j];
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

}  // namespace

double ks_distance(const OrderedSample& s, int k, double alpha_hat) {
    const int n = s.n();
    if (k < 2 || k > n) throw std::out_of_range("ks_distance: k must be in [2, n]");
    if (!(alpha_hat > 0.0) || !std::isfinite(alpha_hat))
        throw std::invalid_argument("ks_distance: alpha_hat must be positive and finite");
    return ks_distance_grouped(s, k, alpha_hat);
}

KsProfile ks_profile(const OrderedSample& s) {
    const int n = s.n();
    if (n < 2) throw std::invalid_argument("ks_profile: need at least 2 observations");
    KsProfile p;
    p.n = n;
    p.d.resize(static_cast<std::size_t>(n) - 1);
    p.alpha.resize(static_cast<std::size_t>(n) - 1);
    std::vector<double> scratch;
    if (!s.has_ties) scratch.resize(static_cast<std::size_t>(n) - 1);
    for (int k = 2; k <= n; ++k) {
        const HillEstimate h = hill_estimate(s, k);
        p.alpha[static_cast<std::size_t>(k) - 2] = h.alpha_hat;
        if (h.degenerate) {
            p.d[static_cast<std::size_t>(k) - 2] = 1.0;
        } else if (s.has_ties) {
            p.d[static_cast<std::size_t>(k) - 2] = ks_distance_grouped(s, k, h.alpha_hat);
        } else {
            p.d[static_cast<std::size_t>(k) - 2] = ks_distance_dense(s, k, h.alpha_hat, scratch);
        }
    }
    return p;
}

MdspResult mdsp_select(const KsProfile& p, const OrderedSample& s, int k_min, int k_max) {
    const int n = p.n;
    if (k_max < 0) k_max = n;
    if (k_min < 2 || k_max > n || k_min > k_max)
        throw std::out_of_range("mdsp_select: empty or invalid k range");
    int best_k = k_min;
    double best_d = p.at_k(k_min);
    for (int k = k_min + 1; k <= k_max; ++k) {
        const double d = p.at_k(k);
        if (d < best_d) {
            best_d = d;
            best_k = k;
        }
    }
    MdspResult r;
    r.k_star = best_k;
    r.d_min = best_d;
    r.alpha_at_kstar = p.alpha_at_k(best_k);
    r.threshold = s.values[static_cast<std::size_t>(best_k) - 1];
    return r;
}

ConfidenceInterval naive_ci(const HillEstimate& h, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("naive_ci: beta must be in (0,1)");
    if (h.k < 2) throw std::invalid_argument("naive_ci: k must be at least 2");
    const double w = normal_quantile(1.0 - beta / 2.0) / std::sqrt(static_cast<double>(h.k));
    ConfidenceInterval ci;
    ci.lo = h.alpha_hat * (1.0 - w);
    ci.hi = h.alpha_hat * (1.0 + w);
    ci.level = 1.0 - beta;
    ci.kind = ConfidenceInterval::Kind::naive;
    return ci;
}

ConfidenceInterval corrected_ci(const HillEstimate& h, int n, double beta, double c_star) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("corrected_ci: beta must be in (0,1)");
    if (!(c_star > 0.0)) throw std::invalid_argument("corrected_ci: c_star must be positive");
    const double w = c_star / std::sqrt(static_cast<double>(n));
    ConfidenceInterval ci;
    ci.lo = h.alpha_hat * (1.0 - w);
    ci.hi = h.alpha_hat * (1.0 + w);
    ci.level = 1.0 - beta;
    ci.kind = ConfidenceInterval::Kind::corrected;
    return ci;
}

// Wichura (1988), algorithm AS 241, PPND16. Accurate to ~1e-16 over (0,1).
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) *
                        r +
                    4.5921953931549871457e4) *
                       r +
                   1.3731693765509461125e4) *
                      r +
                  1.9715909503065514427e3) *
                     r +
                 1.3314166789178437745e2) *
                    r +
                3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) *
                        r +
                    2.1213794301586595867e4) *
                       r +
                   5.3941960214247511077e3) *
                      r +
                  6.8718700749205790830e2) *
                     r +
                 4.2313330701600911252e1) *
                    r +
                1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) *
                       r +
                   1.27045825245236838258e0) *
                      r +
                  3.64784832476320460504e0) *
                     r +
                 5.76949722146069140550e0) *
                    r +
                4.63033784615654529590e0) *
                   r +
               1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) *
                       r +
                   1.48103976427480074590e-1) *
                      r +
                  6.89767334985100004550e-1) *
                     r +
                 1.67638483018380384940e0) *
                    r +
                2.05319162663775882187e0) *
                   r +
               1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) *
                       r +
                   2.65321895265761230930e-2) *
                      r +
                  2.96560571828504891230e-1) *
                     r +
                 1.78482653991729133580e0) *
                    r +
                5.46378491116411436990e0) *
                   r +
               6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) *
                       r +
                   7.86869131145613259100e-4) *
                      r +
                  1.48753612908506148525e-2) *
                     r +
                 1.36929880922735805310e-1) *
                    r +
                5.99832206555887937690e-1) *
                   r +
               1.0);
    }
    return q < 0.0 ? -val : val;
}

}  // namespace taillab
