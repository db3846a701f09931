#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "taillab/estimators.hpp"
#include "taillab/generators.hpp"
#include "taillab/rng.hpp"

using namespace taillab;

namespace {

std::vector<double> seeded_pareto(double alpha, double c, int n, std::uint64_t seed) {
    auto rng = make_stream(seed);
    return sample_pareto(ParetoModel{alpha, c}, n, rng);
}

}  // namespace

TEST_CASE("order_sample sorts descending and caches logs") {
    const OrderedSample s = order_sample(std::vector<double>{3.0, 1.0, 2.0});
    CHECK(s.values == std::vector<double>{3.0, 2.0, 1.0});
    CHECK(s.n() == 3);
    CHECK(s.log_prefix[2] ==
          doctest::Approx(std::log(3.0) + std::log(2.0) + std::log(1.0)).epsilon(1e-15));

    const OrderedSample single = order_sample(std::vector<double>{5.0});
    CHECK(single.n() == 1);
    CHECK(single.values[0] == 5.0);
}

TEST_CASE("order_sample maximum matches a naive scan") {
    const auto data = seeded_pareto(1.0, 1.0, 1000, 11);
    double mx = data[0];
    for (double x : data) mx = std::max(mx, x);
    const OrderedSample s = order_sample(data);
    CHECK(s.values[0] == mx);
}

TEST_CASE("log prefix sums carry no meaningful accumulation error") {
    const auto data = seeded_pareto(0.5, 3.0, 20000, 13);
    const OrderedSample s = order_sample(data);
    long double acc = 0.0L;
    double max_log = 0.0;
    for (double lv : s.log_values) max_log = std::max(max_log, std::fabs(lv));
    const double tol = s.n() * std::numeric_limits<double>::epsilon() * max_log;
    int next_check = 0;
    for (int i = 0; i < s.n(); ++i) {
        acc += static_cast<long double>(s.log_values[static_cast<std::size_t>(i)]);
        if (i == next_check || i == s.n() - 1) {
            CHECK(std::fabs(static_cast<double>(acc) -
                            s.log_prefix[static_cast<std::size_t>(i)]) <= tol);
            next_check += 1999;
        }
    }
}

TEST_CASE("order_sample rejects bad input naming the index") {
    CHECK_THROWS_AS(order_sample(std::vector<double>{}), std::invalid_argument);
    try {
        order_sample(std::vector<double>{1.0, -2.0, 3.0});
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("index 1") != std::string::npos);
    }
    CHECK_THROWS_AS(order_sample(std::vector<double>{1.0, 0.0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(order_sample(std::vector<double>{1.0, inf}), std::invalid_argument);
    CHECK_THROWS_AS(order_sample(std::vector<double>{1.0, std::nan("")}),
                    std::invalid_argument);
}

TEST_CASE("hill_estimate on an analytically forced sample") {
    const OrderedSample s = order_sample(
        std::vector<double>{std::exp(3.0), std::exp(2.0), std::exp(1.0), 1.0});
    const HillEstimate h = hill_estimate(s, 4);
    CHECK(h.alpha_hat == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(h.threshold == 1.0);
    CHECK_FALSE(h.degenerate);
}

TEST_CASE("hill_estimate is scale invariant") {
    const auto base = seeded_pareto(1.5, 1.0, 400, 17);
    const OrderedSample s = order_sample(base);
    for (double c : {0.01, 3.0, 1234.5}) {
        std::vector<double> scaled(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) scaled[i] = c * base[i];
        const OrderedSample sc = order_sample(scaled);
        for (int k : {2, 17, 200, 400}) {
            const double a = hill_estimate(s, k).alpha_hat;
            const double b = hill_estimate(sc, k).alpha_hat;
            CHECK(b == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("hill_estimate recovers the index of a large Pareto sample") {
    const int n = 10000;
    const OrderedSample s = order_sample(seeded_pareto(1.0, 1.0, n, 23));
    const HillEstimate h = hill_estimate(s, n);
    CHECK(h.alpha_hat == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("hill_estimate matches direct summation") {
    const auto data = seeded_pareto(0.7, 2.0, 300, 29);
    const OrderedSample s = order_sample(data);
    for (int k : {2, 3, 50, 299, 300}) {
        CHECK(hill_estimate(s, k).alpha_hat ==
              doctest::Approx(oracle::hill_direct(s.values, k)).epsilon(1e-11));
    }
}

TEST_CASE("hill_estimate edge cases") {
    const OrderedSample s = order_sample(std::vector<double>{4.0, 3.0, 2.0, 1.0});
    CHECK_THROWS_AS(hill_estimate(s, 1), std::out_of_range);
    CHECK_THROWS_AS(hill_estimate(s, 5), std::out_of_range);

    const OrderedSample flat = order_sample(std::vector<double>{2.0, 2.0, 2.0});
    const HillEstimate h = hill_estimate(flat, 3);
    CHECK(h.degenerate);
    CHECK(std::isinf(h.alpha_hat));
}

TEST_CASE("ks_distance at k = 2 is 1 - 1/e for any two distinct points") {
    for (auto pts : {std::vector<double>{7.0, 2.0}, std::vector<double>{1.5, 1.0}}) {
        const OrderedSample s = order_sample(pts);
        const double r = pts[0] / pts[1];
        const double alpha = 1.0 / std::log(r);
        CHECK(hill_estimate(s, 2).alpha_hat == doctest::Approx(alpha).epsilon(1e-13));
        CHECK(ks_distance(s, 2, alpha) ==
              doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    }
}

TEST_CASE("ks_distance on ratios sitting exactly on the fitted grid") {
    // With ratios r_j = (j/k)^{-1/a}, the fitted tail maps them back to j/k,
    // leaving only the mismatch between the /k and /(k-1) grids.
    const int k = 10;
    const double a = 1.7;
    std::vector<double> values;
    for (int j = 1; j <= k - 1; ++j)
        values.push_back(std::pow(static_cast<double>(j) / k, -1.0 / a));
    values.push_back(1.0);
    const OrderedSample s = order_sample(values);

    double expected = 0.0;
    for (int j = 1; j <= k - 1; ++j) {
        const double jr = static_cast<double>(j);
        expected = std::max(expected, std::max(jr / k - (jr - 1) / (k - 1),
                                               jr / (k - 1) - jr / k));
    }
    CHECK(expected == doctest::Approx(1.0 / k).epsilon(1e-13));
    CHECK(ks_distance(s, k, a) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ks_distance equals the brute-force supremum") {
    const auto data = seeded_pareto(1.0, 1.0, 120, 31);
    const OrderedSample s = order_sample(data);
    const int k = 50;
    const double a = hill_estimate(s, k).alpha_hat;
    CHECK(ks_distance(s, k, a) ==
          doctest::Approx(oracle::ks_sup_bruteforce(s.values, k, a)).epsilon(1e-12));
}

TEST_CASE("remainder bound against the j/k form") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<double> data;
        if (seed % 3 == 0) {
            data = seeded_pareto(1.0, 1.0, 200, seed);
        } else if (seed % 3 == 1) {
            auto rng = make_stream(seed);
            BreakFunction h;
            h.kind = BreakKind::kink;
            h.beta = 0.5;
            h.t0 = 0.5;
            data = sample_piecewise(make_piecewise(1.0, 1.0, h), 150, rng);
        } else {
            // integer-valued, heavily tied
            auto rng = make_stream(seed);
            data = sample_pareto(ParetoModel{1.2, 1.0}, 200, rng);
            for (auto& x : data) x = std::ceil(x);
        }
        const OrderedSample s = order_sample(data);
        for (int k = 2; k <= s.n(); ++k) {
            const HillEstimate h = hill_estimate(s, k);
            if (h.degenerate) continue;
            const double exact = ks_distance(s, k, h.alpha_hat);
            const double approx = oracle::ks_jk_form(s.values, k, h.alpha_hat);
            CHECK(std::fabs(exact - approx) <= 1.0 / k + 1e-12);
        }
    }
}

TEST_CASE("ks_profile singleton case") {
    const OrderedSample s = order_sample(std::vector<double>{3.0, 1.0});
    const KsProfile p = ks_profile(s);
    CHECK(p.d.size() == 1);
    CHECK(p.at_k(2) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("ks_profile equals an independent brute-force recomputation") {
    const auto data = seeded_pareto(1.0, 1.0, 200, 37);
    const OrderedSample s = order_sample(data);
    const KsProfile p = ks_profile(s);
    const auto brute = oracle::ks_profile_bruteforce(s.values);
    for (int k = 2; k <= 200; ++k)
        CHECK(p.at_k(k) ==
              doctest::Approx(brute[static_cast<std::size_t>(k) - 2]).epsilon(1e-12));
}

TEST_CASE("ks_profile oracle equivalence on tied integer data") {
    auto rng = make_stream(41);
    std::vector<double> data = sample_pareto(ParetoModel{1.3, 1.0}, 300, rng);
    for (auto& x : data) x = std::ceil(x);
    const OrderedSample s = order_sample(data);
    REQUIRE(s.has_ties);
    const KsProfile p = ks_profile(s);
    const auto brute = oracle::ks_profile_bruteforce(s.values);
    for (int k = 2; k <= s.n(); ++k) {
        if (std::isinf(p.alpha_at_k(k))) {
            CHECK(p.at_k(k) == 1.0);
            continue;
        }
        CHECK(p.at_k(k) ==
              doctest::Approx(brute[static_cast<std::size_t>(k) - 2]).epsilon(1e-12));
    }
}

TEST_CASE("profile and selection are invariant under power transforms") {
    const auto data = seeded_pareto(1.0, 1.0, 300, 43);
    const OrderedSample s = order_sample(data);
    const KsProfile p = ks_profile(s);
    const MdspResult sel = mdsp_select(p, s);

    for (auto [c, g] : {std::pair{2.0, 0.5}, std::pair{0.3, 3.0}}) {
        std::vector<double> tx(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) tx[i] = c * std::pow(data[i], g);
        const OrderedSample st = order_sample(tx);
        const KsProfile pt = ks_profile(st);
        for (int k = 2; k <= s.n(); ++k) {
            CHECK(std::fabs(pt.at_k(k) - p.at_k(k)) <= 1e-12);
            CHECK(pt.alpha_at_k(k) == doctest::Approx(p.alpha_at_k(k) / g).epsilon(1e-11));
        }
        const MdspResult selt = mdsp_select(pt, st);
        CHECK(selt.k_star == sel.k_star);
    }
}

TEST_CASE("mdsp_select argmin and tie-breaking") {
    const OrderedSample s = order_sample(std::vector<double>{6.0, 5.0, 4.0, 3.0, 2.0, 1.0});
    KsProfile p;
    p.n = 6;
    p.alpha.assign(5, 1.0);

    p.d = {0.3, 0.1, 0.2, 0.5, 0.4};  // k = 2..6
    CHECK(mdsp_select(p, s).k_star == 3);
    CHECK(mdsp_select(p, s).d_min == 0.1);
    CHECK(mdsp_select(p, s).threshold == 4.0);

    p.d = {0.3, 0.1, 0.2, 0.1, 0.4};  // tie at k = 3 and k = 5
    CHECK(mdsp_select(p, s).k_star == 3);

    CHECK(mdsp_select(p, s, 4, 6).k_star == 5);
    CHECK_THROWS_AS(mdsp_select(p, s, 1, 6), std::out_of_range);
    CHECK_THROWS_AS(mdsp_select(p, s, 4, 3), std::out_of_range);
    CHECK_THROWS_AS(mdsp_select(p, s, 2, 7), std::out_of_range);
}

TEST_CASE("mdsp_select agrees with an exhaustive scan") {
    const auto data = seeded_pareto(1.0, 1.0, 1000, 47);
    const OrderedSample s = order_sample(data);
    const KsProfile p = ks_profile(s);
    const MdspResult sel = mdsp_select(p, s);

    int best_k = 2;
    double best = p.at_k(2);
    for (int k = 3; k <= 1000; ++k) {
        if (p.at_k(k) < best) {
            best = p.at_k(k);
            best_k = k;
        }
    }
    CHECK(sel.k_star == best_k);
    CHECK(sel.d_min == best);
    CHECK(sel.alpha_at_kstar == p.alpha_at_k(best_k));
}

TEST_CASE("normal_quantile matches bisection on erfc") {
    for (double p : {0.005, 0.025, 0.1, 0.5, 0.9, 0.975, 0.995, 0.9999}) {
        CHECK(normal_quantile(p) ==
              doctest::Approx(oracle::normal_quantile_bisect(p)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("naive confidence interval") {
    HillEstimate h;
    h.k = 400;
    h.alpha_hat = 1.0;
    const ConfidenceInterval ci = naive_ci(h, 0.05);
    const double w = oracle::normal_quantile_bisect(0.975) / 20.0;
    CHECK(w == doctest::Approx(1.959964 / 20.0).epsilon(1e-6));
    CHECK(ci.lo == doctest::Approx(1.0 - w).epsilon(1e-9));
    CHECK(ci.hi == doctest::Approx(1.0 + w).epsilon(1e-9));
    CHECK(ci.kind == ConfidenceInterval::Kind::naive);

    // beta -> 1 collapses the interval onto alpha_hat
    const ConfidenceInterval tight = naive_ci(h, 0.999999);
    CHECK(tight.hi - tight.lo < 1e-4);

    // endpoints scale multiplicatively with alpha_hat
    HillEstimate h2 = h;
    h2.alpha_hat = 2.0;
    const ConfidenceInterval ci2 = naive_ci(h2, 0.05);
    CHECK(ci2.lo == doctest::Approx(2.0 * ci.lo).epsilon(1e-13));
    CHECK(ci2.hi == doctest::Approx(2.0 * ci.hi).epsilon(1e-13));
}

TEST_CASE("corrected confidence interval arithmetic") {
    HillEstimate h;
    h.k = 500;
    h.alpha_hat = 1.0;
    const ConfidenceInterval ci = corrected_ci(h, 10000, 0.05, 2.74);
    CHECK(ci.lo == doctest::Approx(1.0 - 2.74 / 100.0).epsilon(1e-12));
    CHECK(ci.hi == doctest::Approx(1.0 + 2.74 / 100.0).epsilon(1e-12));
    CHECK(ci.kind == ConfidenceInterval::Kind::corrected);
    CHECK(kCorrectedQuantile975 == 2.74);
    CHECK(kCorrectedQuantile995 == 4.09);
    CHECK_THROWS_AS(corrected_ci(h, 100, 0.05, 0.0), std::invalid_argument);
}

TEST_CASE("sqrt(n) D_n stays within the limit-law range") {
    const int n = 10000;
    const int reps = 1000;
    int inside = 0;
    for (int r = 0; r < reps; ++r) {
        auto rng = make_stream(1000 + static_cast<std::uint64_t>(r));
        const OrderedSample s =
            order_sample(sample_pareto(ParetoModel{1.0, 1.0}, n, rng));
        const HillEstimate h = hill_estimate(s, n);
        const double scaled = std::sqrt(static_cast<double>(n)) *
                              ks_distance(s, n, h.alpha_hat);
        inside += scaled >= 0.2 && scaled <= 3.5;
    }
    CHECK(inside >= static_cast<int>(0.99 * reps));
}
