#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "taillab/estimators.hpp"
#include "taillab/pa_network.hpp"
#include "taillab/rng.hpp"

using namespace taillab;

namespace {

PaParams example_one() { return pa_params_normalized(0.0978, 0.873, 0.0289, 2.05, 13.8); }
PaParams example_two() { return pa_params_normalized(0.0327, 0.946, 0.0209, 8.88, 9.59); }

double round_3sig(double x) {
    const double scale = std::pow(10.0, std::floor(std::log10(std::fabs(x))) - 2.0);
    return std::round(x / scale) * scale;
}

}  // namespace

TEST_CASE("parameter validation") {
    PaParams p{0.2, 0.5, 0.3, 1.0, 1.0};
    CHECK_NOTHROW(validate(p));
    p.delta_in = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.delta_in = 1.0;
    p.alpha = 0.25;  // probabilities no longer sum to 1
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    CHECK_THROWS_AS(pa_params_normalized(0.3, 0.3, 0.3, 1.0, 1.0), std::invalid_argument);

    // rounded published values are rescaled onto the simplex
    const PaParams ex1 = example_one();
    CHECK(ex1.alpha + ex1.beta + ex1.gamma == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("theoretical tail indices of the published examples") {
    CHECK(round_3sig(theoretical_alpha_in(example_one())) == doctest::Approx(1.30));
    CHECK(round_3sig(theoretical_alpha_in(example_two())) == doctest::Approx(1.51));
    // symmetric parameters give equal in/out indices
    const PaParams sym = pa_params_normalized(0.1, 0.8, 0.1, 3.0, 3.0);
    CHECK(theoretical_alpha_in(sym) == doctest::Approx(theoretical_alpha_out(sym)).epsilon(1e-14));
}

TEST_CASE("single node graph and forced first attachment") {
    PaGraph g = single_node_graph();
    CHECK(g.n_nodes() == 1);
    CHECK(g.n_edges() == 0);
    const PaParams p = pa_params_normalized(1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0, 2.0);
    auto rng = make_stream(200);
    // with no edges the degree-proportional route has zero mass: the sole
    // node is chosen with probability one
    for (int i = 0; i < 10; ++i) {
        CHECK(choose_in_endpoint(g, p, rng) == 0);
        CHECK(choose_out_endpoint(g, p, rng) == 0);
    }
}

TEST_CASE("pa_step keeps the degree bookkeeping consistent") {
    const PaParams p = pa_params_normalized(0.2, 0.5, 0.3, 1.5, 0.5);
    PaGraph g = single_node_graph();
    auto rng = make_stream(201);
    for (int step = 1; step <= 5000; ++step) {
        const std::uint32_t nodes_before = g.n_nodes();
        pa_step(g, p, rng);
        CHECK(g.n_edges() == static_cast<std::uint64_t>(step));
        CHECK(g.n_nodes() >= nodes_before);
        CHECK(g.n_nodes() <= nodes_before + 1);
    }
    std::uint64_t in_sum = 0, out_sum = 0;
    for (std::uint32_t d : g.in_deg) in_sum += d;
    for (std::uint32_t d : g.out_deg) out_sum += d;
    CHECK(in_sum == g.n_edges());
    CHECK(out_sum == g.n_edges());
    for (const auto& [src, dst] : g.edges) {
        CHECK(src < g.n_nodes());
        CHECK(dst < g.n_nodes());
    }
}

TEST_CASE("scheme frequencies match the three-sided coin") {
    const PaParams p = pa_params_normalized(0.2, 0.5, 0.3, 1.0, 1.0);
    PaGraph g = single_node_graph();
    auto rng = make_stream(202);
    const int steps = 100000;
    // the scheme of a step is visible from whether a node was added and
    // which endpoint of the new edge it is
    int count_a = 0, count_b = 0, count_c = 0;
    std::uint32_t prev = g.n_nodes();
    for (int i = 0; i < steps; ++i) {
        pa_step(g, p, rng);
        const auto& [src, dst] = g.edges.back();
        if (g.n_nodes() == prev) {
            ++count_b;
        } else if (src == g.n_nodes() - 1) {
            ++count_a;
        } else {
            CHECK(dst == g.n_nodes() - 1);
            ++count_c;
        }
        prev = g.n_nodes();
    }
    auto within = [&](int count, double want) {
        const double se = std::sqrt(want * (1 - want) / steps);
        return std::fabs(static_cast<double>(count) / steps - want) <= 3.0 * se;
    };
    CHECK(within(count_a, p.alpha));
    CHECK(within(count_b, p.beta));
    CHECK(within(count_c, p.gamma));
}

TEST_CASE("frozen-graph attachment frequencies follow the affine law") {
    // two nodes, one edge 0 -> 1: in-degrees (0, 1), out-degrees (1, 0)
    PaGraph g = single_node_graph();
    g.add_node();
    g.add_edge(0, 1);
    const PaParams p = pa_params_normalized(0.2, 0.6, 0.2, 1.0, 2.0);

    const int trials = 100000;
    auto rng = make_stream(203);
    int in_hits[2] = {0, 0}, out_hits[2] = {0, 0};
    for (int i = 0; i < trials; ++i) {
        ++in_hits[choose_in_endpoint(g, p, rng)];
        ++out_hits[choose_out_endpoint(g, p, rng)];
    }
    // P[choose w] = (D_in + delta_in) / (edges + delta_in * nodes)
    const double p_in1 = (1.0 + p.delta_in) / (1.0 + p.delta_in * 2.0);  // = 2/3
    CHECK(p_in1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const double p_out0 = (1.0 + p.delta_out) / (1.0 + p.delta_out * 2.0);  // = 3/5
    for (int node = 0; node < 2; ++node) {
        const double want_in = node == 1 ? p_in1 : 1.0 - p_in1;
        const double want_out = node == 0 ? p_out0 : 1.0 - p_out0;
        const double se_in = std::sqrt(want_in * (1 - want_in) / trials);
        const double se_out = std::sqrt(want_out * (1 - want_out) / trials);
        CHECK(std::fabs(in_hits[node] / static_cast<double>(trials) - want_in) <= 4.0 * se_in);
        CHECK(std::fabs(out_hits[node] / static_cast<double>(trials) - want_out) <=
              4.0 * se_out);
    }
}

TEST_CASE("frozen larger graph attachment frequencies") {
    // hand-built 5-node graph with mixed degrees
    PaGraph g = single_node_graph();
    for (int i = 0; i < 4; ++i) g.add_node();
    g.add_edge(0, 1);
    g.add_edge(2, 1);
    g.add_edge(3, 1);
    g.add_edge(1, 4);
    g.add_edge(2, 4);
    const PaParams p = pa_params_normalized(0.3, 0.4, 0.3, 0.7, 1.3);

    const int trials = 100000;
    auto rng = make_stream(204);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < trials; ++i) ++hits[choose_in_endpoint(g, p, rng)];
    const double denom = static_cast<double>(g.n_edges()) + p.delta_in * g.n_nodes();
    for (int node = 0; node < 5; ++node) {
        const double want = (g.in_deg[static_cast<std::size_t>(node)] + p.delta_in) / denom;
        const double se = std::sqrt(want * (1 - want) / trials);
        CHECK(std::fabs(hits[static_cast<std::size_t>(node)] / static_cast<double>(trials) -
                        want) <= 4.0 * se);
    }
}

TEST_CASE("grow_until_nodes hits the target and is reproducible") {
    const PaParams p = example_one();
    const std::uint32_t target = 12670;  // ceil((0.0978 + 0.0289) * 1e5)
    CHECK(static_cast<std::uint32_t>(std::ceil((0.0978 + 0.0289) * 1e5)) == target);
    const PaGraph g = grow_until_nodes(p, target, 42);
    CHECK(g.n_nodes() == target);
    const PaGraph g2 = grow_until_nodes(p, target, 42);
    CHECK(g2.edges == g.edges);

    PaParams bad = p;
    bad.alpha = 0.0;
    bad.gamma = 0.0;
    bad.beta = 1.0;
    CHECK_THROWS_AS(grow_until_nodes(bad, 10, 1), std::invalid_argument);
}

TEST_CASE("edge count per node concentrates on 1/(alpha+gamma)") {
    const PaParams p = pa_params_normalized(0.15, 0.7, 0.15, 1.0, 1.0);
    const std::uint32_t target = 3000;
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PaGraph g = grow_until_nodes(p, target, seed);
        ratios.push_back(static_cast<double>(g.n_edges()) / target);
    }
    // geometric steps per node addition: mean 1/(alpha+gamma)
    const double want = 1.0 / (p.alpha + p.gamma);
    const double se = std::sqrt(oracle::variance(ratios) / static_cast<double>(ratios.size()));
    CHECK(std::fabs(oracle::mean(ratios) - want) <= 3.0 * se + 1e-3);
}

TEST_CASE("degree extraction and the handshake identity") {
    PaGraph star = single_node_graph();
    for (int i = 0; i < 5; ++i) {
        star.add_node();
        star.add_edge(static_cast<std::uint32_t>(i + 1), 0);
    }
    const DegreeSample in = in_degrees(star);
    REQUIRE(in.positive.size() == 1);
    CHECK(in.positive[0] == 5.0);
    CHECK(in.zero_count == 5);
    const DegreeSample out = out_degrees(star);
    CHECK(out.positive.size() == 5);
    CHECK(out.zero_count == 1);

    const PaGraph g = grow_until_nodes(example_one(), 2000, 7);
    const DegreeSample din = in_degrees(g);
    double sum = 0;
    for (double d : din.positive) sum += d;
    CHECK(static_cast<std::uint64_t>(sum) == g.n_edges());
    CHECK(din.positive.size() + din.zero_count == g.n_nodes());
}

TEST_CASE("Hill estimate of in-degrees approaches the theoretical index") {
    const PaParams p = example_one();
    const double alpha_in = theoretical_alpha_in(p);
    const std::uint32_t target = 12670;
    std::vector<double> estimates;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PaGraph g = grow_until_nodes(p, target, 300 + seed);
        const OrderedSample s = order_sample(in_degrees(g).positive);
        estimates.push_back(hill_estimate(s, 1000).alpha_hat);
    }
    std::sort(estimates.begin(), estimates.end());
    const double median = estimates[estimates.size() / 2];
    CHECK(median == doctest::Approx(alpha_in).epsilon(0.2 / alpha_in));
}

TEST_CASE("rank-plot slope of the top tail approaches -alpha_in as m grows") {
    const PaParams p = example_one();
    const double alpha_in = theoretical_alpha_in(p);
    auto top_slope = [&](double edges, std::uint64_t seed) {
        const auto target = static_cast<std::uint32_t>(
            std::ceil((p.alpha + p.gamma) * edges));
        const PaGraph g = grow_until_nodes(p, target, seed);
        auto degs = in_degrees(g).positive;
        std::sort(degs.begin(), degs.end(), std::greater<>());
        const auto top = static_cast<std::size_t>(degs.size() / 100);
        std::vector<double> logd, logr;
        for (std::size_t i = 0; i < top; ++i) {
            logd.push_back(std::log(degs[i]));
            logr.push_back(std::log(static_cast<double>(i + 1)));
        }
        return oracle::lsq_slope(logd, logr);
    };
    double err_small = 0.0, err_large = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        err_small += std::fabs(top_slope(1e4, 400 + seed) + alpha_in);
        err_large += std::fabs(top_slope(1e5, 500 + seed) + alpha_in);
    }
    CHECK(err_large < err_small);
}
