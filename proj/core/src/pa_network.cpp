#include "taillab/pa_network.hpp"

#include <cmath>
#include <stdexcept>

#include "taillab/rng.hpp"

namespace taillab {

void validate(const PaParams& p) {
    if (p.alpha < 0.0 || p.beta < 0.0 || p.gamma < 0.0)
        throw std::invalid_argument("PaParams: scheme probabilities must be non-negative");
    if (std::fabs(p.alpha + p.beta + p.gamma - 1.0) > 1e-12)
        throw std::invalid_argument("PaParams: alpha + beta + gamma must equal 1");
    if (p.alpha >= 1.0 || p.beta >= 1.0 || p.gamma >= 1.0)
        throw std::invalid_argument("PaParams: each scheme probability must be < 1");
    if (!(p.delta_in > 0.0) || !(p.delta_out > 0.0))
        throw std::invalid_argument("PaParams: delta_in and delta_out must be positive");
    if (!(p.alpha * p.delta_in + p.gamma > 0.0))
        throw std::invalid_argument("PaParams: alpha*delta_in + gamma must be positive");
    if (!(p.gamma * p.delta_out + p.alpha > 0.0))
        throw std::invalid_argument("PaParams: gamma*delta_out + alpha must be positive");
}

PaParams pa_params_normalized(double alpha, double beta, double gamma, double delta_in,
                              double delta_out) {
    const double sum = alpha + beta + gamma;
    if (std::fabs(sum - 1.0) > 1e-3)
        throw std::invalid_argument("pa_params_normalized: probabilities are not close to 1");
    PaParams p;
    p.alpha = alpha / sum;
    p.beta = beta / sum;
    // close the sum exactly rather than dividing three times
    p.gamma = 1.0 - p.alpha - p.beta;
    p.delta_in = delta_in;
    p.delta_out = delta_out;
    validate(p);
    return p;
}

PaGraph single_node_graph() {
    PaGraph g;
    g.add_node();
    return g;
}

std::uint32_t choose_in_endpoint(const PaGraph& g, const PaParams& p, std::mt19937_64& rng) {
    const std::uint64_t ne = g.n_edges();
    const std::uint32_t nn = g.n_nodes();
    // Sum of in-degrees equals the edge count, so the affine attachment law is
    // a mixture of "endpoint of a uniform edge" and "uniform node".
    const double degree_mass =
        static_cast<double>(ne) / (static_cast<double>(ne) + p.delta_in * nn);
    if (ne > 0 && uniform01(rng) < degree_mass)
        return g.edges[uniform_index(rng, ne)].second;
    return static_cast<std::uint32_t>(uniform_index(rng, nn));
}

std::uint32_t choose_out_endpoint(const PaGraph& g, const PaParams& p, std::mt19937_64& rng) {
    const std::uint64_t ne = g.n_edges();
    const std::uint32_t nn = g.n_nodes();
    const double degree_mass =
        static_cast<double>(ne) / (static_cast<double>(ne) + p.delta_out * nn);
    if (ne > 0 && uniform01(rng) < degree_mass)
        return g.edges[uniform_index(rng, ne)].first;
    return static_cast<std::uint32_t>(uniform_index(rng, nn));
}

void pa_step(PaGraph& g, const PaParams& p, std::mt19937_64& rng) {
    if (g.n_nodes() == 0) throw std::invalid_argument("pa_step: graph needs at least one node");
    const double coin = uniform01(rng);
    if (coin < p.alpha) {
        // New source node pointing at an existing node.
        const std::uint32_t w = choose_in_endpoint(g, p, rng);
        const std::uint32_t v = g.add_node();
        g.add_edge(v, w);
    } else if (coin < p.alpha + p.beta) {
        // Edge between existing nodes; endpoints drawn independently, so
        // self-loops can occur.
        const std::uint32_t v = choose_out_endpoint(g, p, rng);
        const std::uint32_t w = choose_in_endpoint(g, p, rng);
        g.add_edge(v, w);
    } else {
        // Existing node pointing at a new target node.
        const std::uint32_t v = choose_out_endpoint(g, p, rng);
        const std::uint32_t w = g.add_node();
        g.add_edge(v, w);
    }
}

PaGraph grow_until_nodes(const PaParams& p, std::uint32_t target_nodes, std::mt19937_64& rng,
                         const PaGraph* core, std::uint64_t max_steps) {
    validate(p);
    if (target_nodes < 1) throw std::invalid_argument("grow_until_nodes: target must be >= 1");
    if (!(p.alpha + p.gamma > 0.0))
        throw std::invalid_argument(
            "grow_until_nodes: node count never grows when alpha + gamma = 0");
    PaGraph g = core ? *core : single_node_graph();
    if (g.n_nodes() == 0)
        throw std::invalid_argument("grow_until_nodes: core graph needs at least one node");
    if (max_steps == 0) {
        max_steps = static_cast<std::uint64_t>(
            100.0 / (p.alpha + p.gamma) * static_cast<double>(target_nodes) + 100.0);
    }
    std::uint64_t steps = 0;
    while (g.n_nodes() < target_nodes) {
        if (++steps > max_steps)
            throw std::runtime_error("grow_until_nodes: step guard exceeded");
        pa_step(g, p, rng);
    }
    return g;
}

PaGraph grow_until_nodes(const PaParams& p, std::uint32_t target_nodes, std::uint64_t seed,
                         const PaGraph* core, std::uint64_t max_steps) {
    auto rng = make_stream(seed, 0);
    return grow_until_nodes(p, target_nodes, rng, core, max_steps);
}

double theoretical_alpha_in(const PaParams& p) {
    validate(p);
    return (1.0 + p.delta_in * (p.alpha + p.gamma)) / (p.alpha + p.beta);
}

double theoretical_alpha_out(const PaParams& p) {
    validate(p);
    return (1.0 + p.delta_out * (p.alpha + p.gamma)) / (p.beta + p.gamma);
}

namespace {

DegreeSample positive_degrees(const std::vector<std::uint32_t>& deg) {
    DegreeSample s;
    s.positive.reserve(deg.size());
    for (std::uint32_t d : deg) {
        if (d == 0) {
            ++s.zero_count;
        } else {
            s.positive.push_back(static_cast<double>(d));
        }
    }
    return s;
}

}  // namespace

DegreeSample in_degrees(const PaGraph& g) { return positive_degrees(g.in_deg); }
DegreeSample out_degrees(const PaGraph& g) { return positive_degrees(g.out_deg); }

}  // namespace taillab
