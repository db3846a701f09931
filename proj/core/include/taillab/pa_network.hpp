#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace taillab {

// Growth parameters of the directed linear preferential attachment model.
// alpha/beta/gamma are the probabilities of the three growth schemes (new
// source node, edge between existing nodes, new target node); delta_in and
// delta_out are the affine offsets in the attachment probabilities.
struct PaParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta_in = 1.0;
    double delta_out = 1.0;
};

// Throws std::invalid_argument unless alpha + beta + gamma = 1 (within 1e-12),
// each probability is < 1, both deltas are positive, and the degree
// distributions have proper power tails (alpha delta_in + gamma > 0 and
// gamma delta_out + alpha > 0).
void validate(const PaParams& p);

// Builds PaParams from probabilities that may be rounded (published estimates
// often carry 3 significant digits and miss 1 by ~1e-4): rescales the three
// to sum exactly to 1. Rejects inputs off by more than 1e-3.
PaParams pa_params_normalized(double alpha, double beta, double gamma, double delta_in,
                              double delta_out);

// Directed multigraph state. Self-loops and parallel edges are allowed.
struct PaGraph {
    std::vector<std::uint32_t> in_deg;
    std::vector<std::uint32_t> out_deg;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (source, target)

    std::uint32_t n_nodes() const { return static_cast<std::uint32_t>(in_deg.size()); }
    std::uint64_t n_edges() const { return edges.size(); }

    std::uint32_t add_node() {
        in_deg.push_back(0);
        out_deg.push_back(0);
        return static_cast<std::uint32_t>(in_deg.size() - 1);
    }
    void add_edge(std::uint32_t source, std::uint32_t target) {
        edges.emplace_back(source, target);
        ++out_deg[source];
        ++in_deg[target];
    }
};

PaGraph single_node_graph();

// Node drawn with probability (D_in(w) + delta_in) / (E + delta_in N) where E
// is the current edge count. O(1): with probability E/(E + delta_in N) take
// the target endpoint of a uniformly random edge, else a uniform node.
std::uint32_t choose_in_endpoint(const PaGraph& g, const PaParams& p, std::mt19937_64& rng);

// Mirror image for sources, proportional to D_out + delta_out.
std::uint32_t choose_out_endpoint(const PaGraph& g, const PaParams& p, std::mt19937_64& rng);

// One growth step: flips the three-sided scheme coin, then attaches exactly
// one new edge (and a new node under the alpha/gamma schemes).
void pa_step(PaGraph& g, const PaParams& p, std::mt19937_64& rng);

// Grows from a single-node, zero-edge core (or the given core) until the
// graph has target_nodes nodes. max_steps = 0 installs the default guard of
// 100 target / (alpha + gamma) steps.
PaGraph grow_until_nodes(const PaParams& p, std::uint32_t target_nodes, std::mt19937_64& rng,
                         const PaGraph* core = nullptr, std::uint64_t max_steps = 0);
PaGraph grow_until_nodes(const PaParams& p, std::uint32_t target_nodes, std::uint64_t seed,
                         const PaGraph* core = nullptr, std::uint64_t max_steps = 0);

// Limiting power-law indices of the in-/out-degree distributions.
double theoretical_alpha_in(const PaParams& p);
double theoretical_alpha_out(const PaParams& p);

// Positive degrees only (the Hill estimator needs positive values); the
// number of zero-degree nodes dropped is reported alongside.
struct DegreeSample {
    std::vector<double> positive;
    std::uint32_t zero_count = 0;
};

DegreeSample in_degrees(const PaGraph& g);
DegreeSample out_degrees(const PaGraph& g);

}  // namespace taillab
