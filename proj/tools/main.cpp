// taillab: heavy-tail threshold selection and tail-index estimation toolkit.
//
//   fit        estimate a tail index from a sample file
//   simulate   draw samples from the Pareto / piecewise-Pareto models
//   limit-mc   Monte Carlo for the limit law of the selected threshold
//   pa-sim     grow a directed preferential attachment graph
//   experiment run a full scenario described by a config file

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "taillab/config.hpp"
#include "taillab/csv.hpp"
#include "taillab/experiments.hpp"
#include "taillab/generators.hpp"
#include "taillab/pa_network.hpp"
#include "taillab/rng.hpp"

namespace {

using namespace taillab;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int reps = 0;
    std::string out_dir;
    int threads = 0;
    bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key = value configuration file");
    cmd->add_option("--seed", o.seed, "RNG seed (required unless set in the config)")
        ->each([&](const std::string&) { o.seed_set = true; });
    cmd->add_option("--reps", o.reps, "number of replicates");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--paper-scale", o.paper_scale,
                  "use publication-scale replicate counts (hours of CPU time)");
}

Config merge_config(const CommonOpts& o) {
    Config cfg;
    if (!o.config_path.empty()) cfg = Config::parse_file(o.config_path);
    if (o.seed_set) cfg.set("seed", std::to_string(o.seed));
    if (o.reps > 0) cfg.set("replicates", std::to_string(o.reps));
    if (!o.out_dir.empty()) cfg.set("out_dir", o.out_dir);
    if (o.threads > 0) cfg.set("threads", std::to_string(o.threads));
    return cfg;
}

void apply_paper_scale(Config& cfg, ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::limit_mc:
            cfg.set("replicates", "100000");
            cfg.set("grid", "50000");
            break;
        case ScenarioKind::pa_rmse_sweep:
            cfg.set("replicates", "10000");
            cfg.set("edges_m", "1000000");
            cfg.set("k_hi", "10000");
            break;
        default:
            cfg.set("replicates", "100000");
            break;
    }
}

int cmd_experiment(const CommonOpts& o) {
    Config cfg = merge_config(o);
    if (o.paper_scale) apply_paper_scale(cfg, scenario_kind_from_name(cfg.get_str("kind")));
    const Scenario s = make_scenario(cfg);
    return run_scenario(s);
}

int cmd_fit(const std::string& file, int k_min, int k_max,
            const std::string& profile_out, const std::string& cstar_table) {
    double c975 = kCorrectedQuantile975;
    double c995 = kCorrectedQuantile995;
    if (!cstar_table.empty()) {
        // two-column CSV level,c_star as written by limit-mc
        std::ifstream in(cstar_table);
        if (!in) throw std::runtime_error("cannot open c* table: " + cstar_table);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            const double level = std::stod(line.substr(0, comma));
            const double value = std::stod(line.substr(comma + 1));
            if (std::abs(level - 0.975) < 1e-9) c975 = value;
            if (std::abs(level - 0.995) < 1e-9) c995 = value;
        }
    }

    const std::vector<double> data = read_sample_file(file);
    if (data.size() < 2) throw std::runtime_error(file + ": need at least 2 positive values");
    FitResult f = fit_values(data, k_min, k_max);
    // re-apply the possibly overridden c* quantiles
    {
        OrderedSample s = order_sample(data);
        HillEstimate h = hill_estimate(s, f.selection.k_star);
        f.corrected95 = corrected_ci(h, f.n, 0.05, c975);
        f.corrected99 = corrected_ci(h, f.n, 0.01, c995);
    }

    std::cout << "n          " << f.n << "\n"
              << "k*         " << f.selection.k_star << "\n"
              << "D(k*)      " << f.selection.d_min << "\n"
              << "threshold  " << f.selection.threshold << "\n"
              << "alpha_hat  " << f.selection.alpha_at_kstar << "\n"
              << "naive 95%      [" << f.naive95.lo << ", " << f.naive95.hi << "]\n"
              << "naive 99%      [" << f.naive99.lo << ", " << f.naive99.hi << "]\n"
              << "corrected 95%  [" << f.corrected95.lo << ", " << f.corrected95.hi << "]\n"
              << "corrected 99%  [" << f.corrected99.lo << ", " << f.corrected99.hi << "]\n";
    if (!profile_out.empty()) {
        write_profile_csv(f.profile, profile_out);
        std::cerr << "KS profile written to " << profile_out << "\n";
    }
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    Config cfg = merge_config(o);
    if (!cfg.has("seed"))
        throw std::runtime_error("simulate requires --seed or a seed config key");
    const std::uint64_t seed = cfg.get_u64("seed");
    const int n = cfg.get_int("n");
    const std::string family = cfg.get_str("family", "pareto");
    const std::string out_dir = cfg.get_str("out_dir", ".");
    std::filesystem::create_directories(out_dir);
    const std::string out_path =
        (std::filesystem::path(out_dir) / (family + "_sample.txt")).string();

    auto rng = make_stream(seed, 0);
    std::vector<double> data;
    if (family == "pareto") {
        ParetoModel m{cfg.get_double("alpha", 1.0), cfg.get_double("c", 1.0)};
        data = sample_pareto(m, n, rng);
    } else if (family == "piecewise") {
        BreakFunction h;
        h.kind = break_kind_from_name(cfg.get_str("h_variant", "kink"));
        h.beta = cfg.get_double("beta", 0.5);
        h.t0 = cfg.get_double("t0", 0.5);
        h.jump = cfg.get_double("h_jump", -1.0);
        const PiecewiseParetoModel m =
            make_piecewise(cfg.get_double("alpha", 1.0), cfg.get_double("c", 1.0), h);
        data = sample_piecewise(m, n, rng);
    } else {
        throw std::runtime_error("family must be 'pareto' or 'piecewise'");
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    for (double x : data) out << CsvWriter::field(x) << "\n";
    std::cerr << n << " draws written to " << out_path << "\n";
    return 0;
}

int cmd_limit_mc(const CommonOpts& o) {
    Config cfg = merge_config(o);
    cfg.set("kind", "limit_mc");
    if (!cfg.has("replicates")) cfg.set("replicates", "10000");
    if (o.paper_scale) apply_paper_scale(cfg, ScenarioKind::limit_mc);
    return run_scenario(make_scenario(cfg));
}

int cmd_pa_sim(const CommonOpts& o) {
    Config cfg = merge_config(o);
    if (!cfg.has("seed")) throw std::runtime_error("pa-sim requires --seed or a seed config key");
    const PaParams p = pa_params_normalized(
        cfg.get_double("pa_alpha"), cfg.get_double("pa_beta"), cfg.get_double("pa_gamma"),
        cfg.get_double("delta_in"), cfg.get_double("delta_out"));
    std::uint32_t target_nodes;
    if (cfg.has("target_nodes")) {
        target_nodes = static_cast<std::uint32_t>(cfg.get_u64("target_nodes"));
    } else {
        const double m_edges = cfg.get_double("edges_m");
        target_nodes = static_cast<std::uint32_t>(std::ceil(
            (cfg.get_double("pa_alpha") + cfg.get_double("pa_gamma")) * m_edges));
    }
    const std::string out_dir = cfg.get_str("out_dir", ".");
    std::filesystem::create_directories(out_dir);

    const PaGraph g = grow_until_nodes(p, target_nodes, cfg.get_u64("seed"));
    const DegreeSample din = in_degrees(g);
    const DegreeSample dout = out_degrees(g);

    auto write_degrees = [&](const DegreeSample& d, const std::string& name) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        for (double x : d.positive) out << static_cast<long long>(x) << "\n";
    };
    write_degrees(din, "in_degree.txt");
    write_degrees(dout, "out_degree.txt");
    {
        CsvWriter csv((std::filesystem::path(out_dir) / "edges.csv").string());
        csv.write_row({"source", "target"});
        for (const auto& [src, dst] : g.edges)
            csv.write_row({std::to_string(src), std::to_string(dst)});
    }
    std::cerr << "graph: " << g.n_nodes() << " nodes, " << g.n_edges() << " edges; "
              << din.zero_count << " zero in-degree and " << dout.zero_count
              << " zero out-degree nodes excluded from degree files\n"
              << "alpha_in = " << theoretical_alpha_in(p)
              << ", alpha_out = " << theoretical_alpha_out(p) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-tail threshold selection laboratory"};
    app.require_subcommand(1);

    CommonOpts sim_opts, limit_opts, pa_opts, exp_opts;
    std::string fit_file_path, fit_profile_out, fit_cstar_table;
    int fit_k_min = 2, fit_k_max = -1;

    CLI::App* fit = app.add_subcommand("fit", "estimate tail index from a sample file");
    fit->add_option("file", fit_file_path, "one positive number per line")->required();
    fit->add_option("--k-min", fit_k_min, "smallest k searched");
    fit->add_option("--k-max", fit_k_max, "largest k searched (-1 = n)");
    fit->add_option("--profile", fit_profile_out, "write the KS profile CSV here");
    fit->add_option("--cstar-table", fit_cstar_table,
                    "quantiles.csv from limit-mc overriding the bundled c* values");

    CLI::App* simulate = app.add_subcommand("simulate", "draw a sample from a model config");
    add_common(simulate, sim_opts);

    CLI::App* limit_mc = app.add_subcommand("limit-mc", "limit-process Monte Carlo");
    add_common(limit_mc, limit_opts);

    CLI::App* pa_sim = app.add_subcommand("pa-sim", "grow a preferential attachment graph");
    add_common(pa_sim, pa_opts);

    CLI::App* experiment = app.add_subcommand("experiment", "run a scenario config");
    add_common(experiment, exp_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed())
            return cmd_fit(fit_file_path, fit_k_min, fit_k_max, fit_profile_out,
                           fit_cstar_table);
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (limit_mc->parsed()) return cmd_limit_mc(limit_opts);
        if (pa_sim->parsed()) return cmd_pa_sim(pa_opts);
        if (experiment->parsed()) return cmd_experiment(exp_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
