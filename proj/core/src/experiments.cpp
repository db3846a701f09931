#include "taillab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "taillab/csv.hpp"
#include "taillab/generators.hpp"
#include "taillab/limit_process.hpp"
#include "taillab/pa_network.hpp"
#include "taillab/parallel.hpp"
#include "taillab/rng.hpp"

namespace taillab {

using json = nlohmann::ordered_json;

ScenarioKind scenario_kind_from_name(const std::string& name) {
    if (name == "pareto_kstar_cdf") return ScenarioKind::pareto_kstar_cdf;
    if (name == "hill_error_cdf") return ScenarioKind::hill_error_cdf;
    if (name == "ci_coverage") return ScenarioKind::ci_coverage;
    if (name == "piecewise_kstar_cdf") return ScenarioKind::piecewise_kstar_cdf;
    if (name == "h_variants") return ScenarioKind::h_variants;
    if (name == "pa_rmse_sweep") return ScenarioKind::pa_rmse_sweep;
    if (name == "limit_mc") return ScenarioKind::limit_mc;
    if (name == "fit_file") return ScenarioKind::fit_file;
    throw std::invalid_argument("unknown scenario kind: " + name);
}

const char* scenario_kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::pareto_kstar_cdf: return "pareto_kstar_cdf";
        case ScenarioKind::hill_error_cdf: return "hill_error_cdf";
        case ScenarioKind::ci_coverage: return "ci_coverage";
        case ScenarioKind::piecewise_kstar_cdf: return "piecewise_kstar_cdf";
        case ScenarioKind::h_variants: return "h_variants";
        case ScenarioKind::pa_rmse_sweep: return "pa_rmse_sweep";
        case ScenarioKind::limit_mc: return "limit_mc";
        case ScenarioKind::fit_file: return "fit_file";
    }
    return "?";
}

Scenario make_scenario(const Config& cfg) {
    Scenario s;
    s.kind = scenario_kind_from_name(cfg.get_str("kind"));
    if (!cfg.has("seed"))
        throw std::invalid_argument("scenario requires an explicit seed (no wall-clock seeding)");
    s.seed = cfg.get_u64("seed");
    s.replicates = cfg.get_int("replicates", 1);
    if (s.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    s.threads = cfg.get_int("threads", 0);
    s.out_dir = cfg.get_str("out_dir", ".");
    s.params = cfg;
    return s;
}

// ---------------------------------------------------------------------------

std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return g;
}

std::vector<double> ecdf_on_grid(std::vector<double> xs, const std::vector<double>& grid) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    out.reserve(grid.size());
    const double n = static_cast<double>(xs.size());
    for (double x : grid) {
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        out.push_back(static_cast<double>(it - xs.begin()) / n);
    }
    return out;
}

double binomial_se(double p_hat, int n) {
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / n);
}

double hill_from_logs(std::span<const double> lv, int k) {
    double sum = 0.0;
    const double lk = lv[static_cast<std::size_t>(k) - 1];
    for (int i = 0; i < k - 1; ++i) sum += lv[static_cast<std::size_t>(i)] - lk;
    if (sum <= 0.0) return std::numeric_limits<double>::infinity();
    return (k - 1) / sum;
}

std::vector<TailRep> run_tail_mc(const SampleFactory& factory, int reps, std::uint64_t seed,
                                 int threads, int k_min, int k_max) {
    std::vector<TailRep> out(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](int rep) {
        TailRep& r = out[static_cast<std::size_t>(rep)];
        try {
            auto rng = make_stream(seed, static_cast<std::uint64_t>(rep));
            const std::vector<double> data = factory(rng);
            OrderedSample s = order_sample(data);
            const KsProfile prof = ks_profile(s);
            const int hi = k_max < 0 ? s.n() : std::min(k_max, s.n());
            const MdspResult sel = mdsp_select(prof, s, k_min, hi);
            r.n = s.n();
            r.k_star = sel.k_star;
            r.d_min = sel.d_min;
            r.alpha_at_kstar = sel.alpha_at_kstar;
            r.threshold = sel.threshold;
            r.log_values = std::move(s.log_values);
        } catch (const std::exception& e) {
            r.failed = true;
            r.error = e.what();
        }
    });
    return out;
}

RmseSweep rmse_sweep(const std::vector<TailRep>& reps, double true_alpha, int k_lo, int k_hi) {
    if (!(true_alpha > 0.0)) throw std::invalid_argument("rmse_sweep: true_alpha must be > 0");
    if (k_lo < 2) k_lo = 2;
    if (k_hi < k_lo) throw std::invalid_argument("rmse_sweep: empty k range");
    int usable = 0;
    for (const auto& r : reps)
        if (!r.failed) ++usable;
    if (usable < 2) throw std::invalid_argument("rmse_sweep: need at least 2 replicates");

    RmseSweep sw;
    const int nk = k_hi - k_lo + 1;
    sw.k.resize(static_cast<std::size_t>(nk));
    for (int i = 0; i < nk; ++i) sw.k[static_cast<std::size_t>(i)] = k_lo + i;
    std::vector<double> sse(static_cast<std::size_t>(nk), 0.0);
    sw.count.assign(static_cast<std::size_t>(nk), 0);

    int truncated = 0;
    double sse_kstar = 0.0;
    int n_kstar = 0;
    for (const auto& r : reps) {
        if (r.failed) continue;
        if (r.n < k_hi) ++truncated;
        const std::span<const double> lv(r.log_values);
        // running log-sum gives every Hill estimate in one pass
        double prefix = lv[0];
        for (int k = 2; k <= std::min(r.n, k_hi); ++k) {
            const double lk = lv[static_cast<std::size_t>(k) - 1];
            if (k >= k_lo) {
                const double sum = prefix - (k - 1) * lk;
                const double a = sum > 0.0 ? (k - 1) / sum : std::numeric_limits<double>::infinity();
                const double e = a - true_alpha;
                if (std::isfinite(e)) {
                    sse[static_cast<std::size_t>(k - k_lo)] += e * e;
                    ++sw.count[static_cast<std::size_t>(k - k_lo)];
                }
            }
            prefix += lk;
        }
        const double ek = r.alpha_at_kstar - true_alpha;
        if (std::isfinite(ek)) {
            sse_kstar += ek * ek;
            ++n_kstar;
        }
        if (r.k_star < k_lo || r.k_star > k_hi) sw.kstar_outside_range = true;
    }
    if (truncated > 0)
        std::cerr << "rmse_sweep: k range truncated to the sample size in " << truncated
                  << " replicates\n";

    sw.rmse.assign(static_cast<std::size_t>(nk), std::numeric_limits<double>::quiet_NaN());
    sw.rmse_min = std::numeric_limits<double>::infinity();
    sw.k_argmin = 0;
    for (int i = 0; i < nk; ++i) {
        if (sw.count[static_cast<std::size_t>(i)] == 0) continue;
        const double v = std::sqrt(sse[static_cast<std::size_t>(i)] /
                                   sw.count[static_cast<std::size_t>(i)]);
        sw.rmse[static_cast<std::size_t>(i)] = v;
        if (v < sw.rmse_min) {
            sw.rmse_min = v;
            sw.k_argmin = k_lo + i;
        }
    }
    sw.rmse_at_kstar = n_kstar > 0 ? std::sqrt(sse_kstar / n_kstar)
                                   : std::numeric_limits<double>::quiet_NaN();
    sw.degenerate = sw.rmse_min == 0.0;
    sw.ratio = sw.degenerate ? std::numeric_limits<double>::infinity()
                             : sw.rmse_at_kstar / sw.rmse_min;
    return sw;
}

double rmse_at_fixed_k(const std::vector<TailRep>& reps, double true_alpha, int k) {
    double sse = 0.0;
    int n = 0;
    for (const auto& r : reps) {
        if (r.failed || r.n < k) continue;
        const double e = hill_from_logs(r.log_values, k) - true_alpha;
        if (!std::isfinite(e)) continue;
        sse += e * e;
        ++n;
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(sse / n);
}

// ---------------------------------------------------------------------------

FitResult fit_values(std::span<const double> data, int k_min, int k_max) {
    OrderedSample s = order_sample(data);
    if (s.n() < 2) throw std::invalid_argument("fit: need at least 2 positive values");
    FitResult f;
    f.n = s.n();
    f.profile = ks_profile(s);
    const int hi = k_max < 0 ? s.n() : std::min(k_max, s.n());
    f.selection = mdsp_select(f.profile, s, k_min, hi);
    HillEstimate h = hill_estimate(s, f.selection.k_star);
    f.naive95 = naive_ci(h, 0.05);
    f.naive99 = naive_ci(h, 0.01);
    f.corrected95 = corrected_ci(h, s.n(), 0.05, kCorrectedQuantile975);
    f.corrected99 = corrected_ci(h, s.n(), 0.01, kCorrectedQuantile995);
    return f;
}

std::vector<double> read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sample file: " + path);
    std::vector<double> data;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = line;
        const auto b = t.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = t.find_last_not_of(" \t\r");
        t = t.substr(b, e - b + 1);
        std::size_t pos = 0;
        double x = 0.0;
        bool ok = true;
        try {
            x = std::stod(t, &pos);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok || pos != t.size())
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": not a number: " + t);
        if (!std::isfinite(x) || x <= 0.0)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": values must be positive and finite");
        data.push_back(x);
    }
    return data;
}

FitResult fit_file(const std::string& path, int k_min, int k_max) {
    const std::vector<double> data = read_sample_file(path);
    if (data.size() < 2)
        throw std::runtime_error(path + ": need at least 2 positive values");
    return fit_values(data, k_min, k_max);
}

void write_profile_csv(const KsProfile& p, const std::string& path) {
    CsvWriter csv(path);
    csv.write_row({"k", "d_k", "alpha_hat_k"});
    for (int k = 2; k <= p.n; ++k) {
        csv.write_row({CsvWriter::field(k), CsvWriter::field(p.at_k(k)),
                       CsvWriter::field(p.alpha_at_k(k))});
    }
}

// ---------------------------------------------------------------------------
// Scenario implementations

namespace {

struct KstarStats {
    double p_le_1_3 = 0, p_le_1_2 = 0, p_le_3_4 = 0, p_ge_0_9 = 0;
    int used = 0;
};

KstarStats kstar_fraction_stats(const std::vector<TailRep>& reps) {
    KstarStats st;
    for (const auto& r : reps) {
        if (r.failed) continue;
        const double f = static_cast<double>(r.k_star) / r.n;
        st.p_le_1_3 += f <= 1.0 / 3.0;
        st.p_le_1_2 += f <= 0.5;
        st.p_le_3_4 += f <= 0.75;
        st.p_ge_0_9 += f >= 0.9;
        ++st.used;
    }
    if (st.used > 0) {
        st.p_le_1_3 /= st.used;
        st.p_le_1_2 /= st.used;
        st.p_le_3_4 /= st.used;
        st.p_ge_0_9 /= st.used;
    }
    return st;
}

int count_failed(const std::vector<TailRep>& reps) {
    int f = 0;
    for (const auto& r : reps) f += r.failed ? 1 : 0;
    if (f > 0) {
        for (const auto& r : reps) {
            if (r.failed) {
                std::cerr << "replicate failed: " << r.error << "\n";
                break;
            }
        }
    }
    return f;
}

// Delta-method standard error for sqrt(mean sq1)/sqrt(mean sq2) with the two
// squared-error sequences paired by replicate.
double rmse_ratio_se(const std::vector<double>& sq1, const std::vector<double>& sq2) {
    const std::size_t n = std::min(sq1.size(), sq2.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m1 += sq1[i];
        m2 += sq2[i];
    }
    m1 /= n;
    m2 /= n;
    double v1 = 0, v2 = 0, cv = 0;
    for (std::size_t i = 0; i < n; ++i) {
        v1 += (sq1[i] - m1) * (sq1[i] - m1);
        v2 += (sq2[i] - m2) * (sq2[i] - m2);
        cv += (sq1[i] - m1) * (sq2[i] - m2);
    }
    v1 /= n - 1;
    v2 /= n - 1;
    cv /= n - 1;
    const double r = std::sqrt(m1 / m2);
    const double rel_var = v1 / (m1 * m1) + v2 / (m2 * m2) - 2.0 * cv / (m1 * m2);
    return 0.5 * r * std::sqrt(std::max(rel_var, 0.0) / n);
}

std::vector<double> squared_errors_at_kstar(const std::vector<TailRep>& reps, double alpha) {
    std::vector<double> out;
    out.reserve(reps.size());
    for (const auto& r : reps) {
        if (r.failed) continue;
        const double e = r.alpha_at_kstar - alpha;
        out.push_back(e * e);
    }
    return out;
}

std::vector<double> squared_errors_at_fixed_k(const std::vector<TailRep>& reps, double alpha,
                                              int k) {
    std::vector<double> out;
    out.reserve(reps.size());
    for (const auto& r : reps) {
        if (r.failed || r.n < k) continue;
        const double e = hill_from_logs(r.log_values, k) - alpha;
        out.push_back(e * e);
    }
    return out;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

json rmse_block(const RmseSweep& sw, double se_ratio) {
    json j;
    j["at_kstar"] = sw.rmse_at_kstar;
    j["min"] = sw.rmse_min;
    j["argmin_k"] = sw.k_argmin;
    j["ratio_kstar_vs_min"] = sw.ratio;
    j["se_ratio_kstar_vs_min"] = se_ratio;
    j["kstar_outside_range"] = sw.kstar_outside_range;
    j["degenerate"] = sw.degenerate;
    return j;
}

int scenario_pareto_kstar_cdf(const Scenario& s) {
    const double alpha = s.params.get_double("alpha", 1.0);
    const double c = s.params.get_double("c", 1.0);
    std::vector<int> ns;
    if (s.params.has("n_list")) {
        std::stringstream ss(s.params.get_str("n_list"));
        std::string tok;
        while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
    } else {
        ns.push_back(s.params.get_int("n"));
    }
    const ParetoModel model{alpha, c};

    const std::vector<double> grid = uniform_grid(0.0, 1.0, 1001);
    std::vector<std::vector<double>> columns;
    std::vector<std::string> colnames;
    json runs = json::array();

    for (std::size_t i = 0; i < ns.size(); ++i) {
        const int n = ns[i];
        // distinct seed stream block per sample size
        const std::uint64_t seed_n = s.seed + 7919ULL * i;
        auto reps = run_tail_mc(
            [&](std::mt19937_64& rng) { return sample_pareto(model, n, rng); }, s.replicates,
            seed_n, s.threads);
        std::vector<double> fractions;
        for (const auto& r : reps)
            if (!r.failed) fractions.push_back(static_cast<double>(r.k_star) / r.n);
        columns.push_back(ecdf_on_grid(fractions, grid));
        colnames.push_back("ecdf_n" + std::to_string(n));

        const KstarStats st = kstar_fraction_stats(reps);
        const RmseSweep sw = rmse_sweep(reps, alpha, 2, n);
        const double rmse_at_n = rmse_at_fixed_k(reps, alpha, n);
        const double ratio_vs_n = sw.rmse_at_kstar / rmse_at_n;
        json run;
        run["n"] = n;
        run["failed_replicates"] = count_failed(reps);
        json ks;
        ks["p_le_1_3"] = st.p_le_1_3;
        ks["se_p_le_1_3"] = binomial_se(st.p_le_1_3, st.used);
        ks["p_le_1_2"] = st.p_le_1_2;
        ks["se_p_le_1_2"] = binomial_se(st.p_le_1_2, st.used);
        ks["p_le_3_4"] = st.p_le_3_4;
        ks["se_p_le_3_4"] = binomial_se(st.p_le_3_4, st.used);
        ks["p_ge_0_9"] = st.p_ge_0_9;
        ks["se_p_ge_0_9"] = binomial_se(st.p_ge_0_9, st.used);
        run["kstar_over_n"] = ks;
        json rm;
        rm["at_kstar"] = sw.rmse_at_kstar;
        rm["at_n"] = rmse_at_n;
        rm["ratio_kstar_vs_n"] = ratio_vs_n;
        rm["se_ratio_kstar_vs_n"] = rmse_ratio_se(squared_errors_at_kstar(reps, alpha),
                                                  squared_errors_at_fixed_k(reps, alpha, n));
        rm["min"] = sw.rmse_min;
        rm["argmin_k"] = sw.k_argmin;
        run["rmse"] = rm;
        runs.push_back(run);
    }

    json summary;
    summary["scenario"] = "pareto_kstar_cdf";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["alpha"] = alpha;
    summary["c"] = c;
    summary["runs"] = runs;

    const int limit_grid = s.params.get_int("limit_grid", 0);
    if (limit_grid > 0) {
        const int limit_reps = s.params.get_int("limit_reps", 10000);
        LimitScenario lsc;
        lsc.alpha = alpha;
        const LimitMcResult mc =
            mc_limit(limit_reps, Grid(limit_grid), lsc, s.seed + 50021ULL, s.threads);
        columns.push_back(ecdf_on_grid(mc.T, grid));
        colnames.push_back("limit_cdf");
        json lim;
        lim["grid"] = limit_grid;
        lim["replicates"] = limit_reps;
        const std::vector<double>& T = mc.T;
        auto frac = [&](auto pred) {
            double cnt = 0;
            for (double t : T) cnt += pred(t);
            return cnt / T.size();
        };
        lim["p_le_1_3"] = frac([](double t) { return t <= 1.0 / 3.0; });
        lim["p_le_1_2"] = frac([](double t) { return t <= 0.5; });
        lim["p_le_3_4"] = frac([](double t) { return t <= 0.75; });
        lim["p_ge_0_9"] = frac([](double t) { return t >= 0.9; });
        summary["limit"] = lim;
    }

    CsvWriter csv(join_path(s.out_dir, "kstar_cdf.csv"));
    std::vector<std::string> header{"x"};
    header.insert(header.end(), colnames.begin(), colnames.end());
    csv.write_row(header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{CsvWriter::field(grid[i])};
        for (const auto& col : columns) row.push_back(CsvWriter::field(col[i]));
        csv.write_row(row);
    }
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

int scenario_hill_error_cdf(const Scenario& s) {
    const double alpha = s.params.get_double("alpha", 1.0);
    const double c = s.params.get_double("c", 1.0);
    const int n = s.params.get_int("n");
    const ParetoModel model{alpha, c};
    auto reps = run_tail_mc([&](std::mt19937_64& rng) { return sample_pareto(model, n, rng); },
                            s.replicates, s.seed, s.threads);
    std::vector<double> scaled;
    for (const auto& r : reps)
        if (!r.failed) scaled.push_back(std::sqrt(static_cast<double>(n)) *
                                        (r.alpha_at_kstar - alpha));
    double lo = *std::min_element(scaled.begin(), scaled.end());
    double hi = *std::max_element(scaled.begin(), scaled.end());

    json summary;
    summary["scenario"] = "hill_error_cdf";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["n"] = n;
    summary["alpha"] = alpha;
    summary["failed_replicates"] = count_failed(reps);

    std::vector<double> limit_errors;
    const int limit_grid = s.params.get_int("limit_grid", 0);
    if (limit_grid > 0) {
        const int limit_reps = s.params.get_int("limit_reps", 10000);
        LimitScenario lsc;
        lsc.alpha = alpha;
        const LimitMcResult mc =
            mc_limit(limit_reps, Grid(limit_grid), lsc, s.seed + 50021ULL, s.threads);
        limit_errors = mc.hill_error;
        lo = std::min(lo, *std::min_element(limit_errors.begin(), limit_errors.end()));
        hi = std::max(hi, *std::max_element(limit_errors.begin(), limit_errors.end()));
        json lim;
        lim["grid"] = limit_grid;
        lim["replicates"] = limit_reps;
        lim["q_0_975_abs"] = mc.quantiles.empty() ? 0.0 : mc.quantiles[0];
        summary["limit"] = lim;
    }

    const std::vector<double> grid = uniform_grid(lo, hi, 1025);
    CsvWriter csv(join_path(s.out_dir, "hill_error_cdf.csv"));
    if (limit_errors.empty()) {
        csv.write_row({"x", "ecdf"});
        const auto col = ecdf_on_grid(scaled, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            csv.write_row({CsvWriter::field(grid[i]), CsvWriter::field(col[i])});
    } else {
        csv.write_row({"x", "ecdf", "limit_cdf"});
        const auto col = ecdf_on_grid(scaled, grid);
        const auto lim = ecdf_on_grid(limit_errors, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            csv.write_row({CsvWriter::field(grid[i]), CsvWriter::field(col[i]),
                           CsvWriter::field(lim[i])});
    }

    double mean = 0;
    for (double x : scaled) mean += x;
    mean /= static_cast<double>(scaled.size());
    double var = 0;
    for (double x : scaled) var += (x - mean) * (x - mean);
    var /= static_cast<double>(scaled.size() - 1);
    json st;
    st["mean"] = mean;
    st["sd"] = std::sqrt(var);
    st["q_0_975_abs"] = empirical_quantile(
        [&] {
            std::vector<double> a(scaled.size());
            for (std::size_t i = 0; i < scaled.size(); ++i) a[i] = std::fabs(scaled[i]);
            return a;
        }(),
        0.975);
    summary["scaled_error"] = st;
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

int scenario_ci_coverage(const Scenario& s) {
    const double alpha = s.params.get_double("alpha", 1.0);
    const double c = s.params.get_double("c", 1.0);
    const int n = s.params.get_int("n");
    const double c975 = s.params.get_double("c_star_975", kCorrectedQuantile975);
    const double c995 = s.params.get_double("c_star_995", kCorrectedQuantile995);
    const ParetoModel model{alpha, c};
    auto reps = run_tail_mc([&](std::mt19937_64& rng) { return sample_pareto(model, n, rng); },
                            s.replicates, s.seed, s.threads);

    const double z975 = normal_quantile(0.975);
    const double z995 = normal_quantile(0.995);
    int used = 0, miss_naive95 = 0, miss_naive99 = 0, miss_corr95 = 0, miss_corr99 = 0;
    for (const auto& r : reps) {
        if (r.failed) continue;
        ++used;
        const double a = r.alpha_at_kstar;
        auto misses = [&](double w) { return !(a * (1.0 - w) <= alpha && alpha <= a * (1.0 + w)); };
        const double sk = std::sqrt(static_cast<double>(r.k_star));
        const double sn = std::sqrt(static_cast<double>(n));
        miss_naive95 += misses(z975 / sk);
        miss_naive99 += misses(z995 / sk);
        miss_corr95 += misses(c975 / sn);
        miss_corr99 += misses(c995 / sn);
    }

    json summary;
    summary["scenario"] = "ci_coverage";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["n"] = n;
    summary["alpha"] = alpha;
    summary["c_star_975"] = c975;
    summary["c_star_995"] = c995;
    summary["failed_replicates"] = count_failed(reps);
    json cov;
    cov["naive_95"] = static_cast<double>(miss_naive95) / used;
    cov["se_naive_95"] = binomial_se(static_cast<double>(miss_naive95) / used, used);
    cov["naive_99"] = static_cast<double>(miss_naive99) / used;
    cov["corrected_95"] = static_cast<double>(miss_corr95) / used;
    cov["se_corrected_95"] = binomial_se(static_cast<double>(miss_corr95) / used, used);
    cov["corrected_99"] = static_cast<double>(miss_corr99) / used;
    cov["se_corrected_99"] = binomial_se(static_cast<double>(miss_corr99) / used, used);
    summary["noncoverage"] = cov;
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

BreakFunction break_from_config(const Config& cfg, double alpha) {
    BreakFunction h;
    h.kind = break_kind_from_name(cfg.get_str("h_variant", "kink"));
    h.alpha = alpha;
    h.beta = cfg.get_double("beta", 0.5);
    h.t0 = cfg.get_double("t0", 0.5);
    h.jump = cfg.get_double("h_jump", -1.0);
    return h;
}

json piecewise_run(const Scenario& s, const PiecewiseParetoModel& model, int n,
                   std::uint64_t seed, std::vector<double>* fractions_out) {
    auto reps = run_tail_mc(
        [&](std::mt19937_64& rng) { return sample_piecewise(model, n, rng); }, s.replicates,
        seed, s.threads);
    const RmseSweep sw = rmse_sweep(reps, model.alpha, 2, n);
    const int k_t0 = static_cast<int>(std::lround(n * model.t0));
    const double rmse_at_nt0 = rmse_at_fixed_k(reps, model.alpha, k_t0);

    if (fractions_out) {
        for (const auto& r : reps)
            if (!r.failed) fractions_out->push_back(static_cast<double>(r.k_star) / r.n);
    }

    json j;
    j["h_variant"] = break_kind_name(model.h.kind);
    if (model.h.kind == BreakKind::jump) j["h_jump"] = model.h.jump;
    j["n"] = n;
    j["failed_replicates"] = count_failed(reps);
    json rm = rmse_block(sw, rmse_ratio_se(squared_errors_at_kstar(reps, model.alpha),
                                           squared_errors_at_fixed_k(reps, model.alpha,
                                                                     sw.k_argmin)));
    rm["k_nt0"] = k_t0;
    rm["at_nt0"] = rmse_at_nt0;
    rm["ratio_kstar_vs_nt0"] = sw.rmse_at_kstar / rmse_at_nt0;
    rm["se_ratio_kstar_vs_nt0"] = rmse_ratio_se(squared_errors_at_kstar(reps, model.alpha),
                                                squared_errors_at_fixed_k(reps, model.alpha,
                                                                          k_t0));
    if (s.params.has("report_k")) {
        const int rk = s.params.get_int("report_k");
        rm["report_k"] = rk;
        rm["at_report_k"] = rmse_at_fixed_k(reps, model.alpha, rk);
    }
    j["rmse"] = rm;

    double mean_frac = 0;
    int used = 0;
    double p_le_t0 = 0;
    for (const auto& r : reps) {
        if (r.failed) continue;
        const double f = static_cast<double>(r.k_star) / r.n;
        mean_frac += f;
        p_le_t0 += f <= model.t0;
        ++used;
    }
    json ks;
    ks["mean"] = mean_frac / used;
    ks["p_le_t0"] = p_le_t0 / used;
    j["kstar_over_n"] = ks;
    return j;
}

int scenario_piecewise_kstar_cdf(const Scenario& s) {
    const double alpha = s.params.get_double("alpha", 1.0);
    const double c = s.params.get_double("c", 1.0);
    const int n = s.params.get_int("n");
    const PiecewiseParetoModel model = make_piecewise(alpha, c, break_from_config(s.params, alpha));

    std::vector<double> fractions;
    json run = piecewise_run(s, model, n, s.seed, &fractions);

    const std::vector<double> grid = uniform_grid(0.0, 1.0, 1001);
    const auto col = ecdf_on_grid(fractions, grid);
    CsvWriter csv(join_path(s.out_dir, "kstar_cdf.csv"));
    csv.write_row({"x", "ecdf"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv.write_row({CsvWriter::field(grid[i]), CsvWriter::field(col[i])});

    json summary;
    summary["scenario"] = "piecewise_kstar_cdf";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["alpha"] = alpha;
    summary["beta"] = model.h.beta;
    summary["c"] = c;
    summary["t0"] = model.t0;
    summary["h0"] = model.h0;
    summary["run"] = run;
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

int scenario_h_variants(const Scenario& s) {
    const double alpha = s.params.get_double("alpha", 1.0);
    const double c = s.params.get_double("c", 1.0);
    const int n = s.params.get_int("n");
    std::vector<std::string> variants;
    {
        std::stringstream ss(s.params.get_str("variants", "kink,jump,smooth"));
        std::string tok;
        while (std::getline(ss, tok, ',')) variants.push_back(tok);
    }

    const std::vector<double> grid = uniform_grid(0.0, 1.0, 1001);
    std::vector<std::vector<double>> columns;
    json vruns = json::array();
    for (std::size_t i = 0; i < variants.size(); ++i) {
        Config p = s.params;
        p.set("h_variant", variants[i]);
        BreakFunction h = break_from_config(p, alpha);
        const PiecewiseParetoModel model = make_piecewise(alpha, c, h);
        std::vector<double> fractions;
        Scenario sub = s;
        sub.params = p;
        vruns.push_back(piecewise_run(sub, model, n, s.seed + 104729ULL * i, &fractions));
        columns.push_back(ecdf_on_grid(fractions, grid));
    }

    CsvWriter csv(join_path(s.out_dir, "kstar_cdf_variants.csv"));
    std::vector<std::string> header{"x"};
    for (const auto& v : variants) header.push_back("ecdf_" + v);
    csv.write_row(header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{CsvWriter::field(grid[i])};
        for (const auto& col : columns) row.push_back(CsvWriter::field(col[i]));
        csv.write_row(row);
    }

    json summary;
    summary["scenario"] = "h_variants";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["n"] = n;
    summary["alpha"] = alpha;
    summary["variants"] = vruns;
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

int scenario_pa_rmse_sweep(const Scenario& s) {
    const double raw_alpha = s.params.get_double("pa_alpha");
    const double raw_gamma = s.params.get_double("pa_gamma");
    const PaParams p =
        pa_params_normalized(raw_alpha, s.params.get_double("pa_beta"), raw_gamma,
                             s.params.get_double("delta_in"), s.params.get_double("delta_out"));
    const std::int64_t m_edges = static_cast<std::int64_t>(s.params.get_double("edges_m"));
    // node target from the configured probabilities as published
    const std::uint32_t target_nodes = static_cast<std::uint32_t>(
        std::ceil((raw_alpha + raw_gamma) * static_cast<double>(m_edges)));
    const int k_lo = s.params.get_int("k_lo", 10);
    const int k_hi = s.params.get_int("k_hi", 5000);
    const double alpha_in = theoretical_alpha_in(p);

    std::vector<TailRep> reps(static_cast<std::size_t>(s.replicates));
    std::vector<std::uint32_t> zero_counts(static_cast<std::size_t>(s.replicates), 0);
    parallel_for(s.replicates, s.threads, [&](int rep) {
        TailRep& r = reps[static_cast<std::size_t>(rep)];
        try {
            auto rng = make_stream(s.seed, static_cast<std::uint64_t>(rep));
            const PaGraph g = grow_until_nodes(p, target_nodes, rng);
            const DegreeSample ds = in_degrees(g);
            zero_counts[static_cast<std::size_t>(rep)] = ds.zero_count;
            OrderedSample os = order_sample(ds.positive);
            const KsProfile prof = ks_profile(os);
            const MdspResult sel = mdsp_select(prof, os);
            r.n = os.n();
            r.k_star = sel.k_star;
            r.d_min = sel.d_min;
            r.alpha_at_kstar = sel.alpha_at_kstar;
            r.threshold = sel.threshold;
            r.log_values = std::move(os.log_values);
        } catch (const std::exception& e) {
            r.failed = true;
            r.error = e.what();
        }
    });

    const RmseSweep sw = rmse_sweep(reps, alpha_in, k_lo, k_hi);

    CsvWriter csv(join_path(s.out_dir, "rmse_vs_k.csv"));
    csv.write_row({"k", "rmse", "replicates"});
    for (std::size_t i = 0; i < sw.k.size(); ++i)
        csv.write_row({CsvWriter::field(sw.k[i]), CsvWriter::field(sw.rmse[i]),
                       CsvWriter::field(sw.count[i])});

    std::vector<double> kstars, alphas;
    for (const auto& r : reps) {
        if (r.failed) continue;
        kstars.push_back(static_cast<double>(r.k_star));
        alphas.push_back(r.alpha_at_kstar);
    }
    {
        const std::vector<double> grid = uniform_grid(
            0.0, static_cast<double>(*std::max_element(kstars.begin(), kstars.end())), 1001);
        const auto col = ecdf_on_grid(kstars, grid);
        CsvWriter kcsv(join_path(s.out_dir, "kstar_cdf.csv"));
        kcsv.write_row({"k", "ecdf"});
        for (std::size_t i = 0; i < grid.size(); ++i)
            kcsv.write_row({CsvWriter::field(grid[i]), CsvWriter::field(col[i])});
    }

    double mean_k = 0;
    for (double k : kstars) mean_k += k;
    mean_k /= static_cast<double>(kstars.size());
    double mean_zero = 0;
    for (auto z : zero_counts) mean_zero += z;
    mean_zero /= static_cast<double>(s.replicates);

    json summary;
    summary["scenario"] = "pa_rmse_sweep";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["edges_m"] = m_edges;
    summary["target_nodes"] = target_nodes;
    json pj;
    pj["alpha"] = p.alpha;
    pj["beta"] = p.beta;
    pj["gamma"] = p.gamma;
    pj["delta_in"] = p.delta_in;
    pj["delta_out"] = p.delta_out;
    summary["pa"] = pj;
    summary["alpha_in_theoretical"] = alpha_in;
    summary["alpha_out_theoretical"] = theoretical_alpha_out(p);
    summary["failed_replicates"] = count_failed(reps);
    json swj = rmse_block(sw, rmse_ratio_se(squared_errors_at_kstar(reps, alpha_in),
                                            squared_errors_at_fixed_k(reps, alpha_in,
                                                                      sw.k_argmin)));
    swj["k_lo"] = k_lo;
    swj["k_hi"] = k_hi;
    summary["sweep"] = swj;
    json kj;
    kj["median_alpha"] = empirical_quantile(alphas, 0.5);
    kj["mean_k"] = mean_k;
    kj["median_k"] = empirical_quantile(kstars, 0.5);
    summary["kstar"] = kj;
    summary["zero_in_degree_nodes_mean"] = mean_zero;
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

int scenario_limit_mc(const Scenario& s) {
    LimitScenario lsc;
    lsc.alpha = s.params.get_double("alpha", 1.0);
    const std::string model = s.params.get_str("model", "pure");
    const int grid_m = s.params.get_int("grid", 4096);
    if (model == "break") {
        lsc.break_model = true;
        lsc.t0 = s.params.get_double("t0", 0.5);
        if (s.params.has("h0")) {
            lsc.h0 = s.params.get_double("h0");
        } else {
            // kink-model slope at the break
            const double beta = s.params.get_double("beta", 0.5);
            lsc.h0 = (1.0 / lsc.alpha - 1.0 / beta) / lsc.t0;
        }
        lsc.u_grid.range = s.params.get_double("u_range", 6.0);
        lsc.u_grid.points = s.params.get_int("u_points", 1025);
    } else if (model != "pure") {
        throw std::invalid_argument("limit_mc: model must be 'pure' or 'break'");
    }

    const LimitMcResult mc = mc_limit(s.replicates, Grid(grid_m), lsc, s.seed, s.threads);

    CsvWriter csv(join_path(s.out_dir, "draws.csv"));
    if (lsc.break_model) {
        csv.write_row({"rep", "T", "sup_at_T", "hill_error", "V_star", "z_t0_min",
                       "T_restricted"});
        for (int i = 0; i < mc.reps; ++i) {
            const std::size_t r = static_cast<std::size_t>(i);
            csv.write_row({CsvWriter::field(i), CsvWriter::field(mc.T[r]),
                           CsvWriter::field(mc.sup_at_T[r]), CsvWriter::field(mc.hill_error[r]),
                           CsvWriter::field(mc.V_star[r]), CsvWriter::field(mc.z_t0_min[r]),
                           CsvWriter::field(mc.T_restricted[r])});
        }
    } else {
        csv.write_row({"rep", "T", "sup_at_T", "hill_error"});
        for (int i = 0; i < mc.reps; ++i) {
            const std::size_t r = static_cast<std::size_t>(i);
            csv.write_row({CsvWriter::field(i), CsvWriter::field(mc.T[r]),
                           CsvWriter::field(mc.sup_at_T[r]), CsvWriter::field(mc.hill_error[r])});
        }
    }

    {
        CsvWriter qcsv(join_path(s.out_dir, "quantiles.csv"));
        qcsv.write_row({"level", "c_star"});
        for (std::size_t i = 0; i < mc.quantile_levels.size(); ++i)
            qcsv.write_row({CsvWriter::field(mc.quantile_levels[i]),
                            CsvWriter::field(mc.quantiles[i])});
    }

    json summary;
    summary["scenario"] = "limit_mc";
    summary["seed"] = s.seed;
    summary["replicates"] = s.replicates;
    summary["grid"] = grid_m;
    summary["alpha"] = lsc.alpha;
    summary["model"] = model;
    json qs = json::array();
    for (std::size_t i = 0; i < mc.quantile_levels.size(); ++i) {
        json q;
        q["level"] = mc.quantile_levels[i];
        q["c_star"] = mc.quantiles[i];
        qs.push_back(q);
    }
    summary["quantiles"] = qs;
    {
        const std::vector<double>& T = mc.T;
        auto frac = [&](auto pred) {
            double cnt = 0;
            for (double t : T) cnt += pred(t);
            return cnt / T.size();
        };
        json tj;
        tj["p_le_1_3"] = frac([](double t) { return t <= 1.0 / 3.0; });
        tj["p_le_1_2"] = frac([](double t) { return t <= 0.5; });
        tj["p_le_3_4"] = frac([](double t) { return t <= 0.75; });
        tj["p_ge_0_9"] = frac([](double t) { return t >= 0.9; });
        summary["T"] = tj;
    }
    {
        double mean = 0;
        for (double e : mc.hill_error) mean += e;
        mean /= static_cast<double>(mc.hill_error.size());
        double var = 0;
        for (double e : mc.hill_error) var += (e - mean) * (e - mean);
        var /= static_cast<double>(mc.hill_error.size() - 1);
        summary["hill_error_mean"] = mean;
        summary["hill_error_variance"] = var;
    }
    if (lsc.break_model) {
        summary["t0"] = lsc.t0;
        summary["h0"] = lsc.h0;
        summary["atom_mass"] =
            static_cast<double>(mc.atom_count) / static_cast<double>(mc.reps);
        summary["vstar_inconsistent"] = mc.vstar_inconsistent;
        summary["t0_snapped"] = mc.t0_snapped;
    }
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

int scenario_fit_file(const Scenario& s) {
    const std::string path = s.params.get_str("path");
    const int k_min = s.params.get_int("k_min", 2);
    const int k_max = s.params.get_int("k_max", -1);
    const FitResult f = fit_file(path, k_min, k_max);
    write_profile_csv(f.profile, join_path(s.out_dir, "ks_profile.csv"));
    json summary;
    summary["scenario"] = "fit_file";
    summary["path"] = path;
    summary["n"] = f.n;
    summary["k_star"] = f.selection.k_star;
    summary["d_min"] = f.selection.d_min;
    summary["threshold"] = f.selection.threshold;
    summary["alpha_hat"] = f.selection.alpha_at_kstar;
    auto ci = [](const ConfidenceInterval& c) {
        json j;
        j["lo"] = c.lo;
        j["hi"] = c.hi;
        return j;
    };
    summary["naive_95"] = ci(f.naive95);
    summary["naive_99"] = ci(f.naive99);
    summary["corrected_95"] = ci(f.corrected95);
    summary["corrected_99"] = ci(f.corrected99);
    write_json(summary, join_path(s.out_dir, "summary.json"));
    return 0;
}

}  // namespace

int run_scenario(const Scenario& s) {
    std::filesystem::create_directories(s.out_dir);
    switch (s.kind) {
        case ScenarioKind::pareto_kstar_cdf: return scenario_pareto_kstar_cdf(s);
        case ScenarioKind::hill_error_cdf: return scenario_hill_error_cdf(s);
        case ScenarioKind::ci_coverage: return scenario_ci_coverage(s);
        case ScenarioKind::piecewise_kstar_cdf: return scenario_piecewise_kstar_cdf(s);
        case ScenarioKind::h_variants: return scenario_h_variants(s);
        case ScenarioKind::pa_rmse_sweep: return scenario_pa_rmse_sweep(s);
        case ScenarioKind::limit_mc: return scenario_limit_mc(s);
        case ScenarioKind::fit_file: return scenario_fit_file(s);
    }
    return 1;
}

}  // namespace taillab
