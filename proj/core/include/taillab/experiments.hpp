#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "taillab/config.hpp"
#include "taillab/estimators.hpp"

namespace taillab {

enum class ScenarioKind {
    pareto_kstar_cdf,
    hill_error_cdf,
    ci_coverage,
    piecewise_kstar_cdf,
    h_variants,
    pa_rmse_sweep,
    limit_mc,
    fit_file,
};

ScenarioKind scenario_kind_from_name(const std::string& name);
const char* scenario_kind_name(ScenarioKind k);

// A fully specified experiment: kind-specific parameters live in `params`.
// A seed is mandatory (there is no wall-clock fallback); outputs are
// byte-identical for a given config + seed at any thread count.
struct Scenario {
    ScenarioKind kind = ScenarioKind::pareto_kstar_cdf;
    Config params;
    std::uint64_t seed = 0;
    int replicates = 1;
    int threads = 0;  // 0 = hardware concurrency
    std::string out_dir = ".";
    bool paper_scale = false;
};

// Builds a scenario from a parsed config (keys: kind, seed, replicates,
// out_dir, threads, plus kind-specific parameters). Throws on missing or
// invalid keys.
Scenario make_scenario(const Config& cfg);

// Runs the scenario and writes its CSV outputs plus summary.json under
// s.out_dir. Returns 0 on success. Replicate failures are logged, excluded
// and counted in the summary.
int run_scenario(const Scenario& s);

// ---- replicated tail estimation -----------------------------------------

// Per-replicate outcome of sample -> sort -> KS profile -> threshold choice.
// log_values (descending) are kept so deterministic-k sweeps can be done in
// a replicate-ordered pass afterwards.
struct TailRep {
    int n = 0;
    int k_star = 0;
    double d_min = 0.0;
    double alpha_at_kstar = 0.0;
    double threshold = 0.0;
    std::vector<double> log_values;
    bool failed = false;
    std::string error;
};

using SampleFactory = std::function<std::vector<double>(std::mt19937_64&)>;

// Replicate r draws from stream r of `seed`. k_max < 0 means n.
std::vector<TailRep> run_tail_mc(const SampleFactory& factory, int reps, std::uint64_t seed,
                                 int threads, int k_min = 2, int k_max = -1);

// ---- RMSE sweep over deterministic k -------------------------------------

struct RmseSweep {
    std::vector<int> k;
    std::vector<double> rmse;   // NaN where no replicate reached that k
    std::vector<int> count;     // replicates contributing at k
    int k_argmin = 0;
    double rmse_min = 0.0;
    double rmse_at_kstar = 0.0;
    double ratio = 0.0;         // rmse_at_kstar / rmse_min
    bool kstar_outside_range = false;
    bool degenerate = false;    // rmse_min == 0
};

// RMSE of the Hill estimator at every deterministic k in [k_lo, k_hi]
// (replicates shorter than k are truncated out with a counted warning),
// plus the RMSE of the threshold-selected estimator and their ratio.
RmseSweep rmse_sweep(const std::vector<TailRep>& reps, double true_alpha, int k_lo, int k_hi);

// RMSE of the Hill estimator at one fixed k (replicates with n < k skipped).
double rmse_at_fixed_k(const std::vector<TailRep>& reps, double true_alpha, int k);

// Hill estimate at k recomputed from a replicate's stored logs.
double hill_from_logs(std::span<const double> log_values_desc, int k);

// ---- one-shot estimation ("fit") -----------------------------------------

struct FitResult {
    int n = 0;
    MdspResult selection;
    ConfidenceInterval naive95, naive99, corrected95, corrected99;
    KsProfile profile;
};

FitResult fit_values(std::span<const double> data, int k_min = 2, int k_max = -1);

// Reads one positive decimal per line (blank lines ignored); parse errors
// and non-positive values name the offending line. Requires >= 2 values.
FitResult fit_file(const std::string& path, int k_min = 2, int k_max = -1);

std::vector<double> read_sample_file(const std::string& path);

// KS profile as CSV with header `k,d_k,alpha_hat_k`.
void write_profile_csv(const KsProfile& p, const std::string& path);

// ---- small shared helpers -------------------------------------------------

std::vector<double> uniform_grid(double lo, double hi, int points);

// Right-continuous ecdf of xs evaluated at each grid point.
std::vector<double> ecdf_on_grid(std::vector<double> xs, const std::vector<double>& grid);

double binomial_se(double p_hat, int n);

}  // namespace taillab
