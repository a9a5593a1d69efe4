#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lemtree/exactcomb.hpp"
#include "lemtree/lemgeo.hpp"
#include "lemtree/polymodels.hpp"
#include "lemtree/treecore.hpp"

namespace lemtree::exprunner {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Rejection rate above the experiment gate (20%).
struct ExcessiveRejection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { coeffs, sample_tree, clt, simulate, sweep, chebyshev_table, trace, pairing };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  std::optional<polymodels::ModelSpec> model;
  int degree = 0;
  std::vector<int> degrees;  // strictly increasing sweep
  int trials = 1;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  double pairing_radius = 11.0;
  int size = 0;       // tree size for sample-tree / clt
  int count = 1;      // sample-tree
  int n_max = 400;    // coeffs
  int max_degree = 200, step = 10;  // chebyshev-table
  std::string poly_path;            // trace input
  std::string out_path;             // coeffs / trace output
  std::string out_csv;              // per-trial rows
  std::string out_json;             // summary (empty = stdout)
};

struct TrialRecord {
  int trial = 0;
  int degree = 0;
  std::uint64_t seed = 0;  // master seed; the substream is (seed, trial)
  bool rejected = false;
  std::string reason;
  std::optional<treecore::OutdegreeProfile> profile;
  std::optional<lemgeo::PairingStats> pairing;
  double wall_ms = 0;  // in-memory only: never serialized, outputs must be rerun-identical
};

struct RegressionFit {
  double slope = 0, intercept = 0, r2 = 0;
};

struct SummaryStats {
  double mean = 0, variance = 0, std_error = 0;
  std::map<int, long> histogram;
  std::optional<double> ks;  // KS statistic vs the standard normal
  double rejection_rate = 0;
  long accepted = 0, rejected = 0;
  std::map<std::string, long> rejection_reasons;
  std::optional<RegressionFit> regression;
};

/// Neumaier-compensated accumulator; experiments sum in trial-index order so
/// parallel and serial runs are bit-identical.
struct CompensatedSum {
  double sum = 0, comp = 0;
  void add(double x);
  double value() const { return sum + comp; }
};

double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov statistic against the standard normal CDF,
/// midpoint convention: max_i |Phi(x_(i)) - (i - 1/2)/M|. For integer-valued
/// standardized data this measures distance from the lattice-midpoint CDF,
/// which is the quantity that actually converges at the Berry-Esseen rate;
/// the sup-norm over the steps has a discretization floor ~ phi(0)/(2 sigma)
/// that never vanishes.
double ks_statistic_normal(std::vector<double> standardized);

RegressionFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Runs body(trial) for trial = 0..trials-1 on `jobs` threads. Exceptions
/// escape after all workers join.
void parallel_trials(int trials, int jobs, const std::function<void(int)>& body);

// --- experiments -----------------------------------------------------------

struct SimulateResult {
  std::vector<TrialRecord> records;
  SummaryStats summary;
};

/// One polynomial draw per trial (substream = (seed, trial)); the lemniscate
/// tree via the geometric pipeline, or the real-rooted permutation pipeline
/// for perturbed_chebyshev. Rejected trials carry a machine-readable reason.
SimulateResult simulate(const polymodels::ModelSpec& model, int trials, std::uint64_t seed, int jobs);

/// M uniform size-N trees; X standardized by the exact mean and standard
/// deviation; KS statistic against the standard normal.
SummaryStats clt_experiment(int size, int trials, std::uint64_t seed, int jobs = 1);

struct SweepRow {
  int degree = 0;
  long accepted = 0, rejected = 0;
  double mean_y = 0;          // branching nodes, geometric arm
  double fraction = 0;        // mean_y / (degree - 1)
  double control_mean = 0;    // uniform tree of size = degree (exactcomb arm)
  double control_fraction = 0;
  double exact_mean = 0;      // exact mean for the control size
  double exact_sd = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  RegressionFit loglog;  // log mean_y vs log degree
  std::vector<TrialRecord> records;
  SummaryStats summary;
};

/// Branching scaling over a degree sweep for an iid-zero model, with a
/// uniform-tree control arm at size = degree.
SweepResult thm2_experiment(const std::vector<int>& degrees, int trials,
                            const polymodels::ModelSpec& model, std::uint64_t seed, int jobs);

struct ChebyshevTableResult {
  std::vector<int> degrees;
  std::vector<double> mean_n2;
  RegressionFit fit;  // mean_n2 vs degree
  std::vector<TrialRecord> records;
  SummaryStats summary;
};

/// Mean branching count of perturbed-Chebyshev draws for n = 10, 10+step, ...
/// max_degree via the real-rooted valley-count pipeline, plus the linear fit.
ChebyshevTableResult chebyshev_table(int max_degree, int step, int trials, std::uint64_t seed,
                                     int jobs);

struct PairingResult {
  std::vector<TrialRecord> records;
  SummaryStats summary;
  double mean_paired_fraction = 0;
  double mean_small_petal_fraction = 0;
};

PairingResult pairing_experiment(const polymodels::ModelSpec& model, int trials, double r,
                                 std::uint64_t seed, int jobs, bool trace_petals = true);

/// Petal-export JSON for every singular component of p (all degree-1 of
/// them): [{"critical_point":[re,im], "level":t, "log_level":..,
/// "petals":[[[re,im],...],[[re,im],...]], "enclosed":[[...],[...]]}].
void emit_lemniscate_plot(const lemgeo::PolynomialRep& p, const std::string& out_path);

// --- serialization ---------------------------------------------------------

std::string trial_records_csv(const std::vector<TrialRecord>& records, bool with_pairing);
std::string summary_json(const SummaryStats& s);

/// Executes a full experiment config: runs, writes CSV/JSON files, prints the
/// summary to stdout when out_json is empty. Returns the process exit code
/// (0 ok, 2 config error, 3 excessive rejection, 4 numeric failure).
int run(const ExperimentConfig& config);

}  // namespace lemtree::exprunner
