#pragma once

// Diagnostics computed from run traces: rate-weighted consensus error,
// social-cost series, DAA/DAAG cost comparison, and replicate ensembles.

#include "dsanneal/annealing.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dsanneal {

/// e_i^k = (k + 1)^tau |s_i^k - xbar^k| for every recorded k (rows) and agent (cols).
struct ConsensusSeries {
  double tau = 0.0;
  std::vector<long long> ks;
  MatrixXd values;

  /// Max over agents for each recorded k.
  VectorXd max_over_agents() const { return values.rowwise().maxCoeff(); }
};

/// tau must lie in [0, 1/2 - tau_beta); otherwise std::domain_error.
ConsensusSeries consensus_error(const RunTrace& trace, double tau);

struct TrendCheck {
  double first_max = 0.0;  // max over agents and the first window of records
  double last_max = 0.0;   // same over the last window
  double ratio() const { return first_max > 0.0 ? last_max / first_max : (last_max > 0.0 ? INFINITY : 0.0); }
};

/// Compares the leading and trailing windows (each `window_fraction` of the
/// records) of a consensus series.
TrendCheck consensus_trend(const ConsensusSeries& series, double window_fraction = 0.1);

/// sum_i g_i(x_i^k, xbar^k) for every record; std::invalid_argument on a shape mismatch.
std::vector<double> social_cost_series(const RunTrace& trace, const GameInstance& game);

/// Number of trailing records covered by a fraction (at least one).
std::size_t tail_count(std::size_t records, double fraction);

/// Mean x (n x d) over the trailing fraction of records.
MatrixXd tail_average(const RunTrace& trace, double fraction = 0.1);
/// Mean s (n x d) over the trailing fraction of records.
MatrixXd tail_average_s(const RunTrace& trace, double fraction = 0.1);
double tail_mean_cost(const RunTrace& trace, const GameInstance& game, double fraction = 0.1);

struct CostComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t window = 0;
  double difference() const { return mean_a - mean_b; }
  /// "a", "b" or "tie".
  std::string smaller() const;
  nlohmann::json to_json(const std::string& label_a = "a", const std::string& label_b = "b") const;
};

/// Final-window mean social cost of two traces over the same game. The window
/// is a record count; a window longer than either trace is rejected.
CostComparison compare_costs(const RunTrace& a, const RunTrace& b, const GameInstance& game, std::size_t window);
CostComparison compare_costs(const RunTrace& a, const RunTrace& b, const GameInstance& game, double fraction = 0.1);

/// Bounded test function on a replicate's tail-averaged joint state (x, s).
/// Values are clamped to [-bound, bound].
struct TestFunction {
  std::string name;
  std::function<double(const MatrixXd& x, const MatrixXd& s)> f;
  double bound = 1.0;
};

/// 1 when the joint x lies within `radius` (L2) of `center`, else 0.
TestFunction ball_indicator(const MatrixXd& center, double radius, std::string name = "ball");

struct ReplicateFailure {
  int replicate;
  std::string message;
};

struct EnsembleStats {
  int replicates = 0;
  int completed = 0;
  std::vector<ReplicateFailure> failures;
  std::vector<std::uint64_t> seeds;
  std::vector<MatrixXd> tail_averages;  // completers only, replicate order
  std::vector<double> tail_costs;       // completers only
  std::vector<double> final_xbar;       // first component of the final xbar, completers only
  std::vector<std::string> test_names;
  std::vector<double> test_means;       // empirical E[f] over completers
  std::optional<double> basin_fraction;  // fraction of completers within radius of the reference

  double mean_tail_cost() const;
  /// Histogram of final_xbar with `bins` equal-width bins over its range.
  std::vector<int> final_xbar_histogram(int bins, double* lo = nullptr, double* hi = nullptr) const;
  nlohmann::json to_json() const;
};

/// Seed of replicate r under a base seed.
std::uint64_t replicate_seed(std::uint64_t base, int r);

/// Runs R seeded replicates of `method`. Divergent replicates are recorded, not
/// fatal. `threads` > 1 runs replicates concurrently with identical results.
EnsembleStats ensemble_run(const ExperimentConfig& cfg, int replicates, const std::vector<TestFunction>& tests,
                           const std::optional<MatrixXd>& reference = std::nullopt, double radius = 0.2,
                           int threads = 1, std::optional<Method> method = std::nullopt);

// -- plot data -----------------------------------------------------------------

struct PlotTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_plot_csv(std::ostream& out, const PlotTable& table);

/// (k + 1)^tau |s_i - xbar| per agent.
PlotTable consensus_plot(const RunTrace& trace, double tau);
/// xbar and every s_i (first component).
PlotTable tracking_plot(const RunTrace& trace);
/// every x_i (first component).
PlotTable decisions_plot(const RunTrace& trace, const std::string& title);
/// social cost per record; two traces are joined on k.
PlotTable cost_plot(const RunTrace& trace, const std::string& label);
PlotTable cost_plot(const RunTrace& a, const std::string& label_a, const RunTrace& b, const std::string& label_b);

}  // namespace dsanneal
