#include "dsanneal/metrics.hpp"

#include "dsanneal/trace_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

namespace dsanneal {

ConsensusSeries consensus_error(const RunTrace& trace, double tau) {
  const double bound = 0.5 - trace.tau_beta;
  if (!(tau >= 0.0 && tau < bound))
    throw std::domain_error("tau must lie in [0, 1/2 - tau_beta) = [0, " + std::to_string(bound) + ")");
  ConsensusSeries out;
  out.tau = tau;
  out.values.resize(static_cast<Eigen::Index>(trace.records.size()), trace.n);
  out.ks.reserve(trace.records.size());
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const TraceRecord& rec = trace.records[r];
    const Eigen::RowVectorXd xbar = rec.x.colwise().mean();
    const double weight = std::pow(static_cast<double>(rec.k + 1), tau);
    for (int i = 0; i < trace.n; ++i) out.values(static_cast<Eigen::Index>(r), i) = weight * (rec.s.row(i) - xbar).norm();
    out.ks.push_back(rec.k);
  }
  return out;
}

TrendCheck consensus_trend(const ConsensusSeries& series, double window_fraction) {
  const std::size_t total = series.ks.size();
  if (total == 0) throw std::invalid_argument("empty consensus series");
  const auto w = static_cast<Eigen::Index>(tail_count(total, window_fraction));
  TrendCheck t;
  t.first_max = series.values.topRows(w).maxCoeff();
  t.last_max = series.values.bottomRows(w).maxCoeff();
  return t;
}

std::vector<double> social_cost_series(const RunTrace& trace, const GameInstance& game) {
  if (trace.n != game.num_agents() || trace.d != game.dim())
    throw std::invalid_argument("trace dimensions do not match the game");
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) out.push_back(social_cost(game, r.x));
  return out;
}

std::size_t tail_count(std::size_t records, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("window fraction must lie in (0, 1]");
  const auto c = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(records)));
  return std::clamp<std::size_t>(c, 1, std::max<std::size_t>(records, 1));
}

MatrixXd tail_average(const RunTrace& trace, double fraction) {
  if (trace.records.empty()) throw std::invalid_argument("empty trace");
  const std::size_t w = tail_count(trace.records.size(), fraction);
  MatrixXd acc = MatrixXd::Zero(trace.n, trace.d);
  for (std::size_t r = trace.records.size() - w; r < trace.records.size(); ++r) acc += trace.records[r].x;
  return acc / static_cast<double>(w);
}

MatrixXd tail_average_s(const RunTrace& trace, double fraction) {
  if (trace.records.empty()) throw std::invalid_argument("empty trace");
  const std::size_t w = tail_count(trace.records.size(), fraction);
  MatrixXd acc = MatrixXd::Zero(trace.n, trace.d);
  for (std::size_t r = trace.records.size() - w; r < trace.records.size(); ++r) acc += trace.records[r].s;
  return acc / static_cast<double>(w);
}

static double window_mean_cost(const RunTrace& t, const GameInstance& game, std::size_t w) {
  const std::vector<double> costs = social_cost_series(t, game);
  return std::accumulate(costs.end() - static_cast<std::ptrdiff_t>(w), costs.end(), 0.0) / static_cast<double>(w);
}

double tail_mean_cost(const RunTrace& trace, const GameInstance& game, double fraction) {
  if (trace.records.empty()) throw std::invalid_argument("empty trace");
  return window_mean_cost(trace, game, tail_count(trace.records.size(), fraction));
}

std::string CostComparison::smaller() const {
  if (mean_a < mean_b) return "a";
  if (mean_b < mean_a) return "b";
  return "tie";
}

nlohmann::json CostComparison::to_json(const std::string& label_a, const std::string& label_b) const {
  const std::string s = smaller();
  return {{"window_records", window},
          {"mean_cost_" + label_a, mean_a},
          {"mean_cost_" + label_b, mean_b},
          {"difference", difference()},
          {"smaller", s == "a" ? label_a : s == "b" ? label_b : "tie"}};
}

CostComparison compare_costs(const RunTrace& a, const RunTrace& b, const GameInstance& game, std::size_t window) {
  if (window == 0) throw std::invalid_argument("comparison window must be at least one record");
  if (window > a.records.size() || window > b.records.size())
    throw std::invalid_argument("comparison window of " + std::to_string(window) + " records exceeds the trace length");
  CostComparison c;
  c.window = window;
  c.mean_a = window_mean_cost(a, game, window);
  c.mean_b = window_mean_cost(b, game, window);
  return c;
}

CostComparison compare_costs(const RunTrace& a, const RunTrace& b, const GameInstance& game, double fraction) {
  const std::size_t records = std::min(a.records.size(), b.records.size());
  return compare_costs(a, b, game, tail_count(records, fraction));
}

TestFunction ball_indicator(const MatrixXd& center, double radius, std::string name) {
  return {std::move(name), [center, radius](const MatrixXd& x, const MatrixXd&) {
            return (x - center).norm() <= radius ? 1.0 : 0.0;
          },
          1.0};
}

double EnsembleStats::mean_tail_cost() const {
  if (tail_costs.empty()) return NAN;
  return std::accumulate(tail_costs.begin(), tail_costs.end(), 0.0) / static_cast<double>(tail_costs.size());
}

std::vector<int> EnsembleStats::final_xbar_histogram(int bins, double* lo_out, double* hi_out) const {
  std::vector<int> hist(std::max(bins, 1), 0);
  if (final_xbar.empty()) return hist;
  const auto [mn, mx] = std::minmax_element(final_xbar.begin(), final_xbar.end());
  const double lo = *mn, hi = *mx;
  if (lo_out) *lo_out = lo;
  if (hi_out) *hi_out = hi;
  const double width = hi > lo ? (hi - lo) / hist.size() : 1.0;
  for (double v : final_xbar) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    hist[std::min(b, hist.size() - 1)]++;
  }
  return hist;
}

nlohmann::json EnsembleStats::to_json() const {
  nlohmann::json j;
  j["replicates"] = replicates;
  j["completed"] = completed;
  j["seeds"] = seeds;
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& f : failures) fails.push_back({{"replicate", f.replicate}, {"message", f.message}});
  j["failures"] = fails;
  nlohmann::json tails = nlohmann::json::array();
  for (const auto& t : tail_averages) {
    // agent-major order, matching flatten()
    const VectorXd flat = flatten(t);
    tails.push_back(std::vector<double>(flat.data(), flat.data() + flat.size()));
  }
  j["tail_averages"] = tails;
  j["tail_costs"] = tail_costs;
  j["mean_tail_cost"] = completed ? nlohmann::json(mean_tail_cost()) : nlohmann::json(nullptr);
  j["final_xbar"] = final_xbar;
  double lo = 0, hi = 0;
  j["final_xbar_histogram"] = {{"counts", final_xbar_histogram(20, &lo, &hi)}, {"lo", lo}, {"hi", hi}};
  nlohmann::json tests = nlohmann::json::object();
  for (std::size_t t = 0; t < test_names.size(); ++t) tests[test_names[t]] = test_means[t];
  j["test_means"] = tests;
  if (basin_fraction) j["basin_fraction"] = *basin_fraction;
  return j;
}

std::uint64_t replicate_seed(std::uint64_t base, int r) { return derive_seed(base, "replicate", static_cast<std::uint64_t>(r)); }

EnsembleStats ensemble_run(const ExperimentConfig& cfg, int replicates, const std::vector<TestFunction>& tests,
                           const std::optional<MatrixXd>& reference, double radius, int threads,
                           std::optional<Method> method) {
  if (replicates < 2) throw std::invalid_argument("an ensemble needs at least 2 replicates");
  for (const auto& t : tests)
    if (!(t.bound > 0.0) || !t.f) throw std::invalid_argument("test function '" + t.name + "' needs a positive bound");
  const RunSetup setup = RunSetup::from_config(cfg);
  const Method m = method.value_or(cfg.method);

  struct Outcome {
    bool ok = false;
    std::string error;
    MatrixXd tail_x, tail_s;
    double tail_cost = 0.0;
    double final_xbar = 0.0;
  };
  std::vector<Outcome> outcomes(replicates);
  auto work = [&](int r) {
    Outcome& o = outcomes[r];
    try {
      const RunTrace trace = run(cfg, setup, m, replicate_seed(cfg.seed, r));
      o.tail_x = tail_average(trace, cfg.tail_fraction);
      o.tail_s = tail_average_s(trace, cfg.tail_fraction);
      o.tail_cost = tail_mean_cost(trace, *setup.game, cfg.tail_fraction);
      o.final_xbar = trace.final_record().x.col(0).mean();
      o.ok = true;
    } catch (const DivergenceError& e) {
      o.error = e.what();
    }
  };

  const int workers = std::clamp(threads, 1, replicates);
  if (workers == 1) {
    for (int r = 0; r < replicates; ++r) work(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int r = next++; r < replicates; r = next++) work(r);
      });
    for (auto& th : pool) th.join();
  }

  EnsembleStats stats;
  stats.replicates = replicates;
  for (const auto& t : tests) stats.test_names.push_back(t.name);
  stats.test_means.assign(tests.size(), 0.0);
  int inside = 0;
  for (int r = 0; r < replicates; ++r) {
    stats.seeds.push_back(replicate_seed(cfg.seed, r));
    const Outcome& o = outcomes[r];
    if (!o.ok) {
      stats.failures.push_back({r, o.error});
      continue;
    }
    stats.completed++;
    stats.tail_averages.push_back(o.tail_x);
    stats.tail_costs.push_back(o.tail_cost);
    stats.final_xbar.push_back(o.final_xbar);
    for (std::size_t t = 0; t < tests.size(); ++t)
      stats.test_means[t] += std::clamp(tests[t].f(o.tail_x, o.tail_s), -tests[t].bound, tests[t].bound);
    if (reference && (o.tail_x - *reference).norm() <= radius) inside++;
  }
  if (stats.completed > 0) {
    for (double& v : stats.test_means) v /= stats.completed;
    if (reference) stats.basin_fraction = static_cast<double>(inside) / stats.completed;
  }
  return stats;
}

// -- plot data -----------------------------------------------------------------

void write_plot_csv(std::ostream& out, const PlotTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

PlotTable consensus_plot(const RunTrace& trace, double tau) {
  const ConsensusSeries series = consensus_error(trace, tau);
  PlotTable t;
  t.title = "weighted consensus error";
  t.columns.push_back("k");
  for (int i = 0; i < trace.n; ++i) t.columns.push_back("agent_" + std::to_string(i));
  for (std::size_t r = 0; r < series.ks.size(); ++r) {
    std::vector<double> row{static_cast<double>(series.ks[r])};
    for (int i = 0; i < trace.n; ++i) row.push_back(series.values(static_cast<Eigen::Index>(r), i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

PlotTable tracking_plot(const RunTrace& trace) {
  PlotTable t;
  t.title = "tracking estimates and network average";
  t.columns = {"k", "xbar"};
  for (int i = 0; i < trace.n; ++i) t.columns.push_back("s_" + std::to_string(i));
  for (const auto& r : trace.records) {
    std::vector<double> row{static_cast<double>(r.k), r.x.col(0).mean()};
    for (int i = 0; i < trace.n; ++i) row.push_back(r.s(i, 0));
    t.rows.push_back(std::move(row));
  }
  return t;
}

PlotTable decisions_plot(const RunTrace& trace, const std::string& title) {
  PlotTable t;
  t.title = title;
  t.columns = {"k"};
  for (int i = 0; i < trace.n; ++i) t.columns.push_back("x_" + std::to_string(i));
  for (const auto& r : trace.records) {
    std::vector<double> row{static_cast<double>(r.k)};
    for (int i = 0; i < trace.n; ++i) row.push_back(r.x(i, 0));
    t.rows.push_back(std::move(row));
  }
  return t;
}

PlotTable cost_plot(const RunTrace& trace, const std::string& label) {
  PlotTable t;
  t.title = "social cost";
  t.columns = {"k", "cost_" + label};
  for (const auto& r : trace.records) t.rows.push_back({static_cast<double>(r.k), r.social_cost});
  return t;
}

PlotTable cost_plot(const RunTrace& a, const std::string& label_a, const RunTrace& b, const std::string& label_b) {
  PlotTable t;
  t.title = "social cost";
  t.columns = {"k", "cost_" + label_a, "cost_" + label_b};
  const std::size_t rows = std::min(a.records.size(), b.records.size());
  for (std::size_t r = 0; r < rows; ++r) {
    if (a.records[r].k != b.records[r].k) throw std::invalid_argument("traces are recorded at different iterations");
    t.rows.push_back({static_cast<double>(a.records[r].k), a.records[r].social_cost, b.records[r].social_cost});
  }
  return t;
}

}  // namespace dsanneal
