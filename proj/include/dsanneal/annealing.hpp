#pragma once

// The three iterations:
//   DAA   distributed annealing with gradient tracking,
//   DAAG  the deterministic aggregative-game baseline (first partial only),
//   centralized annealing on the social cost.

#include "dsanneal/config.hpp"
#include "dsanneal/game.hpp"
#include "dsanneal/noise.hpp"
#include "dsanneal/schedule.hpp"
#include "dsanneal/topology.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsanneal {

/// Agent states at iteration k, one agent per row. `s` holds the mixed
/// estimates produced by the step that led here (equal to v at k = 1).
struct SwarmState {
  long long k = 1;
  MatrixXd x;
  MatrixXd v;
  MatrixXd s;

  /// k = 1 with v = s = x.
  static SwarmState initial(const MatrixXd& x0);

  int num_agents() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  VectorXd xbar() const { return x.colwise().mean().transpose(); }
};

struct StepSizes {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Schedules at k with beta additionally capped at 0.49 / max_degree, which
/// keeps I - beta L a contraction on 1^perp for every graph that can be drawn.
StepSizes step_sizes(const ScheduleSet& sched, long long k, double max_degree);

inline constexpr double kDivergenceBound = 1e12;

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int agent, long long iteration, const std::string& what)
      : std::runtime_error(what), agent_(agent), iteration_(iteration) {}
  int agent() const { return agent_; }
  long long iteration() const { return iteration_; }

 private:
  int agent_;
  long long iteration_;
};

/// s = v - beta L v, the mixing half-step shared by DAA and DAAG.
MatrixXd mix(const MatrixXd& v, const GraphSample& graph, double beta);

/// One DAA step from the k-snapshot:
///   s_i   = v_i - beta sum_j w_ij (v_i - v_j)
///   x_i'  = x_i - alpha (grad1 g_i(x_i, s_i) + grad2 g_i(x_i, s_i) / n + noise_i) + gamma anneal_i
///   v_i'  = s_i + x_i' - x_i
/// The returned state is at k + 1 and carries the s computed here.
SwarmState daa_step(const SwarmState& state, const GameInstance& game, const GraphSample& graph,
                    const StepSizes& steps, const MatrixXd& gradient_noise, const MatrixXd& annealing_noise);

/// Same, drawing the noises from the run's streams.
SwarmState daa_step(const SwarmState& state, const GameInstance& game, const GraphSample& graph,
                    const StepSizes& steps, NoiseSource& noise);

/// DAAG: identical mixing and tracking, x_i' = x_i - alpha grad1 g_i(x_i, s_i).
SwarmState daag_step(const SwarmState& state, const GameInstance& game, const GraphSample& graph,
                     const StepSizes& steps);

using GradientFn = std::function<VectorXd(const VectorXd&)>;

/// z' = z - alpha (grad G(z) + xi) + gamma w.
VectorXd centralized_anneal_step(const VectorXd& z, const GradientFn& grad, const StepSizes& steps,
                                 const VectorXd& xi, const VectorXd& w, long long k = 0);

struct TraceRecord {
  long long k = 0;
  MatrixXd x, v, s;
  double social_cost = 0.0;
};

struct RunTrace {
  Method method = Method::Daa;
  int n = 0;
  int d = 0;
  double tau_beta = 0.25;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::vector<TraceRecord> records;

  const TraceRecord& final_record() const { return records.back(); }
};

/// Called after every iteration with the snapshot before and after the step.
using StepObserver = std::function<void(const SwarmState& before, const SwarmState& after)>;

/// Prebuilt pieces of a run, so replicates can share the immutable game and network.
struct RunSetup {
  GamePtr game;
  NetworkModel network;

  static RunSetup from_config(const ExperimentConfig& cfg);
};

/// Initial joint decision: the configured point, else uniform in the init box.
MatrixXd initial_decisions(const ExperimentConfig& cfg, const GameInstance& game, std::uint64_t seed);

/// Executes cfg.horizon iterations of `method`. Records k = 1, 1 + stride, ...
/// and always the terminal state k = horizon + 1 (whose s equals its v).
/// Deterministic for a fixed config and seed; throws DivergenceError.
RunTrace run(const ExperimentConfig& cfg, const RunSetup& setup, Method method, std::uint64_t seed,
             const StepObserver& observer = {});

/// cfg.method with cfg.seed.
RunTrace run(const ExperimentConfig& cfg);

}  // namespace dsanneal
