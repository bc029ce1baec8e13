#include "dsanneal/annealing.hpp"

#include <algorithm>
#include <cmath>

namespace dsanneal {

namespace {

void guard(const MatrixXd& m, long long k, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double e = m(i, c);
      if (!std::isfinite(e) || std::abs(e) > kDivergenceBound)
        throw DivergenceError(static_cast<int>(i), k,
                              std::string("divergence in ") + what + " of agent " + std::to_string(i) +
                                  " at iteration " + std::to_string(k) + " (value " + std::to_string(e) + ")");
    }
  }
}

void check_shapes(const SwarmState& state, const GameInstance& game, const GraphSample& graph) {
  if (state.num_agents() != game.num_agents() || state.dim() != game.dim())
    throw std::invalid_argument("swarm state does not match the game dimensions");
  if (graph.size() != game.num_agents()) throw std::invalid_argument("graph size does not match the agent count");
}

}  // namespace

SwarmState SwarmState::initial(const MatrixXd& x0) {
  if (!x0.allFinite()) throw std::domain_error("initial decisions must be finite");
  return SwarmState{1, x0, x0, x0};
}

StepSizes step_sizes(const ScheduleSet& sched, long long k, double max_degree) {
  StepSizes st;
  st.alpha = schedule_eval(sched, k, StepKind::Alpha);
  st.beta = schedule_eval(sched, k, StepKind::Beta);
  st.gamma = schedule_eval(sched, k, StepKind::Gamma);
  if (max_degree > 0.0) st.beta = std::min(st.beta, 0.49 / max_degree);
  return st;
}

MatrixXd mix(const MatrixXd& v, const GraphSample& graph, double beta) {
  return v - beta * (graph.laplacian * v);
}

SwarmState daa_step(const SwarmState& state, const GameInstance& game, const GraphSample& graph,
                    const StepSizes& steps, const MatrixXd& gradient_noise, const MatrixXd& annealing_noise) {
  check_shapes(state, game, graph);
  SwarmState next;
  next.k = state.k + 1;
  next.s = mix(state.v, graph, steps.beta);
  guard(next.s, state.k, "tracking estimate");
  next.x.resize(state.x.rows(), state.x.cols());
  for (int i = 0; i < game.num_agents(); ++i) {
    const VectorXd xi = state.x.row(i).transpose();
    const VectorXd si = next.s.row(i).transpose();
    const VectorXd g = agent_update_gradient(game, i, xi, si);
    next.x.row(i) = state.x.row(i) - steps.alpha * (g.transpose() + gradient_noise.row(i)) +
                    steps.gamma * annealing_noise.row(i);
  }
  guard(next.x, state.k, "decision");
  next.v = next.s + next.x - state.x;
  return next;
}

SwarmState daa_step(const SwarmState& state, const GameInstance& game, const GraphSample& graph,
                    const StepSizes& steps, NoiseSource& noise) {
  const MatrixXd& grad_noise = noise.gradient_draw();
  const MatrixXd& anneal_noise = noise.annealing_draw();
  return daa_step(state, game, graph, steps, grad_noise, anneal_noise);
}

SwarmState daag_step(const SwarmState& state, const GameInstance& game, const GraphSample& graph,
                     const StepSizes& steps) {
  check_shapes(state, game, graph);
  SwarmState next;
  next.k = state.k + 1;
  next.s = mix(state.v, graph, steps.beta);
  guard(next.s, state.k, "tracking estimate");
  next.x.resize(state.x.rows(), state.x.cols());
  for (int i = 0; i < game.num_agents(); ++i) {
    const VectorXd xi = state.x.row(i).transpose();
    const VectorXd si = next.s.row(i).transpose();
    next.x.row(i) = state.x.row(i) - steps.alpha * eval_grad(game, i, xi, si, Partial::First).transpose();
  }
  guard(next.x, state.k, "decision");
  next.v = next.s + next.x - state.x;
  return next;
}

VectorXd centralized_anneal_step(const VectorXd& z, const GradientFn& grad, const StepSizes& steps,
                                 const VectorXd& xi, const VectorXd& w, long long k) {
  if (!z.allFinite()) throw std::domain_error("centralized iterate must be finite");
  VectorXd next = z - steps.alpha * (grad(z) + xi) + steps.gamma * w;
  guard(next, k, "centralized iterate");
  return next;
}

RunSetup RunSetup::from_config(const ExperimentConfig& cfg) {
  RunSetup setup;
  setup.game = make_game(cfg);
  setup.network = make_network(cfg, setup.game->num_agents());
  return setup;
}

MatrixXd initial_decisions(const ExperimentConfig& cfg, const GameInstance& game, std::uint64_t seed) {
  const int n = game.num_agents(), d = game.dim();
  if (cfg.game.init_point) return unflatten(Eigen::Map<const VectorXd>(cfg.game.init_point->data(), n * d), n, d);
  Rng rng = make_stream(seed, "initial-state");
  std::uniform_real_distribution<double> box(cfg.game.init_lo, cfg.game.init_hi);
  MatrixXd x0(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) x0(i, c) = cfg.game.init_lo == cfg.game.init_hi ? cfg.game.init_lo : box(rng);
  return x0;
}

RunTrace run(const ExperimentConfig& cfg, const RunSetup& setup, Method method, std::uint64_t seed,
             const StepObserver& observer) {
  const GameInstance& game = *setup.game;
  const int n = game.num_agents(), d = game.dim();

  RunTrace trace;
  trace.method = method;
  trace.n = n;
  trace.d = d;
  trace.tau_beta = cfg.schedule.tau_beta;
  trace.seed = seed;
  trace.fingerprint = config_fingerprint(cfg);
  trace.records.reserve(static_cast<std::size_t>(cfg.horizon / cfg.record_stride + 2));

  auto record = [&](long long k, const MatrixXd& x, const MatrixXd& v, const MatrixXd& s) {
    trace.records.push_back({k, x, v, s, social_cost(game, x)});
  };

  SwarmState state = SwarmState::initial(initial_decisions(cfg, game, seed));
  const double max_degree = setup.network.max_degree();
  GraphSampler graphs(setup.network, seed);
  NoiseSource noise(cfg.noise, n, d, seed);

  GradientFn social_grad;
  if (method == Method::Centralized)
    social_grad = [&](const VectorXd& z) { return flatten(social_gradient(game, unflatten(z, n, d))); };

  for (long long k = 1; k <= cfg.horizon; ++k) {
    const StepSizes steps = step_sizes(cfg.schedule, k, max_degree);
    SwarmState next;
    switch (method) {
      case Method::Daa: next = daa_step(state, game, graphs.next(), steps, noise); break;
      case Method::Daag: next = daag_step(state, game, graphs.next(), steps); break;
      case Method::Centralized: {
        const VectorXd xi = flatten(noise.gradient_draw());
        const VectorXd w = flatten(noise.annealing_draw());
        const VectorXd z = centralized_anneal_step(flatten(state.x), social_grad, steps, xi, w, k);
        next.k = k + 1;
        next.x = unflatten(z, n, d);
        next.v = next.x;
        next.s = state.x;
        break;
      }
    }
    if ((k - 1) % cfg.record_stride == 0) record(k, state.x, state.v, next.s);
    if (observer) observer(state, next);
    state = std::move(next);
  }
  record(state.k, state.x, state.v, state.v);
  return trace;
}

RunTrace run(const ExperimentConfig& cfg) {
  const RunSetup setup = RunSetup::from_config(cfg);
  return run(cfg, setup, cfg.method, cfg.seed);
}

}  // namespace dsanneal
