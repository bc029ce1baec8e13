#include "dsanneal/annealing.hpp"
#include "dsanneal/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dsanneal;

namespace {

ExperimentConfig example1(Method m, long long horizon) {
  ExperimentConfig cfg;
  cfg.game.name = "example1";
  cfg.game.init_lo = -2;
  cfg.game.init_hi = 4;
  cfg.network.mode = NetworkMode::Complete;
  cfg.method = m;
  cfg.horizon = horizon;
  cfg.record_stride = 100;
  if (m == Method::Daag) cfg.noise.annealing = false;
  return cfg;
}

}  // namespace

TEST(DaaStep, HandComputedNoiseFree) {
  QuadraticTwoAgentGame g;
  MatrixXd x0(2, 1);
  x0 << 0, 1;
  const SwarmState s0 = SwarmState::initial(x0);
  const GraphSample k2 = GraphSample::complete(2);
  const StepSizes st{0.1, 0.25, 0.0};
  const SwarmState s1 = daa_step(s0, g, k2, st, MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 1));
  // s = v - beta L v = (0 - 0.25 * (0 - 1), 1 - 0.25 * (1 - 0)) = (0.25, 0.75)
  EXPECT_NEAR(s1.s(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(s1.s(1, 0), 0.75, 1e-15);
  // x0' = 0 - 0.1 * (2 (0 - 2) + 2 * 0.25) = 0.35
  EXPECT_NEAR(s1.x(0, 0), 0.35, 1e-15);
  // x1' = 1 - 0.1 * (2 (1 - 3) + 2 * 0.75) = 1.25
  EXPECT_NEAR(s1.x(1, 0), 1.25, 1e-15);
  EXPECT_NEAR(s1.v(0, 0), 0.25 + 0.35, 1e-15);
  EXPECT_EQ(s1.k, 2);
}

TEST(DaaStep, AnnealingNoiseEntersScaledByGamma) {
  QuadraticTwoAgentGame g;
  const SwarmState s0 = SwarmState::initial(MatrixXd::Zero(2, 1));
  const GraphSample k2 = GraphSample::complete(2);
  MatrixXd w(2, 1);
  w << 1, -2;
  const SwarmState a = daa_step(s0, g, k2, {0.1, 0.25, 0.0}, MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 1));
  const SwarmState b = daa_step(s0, g, k2, {0.1, 0.25, 0.5}, MatrixXd::Zero(2, 1), w);
  EXPECT_NEAR(b.x(0, 0) - a.x(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(b.x(1, 0) - a.x(1, 0), -1.0, 1e-15);
}

TEST(DaaStep, DivergenceNamesAgentAndIteration) {
  QuadraticTwoAgentGame g;
  MatrixXd x0(2, 1);
  x0 << 1e11, 0;
  SwarmState s0 = SwarmState::initial(x0);
  s0.k = 7;
  try {
    daa_step(s0, g, GraphSample::complete(2), {100.0, 0.1, 0.0}, MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 1));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.agent(), 0);
    EXPECT_EQ(e.iteration(), 7);
  }
}

TEST(DaaStep, ShapeMismatchRejected) {
  QuadraticTwoAgentGame g;
  const SwarmState s0 = SwarmState::initial(MatrixXd::Zero(3, 1));
  EXPECT_THROW(daag_step(s0, g, GraphSample::complete(3), {0.1, 0.1, 0}), std::invalid_argument);
}

TEST(StepSizes, BetaClampedByMaxDegree) {
  ScheduleSet s;
  EXPECT_NEAR(step_sizes(s, 1, 9).beta, 0.49 / 9, 1e-15);
  EXPECT_NEAR(step_sizes(s, 1, 1).beta, 0.4, 1e-15);
  EXPECT_NEAR(step_sizes(s, 1, 0).beta, 0.4, 1e-15);
}

TEST(Mix, PreservesAverageOnAnyGraph) {
  MatrixXd v(4, 2);
  v << 1, 2, -3, 4, 0.5, 0, 7, -1;
  const GraphSample p = GraphSample::path(4);
  const MatrixXd s = mix(v, p, 0.3);
  EXPECT_NEAR((s.colwise().mean() - v.colwise().mean()).norm(), 0.0, 1e-14);
}

TEST(Centralized, StepFormula) {
  const GradientFn grad = [](const VectorXd& z) -> VectorXd { return 2 * z; };
  VectorXd z(1), xi(1), w(1);
  z << 1;
  xi << 0.5;
  w << -1;
  const VectorXd next = centralized_anneal_step(z, grad, {0.1, 0, 0.2}, xi, w, 1);
  EXPECT_NEAR(next[0], 1 - 0.1 * 2.5 - 0.2, 1e-15);
}

TEST(Run, RecordingConvention) {
  ExperimentConfig cfg = example1(Method::Daa, 250);
  const RunTrace t = run(cfg);
  // k = 1, 101, 201 and the terminal 251
  ASSERT_EQ(t.records.size(), 4u);
  EXPECT_EQ(t.records[0].k, 1);
  EXPECT_EQ(t.records[2].k, 201);
  EXPECT_EQ(t.final_record().k, 251);
  EXPECT_EQ(t.final_record().s, t.final_record().v);
  EXPECT_EQ(t.records[0].x, t.records[0].v);
}

TEST(Run, DaagConvergesToOwnGradientFixedPoint) {
  // Dropping the aggregate partial leaves x_i' = x_i - alpha * 2 (x_i - t_i):
  // the fixed point is the target vector (2, 3).
  const RunTrace t = run(example1(Method::Daag, 100000));
  EXPECT_NEAR(t.final_record().x(0, 0), 2.0, 1e-3);
  EXPECT_NEAR(t.final_record().x(1, 0), 3.0, 1e-3);
}

TEST(Run, DaaNoiseFreeSettlesAtNash) {
  // Noise-free DAA on the complete graph drives each agent to the zero of
  // grad1 g_i + grad2 g_i / n, which is the Nash stationarity system.
  ExperimentConfig cfg = example1(Method::Daa, 100000);
  cfg.noise.annealing = false;
  const RunTrace t = run(cfg);
  EXPECT_NEAR(t.final_record().x(0, 0), 0.75, 1e-2);
  EXPECT_NEAR(t.final_record().x(1, 0), 1.75, 1e-2);
}

TEST(Run, CentralizedFindsGlobalWellWithoutNoiseFromLeft) {
  ExperimentConfig cfg;
  cfg.game.name = "double-well";
  cfg.game.init_point = std::vector<double>{-0.5};
  cfg.method = Method::Centralized;
  cfg.noise.annealing = false;
  cfg.schedule.c_alpha = 0.25;
  cfg.horizon = 20000;
  cfg.record_stride = 1000;
  const RunTrace t = run(cfg);
  EXPECT_LT(t.final_record().x(0, 0), -0.9);
}

TEST(Run, StepObserverSeesEveryIteration) {
  ExperimentConfig cfg = example1(Method::Daa, 50);
  const RunSetup setup = RunSetup::from_config(cfg);
  long long calls = 0, last = 0;
  run(cfg, setup, Method::Daa, 3, [&](const SwarmState& before, const SwarmState& after) {
    ++calls;
    EXPECT_EQ(after.k, before.k + 1);
    last = after.k;
  });
  EXPECT_EQ(calls, 50);
  EXPECT_EQ(last, 51);
}

TEST(Run, InitialDecisionsFromBoxAndPoint) {
  ExperimentConfig cfg = example1(Method::Daa, 1);
  QuadraticTwoAgentGame g;
  const MatrixXd x = initial_decisions(cfg, g, 4);
  EXPECT_TRUE((x.array() >= -2).all() && (x.array() <= 4).all());
  EXPECT_EQ(x, initial_decisions(cfg, g, 4));
  EXPECT_NE(x, initial_decisions(cfg, g, 5));
  cfg.game.init_point = std::vector<double>{0.5, -1};
  EXPECT_EQ(initial_decisions(cfg, g, 4)(1, 0), -1.0);
}
