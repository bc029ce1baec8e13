#include "dsanneal/game.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dsanneal;

namespace {

VectorXd v1(double a) { return VectorXd::Constant(1, a); }

MatrixXd joint(std::initializer_list<double> xs) {
  MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST(QuadraticGame, SocialCostAtOptimumAndNash) {
  QuadraticTwoAgentGame g;
  EXPECT_NEAR(social_cost(g, joint({1.0 / 3, 4.0 / 3})), 75.0 / 9, 1e-12);
  EXPECT_NEAR(social_cost(g, joint({0.75, 1.75})), 75.0 / 8, 1e-12);
}

TEST(QuadraticGame, OwnPartialVanishesAtNash) {
  // Each agent's own-cost derivative, including its effect on the average.
  QuadraticTwoAgentGame g;
  const MatrixXd x = joint({0.75, 1.75});
  const VectorXd xbar = network_average(x);
  for (int i = 0; i < 2; ++i) {
    const double d = eval_grad(g, i, x.row(i).transpose(), xbar, Partial::First)[0] +
                     0.5 * eval_grad(g, i, x.row(i).transpose(), xbar, Partial::Second)[0];
    EXPECT_NEAR(d, 0.0, 1e-12);
  }
}

TEST(QuadraticGame, AgentUpdateGradientAtSocialOptimum) {
  QuadraticTwoAgentGame g;
  const double xbar = (1.0 / 3 + 4.0 / 3) / 2;
  // grad1 = 2(1/3 - 2) = -10/3, grad2 / n = 2 * 2 * xbar / 2 = 5/3
  EXPECT_NEAR(agent_update_gradient(g, 0, v1(1.0 / 3), v1(xbar))[0], -5.0 / 3, 1e-12);
}

TEST(QuadraticGame, SocialGradientVanishesAtOptimum) {
  QuadraticTwoAgentGame g;
  EXPECT_LT(social_gradient(g, joint({1.0 / 3, 4.0 / 3})).norm(), 1e-12);
}

TEST(GameEval, RejectsBadIndexAndNonFinite) {
  QuadraticTwoAgentGame g;
  EXPECT_THROW(eval_cost(g, 2, v1(0), v1(0)), std::out_of_range);
  EXPECT_THROW(eval_cost(g, -1, v1(0), v1(0)), std::out_of_range);
  EXPECT_THROW(eval_cost(g, 0, v1(NAN), v1(0)), std::domain_error);
  EXPECT_THROW(eval_grad(g, 0, v1(0), v1(INFINITY), Partial::First), std::domain_error);
  EXPECT_THROW(eval_cost(g, 0, VectorXd::Zero(2), v1(0)), std::domain_error);
}

TEST(EvGame, BillIsNonConvexAndDeterministic) {
  EvChargingGame a, b;
  ASSERT_EQ(a.num_agents(), 10);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(a.a()[i], b.a()[i]);
    EXPECT_GE(a.a()[i], 5.0);
    EXPECT_LE(a.c()[i], 40.0);
    EXPECT_GE(a.lambda()[i], 0.0);
    EXPECT_LE(a.lambda()[i], 2.0);
  }
  EXPECT_TRUE(nonconvexity_witness(a, 0, 8.0, 0.0, 24.0).has_value());
}

TEST(EvGame, ExplicitCoefficients) {
  EvChargingGame g({10}, {7}, {5}, {7}, {0.5});
  // sigmoid(0) = 1/2, log1p(0) = 0, no deviation penalty at x = y
  EXPECT_NEAR(eval_cost(g, 0, v1(7), v1(7)), 5.0, 1e-12);
  EXPECT_NEAR(eval_cost(g, 0, v1(7), v1(6)), 5.0 + 0.5, 1e-12);
  EXPECT_NEAR(g.bill_derivative(0, 7), 10 * 0.25, 1e-12);
}

TEST(EvGame, SeedChangesDraws) {
  EvChargingParams p;
  p.seed = 2;
  EXPECT_NE(EvChargingGame().a()[0], EvChargingGame(p).a()[0]);
}

TEST(DoubleWell, CriticalPoints) {
  DoubleWellGame g;
  EXPECT_NEAR(eval_cost(g, 0, v1(0), v1(0)), 1.0, 1e-12);
  // G'(z) = 4 z (z^2 - 1) + 0.25 changes sign around the three critical points
  auto gp = [&](double z) { return eval_grad(g, 0, v1(z), v1(z), Partial::First)[0]; };
  EXPECT_LT(gp(-1.1), 0);
  EXPECT_GT(gp(-1.0), 0);
  EXPECT_GT(gp(0.0), 0);
  EXPECT_LT(gp(0.1), 0);
  EXPECT_LT(gp(0.9), 0);
  EXPECT_GT(gp(1.0), 0);
}

TEST(GradientCheck, BuiltinsPass) {
  const auto grid = scalar_probe_grid({-3, -1, 0, 0.5, 2, 5}, {-2, 0, 1, 3});
  EXPECT_TRUE(check_gradients(QuadraticTwoAgentGame(), grid).passed());
  EXPECT_TRUE(check_gradients(DoubleWellGame(), grid).passed());
  const auto ev_grid = scalar_probe_grid({0, 4, 8, 12, 16, 20, 24}, {0, 8, 16, 24});
  const auto rep = check_gradients(EvChargingGame(), ev_grid);
  EXPECT_TRUE(rep.passed()) << rep.max_rel_error;
}

TEST(GradientCheck, PlantedBugIsCaught) {
  auto inner = std::make_shared<QuadraticTwoAgentGame>();
  OffsetGradientGame bad(inner, 1e-3);
  const auto rep = check_gradients(bad, scalar_probe_grid({0, 1}, {0, 1}));
  EXPECT_FALSE(rep.passed());
  EXPECT_GT(rep.max_rel_error, 1e-5);
  EXPECT_EQ(rep.failures.front().which, Partial::First);
}

TEST(FunctionGameTest, QuadraticBowl) {
  AgentFunctions f;
  f.cost = [](const VecRef& x, const VecRef& y) { return x.squaredNorm() + x.dot(y); };
  f.grad1 = [](const VecRef& x, const VecRef& y) -> VectorXd { return 2 * x + y; };
  f.grad2 = [](const VecRef& x, const VecRef&) -> VectorXd { return x; };
  FunctionGame g(2, {f, f, f}, "bowl");
  EXPECT_EQ(g.num_agents(), 3);
  EXPECT_EQ(g.dim(), 2);
  std::vector<ProbePoint> probes{{VectorXd::Constant(2, 0.3), VectorXd::Constant(2, -1.2)}};
  EXPECT_TRUE(check_gradients(g, probes).passed());
}

TEST(Dissimilarity, IdenticalAgentsHaveZeroDissimilarity) {
  auto g = std::make_shared<DoubleWellGame>();
  const auto rep = check_dissimilarity_bound(*g, average_reference(g), 200, 3.0, 5);
  EXPECT_EQ(rep.max_first(), 0.0);
  EXPECT_EQ(rep.max_second(), 0.0);
  EXPECT_FALSE(rep.unbounded_suspect);
}

TEST(Dissimilarity, QuadraticIsBoundedByTargetSpread) {
  auto g = std::make_shared<QuadraticTwoAgentGame>();
  const auto rep = check_dissimilarity_bound(*g, average_reference(g), 500, 10.0, 5);
  // grad1 differs from the average only by 2 (t_i - tbar) = +-1
  EXPECT_NEAR(rep.max_first(), 1.0, 1e-12);
  EXPECT_NEAR(rep.max_second(), 0.0, 1e-12);
}

TEST(JointHelpers, FlattenRoundTrip) {
  MatrixXd m(3, 2);
  m << 1, 2, 3, 4, 5, 6;
  const VectorXd f = flatten(m);
  EXPECT_EQ(f[1], 2.0);  // agent-major
  EXPECT_EQ(unflatten(f, 3, 2), m);
}
