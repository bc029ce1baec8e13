#pragma once

// Aggregative games: agent i pays g_i(x_i, xbar), where xbar is the network
// average of all decisions. Built-in instances plus the numeric checkers used
// to audit gradient code and the bounded-dissimilarity hypothesis.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dsanneal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using VecRef = Eigen::Ref<const VectorXd>;

enum class Partial { First, Second };

/// Abstract n-agent aggregative game with decisions in R^d.
///
/// Implementations must be pure: identical inputs give bitwise-identical
/// outputs, and no state changes after construction.
class GameInstance {
 public:
  virtual ~GameInstance() = default;

  virtual int num_agents() const = 0;
  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  // Unchecked evaluation; callers go through eval_cost / eval_grad.
  virtual double cost(int i, const VecRef& x, const VecRef& y) const = 0;
  virtual VectorXd grad1(int i, const VecRef& x, const VecRef& y) const = 0;
  virtual VectorXd grad2(int i, const VecRef& x, const VecRef& y) const = 0;
};

using GamePtr = std::shared_ptr<const GameInstance>;

/// Example game with two agents on the real line:
///   g_i(x, y) = (x - t_i)^2 + kappa * y^2,  t = (2, 3), kappa = 2.
/// kappa * xbar^2 is the (x1 + x2)^2 / 2 coupling rewritten in the average.
class QuadraticTwoAgentGame final : public GameInstance {
 public:
  QuadraticTwoAgentGame() = default;

  int num_agents() const override { return 2; }
  int dim() const override { return 1; }
  std::string name() const override { return "example1"; }

  double cost(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad1(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad2(int i, const VecRef& x, const VecRef& y) const override;

  double target(int i) const { return targets_[i]; }
  double coupling() const { return kappa_; }

 private:
  double targets_[2] = {2.0, 3.0};
  double kappa_ = 2.0;
};

struct EvChargingParams {
  std::uint64_t seed = 1;
  std::vector<double> departure = {7, 7, 8, 8, 9, 9, 13, 19, 19, 22};
  std::vector<double> midpoint = {7, 7.4, 7.8, 8.2, 8.6, 9, 9.4, 9.8, 10.2, 10.6};
  double coef_lo = 5.0;
  double coef_hi = 40.0;
  double lambda_lo = 0.0;
  double lambda_hi = 2.0;
};

/// Electric-vehicle charging game. Each resident's bill
///   bill_i(x) = a_i / (1 + exp(-(x - b_i))) + c_i log(1 + (x - d_i)^2)
/// is non-convex in the charging hour x, and the cost adds a penalty for
/// deviating from the average hour:  g_i(x, y) = bill_i(x) + lambda_i (x - y)^2.
/// a_i, c_i ~ U[coef_lo, coef_hi] and lambda_i ~ U(lambda_lo, lambda_hi) are
/// drawn once from the seed.
class EvChargingGame final : public GameInstance {
 public:
  explicit EvChargingGame(const EvChargingParams& params = {});

  /// Fully explicit coefficients, mostly for tests.
  EvChargingGame(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                 std::vector<double> d, std::vector<double> lambda);

  int num_agents() const override { return static_cast<int>(a_.size()); }
  int dim() const override { return 1; }
  std::string name() const override { return "ev-charging"; }

  double cost(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad1(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad2(int i, const VecRef& x, const VecRef& y) const override;

  double bill(int i, double x) const;
  double bill_derivative(int i, double x) const;

  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& c() const { return c_; }
  const std::vector<double>& d() const { return d_; }
  const std::vector<double>& lambda() const { return lambda_; }

 private:
  std::vector<double> a_, b_, c_, d_, lambda_;
};

/// Tilted double well G(z) = (z^2 - 1)^2 + tilt * z as a one-agent game with
/// no aggregate coupling. Global minimum on the negative side for tilt > 0.
class DoubleWellGame final : public GameInstance {
 public:
  explicit DoubleWellGame(double tilt = 0.25) : tilt_(tilt) {}

  int num_agents() const override { return 1; }
  int dim() const override { return 1; }
  std::string name() const override { return "double-well"; }

  double cost(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad1(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad2(int i, const VecRef& x, const VecRef& y) const override;

  double tilt() const { return tilt_; }

 private:
  double tilt_;
};

/// A game assembled from callables; the route for custom games.
struct AgentFunctions {
  std::function<double(const VecRef&, const VecRef&)> cost;
  std::function<VectorXd(const VecRef&, const VecRef&)> grad1;
  std::function<VectorXd(const VecRef&, const VecRef&)> grad2;
};

class FunctionGame final : public GameInstance {
 public:
  FunctionGame(int dim, std::vector<AgentFunctions> agents, std::string name = "custom");

  int num_agents() const override { return static_cast<int>(agents_.size()); }
  int dim() const override { return dim_; }
  std::string name() const override { return name_; }

  double cost(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad1(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad2(int i, const VecRef& x, const VecRef& y) const override;

 private:
  int dim_;
  std::vector<AgentFunctions> agents_;
  std::string name_;
};

/// Wraps another game and adds a constant to every first-partial entry.
/// Used to plant a known bug for the gradient checker.
class OffsetGradientGame final : public GameInstance {
 public:
  OffsetGradientGame(GamePtr inner, double offset) : inner_(std::move(inner)), offset_(offset) {}

  int num_agents() const override { return inner_->num_agents(); }
  int dim() const override { return inner_->dim(); }
  std::string name() const override { return inner_->name(); }

  double cost(int i, const VecRef& x, const VecRef& y) const override { return inner_->cost(i, x, y); }
  VectorXd grad1(int i, const VecRef& x, const VecRef& y) const override;
  VectorXd grad2(int i, const VecRef& x, const VecRef& y) const override { return inner_->grad2(i, x, y); }

 private:
  GamePtr inner_;
  double offset_;
};

// -- checked evaluation ------------------------------------------------------

/// g_i(x, y). Throws std::out_of_range for a bad index and std::domain_error
/// for non-finite or wrongly-sized input.
double eval_cost(const GameInstance& game, int i, const VecRef& x, const VecRef& y);

VectorXd eval_grad(const GameInstance& game, int i, const VecRef& x, const VecRef& y, Partial which);

/// Gradient of g_i(x_i, xbar) in x_i when xbar is estimated by y:
///   grad1 g_i(x, y) + (1/n) grad2 g_i(x, y).
VectorXd agent_update_gradient(const GameInstance& game, int i, const VecRef& x, const VecRef& y);

// -- social cost ---------------------------------------------------------------

/// Joint decisions are stored one agent per row (n x d).
VectorXd network_average(const MatrixXd& joint);

/// sum_i g_i(x_i, xbar).
double social_cost(const GameInstance& game, const MatrixXd& joint);

/// Gradient of the social cost over the joint space (n x d):
///   row i = grad1 g_i(x_i, xbar) + (1/n) sum_j grad2 g_j(x_j, xbar).
MatrixXd social_gradient(const GameInstance& game, const MatrixXd& joint);

/// Flat <-> joint helpers for code that works in R^{n d}.
MatrixXd unflatten(const VectorXd& flat, int n, int d);
VectorXd flatten(const MatrixXd& joint);

// -- checkers ------------------------------------------------------------------

struct ProbePoint {
  VectorXd x;
  VectorXd y;
};

struct GradientMismatch {
  int agent;
  Partial which;
  int component;
  VectorXd x, y;
  double analytic;
  double numeric;
  double rel_error;
};

struct GradientCheckReport {
  double max_rel_error = 0.0;
  double tolerance = 1e-5;
  std::vector<GradientMismatch> failures;
  bool passed() const { return failures.empty(); }
};

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Compares analytic partials with central differences on every probe point
/// and agent. Relative error is |analytic - fd| / (1 + |analytic|).
GradientCheckReport check_gradients(const GameInstance& game, const std::vector<ProbePoint>& grid,
                                    double tolerance = 1e-5, double step = kFiniteDifferenceStep);

/// Cartesian grid of scalar probes (d = 1 games).
std::vector<ProbePoint> scalar_probe_grid(const std::vector<double>& xs, const std::vector<double>& ys);

/// A single bivariate function G(x, y) with its partials.
struct BivariateFunction {
  std::function<VectorXd(const VecRef&, const VecRef&)> grad1;
  std::function<VectorXd(const VecRef&, const VecRef&)> grad2;
};

/// Reference function whose partials are the agent average of the game's.
BivariateFunction average_reference(GamePtr game);

struct DissimilarityReport {
  double radius = 0.0;
  int sample_count = 0;
  std::vector<double> sup_first;   // per agent, empirical sup |grad1 g_i - grad1 G|
  std::vector<double> sup_second;  // per agent, empirical sup |grad2 g_i - grad2 G|
  bool unbounded_suspect = false;  // a sample produced a non-finite value
  double max_first() const;
  double max_second() const;
};

/// Monte-Carlo estimate of the gradient dissimilarity sup over the ball of the
/// given radius in (x, y) space. A necessary-condition check only.
DissimilarityReport check_dissimilarity_bound(const GameInstance& game, const BivariateFunction& reference,
                                              int sample_count, double radius, std::uint64_t seed = 0);

/// A point where the second central difference of x -> g_i(x, y) is negative,
/// scanning [lo, hi] with the given step; nullopt if none is found.
std::optional<double> nonconvexity_witness(const GameInstance& game, int i, double y, double lo, double hi,
                                           double step = 0.05);

}  // namespace dsanneal
