#include "dsanneal/game.hpp"

#include "dsanneal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dsanneal {

namespace {

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_args(const GameInstance& game, int i, const VecRef& x, const VecRef& y) {
  if (i < 0 || i >= game.num_agents())
    throw std::out_of_range("agent index " + std::to_string(i) + " outside [0, " +
                            std::to_string(game.num_agents()) + ")");
  if (x.size() != game.dim() || y.size() != game.dim())
    throw std::domain_error("decision vector has wrong dimension");
  if (!x.allFinite() || !y.allFinite()) throw std::domain_error("non-finite game input");
}

}  // namespace

// -- QuadraticTwoAgentGame ------------------------------------------------------

double QuadraticTwoAgentGame::cost(int i, const VecRef& x, const VecRef& y) const {
  const double dx = x[0] - targets_[i];
  return dx * dx + kappa_ * y[0] * y[0];
}

VectorXd QuadraticTwoAgentGame::grad1(int i, const VecRef& x, const VecRef&) const {
  return scalar(2.0 * (x[0] - targets_[i]));
}

VectorXd QuadraticTwoAgentGame::grad2(int, const VecRef&, const VecRef& y) const {
  return scalar(2.0 * kappa_ * y[0]);
}

// -- EvChargingGame -------------------------------------------------------------

EvChargingGame::EvChargingGame(const EvChargingParams& p) : b_(p.midpoint), d_(p.departure) {
  if (p.departure.size() != p.midpoint.size() || p.departure.empty())
    throw std::invalid_argument("ev-charging: departure and midpoint vectors must match and be non-empty");
  if (!(p.coef_lo <= p.coef_hi) || !(p.lambda_lo <= p.lambda_hi))
    throw std::invalid_argument("ev-charging: invalid coefficient range");
  const std::size_t n = p.departure.size();
  Rng coef = make_stream(p.seed, "ev-coefficients");
  Rng sens = make_stream(p.seed, "ev-sensitivity");
  std::uniform_real_distribution<double> coef_dist(p.coef_lo, p.coef_hi);
  std::uniform_real_distribution<double> lambda_dist(p.lambda_lo, p.lambda_hi);
  a_.resize(n);
  c_.resize(n);
  lambda_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a_[i] = coef_dist(coef);
    c_[i] = coef_dist(coef);
    lambda_[i] = lambda_dist(sens);
  }
}

EvChargingGame::EvChargingGame(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                               std::vector<double> d, std::vector<double> lambda)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), lambda_(std::move(lambda)) {
  const std::size_t n = a_.size();
  if (n == 0 || b_.size() != n || c_.size() != n || d_.size() != n || lambda_.size() != n)
    throw std::invalid_argument("ev-charging: coefficient vectors must have equal non-zero length");
}

double EvChargingGame::bill(int i, double x) const {
  const double u = x - d_[i];
  return a_[i] * sigmoid(x - b_[i]) + c_[i] * std::log1p(u * u);
}

double EvChargingGame::bill_derivative(int i, double x) const {
  const double s = sigmoid(x - b_[i]);
  const double u = x - d_[i];
  return a_[i] * s * (1.0 - s) + c_[i] * 2.0 * u / (1.0 + u * u);
}

double EvChargingGame::cost(int i, const VecRef& x, const VecRef& y) const {
  const double dev = x[0] - y[0];
  return bill(i, x[0]) + lambda_[i] * dev * dev;
}

VectorXd EvChargingGame::grad1(int i, const VecRef& x, const VecRef& y) const {
  return scalar(bill_derivative(i, x[0]) + 2.0 * lambda_[i] * (x[0] - y[0]));
}

VectorXd EvChargingGame::grad2(int i, const VecRef& x, const VecRef& y) const {
  return scalar(-2.0 * lambda_[i] * (x[0] - y[0]));
}

// -- DoubleWellGame ------------------------------------------------------------

double DoubleWellGame::cost(int, const VecRef& x, const VecRef&) const {
  const double q = x[0] * x[0] - 1.0;
  return q * q + tilt_ * x[0];
}

VectorXd DoubleWellGame::grad1(int, const VecRef& x, const VecRef&) const {
  return scalar(4.0 * x[0] * (x[0] * x[0] - 1.0) + tilt_);
}

VectorXd DoubleWellGame::grad2(int, const VecRef&, const VecRef&) const { return scalar(0.0); }

// -- FunctionGame ---------------------------------------------------------------

FunctionGame::FunctionGame(int dim, std::vector<AgentFunctions> agents, std::string name)
    : dim_(dim), agents_(std::move(agents)), name_(std::move(name)) {
  if (dim_ < 1) throw std::invalid_argument("game dimension must be positive");
  if (agents_.empty()) throw std::invalid_argument("game needs at least one agent");
  for (const auto& a : agents_)
    if (!a.cost || !a.grad1 || !a.grad2) throw std::invalid_argument("every agent needs cost, grad1 and grad2");
}

double FunctionGame::cost(int i, const VecRef& x, const VecRef& y) const { return agents_[i].cost(x, y); }
VectorXd FunctionGame::grad1(int i, const VecRef& x, const VecRef& y) const { return agents_[i].grad1(x, y); }
VectorXd FunctionGame::grad2(int i, const VecRef& x, const VecRef& y) const { return agents_[i].grad2(x, y); }

VectorXd OffsetGradientGame::grad1(int i, const VecRef& x, const VecRef& y) const {
  return (inner_->grad1(i, x, y).array() + offset_).matrix();
}

// -- checked evaluation ---------------------------------------------------------

double eval_cost(const GameInstance& game, int i, const VecRef& x, const VecRef& y) {
  check_args(game, i, x, y);
  return game.cost(i, x, y);
}

VectorXd eval_grad(const GameInstance& game, int i, const VecRef& x, const VecRef& y, Partial which) {
  check_args(game, i, x, y);
  return which == Partial::First ? game.grad1(i, x, y) : game.grad2(i, x, y);
}

VectorXd agent_update_gradient(const GameInstance& game, int i, const VecRef& x, const VecRef& y) {
  check_args(game, i, x, y);
  return game.grad1(i, x, y) + game.grad2(i, x, y) / static_cast<double>(game.num_agents());
}

// -- social cost ----------------------------------------------------------------

VectorXd network_average(const MatrixXd& joint) { return joint.colwise().mean().transpose(); }

static void check_joint(const GameInstance& game, const MatrixXd& joint) {
  if (joint.rows() != game.num_agents() || joint.cols() != game.dim())
    throw std::invalid_argument("joint decision has shape " + std::to_string(joint.rows()) + "x" +
                                std::to_string(joint.cols()) + ", game expects " +
                                std::to_string(game.num_agents()) + "x" + std::to_string(game.dim()));
}

double social_cost(const GameInstance& game, const MatrixXd& joint) {
  check_joint(game, joint);
  const VectorXd avg = network_average(joint);
  double total = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) total += eval_cost(game, i, joint.row(i).transpose(), avg);
  return total;
}

MatrixXd social_gradient(const GameInstance& game, const MatrixXd& joint) {
  check_joint(game, joint);
  const int n = game.num_agents();
  const VectorXd avg = network_average(joint);
  MatrixXd grad(n, game.dim());
  VectorXd coupling = VectorXd::Zero(game.dim());
  for (int i = 0; i < n; ++i) {
    const VectorXd xi = joint.row(i).transpose();
    grad.row(i) = eval_grad(game, i, xi, avg, Partial::First).transpose();
    coupling += eval_grad(game, i, xi, avg, Partial::Second);
  }
  grad.rowwise() += (coupling / n).transpose();
  return grad;
}

MatrixXd unflatten(const VectorXd& flat, int n, int d) {
  if (flat.size() != static_cast<Eigen::Index>(n) * d) throw std::invalid_argument("flat vector size mismatch");
  MatrixXd joint(n, d);
  for (int i = 0; i < n; ++i) joint.row(i) = flat.segment(static_cast<Eigen::Index>(i) * d, d).transpose();
  return joint;
}

VectorXd flatten(const MatrixXd& joint) {
  VectorXd flat(joint.size());
  for (Eigen::Index i = 0; i < joint.rows(); ++i) flat.segment(i * joint.cols(), joint.cols()) = joint.row(i).transpose();
  return flat;
}

// -- checkers -----------------------------------------------------------------

GradientCheckReport check_gradients(const GameInstance& game, const std::vector<ProbePoint>& grid, double tolerance,
                                    double step) {
  GradientCheckReport report;
  report.tolerance = tolerance;
  const int d = game.dim();
  for (const auto& p : grid) {
    for (int i = 0; i < game.num_agents(); ++i) {
      const VectorXd g1 = eval_grad(game, i, p.x, p.y, Partial::First);
      const VectorXd g2 = eval_grad(game, i, p.x, p.y, Partial::Second);
      for (int c = 0; c < d; ++c) {
        for (Partial which : {Partial::First, Partial::Second}) {
          VectorXd xp = p.x, xm = p.x, yp = p.y, ym = p.y;
          if (which == Partial::First) {
            xp[c] += step;
            xm[c] -= step;
          } else {
            yp[c] += step;
            ym[c] -= step;
          }
          const double numeric = (game.cost(i, xp, yp) - game.cost(i, xm, ym)) / (2.0 * step);
          const double analytic = which == Partial::First ? g1[c] : g2[c];
          const double rel = std::abs(analytic - numeric) / (1.0 + std::abs(analytic));
          const double err = std::isfinite(rel) ? rel : std::numeric_limits<double>::infinity();
          report.max_rel_error = std::max(report.max_rel_error, err);
          if (!(err <= tolerance)) report.failures.push_back({i, which, c, p.x, p.y, analytic, numeric, err});
        }
      }
    }
  }
  return report;
}

std::vector<ProbePoint> scalar_probe_grid(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<ProbePoint> grid;
  grid.reserve(xs.size() * ys.size());
  for (double x : xs)
    for (double y : ys) grid.push_back({scalar(x), scalar(y)});
  return grid;
}

BivariateFunction average_reference(GamePtr game) {
  BivariateFunction ref;
  ref.grad1 = [game](const VecRef& x, const VecRef& y) {
    VectorXd acc = VectorXd::Zero(game->dim());
    for (int i = 0; i < game->num_agents(); ++i) acc += game->grad1(i, x, y);
    return VectorXd(acc / game->num_agents());
  };
  ref.grad2 = [game](const VecRef& x, const VecRef& y) {
    VectorXd acc = VectorXd::Zero(game->dim());
    for (int i = 0; i < game->num_agents(); ++i) acc += game->grad2(i, x, y);
    return VectorXd(acc / game->num_agents());
  };
  return ref;
}

double DissimilarityReport::max_first() const {
  return sup_first.empty() ? 0.0 : *std::max_element(sup_first.begin(), sup_first.end());
}

double DissimilarityReport::max_second() const {
  return sup_second.empty() ? 0.0 : *std::max_element(sup_second.begin(), sup_second.end());
}

DissimilarityReport check_dissimilarity_bound(const GameInstance& game, const BivariateFunction& reference,
                                              int sample_count, double radius, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const int n = game.num_agents();
  const int d = game.dim();
  DissimilarityReport report;
  report.radius = radius;
  report.sample_count = sample_count;
  report.sup_first.assign(n, 0.0);
  report.sup_second.assign(n, 0.0);

  // Uniform samples from the 2d-dimensional ball: Gaussian direction, radius r * u^(1/2d).
  Rng rng = make_stream(seed, "dissimilarity");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  VectorXd point(2 * d);
  for (int s = 0; s < sample_count; ++s) {
    for (int c = 0; c < 2 * d; ++c) point[c] = normal(rng);
    const double norm = point.norm();
    point *= radius * std::pow(unit(rng), 1.0 / (2.0 * d)) / (norm > 0 ? norm : 1.0);
    const VectorXd x = point.head(d), y = point.tail(d);
    const VectorXd r1 = reference.grad1(x, y), r2 = reference.grad2(x, y);
    for (int i = 0; i < n; ++i) {
      const double e1 = (game.grad1(i, x, y) - r1).norm();
      const double e2 = (game.grad2(i, x, y) - r2).norm();
      if (!std::isfinite(e1) || !std::isfinite(e2)) {
        report.unbounded_suspect = true;
        continue;
      }
      report.sup_first[i] = std::max(report.sup_first[i], e1);
      report.sup_second[i] = std::max(report.sup_second[i], e2);
    }
  }
  return report;
}

std::optional<double> nonconvexity_witness(const GameInstance& game, int i, double y, double lo, double hi,
                                           double step) {
  if (game.dim() != 1) throw std::invalid_argument("nonconvexity_witness needs a scalar game");
  const VectorXd yy = scalar(y);
  for (double x = lo + step; x <= hi - step; x += step) {
    const double second = eval_cost(game, i, scalar(x + step), yy) - 2.0 * eval_cost(game, i, scalar(x), yy) +
                          eval_cost(game, i, scalar(x - step), yy);
    if (second < 0.0) return x;
  }
  return std::nullopt;
}

}  // namespace dsanneal
