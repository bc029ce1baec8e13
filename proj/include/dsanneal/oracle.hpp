#pragma once

// Ground truth for acceptance: exhaustive grids for small games, multistart
// descent for large ones, closed forms for the quadratic example, and the
// discretized Gibbs density of a 1-D objective.

#include "dsanneal/game.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace dsanneal {

struct OracleSpec;

/// Axis-aligned box in joint space R^{n d}.
struct Box {
  VectorXd lo, hi;
  static Box uniform(int dim, double lo, double hi);
  int dim() const { return static_cast<int>(lo.size()); }
};

struct OracleResult {
  VectorXd point;        // joint decision, agent-major
  double value = 0.0;    // social cost at point
  std::string method;    // grid | multistart | closed-form
  double resolution = 0.0;  // grid spacing, or start count for multistart
  bool certified = false;   // true only for exhaustive grids
  std::string game;
  std::uint64_t seed = 0;
  long long evaluations = 0;

  nlohmann::json to_json() const;
};

/// Largest n*d accepted by the grid oracle.
inline constexpr int kMaxGridDimension = 4;

/// Exhaustive evaluation on the grid lo + j*resolution (the upper bound is
/// included when it falls on the grid). Rejects n*d > kMaxGridDimension.
OracleResult grid_search_social_optimum(const GameInstance& game, const Box& box, double resolution);

/// Gradient descent with Armijo backtracking (constant 1e-4, halving) from
/// each start; returns the best terminal point. Ties go to the lowest start
/// index. Diverging starts are skipped; if all diverge, std::runtime_error.
OracleResult multistart_descent(const GameInstance& game, const std::vector<VectorXd>& starts, int budget,
                                int threads = 1);
/// Same, with `starts` uniform draws from the box.
OracleResult multistart_descent(const GameInstance& game, const Box& box, int starts, int budget,
                                std::uint64_t seed, int threads = 1);

/// Dispatches on settings.method; "auto" picks the grid when n*d is small.
OracleResult solve_social_optimum(const GameInstance& game, const OracleSpec& settings);

/// Nash equilibrium of the quadratic example: the per-agent stationarity
/// system 2(x_i - t_i) + (2 kappa / n^2) sum_j x_j = 0.
VectorXd quadratic_nash(const QuadraticTwoAgentGame& game);

struct GibbsDensity {
  std::vector<double> z;
  std::vector<double> density;
  double normalizer = 0.0;  // Z = integral of exp(-2 G / eps^2)
  double epsilon = 0.0;

  /// Trapezoid mass of the density on [a, b] (grid-aligned, clipped to the box).
  double mass(double a, double b) const;
};

/// exp(-2 G(z) / eps^2) / Z on lo, lo + h, ..., hi with Z from the trapezoid
/// rule. G must be nonnegative on the grid. An underflowing Z is rejected.
GibbsDensity gibbs_density_1d(const std::function<double(double)>& objective, double epsilon, double lo, double hi,
                              double resolution);

}  // namespace dsanneal
