#include "dsanneal/oracle.hpp"

#include "dsanneal/config.hpp"
#include "dsanneal/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace dsanneal {

namespace {

int grid_points(double lo, double hi, double h) {
  return static_cast<int>(std::floor((hi - lo) / h + 1e-9)) + 1;
}

struct Objective {
  const GameInstance& game;
  int n, d;
  double value(const VectorXd& z) const { return social_cost(game, unflatten(z, n, d)); }
  VectorXd gradient(const VectorXd& z) const { return flatten(social_gradient(game, unflatten(z, n, d))); }
};

// Iterates leaving this box count as diverged.
constexpr double kDescentBound = 1e12;

struct DescentOutcome {
  bool ok = false;
  VectorXd point;
  double value = 0.0;
  long long evaluations = 0;
};

DescentOutcome descend(const Objective& obj, VectorXd z, int budget) {
  constexpr double armijo = 1e-4;
  DescentOutcome out;
  try {
    double f = obj.value(z);
    out.evaluations = 1;
    double step = 1.0;
    for (int it = 0; it < budget; ++it) {
      const VectorXd g = obj.gradient(z);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-24) break;
      step *= 2.0;
      bool moved = false;
      while (step > 1e-16) {
        const VectorXd trial = z - step * g;
        const double ft = obj.value(trial);
        out.evaluations++;
        if (std::isfinite(ft) && ft <= f - armijo * step * g2) {
          z = trial;
          f = ft;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
      if (z.lpNorm<Eigen::Infinity>() > kDescentBound) return out;
    }
    if (!std::isfinite(f) || !z.allFinite()) return out;
    out.ok = true;
    out.point = std::move(z);
    out.value = f;
  } catch (const std::domain_error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

Box Box::uniform(int dim, double lo, double hi) {
  return {VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi)};
}

nlohmann::json OracleResult::to_json() const {
  return {{"point", std::vector<double>(point.data(), point.data() + point.size())},
          {"value", value},
          {"method", method},
          {"resolution", resolution},
          {"certified", certified},
          {"label", certified ? "certified on grid" : (method == "multistart" ? "best-found" : "exact")},
          {"provenance", {{"game", game}, {"seed", seed}, {"evaluations", evaluations}}}};
}

OracleResult grid_search_social_optimum(const GameInstance& game, const Box& box, double resolution) {
  const int n = game.num_agents(), d = game.dim(), dim = n * d;
  if (dim > kMaxGridDimension)
    throw std::invalid_argument("grid oracle supports n*d <= " + std::to_string(kMaxGridDimension) + " (got " +
                                std::to_string(dim) + "); use the multistart oracle instead");
  if (box.dim() != dim) throw std::invalid_argument("box dimension does not match n*d");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (!box.lo.allFinite() || !box.hi.allFinite() || (box.hi.array() < box.lo.array()).any())
    throw std::invalid_argument("box bounds must be finite with lo <= hi");

  std::vector<int> counts(dim);
  for (int c = 0; c < dim; ++c) counts[c] = grid_points(box.lo[c], box.hi[c], resolution);

  std::vector<int> idx(dim, 0);
  VectorXd z(dim), best;
  double best_value = std::numeric_limits<double>::infinity();
  long long evals = 0;
  while (true) {
    for (int c = 0; c < dim; ++c) z[c] = box.lo[c] + idx[c] * resolution;
    const double v = social_cost(game, unflatten(z, n, d));
    ++evals;
    if (v < best_value) {
      best_value = v;
      best = z;
    }
    int c = dim - 1;
    while (c >= 0 && ++idx[c] == counts[c]) idx[c--] = 0;
    if (c < 0) break;
  }
  OracleResult r;
  r.point = best;
  r.value = best_value;
  r.method = "grid";
  r.resolution = resolution;
  r.certified = true;
  r.game = game.name();
  r.evaluations = evals;
  return r;
}

OracleResult multistart_descent(const GameInstance& game, const std::vector<VectorXd>& starts, int budget,
                                int threads) {
  if (starts.empty()) throw std::invalid_argument("multistart needs at least one start");
  if (budget < 0) throw std::invalid_argument("descent budget must be non-negative");
  const int n = game.num_agents(), d = game.dim();
  for (const auto& s : starts)
    if (s.size() != n * d) throw std::invalid_argument("start dimension does not match n*d");
  const Objective obj{game, n, d};

  std::vector<DescentOutcome> outcomes(starts.size());
  const int total = static_cast<int>(starts.size());
  const int workers = std::clamp(threads, 1, total);
  if (workers == 1) {
    for (int s = 0; s < total; ++s) outcomes[s] = descend(obj, starts[s], budget);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int s = next++; s < total; s = next++) outcomes[s] = descend(obj, starts[s], budget);
      });
    for (auto& th : pool) th.join();
  }

  OracleResult r;
  r.method = "multistart";
  r.resolution = total;
  r.game = game.name();
  bool any = false;
  for (const auto& o : outcomes) {
    r.evaluations += o.evaluations;
    if (!o.ok) continue;
    if (!any || o.value < r.value) {
      r.point = o.point;
      r.value = o.value;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("every multistart descent diverged");
  return r;
}

OracleResult multistart_descent(const GameInstance& game, const Box& box, int starts, int budget,
                                std::uint64_t seed, int threads) {
  if (starts < 1) throw std::invalid_argument("multistart needs at least one start");
  const int dim = game.num_agents() * game.dim();
  if (box.dim() != dim) throw std::invalid_argument("box dimension does not match n*d");
  Rng rng = make_stream(seed, "oracle-starts");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VectorXd> pts(starts, VectorXd(dim));
  for (auto& p : pts)
    for (int c = 0; c < dim; ++c) p[c] = box.lo[c] + (box.hi[c] - box.lo[c]) * unit(rng);
  OracleResult r = multistart_descent(game, pts, budget, threads);
  r.seed = seed;
  return r;
}

OracleResult solve_social_optimum(const GameInstance& game, const OracleSpec& settings) {
  const int dim = game.num_agents() * game.dim();
  const Box box = Box::uniform(dim, settings.box_lo, settings.box_hi);
  const bool grid = settings.method == "grid" || (settings.method == "auto" && dim <= kMaxGridDimension);
  if (grid) return grid_search_social_optimum(game, box, settings.resolution);
  return multistart_descent(game, box, settings.starts, settings.budget, settings.seed);
}

VectorXd quadratic_nash(const QuadraticTwoAgentGame& game) {
  const int n = game.num_agents();
  const double k = 2.0 * game.coupling() / (n * n);
  // (2 I + k 1 1^T) x = 2 t, solved by Sherman-Morrison so the result is exact
  // for the built-in instance: x = t - k sum(t) / (2 + n k) * 1.
  double sum_t = 0.0;
  for (int i = 0; i < n; ++i) sum_t += game.target(i);
  const double shift = k * sum_t / (2.0 + n * k);
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = game.target(i) - shift;
  return x;
}

double GibbsDensity::mass(double a, double b) const {
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j) {
    if (z[j] < a - 1e-12 || z[j + 1] > b + 1e-12) continue;
    m += 0.5 * (density[j] + density[j + 1]) * (z[j + 1] - z[j]);
  }
  return m;
}

GibbsDensity gibbs_density_1d(const std::function<double(double)>& objective, double epsilon, double lo, double hi,
                              double resolution) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(resolution > 0.0) || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("need a finite box lo < hi and a positive resolution");
  const int count = grid_points(lo, hi, resolution);
  GibbsDensity g;
  g.epsilon = epsilon;
  g.z.resize(count);
  g.density.resize(count);
  const double scale = 2.0 / (epsilon * epsilon);
  for (int j = 0; j < count; ++j) {
    const double z = lo + j * resolution;
    const double v = objective(z);
    if (!std::isfinite(v)) throw std::domain_error("objective is not finite at z = " + std::to_string(z));
    if (v < 0.0) throw std::domain_error("objective must be nonnegative on the box (G(" + std::to_string(z) + ") < 0)");
    g.z[j] = z;
    g.density[j] = std::exp(-scale * v);
  }
  double Z = 0.0;
  for (int j = 0; j + 1 < count; ++j) Z += 0.5 * (g.density[j] + g.density[j + 1]) * (g.z[j + 1] - g.z[j]);
  if (!(Z > std::numeric_limits<double>::min()) || !std::isfinite(Z))
    throw std::runtime_error("normalizer underflows at epsilon = " + std::to_string(epsilon) +
                             "; increase epsilon or rescale the objective");
  for (double& p : g.density) p /= Z;
  g.normalizer = Z;
  return g;
}

}  // namespace dsanneal
