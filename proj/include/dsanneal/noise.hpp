#pragma once

#include "dsanneal/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dsanneal {

using Eigen::MatrixXd;

enum class GradientNoiseKind { None, Uniform, Gaussian };

std::string to_string(GradientNoiseKind kind);
GradientNoiseKind gradient_noise_from_string(const std::string& s);

/// Zero-mean gradient noise plus the standard Gaussian annealing noise.
struct NoiseModel {
  GradientNoiseKind gradient = GradientNoiseKind::None;
  double bound = 0.0;  // Uniform: support [-bound, bound]
  double sigma = 0.0;  // Gaussian: standard deviation
  bool annealing = true;

  void validate() const;
  /// Per-coordinate second moment E[noise^2].
  double second_moment() const;
};

/// The per-run noise streams: one generator per (agent, noise kind).
class NoiseSource {
 public:
  NoiseSource(const NoiseModel& model, int num_agents, int dim, std::uint64_t seed);

  /// n x d matrix of gradient noise for one iteration.
  const MatrixXd& gradient_draw();
  /// n x d matrix of N(0, 1) annealing noise for one iteration (zeros if annealing is off).
  const MatrixXd& annealing_draw();

  const NoiseModel& model() const { return model_; }

 private:
  NoiseModel model_;
  int n_, d_;
  std::vector<Rng> gradient_streams_;
  std::vector<Rng> annealing_streams_;
  std::vector<std::normal_distribution<double>> gradient_normals_, annealing_normals_;
  MatrixXd gradient_buf_, annealing_buf_;
};

}  // namespace dsanneal
