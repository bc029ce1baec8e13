#include "dsanneal/noise.hpp"

#include <stdexcept>

namespace dsanneal {

std::string to_string(GradientNoiseKind kind) {
  switch (kind) {
    case GradientNoiseKind::None: return "none";
    case GradientNoiseKind::Uniform: return "uniform";
    case GradientNoiseKind::Gaussian: return "gaussian";
  }
  return "none";
}

GradientNoiseKind gradient_noise_from_string(const std::string& s) {
  if (s == "none") return GradientNoiseKind::None;
  if (s == "uniform") return GradientNoiseKind::Uniform;
  if (s == "gaussian") return GradientNoiseKind::Gaussian;
  throw std::invalid_argument("unknown gradient noise '" + s + "' (expected none|uniform|gaussian)");
}

void NoiseModel::validate() const {
  if (gradient == GradientNoiseKind::Uniform && !(bound > 0.0))
    throw std::invalid_argument("noise.gradient.bound must be positive for uniform noise");
  if (gradient == GradientNoiseKind::Gaussian && !(sigma > 0.0))
    throw std::invalid_argument("noise.gradient.sigma must be positive for gaussian noise");
}

double NoiseModel::second_moment() const {
  switch (gradient) {
    case GradientNoiseKind::None: return 0.0;
    case GradientNoiseKind::Uniform: return bound * bound / 3.0;
    case GradientNoiseKind::Gaussian: return sigma * sigma;
  }
  return 0.0;
}

NoiseSource::NoiseSource(const NoiseModel& model, int num_agents, int dim, std::uint64_t seed)
    : model_(model),
      n_(num_agents),
      d_(dim),
      gradient_buf_(MatrixXd::Zero(num_agents, dim)),
      annealing_buf_(MatrixXd::Zero(num_agents, dim)) {
  model_.validate();
  gradient_streams_.reserve(n_);
  annealing_streams_.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    gradient_streams_.push_back(make_stream(seed, "gradient-noise", i));
    annealing_streams_.push_back(make_stream(seed, "annealing-noise", i));
    gradient_normals_.emplace_back(0.0, model_.gradient == GradientNoiseKind::Gaussian ? model_.sigma : 1.0);
    annealing_normals_.emplace_back(0.0, 1.0);
  }
}

const MatrixXd& NoiseSource::gradient_draw() {
  switch (model_.gradient) {
    case GradientNoiseKind::None: break;
    case GradientNoiseKind::Uniform: {
      std::uniform_real_distribution<double> u(-model_.bound, model_.bound);
      for (int i = 0; i < n_; ++i)
        for (int c = 0; c < d_; ++c) gradient_buf_(i, c) = u(gradient_streams_[i]);
      break;
    }
    case GradientNoiseKind::Gaussian: {
      for (int i = 0; i < n_; ++i)
        for (int c = 0; c < d_; ++c) gradient_buf_(i, c) = gradient_normals_[i](gradient_streams_[i]);
      break;
    }
  }
  return gradient_buf_;
}

const MatrixXd& NoiseSource::annealing_draw() {
  if (model_.annealing) {
    for (int i = 0; i < n_; ++i)
      for (int c = 0; c < d_; ++c) annealing_buf_(i, c) = annealing_normals_[i](annealing_streams_[i]);
  }
  return annealing_buf_;
}

}  // namespace dsanneal
