#pragma once

// Random time-varying communication graphs: a pool of undirected graphs from
// which one is drawn i.i.d. per iteration, plus the Laplacian spectral checks
// for connectivity in expectation.

#include "dsanneal/rng.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsanneal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// L = D - W for a symmetric 0/1 adjacency with zero diagonal.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian(
    const Eigen::MatrixBase<Derived>& adjacency) {
  using Scalar = typename Derived::Scalar;
  if (adjacency.rows() != adjacency.cols()) throw std::invalid_argument("adjacency must be square");
  const Eigen::Index n = adjacency.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != Scalar(0)) throw std::invalid_argument("adjacency must have zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacency(i, j) != adjacency(j, i)) throw std::invalid_argument("adjacency must be symmetric");
      if (adjacency(i, j) != Scalar(0) && adjacency(i, j) != Scalar(1))
        throw std::invalid_argument("adjacency entries must be 0 or 1");
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lap = -adjacency;
  lap.diagonal() = adjacency.rowwise().sum();
  return lap;
}

/// Orthonormal basis (n x (n-1)) of the complement of the all-ones vector.
MatrixXd consensus_complement_basis(Eigen::Index n);

/// Second-smallest eigenvalue of a symmetric PSD matrix whose kernel contains
/// the all-ones vector. The known eigenvector 1/sqrt(n) is deflated by
/// restricting to its orthogonal complement, so the result is the smallest
/// eigenvalue of the restriction. Throws std::runtime_error if the symmetric
/// eigensolver does not converge.
template <typename Derived>
typename Derived::Scalar lambda2(const Eigen::MatrixBase<Derived>& matrix, double tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("lambda2 needs a square matrix");
  const Eigen::Index n = matrix.rows();
  if (n < 2) return Scalar(0);
  const MatrixXd q = consensus_complement_basis(n);
  const MatrixXd restricted = q.transpose() * matrix.template cast<double>() * q;
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(restricted, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("lambda2: eigensolver did not converge");
  const double value = solver.eigenvalues()(0);
  return static_cast<Scalar>(std::abs(value) <= tol ? 0.0 : value);
}

struct GraphSample {
  MatrixXd adjacency;
  MatrixXd laplacian;
  VectorXd degrees;

  static GraphSample from_adjacency(const MatrixXd& adjacency);
  static GraphSample complete(int n);
  static GraphSample edgeless(int n);
  static GraphSample path(int n);

  int size() const { return static_cast<int>(adjacency.rows()); }
  double max_degree() const { return degrees.size() ? degrees.maxCoeff() : 0.0; }
  int edge_count() const;
};

enum class NetworkMode { Pool, Complete, Single, Fresh };

std::string to_string(NetworkMode mode);
NetworkMode network_mode_from_string(const std::string& s);

/// Immutable generator of the i.i.d. graph sequence.
struct NetworkModel {
  int n = 0;
  NetworkMode mode = NetworkMode::Pool;
  std::vector<GraphSample> pool;  // empty for Fresh
  double p_lo = 0.0, p_hi = 0.0;  // used by Fresh

  /// Pool mean; for Fresh mode the exact expectation (p_lo + p_hi)/2 * L(K_n).
  MatrixXd mean_laplacian() const;
  /// Largest node degree any drawn graph can have.
  double max_degree() const;
};

/// One G(n, p) sample with every pair linked independently with probability p.
GraphSample erdos_renyi(int n, double p, Rng& rng);

/// pool_size independent G(n, p) graphs, p ~ U[p_lo, p_hi] per graph.
NetworkModel erdos_renyi_pool(int n, int pool_size, double p_lo, double p_hi, std::uint64_t seed);

NetworkModel pool_model(std::vector<GraphSample> pool);
NetworkModel complete_model(int n);
NetworkModel single_graph_model(GraphSample graph);
NetworkModel fresh_erdos_renyi_model(int n, double p_lo, double p_hi);

struct ConnectivityReport {
  bool passed = false;
  double lambda2_bar = 0.0;
  double tol = 1e-8;
};

ConnectivityReport check_connected_in_expectation(const NetworkModel& model, double tol = 1e-8);

/// Draws graphs for one run. Owns its RNG stream; the model is shared.
class GraphSampler {
 public:
  GraphSampler(const NetworkModel& model, std::uint64_t seed);
  // The sampler keeps a pointer to the model; temporaries would dangle.
  GraphSampler(NetworkModel&&, std::uint64_t) = delete;

  const GraphSample& next();
  /// Pool index of the last draw (-1 for modes without a pool choice).
  int last_index() const { return last_index_; }

 private:
  const NetworkModel* model_;
  Rng rng_;
  GraphSample scratch_;
  int last_index_ = -1;
};

/// Free-function form of a single draw.
const GraphSample& sample_graph(GraphSampler& sampler);

// Edge-list text format: a "#k" header line per graph followed by one "u v"
// line per undirected edge (u < v, zero-based). A leading "n <count>" line
// fixes the node count.
void write_edge_list(std::ostream& out, const NetworkModel& model);
NetworkModel read_edge_list(std::istream& in);

}  // namespace dsanneal
