#include "dsanneal/topology.hpp"

#include <Eigen/QR>

#include <istream>
#include <ostream>
#include <sstream>

namespace dsanneal {

MatrixXd consensus_complement_basis(Eigen::Index n) {
  // Householder QR of [1, e_1 .. e_{n-1}]: the trailing n-1 columns of Q span 1^perp.
  MatrixXd a = MatrixXd::Identity(n, n);
  a.col(0).setOnes();
  Eigen::HouseholderQR<MatrixXd> qr(a);
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  return q.rightCols(n - 1);
}

GraphSample GraphSample::from_adjacency(const MatrixXd& adjacency) {
  GraphSample g;
  g.laplacian = dsanneal::laplacian(adjacency);
  g.adjacency = adjacency;
  g.degrees = g.laplacian.diagonal();
  return g;
}

GraphSample GraphSample::complete(int n) {
  MatrixXd w = MatrixXd::Ones(n, n);
  w.diagonal().setZero();
  return from_adjacency(w);
}

GraphSample GraphSample::edgeless(int n) { return from_adjacency(MatrixXd::Zero(n, n)); }

GraphSample GraphSample::path(int n) {
  MatrixXd w = MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = 1.0;
  return from_adjacency(w);
}

int GraphSample::edge_count() const { return static_cast<int>(adjacency.sum() / 2.0); }

std::string to_string(NetworkMode mode) {
  switch (mode) {
    case NetworkMode::Pool: return "pool";
    case NetworkMode::Complete: return "complete";
    case NetworkMode::Single: return "single";
    case NetworkMode::Fresh: return "fresh";
  }
  return "pool";
}

NetworkMode network_mode_from_string(const std::string& s) {
  if (s == "pool") return NetworkMode::Pool;
  if (s == "complete") return NetworkMode::Complete;
  if (s == "single") return NetworkMode::Single;
  if (s == "fresh") return NetworkMode::Fresh;
  throw std::invalid_argument("unknown network mode '" + s + "' (expected pool|complete|single|fresh)");
}

MatrixXd NetworkModel::mean_laplacian() const {
  if (mode == NetworkMode::Fresh) return 0.5 * (p_lo + p_hi) * GraphSample::complete(n).laplacian;
  if (pool.empty()) throw std::logic_error("network model has an empty pool");
  MatrixXd mean = MatrixXd::Zero(n, n);
  for (const auto& g : pool) mean += g.laplacian;
  return mean / static_cast<double>(pool.size());
}

double NetworkModel::max_degree() const {
  if (mode == NetworkMode::Fresh) return p_hi > 0.0 ? n - 1 : 0.0;
  double m = 0.0;
  for (const auto& g : pool) m = std::max(m, g.max_degree());
  return m;
}

GraphSample erdos_renyi(int n, double p, Rng& rng) {
  std::bernoulli_distribution edge(p);
  MatrixXd w = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge(rng)) w(i, j) = w(j, i) = 1.0;
  return GraphSample::from_adjacency(w);
}

static void check_range(int n, double p_lo, double p_hi) {
  if (n < 2) throw std::invalid_argument("network needs at least 2 nodes");
  if (!(0.0 <= p_lo && p_lo <= p_hi && p_hi <= 1.0))
    throw std::invalid_argument("edge probability range must satisfy 0 <= p_lo <= p_hi <= 1");
}

NetworkModel erdos_renyi_pool(int n, int pool_size, double p_lo, double p_hi, std::uint64_t seed) {
  check_range(n, p_lo, p_hi);
  if (pool_size < 1) throw std::invalid_argument("pool_size must be at least 1");
  Rng rng = make_stream(seed, "erdos-renyi-pool");
  std::uniform_real_distribution<double> prob(p_lo, p_hi);
  NetworkModel model;
  model.n = n;
  model.mode = NetworkMode::Pool;
  model.p_lo = p_lo;
  model.p_hi = p_hi;
  model.pool.reserve(pool_size);
  for (int m = 0; m < pool_size; ++m) {
    const double p = p_lo == p_hi ? p_lo : prob(rng);
    model.pool.push_back(erdos_renyi(n, p, rng));
  }
  return model;
}

NetworkModel pool_model(std::vector<GraphSample> pool) {
  if (pool.empty()) throw std::invalid_argument("graph pool must not be empty");
  NetworkModel model;
  model.n = pool.front().size();
  for (const auto& g : pool)
    if (g.size() != model.n) throw std::invalid_argument("graphs in a pool must share the node count");
  model.mode = NetworkMode::Pool;
  model.pool = std::move(pool);
  return model;
}

NetworkModel complete_model(int n) {
  NetworkModel model = pool_model({GraphSample::complete(n)});
  model.mode = NetworkMode::Complete;
  return model;
}

NetworkModel single_graph_model(GraphSample graph) {
  NetworkModel model = pool_model({std::move(graph)});
  model.mode = NetworkMode::Single;
  return model;
}

NetworkModel fresh_erdos_renyi_model(int n, double p_lo, double p_hi) {
  check_range(n, p_lo, p_hi);
  NetworkModel model;
  model.n = n;
  model.mode = NetworkMode::Fresh;
  model.p_lo = p_lo;
  model.p_hi = p_hi;
  return model;
}

ConnectivityReport check_connected_in_expectation(const NetworkModel& model, double tol) {
  ConnectivityReport report;
  report.tol = tol;
  if (model.n < 2) {
    // A lone agent is trivially in consensus.
    report.passed = true;
    return report;
  }
  report.lambda2_bar = lambda2(model.mean_laplacian(), 0.0);
  report.passed = report.lambda2_bar > tol;
  return report;
}

GraphSampler::GraphSampler(const NetworkModel& model, std::uint64_t seed)
    : model_(&model), rng_(make_stream(seed, "graph-draws")) {
  if (model.mode != NetworkMode::Fresh && model.pool.empty())
    throw std::invalid_argument("network model has an empty pool");
}

const GraphSample& GraphSampler::next() {
  const NetworkModel& m = *model_;
  if (m.mode == NetworkMode::Fresh) {
    std::uniform_real_distribution<double> prob(m.p_lo, m.p_hi);
    const double p = m.p_lo == m.p_hi ? m.p_lo : prob(rng_);
    scratch_ = erdos_renyi(m.n, p, rng_);
    last_index_ = -1;
    return scratch_;
  }
  if (m.pool.size() == 1) {
    last_index_ = 0;
    return m.pool.front();
  }
  std::uniform_int_distribution<int> pick(0, static_cast<int>(m.pool.size()) - 1);
  last_index_ = pick(rng_);
  return m.pool[last_index_];
}

const GraphSample& sample_graph(GraphSampler& sampler) { return sampler.next(); }

void write_edge_list(std::ostream& out, const NetworkModel& model) {
  if (model.mode == NetworkMode::Fresh) throw std::invalid_argument("fresh-mode networks have no pool to export");
  out << "n " << model.n << '\n';
  for (std::size_t k = 0; k < model.pool.size(); ++k) {
    out << '#' << k << '\n';
    const MatrixXd& w = model.pool[k].adjacency;
    for (int i = 0; i < model.n; ++i)
      for (int j = i + 1; j < model.n; ++j)
        if (w(i, j) != 0.0) out << i << ' ' << j << '\n';
  }
}

NetworkModel read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<MatrixXd> adjacencies;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (n < 0) throw std::runtime_error("edge list: graph header before 'n <count>' line");
      adjacencies.push_back(MatrixXd::Zero(n, n));
      continue;
    }
    std::istringstream ls(line);
    if (line[0] == 'n') {
      std::string tag;
      ls >> tag >> n;
      if (!ls || n < 1) throw std::runtime_error("edge list: bad node count on line " + std::to_string(lineno));
      continue;
    }
    int u = -1, v = -1;
    ls >> u >> v;
    if (!ls || adjacencies.empty() || u < 0 || v < 0 || u >= n || v >= n || u == v)
      throw std::runtime_error("edge list: bad edge on line " + std::to_string(lineno));
    adjacencies.back()(u, v) = adjacencies.back()(v, u) = 1.0;
  }
  std::vector<GraphSample> pool;
  for (const auto& w : adjacencies) pool.push_back(GraphSample::from_adjacency(w));
  return pool_model(std::move(pool));
}

}  // namespace dsanneal
