#include "dsanneal/trace_io.hpp"

#include <cstdio>
#include <ostream>

namespace dsanneal {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static std::string format_row(const MatrixXd& m, Eigen::Index row) {
  std::string out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c) out += ';';
    out += format_number(m(row, c));
  }
  return out;
}

static std::string format_vec(const VectorXd& v) {
  std::string out;
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    if (c) out += ';';
    out += format_number(v[c]);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "k,agent,x,v,s,xbar,consensus_err,social_cost\n";
  for (const auto& r : trace.records) {
    const VectorXd xbar = r.x.colwise().mean().transpose();
    const std::string xbar_str = format_vec(xbar);
    const std::string cost_str = format_number(r.social_cost);
    for (Eigen::Index i = 0; i < r.x.rows(); ++i) {
      const double err = (r.s.row(i).transpose() - xbar).norm();
      out << r.k << ',' << i << ',' << format_row(r.x, i) << ',' << format_row(r.v, i) << ',' << format_row(r.s, i)
          << ',' << xbar_str << ',' << format_number(err) << ',' << cost_str << '\n';
    }
  }
}

nlohmann::json trace_metadata(const RunTrace& trace, const ExperimentConfig& cfg) {
  return {{"fingerprint", trace.fingerprint},
          {"method", to_string(trace.method)},
          {"run_seed", trace.seed},
          {"seeds",
           {{"run", trace.seed}, {"game", cfg.game.seed}, {"network", cfg.network.seed}, {"oracle", cfg.oracle.seed}}},
          {"agents", trace.n},
          {"dim", trace.d},
          {"records", trace.records.size()},
          {"config", config_to_json(cfg)}};
}

}  // namespace dsanneal
