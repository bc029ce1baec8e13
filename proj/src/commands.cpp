#include "dsanneal/commands.hpp"

#include "dsanneal/config.hpp"
#include "dsanneal/metrics.hpp"
#include "dsanneal/oracle.hpp"
#include "dsanneal/svg.hpp"
#include "dsanneal/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace dsanneal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig resolve(const CommandOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config_path);
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  return cfg;
}

/// Artifact paths share one stem: <name>-<fingerprint>.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const ExperimentConfig& cfg)
      : dir_(cfg.output_dir), stem_(cfg.name + "-" + config_fingerprint(cfg)) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& suffix) const { return dir_ / (stem_ + "." + suffix); }

  std::ofstream open(const std::string& suffix) {
    const fs::path p = path(suffix);
    std::ofstream f(p);
    if (!f) throw std::ios_base::failure("cannot open " + p.string() + " for writing");
    f.exceptions(std::ios::failbit | std::ios::badbit);
    written_.push_back(p.string());
    return f;
  }

  void json_file(const std::string& suffix, const json& j) { open(suffix) << j.dump(2) << '\n'; }

  void plot(const std::string& suffix, const PlotTable& t, bool svg, bool log_x = false) {
    auto f = open(suffix + ".csv");
    write_plot_csv(f, t);
    if (svg) {
      auto s = open(suffix + ".svg");
      SvgOptions o;
      o.log_x = log_x;
      write_svg_chart(s, t, o);
    }
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::string stem_;
  std::vector<std::string> written_;
};

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const CheckFailed& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    // Guards such as the grid oracle's dimension limit reject the configured request.
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

void list_artifacts(std::ostream& out, const ArtifactWriter& w) {
  for (const auto& p : w.written()) out << "  " << p << '\n';
}

std::string method_tag(Method m, std::uint64_t seed) { return to_string(m) + "-s" + std::to_string(seed); }

}  // namespace

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve(opts);
    const RunSetup setup = RunSetup::from_config(cfg);
    const RunTrace trace = run(cfg, setup, cfg.method, cfg.seed);

    ArtifactWriter w(cfg);
    const std::string tag = method_tag(cfg.method, cfg.seed);
    {
      auto f = w.open(tag + ".trace.csv");
      write_trace_csv(f, trace);
    }
    w.json_file(tag + ".meta.json", trace_metadata(trace, cfg));
    if (cfg.network.mode == NetworkMode::Pool || cfg.network.mode == NetworkMode::Single) {
      auto f = w.open("edges.txt");
      write_edge_list(f, setup.network);
    }
    if (cfg.method != Method::Centralized) {
      w.plot(tag + ".consensus", consensus_plot(trace, cfg.tau), opts.svg, true);
      w.plot(tag + ".tracking", tracking_plot(trace), opts.svg, true);
    }
    w.plot(tag + ".decisions", decisions_plot(trace, "decisions by " + to_string(cfg.method)), opts.svg, true);
    w.plot(tag + ".cost", cost_plot(trace, to_string(cfg.method)), opts.svg, true);

    const MatrixXd tail = tail_average(trace, cfg.tail_fraction);
    const VectorXd flat = flatten(tail);
    out << "run " << cfg.name << " (" << to_string(cfg.method) << ", seed " << cfg.seed << ", T " << cfg.horizon
        << ")\n";
    out << "  tail average:";
    for (Eigen::Index c = 0; c < flat.size(); ++c) out << ' ' << format_number(flat[c]);
    out << "\n  tail social cost: " << format_number(tail_mean_cost(trace, *setup.game, cfg.tail_fraction)) << '\n';
    out << "artifacts:\n";
    list_artifacts(out, w);
    return kExitOk;
  });
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve(opts);
    if (cfg.compare.size() != 2) throw ConfigError("compare", "expected exactly two methods");
    const RunSetup setup = RunSetup::from_config(cfg);
    const Method ma = cfg.compare[0], mb = cfg.compare[1];
    const RunTrace a = run(cfg, setup, ma, cfg.seed);
    const RunTrace b = run(cfg, setup, mb, cfg.seed);
    const CostComparison cmp = compare_costs(a, b, *setup.game, cfg.tail_fraction);

    // Distinct labels even when both sides run the same method.
    std::string la = to_string(ma), lb = to_string(mb);
    if (la == lb) la += "_a", lb += "_b";

    ArtifactWriter w(cfg);
    const std::string tag = "compare-s" + std::to_string(cfg.seed);
    json report = cmp.to_json(la, lb);
    report["fingerprint"] = config_fingerprint(cfg);
    report["seed"] = cfg.seed;
    w.json_file(tag + ".report.json", report);
    w.plot(tag + ".cost", cost_plot(a, la, b, lb), opts.svg, true);
    w.plot(tag + ".decisions-" + la, decisions_plot(a, "decisions by " + la), opts.svg, true);
    w.plot(tag + ".decisions-" + lb, decisions_plot(b, "decisions by " + lb), opts.svg, true);

    out << "final-window mean social cost over " << cmp.window << " records\n";
    out << "  " << la << ": " << format_number(cmp.mean_a) << '\n';
    out << "  " << lb << ": " << format_number(cmp.mean_b) << '\n';
    out << "  difference (" << la << " - " << lb << "): " << format_number(cmp.difference()) << '\n';
    out << "  smaller: " << report["smaller"].get<std::string>() << '\n';
    out << "artifacts:\n";
    list_artifacts(out, w);
    return kExitOk;
  });
}

int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve(opts);
    const RunSetup setup = RunSetup::from_config(cfg);
    const GameInstance& game = *setup.game;
    json report;
    bool ok = true;

    const ConnectivityReport conn = check_connected_in_expectation(setup.network);
    report["connectivity"] = {{"passed", conn.passed}, {"lambda2_mean_laplacian", conn.lambda2_bar}, {"tol", conn.tol}};
    ok &= conn.passed;

    std::vector<ProbePoint> probes;
    const double lo = cfg.game.init_lo, hi = cfg.game.init_hi;
    if (game.dim() == 1) {
      std::vector<double> pts;
      for (int j = 0; j <= 8; ++j) pts.push_back(lo + (hi - lo) * j / 8.0);
      probes = scalar_probe_grid(pts, pts);
    } else {
      Rng rng = make_stream(cfg.game.seed, "gradient-probes");
      std::uniform_real_distribution<double> u(lo, hi);
      for (int p = 0; p < 64; ++p) {
        ProbePoint pp{VectorXd(game.dim()), VectorXd(game.dim())};
        for (int c = 0; c < game.dim(); ++c) pp.x[c] = u(rng), pp.y[c] = u(rng);
        probes.push_back(std::move(pp));
      }
    }
    const GradientCheckReport grad = check_gradients(game, probes);
    report["gradients"] = {{"passed", grad.passed()},
                           {"max_rel_error", grad.max_rel_error},
                           {"tolerance", grad.tolerance},
                           {"failures", grad.failures.size()},
                           {"probes", probes.size()}};
    if (!grad.passed()) {
      const auto& f = grad.failures.front();
      report["gradients"]["first_failure"] = {{"agent", f.agent},
                                              {"partial", f.which == Partial::First ? "first" : "second"},
                                              {"analytic", f.analytic},
                                              {"numeric", f.numeric}};
    }
    ok &= grad.passed();

    // Sampled over a finite ball, so this is informational: a bounded sample
    // cannot prove or refute a global bound.
    const double radius = std::max(std::abs(lo), std::abs(hi));
    const DissimilarityReport dis =
        check_dissimilarity_bound(game, average_reference(setup.game), 2000, radius, cfg.game.seed);
    report["dissimilarity"] = {{"informational", true},
                               {"radius", radius},
                               {"samples", dis.sample_count},
                               {"max_first", dis.max_first()},
                               {"max_second", dis.max_second()},
                               {"unbounded_suspect", dis.unbounded_suspect}};

    const ScheduleSet& s = cfg.schedule;
    const StepSizes first = step_sizes(s, 1, setup.network.max_degree());
    const bool sched_ok = s.tau_beta > 0 && s.tau_beta < 0.5 && s.c_alpha > 0 && s.c_beta > 0 && s.c_gamma > 0 &&
                          cfg.tau < 0.5 - s.tau_beta;
    report["schedule"] = {{"passed", sched_ok},
                          {"alpha_1", first.alpha},
                          {"beta_1", first.beta},
                          {"gamma_1", first.gamma},
                          {"beta_clamped", first.beta < schedule_eval(s, 1, StepKind::Beta)},
                          {"c_gamma_sq_over_c_alpha", s.c_gamma * s.c_gamma / s.c_alpha},
                          {"tau_bound", 0.5 - s.tau_beta}};
    ok &= sched_ok;
    report["passed"] = ok;
    report["fingerprint"] = config_fingerprint(cfg);

    out << "connectivity  " << (conn.passed ? "PASS" : "FAIL") << "  lambda2(mean L) = " << format_number(conn.lambda2_bar)
        << '\n';
    out << "gradients     " << (grad.passed() ? "PASS" : "FAIL") << "  max rel error = " << format_number(grad.max_rel_error)
        << " over " << probes.size() << " probes\n";
    out << "dissimilarity info  sup |d1| = " << format_number(dis.max_first()) << ", sup |d2| = "
        << format_number(dis.max_second()) << " on radius " << format_number(radius) << '\n';
    out << "schedule      " << (sched_ok ? "PASS" : "FAIL") << "  beta_1 = " << format_number(first.beta) << '\n';

    ArtifactWriter w(cfg);
    w.json_file("check.json", report);
    if (!ok) throw CheckFailed("see " + w.path("check.json").string());
    out << "all checks passed\n";
    return kExitOk;
  });
}

int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve(opts);
    const GamePtr game = make_game(cfg);
    OracleResult r = solve_social_optimum(*game, cfg.oracle);
    json j = r.to_json();
    if (const auto* q = dynamic_cast<const QuadraticTwoAgentGame*>(game.get())) {
      const VectorXd nash = quadratic_nash(*q);
      j["nash"] = {{"point", std::vector<double>(nash.data(), nash.data() + nash.size())},
                   {"value", social_cost(*game, unflatten(nash, q->num_agents(), q->dim()))},
                   {"method", "closed-form"}};
    }
    ArtifactWriter w(cfg);
    w.json_file("oracle.json", j);
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_ensemble(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve(opts);
    const GamePtr game = make_game(cfg);
    std::optional<MatrixXd> ref;
    std::vector<TestFunction> tests;
    if (cfg.reference) {
      ref = unflatten(Eigen::Map<const VectorXd>(cfg.reference->data(), static_cast<Eigen::Index>(cfg.reference->size())),
                      game->num_agents(), game->dim());
      tests.push_back(ball_indicator(*ref, cfg.basin_radius, "basin"));
    }
    const int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const EnsembleStats stats = ensemble_run(cfg, cfg.replicates, tests, ref, cfg.basin_radius, threads);

    ArtifactWriter w(cfg);
    json j = stats.to_json();
    j["method"] = to_string(cfg.method);
    j["fingerprint"] = config_fingerprint(cfg);
    w.json_file(method_tag(cfg.method, cfg.seed) + ".ensemble.json", j);

    out << "ensemble of " << stats.replicates << " (" << stats.completed << " completed, " << stats.failures.size()
        << " diverged)\n";
    if (stats.completed) out << "  mean tail social cost: " << format_number(stats.mean_tail_cost()) << '\n';
    if (stats.basin_fraction) out << "  basin fraction: " << format_number(*stats.basin_fraction) << '\n';
    out << "artifacts:\n";
    list_artifacts(out, w);
    return kExitOk;
  });
}

}  // namespace dsanneal
