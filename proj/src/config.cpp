#include "dsanneal/config.hpp"

#include "dsanneal/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dsanneal {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::Daa: return "daa";
    case Method::Daag: return "daag";
    case Method::Centralized: return "centralized";
  }
  return "daa";
}

Method method_from_string(const std::string& s) {
  if (s == "daa") return Method::Daa;
  if (s == "daag") return Method::Daag;
  if (s == "centralized") return Method::Centralized;
  throw std::invalid_argument("unknown method '" + s + "' (expected daa|daag|centralized)");
}

namespace {

void reject_unknown(const json& j, const std::string& path, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  const std::string field = path.empty() ? key : path + "." + key;
  try {
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(field, "expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
          throw ConfigError(field, "expected a non-negative integer");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(field, "expected a string");
    }
    out = v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

void read_pair(const json& j, const std::string& path, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const std::string field = path + "." + key;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(field, "expected [lo, hi]");
  lo = v[0].get<double>();
  hi = v[1].get<double>();
}

std::vector<double> read_vector(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

template <typename F>
auto wrap(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  reject_unknown(j, "",
                 {"name", "game", "network", "method", "compare", "schedule", "noise", "horizon", "record_stride",
                  "replicates", "seed", "tau", "tail_fraction", "reference", "basin_radius", "oracle", "output_dir"});
  read(j, "", "name", cfg.name);
  read(j, "", "horizon", cfg.horizon);
  read(j, "", "record_stride", cfg.record_stride);
  read(j, "", "replicates", cfg.replicates);
  read(j, "", "seed", cfg.seed);
  read(j, "", "tau", cfg.tau);
  read(j, "", "tail_fraction", cfg.tail_fraction);
  read(j, "", "basin_radius", cfg.basin_radius);
  read(j, "", "output_dir", cfg.output_dir);
  if (j.contains("method")) {
    std::string m;
    read(j, "", "method", m);
    cfg.method = wrap("method", [&] { return method_from_string(m); });
  }
  if (j.contains("compare")) {
    const json& c = j.at("compare");
    if (!c.is_array() || c.size() != 2) throw ConfigError("compare", "expected two method names");
    cfg.compare.clear();
    for (const auto& m : c) {
      if (!m.is_string()) throw ConfigError("compare", "expected method names");
      cfg.compare.push_back(wrap("compare", [&] { return method_from_string(m.get<std::string>()); }));
    }
  }
  if (j.contains("reference")) cfg.reference = read_vector(j.at("reference"), "reference");

  if (j.contains("game")) {
    const json& g = j.at("game");
    reject_unknown(g, "game",
                   {"name", "seed", "coef_range", "lambda_range", "tilt", "init_box", "init_point",
                    "planted_gradient_offset"});
    read(g, "game", "name", cfg.game.name);
    read(g, "game", "seed", cfg.game.seed);
    read_pair(g, "game", "coef_range", cfg.game.coef_lo, cfg.game.coef_hi);
    read_pair(g, "game", "lambda_range", cfg.game.lambda_lo, cfg.game.lambda_hi);
    read(g, "game", "tilt", cfg.game.tilt);
    read_pair(g, "game", "init_box", cfg.game.init_lo, cfg.game.init_hi);
    if (g.contains("init_point")) cfg.game.init_point = read_vector(g.at("init_point"), "game.init_point");
    read(g, "game", "planted_gradient_offset", cfg.game.planted_gradient_offset);
  }
  if (j.contains("network")) {
    const json& n = j.at("network");
    reject_unknown(n, "network", {"mode", "pool_size", "p_range", "seed", "edge_list"});
    if (n.contains("mode")) {
      std::string m;
      read(n, "network", "mode", m);
      cfg.network.mode = wrap("network.mode", [&] { return network_mode_from_string(m); });
    }
    read(n, "network", "pool_size", cfg.network.pool_size);
    read_pair(n, "network", "p_range", cfg.network.p_lo, cfg.network.p_hi);
    read(n, "network", "seed", cfg.network.seed);
    if (n.contains("edge_list")) {
      std::string path;
      read(n, "network", "edge_list", path);
      cfg.network.edge_list = path;
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown(s, "schedule", {"c_alpha", "c_beta", "tau_beta", "c_gamma", "k_guard"});
    read(s, "schedule", "c_alpha", cfg.schedule.c_alpha);
    read(s, "schedule", "c_beta", cfg.schedule.c_beta);
    read(s, "schedule", "tau_beta", cfg.schedule.tau_beta);
    read(s, "schedule", "c_gamma", cfg.schedule.c_gamma);
    read(s, "schedule", "k_guard", cfg.schedule.k_guard);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, "noise", {"gradient", "annealing"});
    read(n, "noise", "annealing", cfg.noise.annealing);
    if (n.contains("gradient")) {
      const json& g = n.at("gradient");
      reject_unknown(g, "noise.gradient", {"kind", "bound", "sigma"});
      std::string kind = "none";
      read(g, "noise.gradient", "kind", kind);
      cfg.noise.gradient = wrap("noise.gradient.kind", [&] { return gradient_noise_from_string(kind); });
      read(g, "noise.gradient", "bound", cfg.noise.bound);
      read(g, "noise.gradient", "sigma", cfg.noise.sigma);
    }
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    reject_unknown(o, "oracle", {"method", "box", "resolution", "starts", "budget", "seed"});
    read(o, "oracle", "method", cfg.oracle.method);
    read_pair(o, "oracle", "box", cfg.oracle.box_lo, cfg.oracle.box_hi);
    read(o, "oracle", "resolution", cfg.oracle.resolution);
    read(o, "oracle", "starts", cfg.oracle.starts);
    read(o, "oracle", "budget", cfg.oracle.budget);
    read(o, "oracle", "seed", cfg.oracle.seed);
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  json game = {{"name", cfg.game.name},
               {"seed", cfg.game.seed},
               {"coef_range", {cfg.game.coef_lo, cfg.game.coef_hi}},
               {"lambda_range", {cfg.game.lambda_lo, cfg.game.lambda_hi}},
               {"tilt", cfg.game.tilt},
               {"init_box", {cfg.game.init_lo, cfg.game.init_hi}},
               {"planted_gradient_offset", cfg.game.planted_gradient_offset}};
  if (cfg.game.init_point) game["init_point"] = *cfg.game.init_point;
  j["game"] = game;
  json network = {{"mode", to_string(cfg.network.mode)},
                  {"pool_size", cfg.network.pool_size},
                  {"p_range", {cfg.network.p_lo, cfg.network.p_hi}},
                  {"seed", cfg.network.seed}};
  if (cfg.network.edge_list) network["edge_list"] = *cfg.network.edge_list;
  j["network"] = network;
  j["method"] = to_string(cfg.method);
  j["compare"] = {to_string(cfg.compare.at(0)), to_string(cfg.compare.at(1))};
  j["schedule"] = {{"c_alpha", cfg.schedule.c_alpha},
                   {"c_beta", cfg.schedule.c_beta},
                   {"tau_beta", cfg.schedule.tau_beta},
                   {"c_gamma", cfg.schedule.c_gamma},
                   {"k_guard", cfg.schedule.k_guard}};
  j["noise"] = {{"gradient", {{"kind", to_string(cfg.noise.gradient)}, {"bound", cfg.noise.bound}, {"sigma", cfg.noise.sigma}}},
                {"annealing", cfg.noise.annealing}};
  j["horizon"] = cfg.horizon;
  j["record_stride"] = cfg.record_stride;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["tau"] = cfg.tau;
  j["tail_fraction"] = cfg.tail_fraction;
  if (cfg.reference) j["reference"] = *cfg.reference;
  j["basin_radius"] = cfg.basin_radius;
  j["oracle"] = {{"method", cfg.oracle.method},
                 {"box", {cfg.oracle.box_lo, cfg.oracle.box_hi}},
                 {"resolution", cfg.oracle.resolution},
                 {"starts", cfg.oracle.starts},
                 {"budget", cfg.oracle.budget},
                 {"seed", cfg.oracle.seed}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> games = {"example1", "ev-charging", "double-well"};
  if (!games.count(game.name)) throw ConfigError("game.name", "unknown game '" + game.name + "'");
  if (!(game.init_lo <= game.init_hi)) throw ConfigError("game.init_box", "lo must not exceed hi");
  if (!(game.coef_lo <= game.coef_hi)) throw ConfigError("game.coef_range", "lo must not exceed hi");
  if (!(game.lambda_lo <= game.lambda_hi)) throw ConfigError("game.lambda_range", "lo must not exceed hi");
  if (!std::isfinite(game.planted_gradient_offset)) throw ConfigError("game.planted_gradient_offset", "must be finite");
  if (!(0.0 <= network.p_lo && network.p_lo <= network.p_hi && network.p_hi <= 1.0))
    throw ConfigError("network.p_range", "must satisfy 0 <= lo <= hi <= 1");
  if (network.pool_size < 1) throw ConfigError("network.pool_size", "must be at least 1");
  try {
    schedule.validate();
  } catch (const std::invalid_argument& e) {
    // Messages read "schedule.<field> must ..."; split off the field path.
    const std::string msg = e.what();
    const auto space = msg.find(' ');
    if (space == std::string::npos) throw ConfigError("schedule", msg);
    throw ConfigError(msg.substr(0, space), msg.substr(space + 1));
  }
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise.gradient", e.what());
  }
  if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (record_stride < 1) throw ConfigError("record_stride", "must be at least 1");
  if (replicates < 1) throw ConfigError("replicates", "must be at least 1");
  const double tau_max = 0.5 - schedule.tau_beta;
  if (!(tau >= 0.0 && tau < tau_max))
    throw ConfigError("tau", "must lie in [0, 1/2 - tau_beta) = [0, " + std::to_string(tau_max) + ")");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("tail_fraction", "must lie in (0, 1]");
  if (!(basin_radius > 0.0)) throw ConfigError("basin_radius", "must be positive");
  if (oracle.method != "auto" && oracle.method != "grid" && oracle.method != "multistart")
    throw ConfigError("oracle.method", "expected auto|grid|multistart");
  if (!(oracle.box_lo < oracle.box_hi)) throw ConfigError("oracle.box", "lo must be below hi");
  if (!(oracle.resolution > 0.0)) throw ConfigError("oracle.resolution", "must be positive");
  if (oracle.starts < 1) throw ConfigError("oracle.starts", "must be at least 1");
  if (oracle.budget < 0) throw ConfigError("oracle.budget", "must be non-negative");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<syntax>", e.what());
  }
  return config_from_json(j);
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_to_json(cfg).dump())));
  return buf;
}

GamePtr make_game(const ExperimentConfig& cfg) {
  GamePtr game;
  if (cfg.game.name == "example1") {
    game = std::make_shared<QuadraticTwoAgentGame>();
  } else if (cfg.game.name == "ev-charging") {
    EvChargingParams p;
    p.seed = cfg.game.seed;
    p.coef_lo = cfg.game.coef_lo;
    p.coef_hi = cfg.game.coef_hi;
    p.lambda_lo = cfg.game.lambda_lo;
    p.lambda_hi = cfg.game.lambda_hi;
    game = std::make_shared<EvChargingGame>(p);
  } else if (cfg.game.name == "double-well") {
    game = std::make_shared<DoubleWellGame>(cfg.game.tilt);
  } else {
    throw ConfigError("game.name", "unknown game '" + cfg.game.name + "'");
  }
  if (cfg.game.planted_gradient_offset != 0.0)
    game = std::make_shared<OffsetGradientGame>(game, cfg.game.planted_gradient_offset);
  if (cfg.game.init_point && cfg.game.init_point->size() != static_cast<std::size_t>(game->num_agents() * game->dim()))
    throw ConfigError("game.init_point", "needs n * d = " + std::to_string(game->num_agents() * game->dim()) + " entries");
  if (cfg.reference && cfg.reference->size() != static_cast<std::size_t>(game->num_agents() * game->dim()))
    throw ConfigError("reference", "needs n * d = " + std::to_string(game->num_agents() * game->dim()) + " entries");
  return game;
}

NetworkModel make_network(const ExperimentConfig& cfg, int num_agents) {
  const NetworkSpec& s = cfg.network;
  if (s.edge_list) {
    std::ifstream in(*s.edge_list);
    if (!in) throw std::ios_base::failure("cannot open edge list '" + *s.edge_list + "'");
    NetworkModel m = read_edge_list(in);
    if (m.n != num_agents) throw ConfigError("network.edge_list", "node count does not match the game");
    return m;
  }
  if (num_agents < 2) return complete_model(num_agents);
  return wrap("network", [&] {
    switch (s.mode) {
      case NetworkMode::Complete: return complete_model(num_agents);
      case NetworkMode::Single: {
        NetworkModel pool = erdos_renyi_pool(num_agents, 1, s.p_lo, s.p_hi, s.seed);
        return single_graph_model(pool.pool.front());
      }
      case NetworkMode::Fresh: return fresh_erdos_renyi_model(num_agents, s.p_lo, s.p_hi);
      case NetworkMode::Pool: break;
    }
    return erdos_renyi_pool(num_agents, s.pool_size, s.p_lo, s.p_hi, s.seed);
  });
}

}  // namespace dsanneal
