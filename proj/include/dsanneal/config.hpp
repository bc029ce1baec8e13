#pragma once

#include "dsanneal/game.hpp"
#include "dsanneal/noise.hpp"
#include "dsanneal/schedule.hpp"
#include "dsanneal/topology.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsanneal {

enum class Method { Daa, Daag, Centralized };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// Field-level configuration error; `field` is the dotted JSON path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GameSpec {
  std::string name = "example1";  // example1 | ev-charging | double-well
  std::uint64_t seed = 1;
  double coef_lo = 5.0, coef_hi = 40.0;
  double lambda_lo = 0.0, lambda_hi = 2.0;
  double tilt = 0.25;
  double init_lo = -5.0, init_hi = 5.0;
  std::optional<std::vector<double>> init_point;  // joint start, overrides the box
  double planted_gradient_offset = 0.0;           // checker self-test only
};

struct NetworkSpec {
  NetworkMode mode = NetworkMode::Pool;
  int pool_size = 50;
  double p_lo = 0.1, p_hi = 0.2;
  std::uint64_t seed = 7;
  std::optional<std::string> edge_list;  // pool loaded from file instead of generated
};

struct OracleSpec {
  std::string method = "auto";  // auto | grid | multistart
  double box_lo = -5.0, box_hi = 5.0;
  double resolution = 0.01;
  int starts = 200;
  int budget = 5000;
  std::uint64_t seed = 11;
};

struct ExperimentConfig {
  std::string name = "experiment";
  GameSpec game;
  NetworkSpec network;
  Method method = Method::Daa;
  std::vector<Method> compare = {Method::Daa, Method::Daag};
  ScheduleSet schedule;
  NoiseModel noise;
  long long horizon = 1000;
  long long record_stride = 1;
  int replicates = 20;
  std::uint64_t seed = 1;
  double tau = 0.2;            // consensus diagnostic weight exponent
  double tail_fraction = 0.1;  // final window for tail averages and costs
  std::optional<std::vector<double>> reference;  // joint point for basin fractions
  double basin_radius = 0.2;
  OracleSpec oracle;
  std::string output_dir = "out";

  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads, parses and validates. Syntax and schema problems raise ConfigError;
/// an unreadable file raises std::ios_base::failure.
ExperimentConfig load_config(const std::string& path);

/// 16-hex-digit FNV-1a hash of the canonical JSON form.
std::string config_fingerprint(const ExperimentConfig& cfg);

/// Instantiate the game and network described by a config.
GamePtr make_game(const ExperimentConfig& cfg);
NetworkModel make_network(const ExperimentConfig& cfg, int num_agents);

}  // namespace dsanneal
