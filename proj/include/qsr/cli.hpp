#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsr/registers.hpp"

namespace qsr {

inline constexpr const char* kReportSchema = "qsr-report/1";
inline constexpr const char* kArtifactVersion = "0.1.0";
/// Largest total Hilbert-space dimension a configured state may have.
inline constexpr Index kDimensionCap = 4096;

/// One experiment. Empty `dims` and `eps` take the command's defaults, which
/// normalize() fills in so that the echoed config is complete.
struct ExperimentConfig {
  std::string command;            // entropy | decouple | redistribute | converse | aep | sweep
  std::string state = "random";   // bell | product | ghz | random | file:<path>
  std::vector<Index> dims;        // per register, labelled A, B, C, R in order
  Index base = 2;                 // every dim must be a power of it
  std::vector<double> eps;
  std::uint64_t seed = 1;
  int samples = 1;
  int n_min = 1;
  int n_max = 4;
  std::string quantity = "hmin";  // entropy: h | i | hmin | hmax | imax
  std::string cond = "A|B";       // "X,Y|Z": measured side | conditioning side
  std::vector<Index> split;       // decouple: child dims of the first register
  Index env = 0;                  // decouple: purification rank of a random mixed state, 0 = full
  bool search = false;            // converse: also run the marginal-search I_max
  std::string format = "json";
  // presentation only, never echoed
  std::string out = "-";
  bool timings = false;
  int threads = 0;                // 0 = hardware concurrency
};

/// Echo form: every field except out, timings and threads. `n` is written as "a..b".
nlohmann::json to_json(const ExperimentConfig& c);
/// Strict: unknown keys and mistyped values raise ConfigError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Fills command defaults and checks every field; ConfigError on violation.
ExperimentConfig normalize(ExperimentConfig c);
/// Parses "a..b" or "b" (meaning 1..b).
std::pair<int, int> parse_range(const std::string& s);

struct Report {
  ExperimentConfig config;  // normalized
  nlohmann::json records = nlohmann::json::array();
  nlohmann::json aggregate = nlohmann::json::object();
  std::vector<std::string> csv_columns;
  std::vector<std::vector<std::string>> csv_rows;  // one per run
  std::optional<double> wall_seconds;
};

/// Deterministic in (config, seed); runs parallelize but merge in run order.
Report run(const ExperimentConfig& config);
nlohmann::json to_json(const Report& r);
/// "json" (two-space indent, trailing newline) or "csv" (header row first).
std::string render(const Report& r, const std::string& format);
/// Writes render(r, config.format) to config.out, or stdout for "-".
void emit(const Report& r);

/// The state a config describes, before any command-specific use.
QuantumState configured_state(const ExperimentConfig& c, std::uint64_t state_seed);

}  // namespace qsr
