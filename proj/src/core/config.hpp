#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "agents.hpp"
#include "detector.hpp"
#include "env.hpp"
#include "texgen.hpp"

namespace imgrl {

enum class DetectorKind { Surrogate, Remote };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::Surrogate;
  std::string url;
  double timeout_s = 30.0;
};

struct PathConfig {
  std::string images;
  std::string oracle;
  std::string log;
  std::string snapshot;
  /// Optional snapshot to continue from instead of a fresh agent.
  std::string resume;
};

/// Everything a run needs. Serialized as JSON with one object per section:
/// agent, reward, sense, filters, stream, detector, surrogate, texgen, paths,
/// plus top-level rounds, seed and lenient_accuracy.
struct RunConfig {
  AgentConfig agent;
  int rounds = 20;
  std::uint64_t seed = 1;
  bool lenient_accuracy = false;
  /// Take sense.brightness_ref from the oracle table rather than the config.
  bool brightness_ref_from_oracle = true;
  RewardConfig reward;
  SenseConfig sense;
  FilterParams filters;
  StreamConfig stream;
  DetectorConfig detector;
  SurrogateConfig surrogate;
  TexSpec texgen;
  PathConfig paths;

  /// Every violated invariant, in a stable order. Empty when valid.
  std::vector<std::string> validate() const;

  /// Stream and agent seeds derived from `seed`.
  std::uint64_t stream_seed() const noexcept;
  std::uint64_t agent_seed() const noexcept;

  /// Gamma > 0 Q-learning needs the next state.
  bool prefetch_next() const noexcept;

  EnvConfig env_config() const;
  AgentConfig agent_config() const;
};

/// Parses JSON text; unknown keys and wrong types are Config errors.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& cfg);

/// Applies one "section.key=value" (or "key=value" for top-level keys)
/// override; the value is parsed as JSON, falling back to a plain string.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Value at a dotted key: strings as-is, everything else as compact JSON.
std::string config_value(const RunConfig& cfg, std::string_view key);

}  // namespace imgrl
