#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "agents.hpp"
#include "detector.hpp"
#include "filters.hpp"
#include "sensing.hpp"

namespace imgrl {

struct RewardConfig {
  double pd = 0.05;
  int floor = -6;
  int cap = 2;

  std::vector<std::string> validate() const;
};

/// Staircase in pd steps anchored at `cap` for denoise_pr >= oracle_pr:
///   clamp(cap + floor((denoise_pr - oracle_pr) / pd), floor, cap)
int quantize_reward(double denoise_pr, double oracle_pr, const RewardConfig& cfg = {});

/// Sampling weights indexed by NoiseKind (Blur, Dark, White, Clean).
using NoiseMix = std::array<double, kNoiseKindCount>;

inline constexpr NoiseMix kDefaultNoiseMix = {1.0, 1.0, 1.0, 0.0};

struct StreamConfig {
  NoiseMix noise_mix = kDefaultNoiseMix;
  bool shuffle = true;
  std::uint64_t seed = 1;
  bool prefetch_next = false;

  std::vector<std::string> validate() const;
};

NoiseKind sample_noise(const NoiseMix& mix, std::mt19937_64& rng);

struct IterationRecord {
  int round = 0;
  std::int64_t iter = 0;
  std::string image;
  NoiseKind noise = NoiseKind::Clean;
  AgentState state;
  Action action = Action::None;
  int reward = 0;
  double baseline_pr = 0.0;
  double denoise_pr = 0.0;
  double oracle_pr = 0.0;
  bool accurate = false;
  /// Prefetched next state handed to the agent; nullopt when terminal. Not logged.
  std::optional<AgentState> next_state;
};

using RecordSink = std::function<void(const IterationRecord&)>;

struct EnvConfig {
  FilterParams filters;
  SenseConfig sense;
  RewardConfig reward;
  StreamConfig stream;
  bool lenient_accuracy = false;
};

/// The online loop: noise injection, state sensing, action application,
/// detector scoring and reward emission for each image of a round.
class Environment {
 public:
  Environment(std::vector<NamedRaster> originals, OracleTable oracle, const Detector& detector, EnvConfig cfg);

  /// One pass over every original (shuffled when configured). Records are
  /// passed to `sink` as they are produced and also returned.
  std::vector<IterationRecord> run_round(Agent& agent, int round, const RecordSink& sink = {});

  const EnvConfig& config() const noexcept { return cfg_; }
  const std::vector<NamedRaster>& originals() const noexcept { return originals_; }
  std::int64_t iterations() const noexcept { return iter_; }

 private:
  std::vector<NamedRaster> originals_;
  OracleTable oracle_;
  const Detector& detector_;
  EnvConfig cfg_;
  std::mt19937_64 rng_;
  std::int64_t iter_ = 0;
};

inline constexpr std::string_view kLogHeader =
    "round,iter,image,noise,state_index,action,reward,baseline_pr,denoise_pr,oracle_pr,accurate";

std::string format_log_row(const IterationRecord& r);
/// Header plus one row per record.
std::string write_log_csv(const std::vector<IterationRecord>& records);
/// Throws MalformedLog naming the offending line.
std::vector<IterationRecord> read_log_csv(std::string_view text);
std::vector<IterationRecord> load_log(const std::filesystem::path& path);

}  // namespace imgrl
