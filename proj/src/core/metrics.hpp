#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "env.hpp"

namespace imgrl {

struct SeriesPoint {
  std::int64_t index = 0;
  double value = 0.0;
};

/// Prefix means: point k holds the mean of the first k observations (1-based).
struct RunningSeries {
  std::vector<SeriesPoint> points;

  double final_value() const { return points.empty() ? 0.0 : points.back().value; }
  /// Value at 1-based index k (the prefix mean of the first k observations).
  double at(std::int64_t k) const;
};

RunningSeries running_mean(std::span<const double> values);

enum class AccuracyMode { Logged, Strict, Lenient };

struct RoundSummary {
  int round = 0;
  double mean_reward = 0.0;
  double accuracy = 0.0;
  double mean_gap_baseline = 0.0;  ///< mean of denoise_pr - baseline_pr
  double mean_gap_oracle = 0.0;    ///< mean of denoise_pr - oracle_pr
  double mean_denoise_pr = 0.0;
  std::size_t count = 0;
};

bool record_accurate(const IterationRecord& r, AccuracyMode mode);

/// Records of exactly one round. Throws EmptyRound / InvalidParameter.
RoundSummary summarize_round(std::span<const IterationRecord> records, AccuracyMode mode = AccuracyMode::Logged);
/// Groups by round id in ascending order.
std::vector<RoundSummary> summarize_rounds(std::span<const IterationRecord> records,
                                           AccuracyMode mode = AccuracyMode::Logged);

/// Normal-approximation 95% interval: half_width = 1.96 s / sqrt(n), with s
/// the n-1 sample standard deviation; 0 when n == 1.
struct CIBand {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

CIBand ci_across_rounds(std::span<const double> values);

/// Per-iteration running reward and accuracy over a whole log.
std::pair<RunningSeries, RunningSeries> running_series(std::span<const IterationRecord> records,
                                                       AccuracyMode mode = AccuracyMode::Logged);

/// round,mean_reward,accuracy,gap_baseline,gap_oracle; one row per round and a
/// final "ci95" row whose cells read "<mean>+-<half_width>".
std::string export_summary(std::span<const IterationRecord> records, AccuracyMode mode = AccuracyMode::Logged);

/// iter,running_reward,running_accuracy
std::string export_series(std::span<const IterationRecord> records, AccuracyMode mode = AccuracyMode::Logged);

struct LabeledLog {
  std::string label;
  std::vector<IterationRecord> records;
};

/// Side-by-side running series keyed by iteration:
/// iter,<label>_running_reward,<label>_running_accuracy,... Shorter logs leave
/// their cells empty past their end.
std::string export_comparison(std::span<const LabeledLog> logs, AccuracyMode mode = AccuracyMode::Logged);

/// Cross-run band per iteration over equally long logs (re-seeded runs):
/// iter,reward_mean,reward_ci,accuracy_mean,accuracy_ci
std::string export_run_bands(std::span<const LabeledLog> logs, AccuracyMode mode = AccuracyMode::Logged);

}  // namespace imgrl
