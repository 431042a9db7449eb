#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "error.hpp"
#include "textio.hpp"

namespace imgrl {

namespace {

constexpr double kZ95 = 1.96;

std::string ci_cell(const CIBand& b) { return text::fixed(b.mean, 6) + "+-" + text::fixed(b.half_width, 6); }

}  // namespace

double RunningSeries::at(std::int64_t k) const {
  if (k < 1 || k > static_cast<std::int64_t>(points.size())) {
    throw Error(ErrorCode::IndexOutOfRange, "series index " + std::to_string(k) + " out of range");
  }
  return points[static_cast<std::size_t>(k - 1)].value;
}

RunningSeries running_mean(std::span<const double> values) {
  RunningSeries s;
  s.points.reserve(values.size());
  double m = 0.0;
  std::int64_t k = 0;
  for (double v : values) {
    ++k;
    m += (v - m) / static_cast<double>(k);
    s.points.push_back({k, m});
  }
  return s;
}

bool record_accurate(const IterationRecord& r, AccuracyMode mode) {
  switch (mode) {
    case AccuracyMode::Logged: return r.accurate;
    case AccuracyMode::Strict: return is_counter_action(r.noise, r.action, false);
    case AccuracyMode::Lenient: return is_counter_action(r.noise, r.action, true);
  }
  return r.accurate;
}

RoundSummary summarize_round(std::span<const IterationRecord> records, AccuracyMode mode) {
  if (records.empty()) throw Error(ErrorCode::EmptyRound, "cannot summarize an empty round");
  RoundSummary s;
  s.round = records.front().round;
  double reward = 0.0;
  double accurate = 0.0;
  double gap_b = 0.0;
  double gap_o = 0.0;
  double den = 0.0;
  for (const auto& r : records) {
    if (r.round != s.round) {
      throw Error(ErrorCode::InvalidParameter, "summarize_round: records span rounds " + std::to_string(s.round) +
                                                   " and " + std::to_string(r.round));
    }
    reward += r.reward;
    accurate += record_accurate(r, mode) ? 1.0 : 0.0;
    gap_b += r.denoise_pr - r.baseline_pr;
    gap_o += r.denoise_pr - r.oracle_pr;
    den += r.denoise_pr;
  }
  const double n = static_cast<double>(records.size());
  s.count = records.size();
  s.mean_reward = reward / n;
  s.accuracy = accurate / n;
  s.mean_gap_baseline = gap_b / n;
  s.mean_gap_oracle = gap_o / n;
  s.mean_denoise_pr = den / n;
  return s;
}

std::vector<RoundSummary> summarize_rounds(std::span<const IterationRecord> records, AccuracyMode mode) {
  std::map<int, std::vector<IterationRecord>> by_round;
  for (const auto& r : records) by_round[r.round].push_back(r);
  std::vector<RoundSummary> out;
  out.reserve(by_round.size());
  for (const auto& [round, recs] : by_round) out.push_back(summarize_round(recs, mode));
  return out;
}

CIBand ci_across_rounds(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidParameter, "confidence interval needs at least one value");
  CIBand b;
  b.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  b.mean = sum / static_cast<double>(b.n);
  if (b.n == 1) return b;
  double ss = 0.0;
  for (double v : values) ss += (v - b.mean) * (v - b.mean);
  const double s = std::sqrt(ss / static_cast<double>(b.n - 1));
  b.half_width = kZ95 * s / std::sqrt(static_cast<double>(b.n));
  return b;
}

std::pair<RunningSeries, RunningSeries> running_series(std::span<const IterationRecord> records, AccuracyMode mode) {
  std::vector<double> rewards;
  std::vector<double> hits;
  rewards.reserve(records.size());
  hits.reserve(records.size());
  for (const auto& r : records) {
    rewards.push_back(r.reward);
    hits.push_back(record_accurate(r, mode) ? 1.0 : 0.0);
  }
  return {running_mean(rewards), running_mean(hits)};
}

std::string export_summary(std::span<const IterationRecord> records, AccuracyMode mode) {
  std::string out = "round,mean_reward,accuracy,gap_baseline,gap_oracle\n";
  if (records.empty()) return out;
  const auto rounds = summarize_rounds(records, mode);
  std::vector<double> reward, acc, gap_b, gap_o;
  for (const auto& s : rounds) {
    out += std::to_string(s.round) + "," + text::fixed(s.mean_reward, 6) + "," + text::fixed(s.accuracy, 6) + "," +
           text::fixed(s.mean_gap_baseline, 6) + "," + text::fixed(s.mean_gap_oracle, 6) + "\n";
    reward.push_back(s.mean_reward);
    acc.push_back(s.accuracy);
    gap_b.push_back(s.mean_gap_baseline);
    gap_o.push_back(s.mean_gap_oracle);
  }
  out += "ci95," + ci_cell(ci_across_rounds(reward)) + "," + ci_cell(ci_across_rounds(acc)) + "," +
         ci_cell(ci_across_rounds(gap_b)) + "," + ci_cell(ci_across_rounds(gap_o)) + "\n";
  return out;
}

std::string export_series(std::span<const IterationRecord> records, AccuracyMode mode) {
  const auto [reward, acc] = running_series(records, mode);
  std::string out = "iter,running_reward,running_accuracy\n";
  for (std::size_t i = 0; i < reward.points.size(); ++i) {
    out += std::to_string(reward.points[i].index) + "," + text::fixed(reward.points[i].value, 6) + "," +
           text::fixed(acc.points[i].value, 6) + "\n";
  }
  return out;
}

std::string export_comparison(std::span<const LabeledLog> logs, AccuracyMode mode) {
  std::string out = "iter";
  std::vector<std::pair<RunningSeries, RunningSeries>> series;
  std::size_t longest = 0;
  for (const auto& log : logs) {
    out += "," + log.label + "_running_reward," + log.label + "_running_accuracy";
    series.push_back(running_series(log.records, mode));
    longest = std::max(longest, log.records.size());
  }
  out += "\n";
  for (std::size_t i = 0; i < longest; ++i) {
    out += std::to_string(i + 1);
    for (const auto& [reward, acc] : series) {
      if (i < reward.points.size()) {
        out += "," + text::fixed(reward.points[i].value, 6) + "," + text::fixed(acc.points[i].value, 6);
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

std::string export_run_bands(std::span<const LabeledLog> logs, AccuracyMode mode) {
  if (logs.empty()) throw Error(ErrorCode::InvalidParameter, "run bands need at least one log");
  std::vector<std::pair<RunningSeries, RunningSeries>> series;
  std::size_t shortest = logs.front().records.size();
  for (const auto& log : logs) {
    series.push_back(running_series(log.records, mode));
    shortest = std::min(shortest, log.records.size());
  }
  std::string out = "iter,reward_mean,reward_ci,accuracy_mean,accuracy_ci\n";
  std::vector<double> rv(series.size());
  std::vector<double> av(series.size());
  for (std::size_t i = 0; i < shortest; ++i) {
    for (std::size_t k = 0; k < series.size(); ++k) {
      rv[k] = series[k].first.points[i].value;
      av[k] = series[k].second.points[i].value;
    }
    const auto rb = ci_across_rounds(rv);
    const auto ab = ci_across_rounds(av);
    out += std::to_string(i + 1) + "," + text::fixed(rb.mean, 6) + "," + text::fixed(rb.half_width, 6) + "," +
           text::fixed(ab.mean, 6) + "," + text::fixed(ab.half_width, 6) + "\n";
  }
  return out;
}

}  // namespace imgrl
