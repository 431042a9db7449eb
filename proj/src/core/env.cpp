#include "env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "textio.hpp"

namespace imgrl {

std::vector<std::string> RewardConfig::validate() const {
  std::vector<std::string> errs;
  if (!(std::isfinite(pd) && pd > 0.0)) errs.push_back("reward.pd must be > 0");
  if (!(floor < cap)) errs.push_back("reward: require floor < cap");
  return errs;
}

int quantize_reward(double denoise_pr, double oracle_pr, const RewardConfig& cfg) {
  const double steps = std::floor((denoise_pr - oracle_pr) / cfg.pd);
  const double r = std::clamp(static_cast<double>(cfg.cap) + steps, static_cast<double>(cfg.floor),
                              static_cast<double>(cfg.cap));
  return static_cast<int>(r);
}

std::vector<std::string> StreamConfig::validate() const {
  std::vector<std::string> errs;
  double total = 0.0;
  for (double w : noise_mix) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      errs.push_back("stream.noise_mix weights must be finite and >= 0");
      return errs;
    }
    total += w;
  }
  if (total <= 0.0) errs.push_back("stream.noise_mix weights must not all be zero");
  return errs;
}

NoiseKind sample_noise(const NoiseMix& mix, std::mt19937_64& rng) {
  const double total = std::accumulate(mix.begin(), mix.end(), 0.0);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  int last = 0;
  for (int k = 0; k < kNoiseKindCount; ++k) {
    if (mix[k] <= 0.0) continue;
    acc += mix[k];
    last = k;
    if (u < acc) return static_cast<NoiseKind>(k);
  }
  return static_cast<NoiseKind>(last);
}

Environment::Environment(std::vector<NamedRaster> originals, OracleTable oracle, const Detector& detector,
                         EnvConfig cfg)
    : originals_(std::move(originals)),
      oracle_(std::move(oracle)),
      detector_(detector),
      cfg_(cfg),
      rng_(cfg.stream.seed) {
  if (originals_.empty()) throw Error(ErrorCode::InvalidParameter, "environment needs at least one image");
  for (const auto& o : originals_) oracle_.lookup(o.name);
}

std::vector<IterationRecord> Environment::run_round(Agent& agent, int round, const RecordSink& sink) {
  const std::size_t n = originals_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg_.stream.shuffle) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng_, i + 1)]);
  }
  // Noise for the whole round is drawn up front so the stream does not depend
  // on prefetching or on the agent.
  std::vector<NoiseKind> kinds(n);
  for (auto& k : kinds) k = sample_noise(cfg_.stream.noise_mix, rng_);

  auto noisy_at = [&](std::size_t pos) { return apply_noise(originals_[order[pos]].image, kinds[pos], cfg_.filters); };

  std::vector<IterationRecord> records;
  records.reserve(n);
  std::optional<Raster> prefetched;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto& original = originals_[order[pos]];
    IterationRecord rec;
    rec.round = round;
    rec.iter = ++iter_;
    rec.image = original.name;
    rec.noise = kinds[pos];
    try {
      Raster noisy = prefetched ? std::move(*prefetched) : noisy_at(pos);
      prefetched.reset();
      rec.state = sense_state(noisy, cfg_.sense);
      rec.oracle_pr = oracle_.lookup(original.name);
      rec.baseline_pr = score(detector_, noisy, original.name);
      rec.action = agent.select(rec.state);
      if (rec.action == Action::None) {
        rec.denoise_pr = rec.baseline_pr;
      } else {
        rec.denoise_pr = score(detector_, apply_action(noisy, rec.action, cfg_.filters), original.name);
      }
      rec.reward = quantize_reward(rec.denoise_pr, rec.oracle_pr, cfg_.reward);
      rec.accurate = is_counter_action(rec.noise, rec.action, cfg_.lenient_accuracy);
      if (cfg_.stream.prefetch_next && pos + 1 < n) {
        prefetched = noisy_at(pos + 1);
        rec.next_state = sense_state(*prefetched, cfg_.sense);
      }
      agent.update(rec.state, rec.action, rec.reward, rec.next_state);
    } catch (const Error& e) {
      throw Error(e.code(), "round " + std::to_string(round) + " iteration " + std::to_string(rec.iter) + " (" +
                                original.name + "): " + e.what());
    }
    if (sink) sink(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

// --- log CSV -----------------------------------------------------------------

std::string format_log_row(const IterationRecord& r) {
  std::string row;
  row += std::to_string(r.round) + "," + std::to_string(r.iter) + "," + r.image + ",";
  row += std::string(to_string(r.noise)) + "," + std::to_string(r.state.index()) + ",";
  row += std::string(to_string(r.action)) + "," + std::to_string(r.reward) + ",";
  row += text::exact(r.baseline_pr) + "," + text::exact(r.denoise_pr) + "," + text::exact(r.oracle_pr) + ",";
  row += r.accurate ? "1" : "0";
  return row;
}

std::string write_log_csv(const std::vector<IterationRecord>& records) {
  std::string out(kLogHeader);
  out += "\n";
  for (const auto& r : records) out += format_log_row(r) + "\n";
  return out;
}

std::vector<IterationRecord> read_log_csv(std::string_view csv) {
  const auto rows = text::lines(csv);
  if (rows.empty()) throw Error(ErrorCode::MalformedLog, "line 1: empty log");
  if (rows[0] != kLogHeader) throw Error(ErrorCode::MalformedLog, "line 1: unexpected header");
  std::vector<IterationRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    auto bad = [&](const char* what) {
      return Error(ErrorCode::MalformedLog, "line " + std::to_string(i + 1) + ": " + what);
    };
    const auto cols = text::split(rows[i], ',');
    if (cols.size() != 11) throw bad("expected 11 columns");
    IterationRecord r;
    const auto round = text::parse_int(cols[0]);
    const auto iter = text::parse_int(cols[1]);
    const auto noise = parse_noise_kind(cols[3]);
    const auto state = text::parse_int(cols[4]);
    const auto action = parse_action(cols[5]);
    const auto reward = text::parse_int(cols[6]);
    const auto base = text::parse_double(cols[7]);
    const auto den = text::parse_double(cols[8]);
    const auto orc = text::parse_double(cols[9]);
    if (!round || !iter) throw bad("bad round/iter");
    if (cols[2].empty()) throw bad("empty image name");
    if (!noise) throw bad("unknown noise kind");
    if (!state || *state < 0 || *state >= kStateCount) throw bad("bad state index");
    if (!action) throw bad("unknown action");
    if (!reward) throw bad("bad reward");
    if (!base || !den || !orc) throw bad("bad probability");
    if (cols[10] != "0" && cols[10] != "1") throw bad("accurate must be 0 or 1");
    r.round = static_cast<int>(*round);
    r.iter = *iter;
    r.image = std::string(cols[2]);
    r.noise = *noise;
    r.state = AgentState::from_index(static_cast<int>(*state));
    r.action = *action;
    r.reward = static_cast<int>(*reward);
    r.baseline_pr = *base;
    r.denoise_pr = *den;
    r.oracle_pr = *orc;
    r.accurate = cols[10] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<IterationRecord> load_log(const std::filesystem::path& path) {
  try {
    return read_log_csv(text::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace imgrl
