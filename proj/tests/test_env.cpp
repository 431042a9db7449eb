#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "env.hpp"
#include "error.hpp"
#include "texgen.hpp"

using namespace imgrl;

namespace {

/// Always plays one action and remembers every update it receives.
class FixedAgent final : public Agent {
 public:
  explicit FixedAgent(Action a) : action_(a) {}
  AgentKind kind() const noexcept override { return AgentKind::QLearn; }
  Action select(const AgentState&) override { return action_; }
  void update(const AgentState& s, Action, int, const std::optional<AgentState>& next) override {
    seen.push_back(s);
    nexts.push_back(next);
  }
  std::string snapshot() const override { return "fixed"; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<FixedAgent>(*this); }

  std::vector<AgentState> seen;
  std::vector<std::optional<AgentState>> nexts;

 private:
  Action action_;
};

/// Deterministic mix of every action, independent of rewards.
class ScriptedAgent final : public Agent {
 public:
  AgentKind kind() const noexcept override { return AgentKind::QLearn; }
  Action select(const AgentState& s) override { return static_cast<Action>((s.index() * 7 + calls_++) % 6); }
  void update(const AgentState&, Action, int, const std::optional<AgentState>&) override {}
  std::string snapshot() const override { return "scripted"; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<ScriptedAgent>(*this); }

 private:
  int calls_ = 0;
};

struct Fixture {
  std::vector<NamedRaster> originals;
  std::unique_ptr<SurrogateDetector> detector;
  OracleTable oracle;

  explicit Fixture(int n) {
    TexSpec spec;
    spec.count = n;
    spec.width = spec.height = 24;
    originals = generate_textures(spec);
    detector = std::make_unique<SurrogateDetector>(SurrogateConfig{}, originals);
    oracle = build_oracle_table(originals, *detector);
  }

  EnvConfig config(NoiseMix mix, bool prefetch = false, std::uint64_t seed = 3) const {
    EnvConfig c;
    c.stream.noise_mix = mix;
    c.stream.prefetch_next = prefetch;
    c.stream.seed = seed;
    c.sense.brightness_ref = oracle.brightness_ref;
    return c;
  }
};

}  // namespace

TEST_CASE("reward staircase") {
  CHECK(quantize_reward(0.68, 0.68) == 2);
  CHECK(quantize_reward(0.9, 0.68) == 2);
  CHECK(quantize_reward(0.64, 0.68) == 1);
  CHECK(2 + std::floor((0.64 - 0.68) / 0.05) == 1);
  CHECK(quantize_reward(0.10, 0.68) == -6);
  CHECK(2 + std::floor((0.10 - 0.68) / 0.05) == -10);
  CHECK(quantize_reward(0.0, 1.0) == -6);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double d = uniform01(rng);
    const double o = uniform01(rng);
    const int r = quantize_reward(d, o);
    CHECK(r >= -6);
    CHECK(r <= 2);
    CHECK(r == static_cast<int>(std::clamp(2.0 + std::floor((d - o) / 0.05), -6.0, 2.0)));
  }
  CHECK(RewardConfig{}.validate().empty());
  CHECK_FALSE(RewardConfig{0.0, -6, 2}.validate().empty());
  CHECK_FALSE(RewardConfig{0.05, 2, 2}.validate().empty());
}

TEST_CASE("noise sampling") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(sample_noise({1, 0, 0, 0}, rng) == NoiseKind::Blur);

  std::array<int, 4> counts{};
  std::mt19937_64 r2(42);
  for (int i = 0; i < 30000; ++i) ++counts[static_cast<int>(sample_noise(kDefaultNoiseMix, r2))];
  for (int k = 0; k < 3; ++k) CHECK(std::abs(counts[k] / 30000.0 - 1.0 / 3.0) <= 0.02);
  CHECK(counts[3] == 0);

  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 500; ++i) CHECK(sample_noise(kDefaultNoiseMix, a) == sample_noise(kDefaultNoiseMix, b));
  CHECK_FALSE(StreamConfig{{0, 0, 0, 0}}.validate().empty());
  CHECK_FALSE(StreamConfig{{1, -1, 0, 0}}.validate().empty());
}

TEST_CASE("clean stream with a do-nothing agent pays the cap") {
  Fixture fx(5);
  Environment env(fx.originals, fx.oracle, *fx.detector, fx.config({0, 0, 0, 1}));
  FixedAgent agent(Action::None);
  for (const auto& r : env.run_round(agent, 1)) {
    CHECK(r.denoise_pr == r.baseline_pr);
    CHECK(r.baseline_pr == r.oracle_pr);
    CHECK(r.reward == 2);
    CHECK(r.accurate);
  }
}

TEST_CASE("dark noise on one image with the exact inverse") {
  Fixture fx(1);
  Environment env(fx.originals, fx.oracle, *fx.detector, fx.config({0, 1, 0, 0}));
  FixedAgent agent(Action::StrongWhiten);
  const auto recs = env.run_round(agent, 1);
  REQUIRE(recs.size() == 1);
  const auto& o = fx.originals[0].image;
  const double e = rmse(apply_action(apply_noise(o, NoiseKind::Dark), Action::StrongWhiten), o);
  const double p = 0.1 + 0.58 * std::exp(-12.0 * e / 255.0);
  CHECK(recs[0].denoise_pr == doctest::Approx(p).epsilon(1e-12));
  if (p - 0.68 > -0.05) CHECK(recs[0].reward >= 1);
  CHECK(recs[0].reward == quantize_reward(p, 0.68));
  CHECK(recs[0].accurate);
}

TEST_CASE("prefetch hands the next sensed state and ends terminal") {
  Fixture fx(3);
  Environment env(fx.originals, fx.oracle, *fx.detector, fx.config(kDefaultNoiseMix, true));
  FixedAgent agent(Action::None);
  const auto recs = env.run_round(agent, 1);
  REQUIRE(recs.size() == 3);
  REQUIRE(recs[0].next_state.has_value());
  REQUIRE(recs[1].next_state.has_value());
  CHECK(*recs[0].next_state == recs[1].state);
  CHECK(*recs[1].next_state == recs[2].state);
  CHECK_FALSE(recs[2].next_state.has_value());
  CHECK(agent.nexts[0] == recs[0].next_state);
  CHECK_FALSE(agent.nexts[2].has_value());
}

TEST_CASE("prefetch does not change the stream") {
  Fixture fx(6);
  Environment with(fx.originals, fx.oracle, *fx.detector, fx.config(kDefaultNoiseMix, true));
  Environment without(fx.originals, fx.oracle, *fx.detector, fx.config(kDefaultNoiseMix, false));
  FixedAgent a(Action::Deblur), b(Action::Deblur);
  for (int round = 1; round <= 3; ++round) {
    const auto r1 = with.run_round(a, round);
    const auto r2 = without.run_round(b, round);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(format_log_row(r1[i]) == format_log_row(r2[i]));
  }
}

TEST_CASE("record invariants across rounds") {
  Fixture fx(8);
  Environment env(fx.originals, fx.oracle, *fx.detector, fx.config({1, 1, 1, 1}));
  ScriptedAgent agent;
  std::int64_t expected_iter = 0;
  for (int round = 1; round <= 4; ++round) {
    std::vector<IterationRecord> streamed;
    const auto recs = env.run_round(agent, round, [&](const IterationRecord& r) { streamed.push_back(r); });
    CHECK(recs.size() == fx.originals.size());
    CHECK(streamed.size() == recs.size());
    for (const auto& r : recs) {
      CHECK(r.round == round);
      CHECK(r.iter == ++expected_iter);
      CHECK(r.reward >= -6);
      CHECK(r.reward <= 2);
      CHECK(r.oracle_pr == fx.oracle.lookup(r.image));
      CHECK(r.accurate == is_counter_action(r.noise, r.action));
      for (double p : {r.baseline_pr, r.denoise_pr, r.oracle_pr}) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
      }
      if (r.action == Action::None) CHECK(r.denoise_pr == r.baseline_pr);
    }
  }
  CHECK(env.iterations() == expected_iter);
}

TEST_CASE("restoring actions raise the surrogate score") {
  Fixture fx(8);
  Environment env(fx.originals, fx.oracle, *fx.detector, fx.config(kDefaultNoiseMix));
  ScriptedAgent agent;
  std::map<std::string, Raster> by_name;
  for (const auto& o : fx.originals) by_name.emplace(o.name, o.image);
  for (int round = 1; round <= 3; ++round) {
    for (const auto& r : env.run_round(agent, round)) {
      const auto& o = by_name.at(r.image);
      const auto noisy = apply_noise(o, r.noise);
      if (rmse(apply_action(noisy, r.action), o) < rmse(noisy, o)) CHECK(r.denoise_pr > r.baseline_pr);
    }
  }
}

TEST_CASE("replay determinism") {
  Fixture fx(7);
  auto run = [&](std::uint64_t seed) {
    Environment env(fx.originals, fx.oracle, *fx.detector, fx.config(kDefaultNoiseMix, false, seed));
    ScriptedAgent agent;
    std::vector<IterationRecord> all;
    for (int round = 1; round <= 3; ++round) {
      auto r = env.run_round(agent, round);
      all.insert(all.end(), r.begin(), r.end());
    }
    return write_log_csv(all);
  };
  CHECK(run(11) == run(11));
  CHECK(run(11) != run(12));
}

TEST_CASE("missing oracle entries and detector failures") {
  Fixture fx(3);
  OracleTable partial = fx.oracle;
  partial.entries.erase(fx.originals[1].name);
  CHECK_THROWS_AS(Environment(fx.originals, partial, *fx.detector, fx.config(kDefaultNoiseMix)), Error);

  SurrogateDetector other({}, {fx.originals[0]});
  Environment env(fx.originals, fx.oracle, other, fx.config(kDefaultNoiseMix, false, 1));
  FixedAgent agent(Action::None);
  try {
    env.run_round(agent, 1);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownImage);
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("iteration log csv") {
  Fixture fx(4);
  Environment env(fx.originals, fx.oracle, *fx.detector, fx.config(kDefaultNoiseMix));
  ScriptedAgent agent;
  auto recs = env.run_round(agent, 1);
  const auto csv = write_log_csv(recs);
  CHECK(csv.rfind(std::string(kLogHeader) + "\n", 0) == 0);
  const auto back = read_log_csv(csv);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(format_log_row(back[i]) == format_log_row(recs[i]));
    CHECK(back[i].baseline_pr == recs[i].baseline_pr);
  }
  CHECK(read_log_csv(std::string(kLogHeader) + "\n").empty());
  try {
    read_log_csv(std::string(kLogHeader) + "\n" + format_log_row(recs[0]) + "\n1,2,x\n");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedLog);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(read_log_csv(""), Error);
  CHECK_THROWS_AS(read_log_csv("round,iter\n"), Error);
}
