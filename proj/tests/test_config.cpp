#include <doctest.h>

#include <string>

#include "config.hpp"
#include "error.hpp"

using namespace imgrl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an imgrl::Error");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("defaults are valid and dump round trips") {
  const RunConfig def;
  CHECK(def.validate().empty());
  const auto text = dump_config(def);
  CHECK(dump_config(parse_config(text)) == text);
  CHECK(dump_config(parse_config("{}")) == text);
}

TEST_CASE("partial configs overlay the defaults") {
  const auto c = parse_config(R"({"agent": {"kind": "linucb", "alpha": 0.5}, "rounds": 3,
                                  "stream": {"noise_mix": {"clean": 1.0}}})");
  CHECK(c.agent.kind == AgentKind::LinUCB);
  CHECK(c.agent.alpha == 0.5);
  CHECK(c.agent.eta == 0.002);
  CHECK(c.rounds == 3);
  CHECK(c.stream.noise_mix == NoiseMix{1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("unknown keys, wrong types and bad json are config errors") {
  CHECK(code_of([] { parse_config(R"({"agnet": {}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config(R"({"agent": {"temperature": 1}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config(R"({"rounds": "ten"})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config(R"({"rounds": 2.5})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config(R"({"agent": {"kind": "dqn"}})"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config("{"); }) == ErrorCode::Config);
  CHECK(code_of([] { parse_config("[]"); }) == ErrorCode::Config);
  CHECK(code_of([] { load_config("/nonexistent/imgrl.json"); }) == ErrorCode::Config);
}

TEST_CASE("validation enumerates every violation") {
  RunConfig c;
  c.rounds = 0;
  c.agent.gamma = 1.5;
  c.reward.pd = 0.0;
  c.sense.tertile_lo = 200.0;
  c.detector.kind = DetectorKind::Remote;
  const auto errs = c.validate();
  CHECK(errs.size() >= 5);
  CHECK(errs.front() == "rounds must be >= 1");
}

TEST_CASE("overrides") {
  RunConfig c;
  apply_override(c, "agent.kind=linucb");
  apply_override(c, "agent.epsilon=0.25");
  apply_override(c, "rounds=7");
  apply_override(c, "paths.log=out/run.csv");
  apply_override(c, "stream.noise_mix.clean=0.5");
  CHECK(c.agent.kind == AgentKind::LinUCB);
  CHECK(c.agent.epsilon == 0.25);
  CHECK(c.rounds == 7);
  CHECK(c.paths.log == "out/run.csv");
  CHECK(c.stream.noise_mix[3] == 0.5);
  CHECK(config_value(c, "agent.kind") == "linucb");
  CHECK(config_value(c, "rounds") == "7");
  CHECK(config_value(c, "paths.log") == "out/run.csv");
  CHECK(code_of([&] { config_value(c, "agent.nope"); }) == ErrorCode::Config);
  CHECK(code_of([&] { apply_override(c, "agent.nope=1"); }) == ErrorCode::Config);
  CHECK(code_of([&] { apply_override(c, "rounds"); }) == ErrorCode::Config);
  CHECK(code_of([&] { apply_override(c, "=3"); }) == ErrorCode::Config);
  CHECK(code_of([&] { apply_override(c, "rounds=many"); }) == ErrorCode::Config);
  CHECK(code_of([&] { apply_override(c, "agent.kind=dqn"); }) == ErrorCode::Config);
  CHECK(c.rounds == 7);
}

TEST_CASE("seed derivation and prefetch") {
  RunConfig c;
  c.seed = 5;
  CHECK(c.stream_seed() == 5);
  CHECK(c.agent_seed() != 5);
  CHECK(c.agent_config().seed == c.agent_seed());
  CHECK(c.env_config().stream.seed == 5);
  RunConfig d = c;
  d.seed = 6;
  CHECK(d.agent_seed() != c.agent_seed());

  CHECK_FALSE(c.prefetch_next());
  c.agent.gamma = 0.9;
  CHECK(c.prefetch_next());
  CHECK(c.env_config().stream.prefetch_next);
  c.agent.kind = AgentKind::LinUCB;
  CHECK_FALSE(c.prefetch_next());
  c.stream.prefetch_next = true;
  CHECK(c.prefetch_next());
}
