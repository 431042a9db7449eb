#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "agents.hpp"
#include "error.hpp"

using namespace imgrl;

namespace {

Vec5 random_context(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec5 x;
  x(0) = 1.0;
  for (int i = 1; i < kFeatureDim; ++i) x(i) = u(rng);
  return x;
}

/// Ridge solution from raw history via QR on the augmented system [X; I] theta = [r; 0].
Vec5 ridge_oracle(const std::vector<Vec5>& xs, const std::vector<double>& rs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n + kFeatureDim, kFeatureDim);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(n + kFeatureDim);
  for (Eigen::Index i = 0; i < n; ++i) {
    design.row(i) = xs[i].transpose();
    target(i) = rs[i];
  }
  design.bottomRows(kFeatureDim) = Mat5::Identity();
  return design.colPivHouseholderQr().solve(target);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

AgentState random_state(std::mt19937_64& rng) {
  return AgentState::from_index(static_cast<int>(uniform_index(rng, kStateCount)));
}

}  // namespace

TEST_CASE("agent kinds and config validation") {
  CHECK(parse_agent_kind("linucb") == AgentKind::LinUCB);
  CHECK(parse_agent_kind("qlearn") == AgentKind::QLearn);
  CHECK_FALSE(parse_agent_kind("dqn").has_value());
  CHECK(AgentConfig{}.validate().empty());
  AgentConfig c;
  c.gamma = 1.0;
  CHECK_FALSE(c.validate().empty());
  c = {};
  c.eta = 0.0;
  CHECK_FALSE(c.validate().empty());
  c = {};
  c.epsilon = 1.5;
  CHECK_FALSE(c.validate().empty());
  c = {};
  c.alpha = -1.0;
  CHECK_FALSE(c.validate().empty());
  CHECK_THROWS_AS(make_agent(c), Error);
}

TEST_CASE("uniform draws") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(uniform_index(rng, 6) < 6);
  }
  std::mt19937_64 a(1);
  CHECK(uniform01(a) == static_cast<double>(std::mt19937_64(1)() >> 11) * 0x1.0p-53);
}

TEST_CASE("fresh linucb ties break to none") {
  LinUCBAgent agent(1.0);
  for (int i = 0; i < kStateCount; ++i) {
    const auto s = AgentState::from_index(i);
    const auto x = to_vec5(feature_vector(s));
    for (double p : agent.scores(x)) CHECK(p == doctest::Approx(x.norm()).epsilon(1e-15));
    CHECK(agent.select(s) == Action::None);
  }
}

TEST_CASE("linucb score after one update matches an explicit inverse") {
  LinUCBAgent agent(1.0);
  const AgentState s{1, -1, 2, 0};
  const auto x = to_vec5(feature_vector(s));
  agent.update(s, Action::Deblur, 2, std::nullopt);
  const Mat5 A = Mat5::Identity() + x * x.transpose();
  const Vec5 b = 2.0 * x;
  CHECK(agent.design(Action::Deblur).isApprox(A, 0.0));
  CHECK(agent.response(Action::Deblur) == b);
  const Mat5 inv = A.inverse();
  const Vec5 theta_lu = A.fullPivLu().solve(b);
  const double p1 = theta_lu.dot(x) + std::sqrt(x.dot(inv * x));
  CHECK(agent.scores(x)[1] == doctest::Approx(p1).epsilon(1e-12));
  CHECK(agent.scores(x)[0] == doctest::Approx(x.norm()).epsilon(1e-15));
  CHECK(agent.select(s) == Action::Deblur);
}

TEST_CASE("linucb update algebra") {
  LinUCBAgent agent(1.0);
  std::mt19937_64 rng(2);
  const auto x = random_context(rng);
  agent.update_features(x, Action::WeakDarken, 0.0);
  CHECK(agent.response(Action::WeakDarken) == Vec5::Zero());
  CHECK(agent.design(Action::WeakDarken).isApprox(Mat5::Identity() + x * x.transpose(), 1e-15));

  LinUCBAgent pair(1.0);
  pair.update_features(x, Action::StrongWhiten, 1.0);
  pair.update_features(-x, Action::StrongWhiten, 1.0);
  CHECK(pair.response(Action::StrongWhiten).norm() == doctest::Approx(0.0));
  CHECK(pair.design(Action::StrongWhiten).isApprox(Mat5::Identity() + 2.0 * x * x.transpose(), 1e-15));
  for (auto a : kAllActions) {
    if (a == Action::StrongWhiten) continue;
    CHECK(pair.design(a) == Mat5::Identity());
    CHECK(pair.response(a) == Vec5::Zero());
  }
}

TEST_CASE("linucb theta matches the ridge oracle after 1000 updates per arm") {
  LinUCBAgent agent(1.0);
  std::mt19937_64 rng(17);
  std::array<std::vector<Vec5>, kActionCount> xs;
  std::array<std::vector<double>, kActionCount> rs;
  for (int t = 0; t < 1000 * kActionCount; ++t) {
    const auto a = static_cast<Action>(t % kActionCount);
    const auto x = random_context(rng);
    const double r = static_cast<double>(static_cast<int>(uniform_index(rng, 9)) - 6);
    agent.update_features(x, a, r);
    xs[ordinal(a)].push_back(x);
    rs[ordinal(a)].push_back(r);
  }
  for (auto a : kAllActions) {
    const Vec5 oracle = ridge_oracle(xs[ordinal(a)], rs[ordinal(a)]);
    CHECK((agent.theta(a) - oracle).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("linucb with zero alpha is greedy and selection is pure") {
  LinUCBAgent agent(0.0);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 300; ++t) {
    const auto s = random_state(rng);
    agent.update(s, static_cast<Action>(uniform_index(rng, kActionCount)),
                 static_cast<int>(uniform_index(rng, 9)) - 6, std::nullopt);
  }
  for (int i = 0; i < kStateCount; ++i) {
    const auto s = AgentState::from_index(i);
    const auto x = to_vec5(feature_vector(s));
    int best = 0;
    for (int a = 1; a < kActionCount; ++a) {
      if (agent.theta(static_cast<Action>(a)).dot(x) > agent.theta(static_cast<Action>(best)).dot(x)) best = a;
    }
    const auto before = agent.snapshot();
    CHECK(agent.select(s) == static_cast<Action>(best));
    CHECK(agent.select(s) == static_cast<Action>(best));
    CHECK(agent.snapshot() == before);
  }
}

TEST_CASE("q selection") {
  AgentConfig cfg;
  cfg.epsilon = 0.0;
  QTableAgent q(cfg);
  const AgentState s{0, 1, 2, 1};
  CHECK(q.select(s) == Action::None);
  q.set_q(s, Action::Deblur, 1.0);
  CHECK(q.select(s) == Action::Deblur);
  q.set_q(s, Action::StrongDarken, 1.0);
  CHECK(q.select(s) == Action::Deblur);

  cfg.epsilon = 1.0;
  cfg.seed = 21;
  QTableAgent explorer(cfg);
  std::array<int, kActionCount> counts{};
  for (int i = 0; i < 60000; ++i) ++counts[ordinal(explorer.select(s))];
  for (int c : counts) CHECK(std::abs(c / 60000.0 - 1.0 / 6.0) <= 0.02);
}

TEST_CASE("epsilon decays linearly to the floor") {
  AgentConfig cfg;
  cfg.epsilon = 0.2;
  cfg.epsilon_min = 0.01;
  cfg.epsilon_decay_steps = 100;
  QTableAgent q(cfg);
  CHECK(q.current_epsilon() == 0.2);
  for (int i = 0; i < 50; ++i) q.select({});
  CHECK(q.current_epsilon() == doctest::Approx(0.105));
  for (int i = 0; i < 60; ++i) q.select({});
  CHECK(q.current_epsilon() == 0.01);
  CHECK(q.steps() == 110);
}

TEST_CASE("q update examples") {
  AgentConfig cfg;
  QTableAgent q(cfg);
  const AgentState s{2, 0, 1, 1};
  q.update(s, Action::Deblur, 2, std::nullopt);
  CHECK(q.q(s, Action::Deblur) == doctest::Approx(0.004).epsilon(1e-15));

  cfg.gamma = 0.9;
  cfg.eta = 0.5;
  QTableAgent g(cfg);
  CHECK(g.uses_next_state());
  g.update(s, Action::WeakWhiten, 1, AgentState{0, 0, 0, 0});
  CHECK(g.q(s, Action::WeakWhiten) == 0.5);
  g.set_q({0, 0, 0, 0}, Action::None, 2.0);
  g.update(s, Action::WeakWhiten, 1, AgentState{0, 0, 0, 0});
  CHECK(g.q(s, Action::WeakWhiten) == doctest::Approx(0.5 + 0.5 * (1.0 + 0.9 * 2.0 - 0.5)));
  const double before = g.q(s, Action::Deblur);
  g.update(s, Action::Deblur, -6, std::nullopt);
  CHECK(g.q(s, Action::Deblur) == QTableAgent::one_step_update(before, -6.0, 0.5));
}

TEST_CASE("zero discount reduces bit-for-bit to the one-step update") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> qd(-6.0, 2.0), md(-50.0, 50.0), ed(1e-6, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double q = qd(rng);
    const double r = static_cast<double>(static_cast<int>(uniform_index(rng, 9)) - 6);
    const double m = md(rng);
    const double eta = ed(rng);
    CHECK(same_bits(QTableAgent::bootstrapped_update(q, r, 0.0, m, eta), QTableAgent::one_step_update(q, r, eta)));
  }

  AgentConfig cfg;
  QTableAgent with_next(cfg), terminal(cfg);
  std::mt19937_64 r2(5);
  for (int i = 0; i < 20000; ++i) {
    const auto s = random_state(r2);
    const auto a = static_cast<Action>(uniform_index(r2, kActionCount));
    const int r = static_cast<int>(uniform_index(r2, 9)) - 6;
    with_next.update(s, a, r, random_state(r2));
    terminal.update(s, a, r, std::nullopt);
  }
  CHECK(with_next.snapshot() == terminal.snapshot());
}

TEST_CASE("q entries stay within the reward range") {
  AgentConfig cfg;
  cfg.eta = 0.3;
  QTableAgent q(cfg);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50000; ++i) {
    q.update(random_state(rng), static_cast<Action>(uniform_index(rng, kActionCount)),
             static_cast<int>(uniform_index(rng, 9)) - 6, std::nullopt);
  }
  for (int s = 0; s < kStateCount; ++s) {
    for (auto a : kAllActions) {
      const double v = q.q(AgentState::from_index(s), a);
      CHECK(v >= -6.0);
      CHECK(v <= 2.0);
    }
  }
}

TEST_CASE("q tracks the mean of iid rewards") {
  AgentConfig cfg;
  cfg.eta = 0.01;
  QTableAgent q(cfg);
  std::mt19937_64 rng(31);
  const AgentState s{1, 0, 1, 1};
  double sum = 0.0;
  double ema = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto u = uniform_index(rng, 10);
    const int r = u == 0 ? -3 : (u == 1 ? -1 : -2);
    sum += r;
    ema += 0.01 * (r - ema);
    q.update(s, Action::WeakDarken, r, std::nullopt);
  }
  CHECK(q.q(s, Action::WeakDarken) == ema);
  CHECK(std::abs(q.q(s, Action::WeakDarken) - (-2.0)) <= 0.15);
  CHECK(std::abs(sum / 10000.0 - (-2.0)) <= 0.02);
}

TEST_CASE("both agents solve a stationary deterministic bandit") {
  const std::array<AgentState, 3> states = {AgentState{2, 0, 1, 1}, AgentState{0, -1, 0, 0}, AgentState{0, 1, 2, 2}};
  const std::array<Action, 3> best = {Action::Deblur, Action::StrongWhiten, Action::StrongDarken};
  auto reward = [&](int i, Action a) { return a == best[i] ? 2 : -6; };

  AgentConfig qcfg;
  qcfg.epsilon = 0.1;
  qcfg.epsilon_decay_steps = 500;
  qcfg.seed = 9;
  AgentConfig lcfg;
  lcfg.kind = AgentKind::LinUCB;
  for (const auto& cfg : {qcfg, lcfg}) {
    auto agent = make_agent(cfg);
    std::mt19937_64 rng(77);
    int correct_tail = 0;
    for (int t = 0; t < 1000; ++t) {
      const int i = static_cast<int>(uniform_index(rng, states.size()));
      const auto a = agent->select(states[i]);
      agent->update(states[i], a, reward(i, a), std::nullopt);
      if (t >= 900 && a == best[i]) ++correct_tail;
    }
    CHECK(correct_tail >= 95);
  }
}

TEST_CASE("snapshots round trip and replay identically") {
  AgentConfig qcfg;
  qcfg.epsilon = 0.3;
  qcfg.epsilon_decay_steps = 50;
  qcfg.gamma = 0.5;
  AgentConfig lcfg;
  lcfg.kind = AgentKind::LinUCB;
  lcfg.alpha = 0.7;
  for (const auto& cfg : {qcfg, lcfg}) {
    auto agent = make_agent(cfg);
    std::mt19937_64 rng(12);
    auto drive = [](Agent& a, std::mt19937_64& r, int n) {
      std::string trace;
      for (int t = 0; t < n; ++t) {
        const auto s = random_state(r);
        const auto act = a.select(s);
        a.update(s, act, static_cast<int>(uniform_index(r, 9)) - 6, random_state(r));
        trace += std::to_string(ordinal(act));
      }
      return trace;
    };
    drive(*agent, rng, 200);
    const auto snap = agent->snapshot();
    auto restored = restore_agent(snap);
    CHECK(restored->kind() == cfg.kind);
    CHECK(restored->snapshot() == snap);
    auto fork = agent->clone();
    std::mt19937_64 r1 = rng, r2 = rng, r3 = rng;
    const auto t1 = drive(*agent, r1, 300);
    CHECK(drive(*restored, r2, 300) == t1);
    CHECK(drive(*fork, r3, 300) == t1);
    CHECK(restored->snapshot() == agent->snapshot());

    for (std::size_t cut : {std::size_t{0}, std::size_t{10}, snap.size() / 2, snap.size() - 5}) {
      try {
        restore_agent(snap.substr(0, cut));
        FAIL("expected failure");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedSnapshot);
      }
    }
  }
}
