#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "filters.hpp"
#include "sensing.hpp"

namespace imgrl {

enum class AgentKind { LinUCB, QLearn };

std::string_view to_string(AgentKind k) noexcept;
std::optional<AgentKind> parse_agent_kind(std::string_view name) noexcept;

struct AgentConfig {
  AgentKind kind = AgentKind::QLearn;
  double alpha = 1.0;
  double eta = 0.002;
  double gamma = 0.0;
  double epsilon = 0.1;
  /// Linear decay from `epsilon` to `epsilon_min` over this many selections;
  /// 0 keeps epsilon constant.
  std::int64_t epsilon_decay_steps = 0;
  double epsilon_min = 0.01;
  std::uint64_t seed = 1;

  std::vector<std::string> validate() const;
};

/// select/update learner. Instances are single-threaded.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const noexcept = 0;
  virtual Action select(const AgentState& s) = 0;
  /// `next` is the prefetched next state, or nullopt for a terminal transition.
  virtual void update(const AgentState& s, Action a, int reward, const std::optional<AgentState>& next) = 0;
  /// Whether update() makes use of a next state (gamma > 0).
  virtual bool uses_next_state() const noexcept { return false; }

  /// Versioned text dump of every learnable parameter and the rng state.
  virtual std::string snapshot() const = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg);
/// Throws MalformedSnapshot on any parse failure.
std::unique_ptr<Agent> restore_agent(std::string_view snapshot);

// Uniform draws with a fixed mapping from the generator output, so streams are
// identical across standard libraries.
double uniform01(std::mt19937_64& rng) noexcept;
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) noexcept;

using Vec5 = Eigen::Matrix<double, kFeatureDim, 1>;
using Mat5 = Eigen::Matrix<double, kFeatureDim, kFeatureDim>;

Vec5 to_vec5(const std::array<double, kFeatureDim>& x);

/// Disjoint LinUCB: one ridge regression (A_a, b_a) per arm, arm chosen by
/// theta_a . x + alpha * sqrt(x' A_a^-1 x).
class LinUCBAgent final : public Agent {
 public:
  explicit LinUCBAgent(double alpha = 1.0);

  AgentKind kind() const noexcept override { return AgentKind::LinUCB; }
  Action select(const AgentState& s) override;
  void update(const AgentState& s, Action a, int reward, const std::optional<AgentState>& next) override;
  std::string snapshot() const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<LinUCBAgent>(*this); }

  Action select_features(const Vec5& x) const;
  void update_features(const Vec5& x, Action a, double reward);

  /// Upper confidence score of each arm for context x.
  std::array<double, kActionCount> scores(const Vec5& x) const;
  Vec5 theta(Action a) const;
  const Mat5& design(Action a) const { return arms_[ordinal(a)].A; }
  const Vec5& response(Action a) const { return arms_[ordinal(a)].b; }
  double alpha() const noexcept { return alpha_; }

  static std::unique_ptr<LinUCBAgent> from_snapshot(std::string_view text);

 private:
  struct Arm {
    Mat5 A = Mat5::Identity();
    Vec5 b = Vec5::Zero();
  };
  double alpha_;
  std::array<Arm, kActionCount> arms_;
};

/// Tabular Q-learning over the 81 x 6 state-action table with epsilon-greedy
/// selection.
class QTableAgent final : public Agent {
 public:
  explicit QTableAgent(const AgentConfig& cfg);

  AgentKind kind() const noexcept override { return AgentKind::QLearn; }
  Action select(const AgentState& s) override;
  void update(const AgentState& s, Action a, int reward, const std::optional<AgentState>& next) override;
  bool uses_next_state() const noexcept override { return gamma_ > 0.0; }
  std::string snapshot() const override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<QTableAgent>(*this); }

  /// Full update with bootstrap: Q <- (1 - eta) Q + eta (r + gamma max Q'),
  /// evaluated as Q + eta ((r + gamma max Q') - Q).
  static double bootstrapped_update(double q, double reward, double gamma, double max_next, double eta) noexcept;
  /// One-step update: Q <- Q + eta (r - Q).
  static double one_step_update(double q, double reward, double eta) noexcept;

  double q(const AgentState& s, Action a) const noexcept { return table_[slot(s.index(), a)]; }
  void set_q(const AgentState& s, Action a, double v) noexcept { table_[slot(s.index(), a)] = v; }
  double max_q(const AgentState& s) const noexcept;
  Action greedy(const AgentState& s) const noexcept;
  double current_epsilon() const noexcept;
  std::int64_t steps() const noexcept { return steps_; }

  static std::unique_ptr<QTableAgent> from_snapshot(std::string_view text);

 private:
  static std::size_t slot(int state_index, Action a) noexcept {
    return static_cast<std::size_t>(state_index) * kActionCount + ordinal(a);
  }

  double eta_;
  double gamma_;
  double epsilon_;
  double epsilon_min_;
  std::int64_t epsilon_decay_steps_;
  std::int64_t steps_ = 0;
  std::mt19937_64 rng_;
  std::array<double, kStateCount * kActionCount> table_{};
};

}  // namespace imgrl
