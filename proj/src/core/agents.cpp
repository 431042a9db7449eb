#include "agents.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "textio.hpp"

namespace imgrl {

namespace {

constexpr std::string_view kSnapshotMagic = "imgrl-agent";
constexpr std::string_view kSnapshotVersion = "v1";

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::MalformedSnapshot, "malformed snapshot: " + why);
}

/// Whitespace tokenizer over snapshot text.
class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::string_view next(const char* what) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) malformed(std::string("unexpected end, expected ") + what);
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    if (next(std::string(word).c_str()) != word) malformed("expected '" + std::string(word) + "'");
  }

  double real(const char* what) {
    const auto v = text::parse_double(next(what));
    if (!v || !std::isfinite(*v)) malformed(std::string("bad number for ") + what);
    return *v;
  }

  long long integer(const char* what) {
    const auto v = text::parse_int(next(what));
    if (!v) malformed(std::string("bad integer for ") + what);
    return *v;
  }

  /// Rest of the current line, verbatim.
  std::string_view line() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    return text_.substr(start, pos_ - start);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

AgentKind read_header(Tokens& tok) {
  tok.expect(kSnapshotMagic);
  tok.expect(kSnapshotVersion);
  tok.expect("kind");
  const auto kind = parse_agent_kind(tok.next("agent kind"));
  if (!kind) malformed("unknown agent kind");
  return *kind;
}

}  // namespace

std::string_view to_string(AgentKind k) noexcept { return k == AgentKind::LinUCB ? "linucb" : "qlearn"; }

std::optional<AgentKind> parse_agent_kind(std::string_view name) noexcept {
  if (name == "linucb") return AgentKind::LinUCB;
  if (name == "qlearn") return AgentKind::QLearn;
  return std::nullopt;
}

std::vector<std::string> AgentConfig::validate() const {
  std::vector<std::string> errs;
  if (!(std::isfinite(alpha) && alpha >= 0.0)) errs.push_back("agent.alpha must be >= 0");
  if (!(std::isfinite(eta) && eta > 0.0 && eta <= 1.0)) errs.push_back("agent.eta must lie in (0, 1]");
  if (!(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0)) errs.push_back("agent.gamma must lie in [0, 1)");
  if (!(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon <= 1.0)) errs.push_back("agent.epsilon must lie in [0, 1]");
  if (!(std::isfinite(epsilon_min) && epsilon_min >= 0.0 && epsilon_min <= 1.0)) {
    errs.push_back("agent.epsilon_min must lie in [0, 1]");
  }
  if (epsilon_decay_steps < 0) errs.push_back("agent.epsilon_decay_steps must be >= 0");
  return errs;
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg) {
  if (auto errs = cfg.validate(); !errs.empty()) throw Error(ErrorCode::InvalidParameter, errs.front());
  if (cfg.kind == AgentKind::LinUCB) return std::make_unique<LinUCBAgent>(cfg.alpha);
  return std::make_unique<QTableAgent>(cfg);
}

std::unique_ptr<Agent> restore_agent(std::string_view snapshot) {
  Tokens tok(snapshot);
  if (read_header(tok) == AgentKind::LinUCB) return LinUCBAgent::from_snapshot(snapshot);
  return QTableAgent::from_snapshot(snapshot);
}

double uniform01(std::mt19937_64& rng) noexcept { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) noexcept {
  const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

Vec5 to_vec5(const std::array<double, kFeatureDim>& x) {
  Vec5 v;
  for (int i = 0; i < kFeatureDim; ++i) v(i) = x[i];
  return v;
}

// --- LinUCB ------------------------------------------------------------------

LinUCBAgent::LinUCBAgent(double alpha) : alpha_(alpha) {
  if (!(std::isfinite(alpha) && alpha >= 0.0)) throw Error(ErrorCode::InvalidParameter, "alpha must be >= 0");
}

std::array<double, kActionCount> LinUCBAgent::scores(const Vec5& x) const {
  std::array<double, kActionCount> p{};
  for (int a = 0; a < kActionCount; ++a) {
    const auto& arm = arms_[a];
    const Eigen::LDLT<Mat5> ldlt(arm.A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw Error(ErrorCode::Internal, "LinUCB design matrix of arm " + std::to_string(a) + " is not positive definite");
    }
    const Vec5 theta = ldlt.solve(arm.b);
    const double width = x.dot(ldlt.solve(x));
    p[a] = theta.dot(x) + alpha_ * std::sqrt(std::max(width, 0.0));
  }
  return p;
}

Action LinUCBAgent::select_features(const Vec5& x) const {
  const auto p = scores(x);
  int best = 0;
  for (int a = 1; a < kActionCount; ++a) {
    if (p[a] > p[best]) best = a;
  }
  return static_cast<Action>(best);
}

Action LinUCBAgent::select(const AgentState& s) { return select_features(to_vec5(feature_vector(s))); }

void LinUCBAgent::update_features(const Vec5& x, Action a, double reward) {
  auto& arm = arms_[ordinal(a)];
  arm.A.noalias() += x * x.transpose();
  arm.b += reward * x;
}

void LinUCBAgent::update(const AgentState& s, Action a, int reward, const std::optional<AgentState>&) {
  update_features(to_vec5(feature_vector(s)), a, static_cast<double>(reward));
}

Vec5 LinUCBAgent::theta(Action a) const {
  const auto& arm = arms_[ordinal(a)];
  return arm.A.ldlt().solve(arm.b);
}

std::string LinUCBAgent::snapshot() const {
  std::string out;
  out += std::string(kSnapshotMagic) + " " + std::string(kSnapshotVersion) + "\n";
  out += "kind linucb\n";
  out += "alpha " + text::exact(alpha_) + "\n";
  for (int a = 0; a < kActionCount; ++a) {
    out += "arm " + std::to_string(a) + "\nA";
    for (int i = 0; i < kFeatureDim; ++i) {
      for (int j = 0; j < kFeatureDim; ++j) out += " " + text::exact(arms_[a].A(i, j));
    }
    out += "\nb";
    for (int i = 0; i < kFeatureDim; ++i) out += " " + text::exact(arms_[a].b(i));
    out += "\n";
  }
  out += "end\n";
  return out;
}

std::unique_ptr<LinUCBAgent> LinUCBAgent::from_snapshot(std::string_view text) {
  Tokens tok(text);
  if (read_header(tok) != AgentKind::LinUCB) malformed("not a linucb snapshot");
  tok.expect("alpha");
  const double alpha = tok.real("alpha");
  if (alpha < 0.0) malformed("negative alpha");
  auto agent = std::make_unique<LinUCBAgent>(alpha);
  for (int a = 0; a < kActionCount; ++a) {
    tok.expect("arm");
    if (tok.integer("arm index") != a) malformed("arms out of order");
    tok.expect("A");
    for (int i = 0; i < kFeatureDim; ++i) {
      for (int j = 0; j < kFeatureDim; ++j) agent->arms_[a].A(i, j) = tok.real("A entry");
    }
    tok.expect("b");
    for (int i = 0; i < kFeatureDim; ++i) agent->arms_[a].b(i) = tok.real("b entry");
  }
  tok.expect("end");
  return agent;
}

// --- Q-table -----------------------------------------------------------------

QTableAgent::QTableAgent(const AgentConfig& cfg)
    : eta_(cfg.eta),
      gamma_(cfg.gamma),
      epsilon_(cfg.epsilon),
      epsilon_min_(cfg.epsilon_min),
      epsilon_decay_steps_(cfg.epsilon_decay_steps),
      rng_(cfg.seed) {
  if (auto errs = cfg.validate(); !errs.empty()) throw Error(ErrorCode::InvalidParameter, errs.front());
}

double QTableAgent::bootstrapped_update(double q, double reward, double gamma, double max_next, double eta) noexcept {
  const double target = reward + gamma * max_next;
  return q + eta * (target - q);
}

double QTableAgent::one_step_update(double q, double reward, double eta) noexcept { return q + eta * (reward - q); }

double QTableAgent::max_q(const AgentState& s) const noexcept {
  const auto base = slot(s.index(), Action::None);
  double m = table_[base];
  for (int a = 1; a < kActionCount; ++a) m = std::max(m, table_[base + a]);
  return m;
}

Action QTableAgent::greedy(const AgentState& s) const noexcept {
  const auto base = slot(s.index(), Action::None);
  int best = 0;
  for (int a = 1; a < kActionCount; ++a) {
    if (table_[base + a] > table_[base + best]) best = a;
  }
  return static_cast<Action>(best);
}

double QTableAgent::current_epsilon() const noexcept {
  if (epsilon_decay_steps_ <= 0 || epsilon_ <= epsilon_min_) return epsilon_;
  if (steps_ >= epsilon_decay_steps_) return epsilon_min_;
  const double frac = static_cast<double>(steps_) / static_cast<double>(epsilon_decay_steps_);
  return epsilon_ + (epsilon_min_ - epsilon_) * frac;
}

Action QTableAgent::select(const AgentState& s) {
  const double eps = current_epsilon();
  ++steps_;
  // Both draws are always taken so the rng stream does not depend on Q.
  const double u = uniform01(rng_);
  const auto random_arm = uniform_index(rng_, kActionCount);
  if (u < eps) return static_cast<Action>(random_arm);
  return greedy(s);
}

void QTableAgent::update(const AgentState& s, Action a, int reward, const std::optional<AgentState>& next) {
  auto& q = table_[slot(s.index(), a)];
  if (gamma_ == 0.0 || !next) {
    q = one_step_update(q, static_cast<double>(reward), eta_);
  } else {
    q = bootstrapped_update(q, static_cast<double>(reward), gamma_, max_q(*next), eta_);
  }
}

std::string QTableAgent::snapshot() const {
  std::ostringstream rng_state;
  rng_state << rng_;
  std::string out;
  out += std::string(kSnapshotMagic) + " " + std::string(kSnapshotVersion) + "\n";
  out += "kind qlearn\n";
  out += "eta " + text::exact(eta_) + "\n";
  out += "gamma " + text::exact(gamma_) + "\n";
  out += "epsilon " + text::exact(epsilon_) + "\n";
  out += "epsilon_min " + text::exact(epsilon_min_) + "\n";
  out += "epsilon_decay_steps " + std::to_string(epsilon_decay_steps_) + "\n";
  out += "steps " + std::to_string(steps_) + "\n";
  out += "rng " + rng_state.str() + "\n";
  for (int s = 0; s < kStateCount; ++s) {
    out += "q " + std::to_string(s);
    for (int a = 0; a < kActionCount; ++a) out += " " + text::exact(table_[slot(s, static_cast<Action>(a))]);
    out += "\n";
  }
  out += "end\n";
  return out;
}

std::unique_ptr<QTableAgent> QTableAgent::from_snapshot(std::string_view text) {
  Tokens tok(text);
  if (read_header(tok) != AgentKind::QLearn) malformed("not a qlearn snapshot");
  AgentConfig cfg;
  cfg.kind = AgentKind::QLearn;
  tok.expect("eta");
  cfg.eta = tok.real("eta");
  tok.expect("gamma");
  cfg.gamma = tok.real("gamma");
  tok.expect("epsilon");
  cfg.epsilon = tok.real("epsilon");
  tok.expect("epsilon_min");
  cfg.epsilon_min = tok.real("epsilon_min");
  tok.expect("epsilon_decay_steps");
  cfg.epsilon_decay_steps = tok.integer("epsilon_decay_steps");
  if (!cfg.validate().empty()) malformed("parameters out of range");
  tok.expect("steps");
  const auto steps = tok.integer("steps");
  if (steps < 0) malformed("negative step count");

  auto agent = std::make_unique<QTableAgent>(cfg);
  agent->steps_ = steps;
  tok.expect("rng");
  std::istringstream rng_in{std::string(tok.line())};
  rng_in >> agent->rng_;
  if (rng_in.fail()) malformed("bad rng state");
  for (int s = 0; s < kStateCount; ++s) {
    tok.expect("q");
    if (tok.integer("state index") != s) malformed("q rows out of order");
    for (int a = 0; a < kActionCount; ++a) agent->table_[slot(s, static_cast<Action>(a))] = tok.real("q entry");
  }
  tok.expect("end");
  return agent;
}

}  // namespace imgrl
