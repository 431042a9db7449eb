#include "config.hpp"

#include <json.hpp>

#include "error.hpp"
#include "textio.hpp"

namespace imgrl {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

json to_json(const RunConfig& c) {
  json j;
  j["rounds"] = c.rounds;
  j["seed"] = c.seed;
  j["lenient_accuracy"] = c.lenient_accuracy;
  j["agent"] = {{"kind", std::string(to_string(c.agent.kind))},
                {"alpha", c.agent.alpha},
                {"eta", c.agent.eta},
                {"gamma", c.agent.gamma},
                {"epsilon", c.agent.epsilon},
                {"epsilon_min", c.agent.epsilon_min},
                {"epsilon_decay_steps", c.agent.epsilon_decay_steps}};
  j["reward"] = {{"pd", c.reward.pd}, {"floor", c.reward.floor}, {"cap", c.reward.cap}};
  j["sense"] = {{"lap_var_hi", c.sense.lap_var_hi},
                {"lap_var_lo", c.sense.lap_var_lo},
                {"brightness_ref", c.sense.brightness_ref},
                {"brightness_ref_from_oracle", c.brightness_ref_from_oracle},
                {"brightness_band", c.sense.brightness_band},
                {"tertile_lo", c.sense.tertile_lo},
                {"tertile_hi", c.sense.tertile_hi}};
  j["filters"] = {{"blur_kernel_side", c.filters.blur_kernel_side},
                  {"sharpen_center", c.filters.sharpen_center},
                  {"sharpen_off", c.filters.sharpen_off},
                  {"noise_white_gamma", c.filters.noise_white_gamma},
                  {"noise_dark_gamma", c.filters.noise_dark_gamma},
                  {"weak_whiten_gamma", c.filters.weak_whiten_gamma},
                  {"strong_whiten_gamma", c.filters.strong_whiten_gamma},
                  {"weak_darken_gamma", c.filters.weak_darken_gamma},
                  {"strong_darken_gamma", c.filters.strong_darken_gamma}};
  const auto& m = c.stream.noise_mix;
  j["stream"] = {{"noise_mix", {{"blur", m[0]}, {"dark", m[1]}, {"white", m[2]}, {"clean", m[3]}}},
                 {"shuffle", c.stream.shuffle},
                 {"prefetch_next", c.stream.prefetch_next}};
  j["detector"] = {{"kind", c.detector.kind == DetectorKind::Remote ? "remote" : "surrogate"},
                   {"url", c.detector.url},
                   {"timeout_s", c.detector.timeout_s}};
  j["surrogate"] = {
      {"class_count", c.surrogate.class_count}, {"p_oracle", c.surrogate.p_oracle}, {"decay", c.surrogate.decay}};
  j["texgen"] = {{"width", c.texgen.width},
                 {"height", c.texgen.height},
                 {"seed", c.texgen.seed},
                 {"count", c.texgen.count},
                 {"brightness_lo", c.texgen.brightness_lo},
                 {"brightness_hi", c.texgen.brightness_hi},
                 {"levels", c.texgen.levels},
                 {"chroma", c.texgen.chroma},
                 {"sharp_amplitude", c.texgen.sharp_amplitude},
                 {"sharp_jitter", c.texgen.sharp_jitter},
                 {"soft_amplitude", c.texgen.soft_amplitude},
                 {"soft_every", c.texgen.soft_every},
                 {"blob_amplitude", c.texgen.blob_amplitude},
                 {"gradient_amplitude", c.texgen.gradient_amplitude},
                 {"warm_from", c.texgen.warm_from},
                 {"warm_chroma", c.texgen.warm_chroma},
                 {"edge_fit", c.texgen.edge_fit}};
  j["paths"] = {{"images", c.paths.images},
                {"oracle", c.paths.oracle},
                {"log", c.paths.log},
                {"snapshot", c.paths.snapshot},
                {"resume", c.paths.resume}};
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  c.rounds = j["rounds"].get<int>();
  c.seed = j["seed"].get<std::uint64_t>();
  c.lenient_accuracy = j["lenient_accuracy"].get<bool>();

  const auto& a = j["agent"];
  const auto kind = parse_agent_kind(a["kind"].get<std::string>());
  if (!kind) throw Error(ErrorCode::Config, "agent.kind must be 'linucb' or 'qlearn', got '" +
                                                a["kind"].get<std::string>() + "'");
  c.agent.kind = *kind;
  c.agent.alpha = a["alpha"].get<double>();
  c.agent.eta = a["eta"].get<double>();
  c.agent.gamma = a["gamma"].get<double>();
  c.agent.epsilon = a["epsilon"].get<double>();
  c.agent.epsilon_min = a["epsilon_min"].get<double>();
  c.agent.epsilon_decay_steps = a["epsilon_decay_steps"].get<std::int64_t>();

  const auto& r = j["reward"];
  c.reward.pd = r["pd"].get<double>();
  c.reward.floor = r["floor"].get<int>();
  c.reward.cap = r["cap"].get<int>();

  const auto& s = j["sense"];
  c.sense.lap_var_hi = s["lap_var_hi"].get<double>();
  c.sense.lap_var_lo = s["lap_var_lo"].get<double>();
  c.sense.brightness_ref = s["brightness_ref"].get<double>();
  c.brightness_ref_from_oracle = s["brightness_ref_from_oracle"].get<bool>();
  c.sense.brightness_band = s["brightness_band"].get<double>();
  c.sense.tertile_lo = s["tertile_lo"].get<double>();
  c.sense.tertile_hi = s["tertile_hi"].get<double>();

  const auto& f = j["filters"];
  c.filters.blur_kernel_side = f["blur_kernel_side"].get<int>();
  c.filters.sharpen_center = f["sharpen_center"].get<double>();
  c.filters.sharpen_off = f["sharpen_off"].get<double>();
  c.filters.noise_white_gamma = f["noise_white_gamma"].get<double>();
  c.filters.noise_dark_gamma = f["noise_dark_gamma"].get<double>();
  c.filters.weak_whiten_gamma = f["weak_whiten_gamma"].get<double>();
  c.filters.strong_whiten_gamma = f["strong_whiten_gamma"].get<double>();
  c.filters.weak_darken_gamma = f["weak_darken_gamma"].get<double>();
  c.filters.strong_darken_gamma = f["strong_darken_gamma"].get<double>();

  const auto& st = j["stream"];
  const auto& mix = st["noise_mix"];
  c.stream.noise_mix = {mix["blur"].get<double>(), mix["dark"].get<double>(), mix["white"].get<double>(),
                        mix["clean"].get<double>()};
  c.stream.shuffle = st["shuffle"].get<bool>();
  c.stream.prefetch_next = st["prefetch_next"].get<bool>();

  const auto& d = j["detector"];
  const auto dk = d["kind"].get<std::string>();
  if (dk == "surrogate") {
    c.detector.kind = DetectorKind::Surrogate;
  } else if (dk == "remote") {
    c.detector.kind = DetectorKind::Remote;
  } else {
    throw Error(ErrorCode::Config, "detector.kind must be 'surrogate' or 'remote', got '" + dk + "'");
  }
  c.detector.url = d["url"].get<std::string>();
  c.detector.timeout_s = d["timeout_s"].get<double>();

  const auto& sg = j["surrogate"];
  c.surrogate.class_count = sg["class_count"].get<int>();
  c.surrogate.p_oracle = sg["p_oracle"].get<double>();
  c.surrogate.decay = sg["decay"].get<double>();

  const auto& t = j["texgen"];
  c.texgen.width = t["width"].get<int>();
  c.texgen.height = t["height"].get<int>();
  c.texgen.seed = t["seed"].get<std::uint64_t>();
  c.texgen.count = t["count"].get<int>();
  c.texgen.brightness_lo = t["brightness_lo"].get<double>();
  c.texgen.brightness_hi = t["brightness_hi"].get<double>();
  c.texgen.levels = t["levels"].get<int>();
  c.texgen.chroma = t["chroma"].get<double>();
  c.texgen.sharp_amplitude = t["sharp_amplitude"].get<double>();
  c.texgen.sharp_jitter = t["sharp_jitter"].get<double>();
  c.texgen.soft_amplitude = t["soft_amplitude"].get<double>();
  c.texgen.soft_every = t["soft_every"].get<int>();
  c.texgen.blob_amplitude = t["blob_amplitude"].get<double>();
  c.texgen.gradient_amplitude = t["gradient_amplitude"].get<double>();
  c.texgen.warm_from = t["warm_from"].get<double>();
  c.texgen.warm_chroma = t["warm_chroma"].get<double>();
  c.texgen.edge_fit = t["edge_fit"].get<int>();

  const auto& p = j["paths"];
  c.paths.images = p["images"].get<std::string>();
  c.paths.oracle = p["oracle"].get<std::string>();
  c.paths.log = p["log"].get<std::string>();
  c.paths.snapshot = p["snapshot"].get<std::string>();
  c.paths.resume = p["resume"].get<std::string>();
  return c;
}

bool compatible(const json& def, const json& val) {
  if (def.is_object()) return val.is_object();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_number()) return val.is_number();
  return false;
}

/// Overlays `user` onto `base`, rejecting keys that `base` does not have.
void merge_strict(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw Error(ErrorCode::Config, (prefix.empty() ? "config" : prefix) + " must be an object");
  for (const auto& [key, val] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw Error(ErrorCode::Config, "unknown config key '" + path + "'");
    auto& slot = base[key];
    if (!compatible(slot, val)) throw Error(ErrorCode::Config, "config key '" + path + "' has the wrong type");
    if (slot.is_object()) {
      merge_strict(slot, val, path);
    } else {
      slot = val;
    }
  }
}

RunConfig from_json_checked(const json& j) {
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config: ") + e.what());
  }
}

}  // namespace

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errs;
  auto add = [&](std::vector<std::string> more) { errs.insert(errs.end(), more.begin(), more.end()); };
  if (rounds < 1) errs.push_back("rounds must be >= 1");
  add(agent.validate());
  add(reward.validate());
  add(sense.validate());
  add(filters.validate());
  add(stream.validate());
  add(surrogate.validate());
  add(texgen.validate());
  if (detector.kind == DetectorKind::Remote && detector.url.empty()) {
    errs.push_back("detector.url is required for the remote detector");
  }
  if (!(detector.timeout_s > 0.0)) errs.push_back("detector.timeout_s must be > 0");
  return errs;
}

std::uint64_t RunConfig::stream_seed() const noexcept { return seed; }
std::uint64_t RunConfig::agent_seed() const noexcept { return splitmix64(seed); }

bool RunConfig::prefetch_next() const noexcept {
  return stream.prefetch_next || (agent.kind == AgentKind::QLearn && agent.gamma > 0.0);
}

EnvConfig RunConfig::env_config() const {
  EnvConfig e;
  e.filters = filters;
  e.sense = sense;
  e.reward = reward;
  e.stream = stream;
  e.stream.seed = stream_seed();
  e.stream.prefetch_next = prefetch_next();
  e.lenient_accuracy = lenient_accuracy;
  return e;
}

AgentConfig RunConfig::agent_config() const {
  AgentConfig a = agent;
  a.seed = agent_seed();
  return a;
}

RunConfig parse_config(std::string_view json_text) {
  json user;
  try {
    user = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  json merged = to_json(RunConfig{});
  merge_strict(merged, user, "");
  return from_json_checked(merged);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string body;
  try {
    body = text::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  try {
    return parse_config(body);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
}

std::string dump_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::Config, "override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json patch = json::object();
  json* cursor = &patch;
  for (auto part : text::split(key, '.')) {
    if (part.empty()) throw Error(ErrorCode::Config, "override key '" + key + "' is malformed");
    cursor = &(*cursor)[std::string(part)];
  }
  *cursor = value;
  json merged = to_json(cfg);
  merge_strict(merged, patch, "");
  cfg = from_json_checked(merged);
}

std::string config_value(const RunConfig& cfg, std::string_view key) {
  const json root = to_json(cfg);
  const json* cursor = &root;
  for (auto part : text::split(key, '.')) {
    const auto it = cursor->is_object() ? cursor->find(std::string(part)) : cursor->end();
    if (it == cursor->end()) throw Error(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
    cursor = &*it;
  }
  return cursor->is_string() ? cursor->get<std::string>() : cursor->dump();
}

}  // namespace imgrl
