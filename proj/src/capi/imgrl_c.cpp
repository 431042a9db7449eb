#include "imgrl/imgrl.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "agents.hpp"
#include "config.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "filters.hpp"
#include "raster.hpp"
#include "sensing.hpp"
#include "textio.hpp"

struct imgrl_raster {
  imgrl::Raster img;
};

struct imgrl_config {
  imgrl::RunConfig cfg;
};

struct imgrl_agent {
  std::unique_ptr<imgrl::Agent> agent;
};

namespace {

thread_local std::string g_last_error;

imgrl_status fail(imgrl_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
imgrl_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return IMGRL_OK;
  } catch (const imgrl::Error& e) {
    return fail(static_cast<imgrl_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(IMGRL_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IMGRL_E_INTERNAL, e.what());
  } catch (...) {
    return fail(IMGRL_E_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw imgrl::Error(imgrl::ErrorCode::InvalidParameter, what);
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

imgrl::AgentState to_state(const imgrl_state* s) {
  require(s != nullptr, "state is NULL");
  imgrl::AgentState st{s->blur, s->brightness, s->value, s->lightness};
  if (!st.valid()) throw imgrl::Error(imgrl::ErrorCode::IndexOutOfRange, "state component out of range");
  return st;
}

imgrl::NoiseKind to_noise(int v) {
  if (v < 0 || v >= imgrl::kNoiseKindCount) {
    throw imgrl::Error(imgrl::ErrorCode::IndexOutOfRange, "noise kind " + std::to_string(v) + " out of range");
  }
  return static_cast<imgrl::NoiseKind>(v);
}

std::vector<imgrl::NoiseKind> parse_kinds(const char* kinds) {
  if (!kinds || !*kinds) return {imgrl::NoiseKind::Blur, imgrl::NoiseKind::Dark, imgrl::NoiseKind::White};
  std::vector<imgrl::NoiseKind> out;
  for (auto tok : imgrl::text::split(kinds, ',')) {
    const auto k = imgrl::parse_noise_kind(tok);
    if (!k) throw imgrl::Error(imgrl::ErrorCode::Config, "unknown noise kind '" + std::string(tok) + "'");
    out.push_back(*k);
  }
  return out;
}

}  // namespace

extern "C" {

const char* imgrl_version(void) { return "0.1.0"; }

const char* imgrl_status_name(imgrl_status status) {
  if (status == IMGRL_OK) return "ok";
  if (status < IMGRL_E_INVALID_PARAMETER || status > IMGRL_E_INTERNAL) return "unknown";
  return imgrl::error_code_name(static_cast<imgrl::ErrorCode>(status));
}

const char* imgrl_last_error(void) { return g_last_error.c_str(); }

void imgrl_string_free(char* s) { std::free(s); }

const char* imgrl_noise_name(int noise) {
  if (noise < 0 || noise >= imgrl::kNoiseKindCount) return nullptr;
  return imgrl::to_string(static_cast<imgrl::NoiseKind>(noise)).data();
}

const char* imgrl_action_name(int action) {
  if (action < 0 || action >= imgrl::kActionCount) return nullptr;
  return imgrl::to_string(static_cast<imgrl::Action>(action)).data();
}

imgrl_status imgrl_parse_noise(const char* name, int* out) {
  return guarded([&] {
    require(name && out, "NULL argument");
    const auto k = imgrl::parse_noise_kind(name);
    if (!k) throw imgrl::Error(imgrl::ErrorCode::InvalidParameter, "unknown noise kind '" + std::string(name) + "'");
    *out = static_cast<int>(*k);
  });
}

imgrl_status imgrl_parse_action(const char* name, int* out) {
  return guarded([&] {
    require(name && out, "NULL argument");
    const auto a = imgrl::parse_action(name);
    if (!a) throw imgrl::Error(imgrl::ErrorCode::InvalidParameter, "unknown action '" + std::string(name) + "'");
    *out = imgrl::ordinal(*a);
  });
}

imgrl_status imgrl_raster_new(int width, int height, const uint8_t* pixels, imgrl_raster** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = nullptr;
    imgrl::Raster img(width, height);
    if (pixels) std::memcpy(img.data().data(), pixels, img.sample_count());
    *out = new imgrl_raster{std::move(img)};
  });
}

imgrl_status imgrl_raster_load(const char* path, imgrl_raster** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = nullptr;
    *out = new imgrl_raster{imgrl::load_ppm(path)};
  });
}

imgrl_status imgrl_raster_save(const imgrl_raster* img, const char* path) {
  return guarded([&] {
    require(img && path, "NULL argument");
    imgrl::save_ppm(img->img, path);
  });
}

void imgrl_raster_free(imgrl_raster* img) { delete img; }

int imgrl_raster_width(const imgrl_raster* img) { return img ? img->img.width() : 0; }

int imgrl_raster_height(const imgrl_raster* img) { return img ? img->img.height() : 0; }

const uint8_t* imgrl_raster_data(const imgrl_raster* img) { return img ? img->img.data().data() : nullptr; }

imgrl_status imgrl_apply_noise(const imgrl_raster* img, int noise, imgrl_raster** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = nullptr;
    *out = new imgrl_raster{imgrl::apply_noise(img->img, to_noise(noise))};
  });
}

imgrl_status imgrl_apply_action(const imgrl_raster* img, int action, imgrl_raster** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = nullptr;
    *out = new imgrl_raster{imgrl::apply_action(img->img, imgrl::action_from_ordinal(action))};
  });
}

imgrl_status imgrl_rmse(const imgrl_raster* a, const imgrl_raster* b, double* out) {
  return guarded([&] {
    require(a && b && out, "NULL argument");
    *out = imgrl::rmse(a->img, b->img);
  });
}

imgrl_status imgrl_laplacian_variance(const imgrl_raster* img, double* out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = imgrl::laplacian_variance(img->img);
  });
}

imgrl_status imgrl_sense(const imgrl_raster* img, double brightness_ref, imgrl_state* out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    require(std::isfinite(brightness_ref), "brightness_ref must be finite");
    imgrl::SenseConfig sc;
    sc.brightness_ref = brightness_ref;
    const auto s = imgrl::sense_state(img->img, sc);
    *out = imgrl_state{s.blur, s.brightness, s.value, s.lightness};
  });
}

int imgrl_state_index(const imgrl_state* s) {
  if (!s) return -1;
  const imgrl::AgentState st{s->blur, s->brightness, s->value, s->lightness};
  return st.valid() ? st.index() : -1;
}

imgrl_status imgrl_quantize_reward(double denoise_pr, double oracle_pr, double pd, int floor, int cap, int* out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    const imgrl::RewardConfig rc{pd, floor, cap};
    if (auto errs = rc.validate(); !errs.empty()) throw imgrl::Error(imgrl::ErrorCode::InvalidParameter, errs.front());
    *out = imgrl::quantize_reward(denoise_pr, oracle_pr, rc);
  });
}

imgrl_status imgrl_config_new(imgrl_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = new imgrl_config{};
  });
}

imgrl_status imgrl_config_parse(const char* json, imgrl_config** out) {
  return guarded([&] {
    require(json && out, "NULL argument");
    *out = nullptr;
    *out = new imgrl_config{imgrl::parse_config(json)};
  });
}

imgrl_status imgrl_config_load(const char* path, imgrl_config** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = nullptr;
    *out = new imgrl_config{imgrl::load_config(path)};
  });
}

void imgrl_config_free(imgrl_config* cfg) { delete cfg; }

imgrl_status imgrl_config_set(imgrl_config* cfg, const char* assignment) {
  return guarded([&] {
    require(cfg && assignment, "NULL argument");
    imgrl::apply_override(cfg->cfg, assignment);
  });
}

imgrl_status imgrl_config_get(const imgrl_config* cfg, const char* key, char** out) {
  return guarded([&] {
    require(cfg && key && out, "NULL argument");
    *out = nullptr;
    *out = dup_string(imgrl::config_value(cfg->cfg, key));
  });
}

imgrl_status imgrl_config_validate(const imgrl_config* cfg, char** messages) {
  if (messages) *messages = nullptr;
  std::string joined;
  const auto status = guarded([&] {
    require(cfg != nullptr, "cfg is NULL");
    for (const auto& e : cfg->cfg.validate()) joined += (joined.empty() ? "" : "\n") + e;
  });
  if (status != IMGRL_OK) return status;
  if (joined.empty()) return IMGRL_OK;
  if (messages) {
    const auto dup = guarded([&] { *messages = dup_string(joined); });
    if (dup != IMGRL_OK) return dup;
  }
  return fail(IMGRL_E_CONFIG, joined);
}

imgrl_status imgrl_config_dump(const imgrl_config* cfg, char** out) {
  return guarded([&] {
    require(cfg && out, "NULL argument");
    *out = nullptr;
    *out = dup_string(imgrl::dump_config(cfg->cfg));
  });
}

imgrl_status imgrl_synth_textures(const imgrl_config* cfg, const char* out_dir, int* count) {
  return guarded([&] {
    require(cfg && out_dir, "NULL argument");
    const int n = imgrl::synth_textures(cfg->cfg, out_dir);
    if (count) *count = n;
  });
}

imgrl_status imgrl_synth_noisy(const imgrl_config* cfg, const char* in_dir, const char* out_dir, const char* kinds,
                               int* count) {
  return guarded([&] {
    require(cfg && in_dir && out_dir, "NULL argument");
    const int n = imgrl::synth_noisy(cfg->cfg, in_dir, out_dir, parse_kinds(kinds));
    if (count) *count = n;
  });
}

imgrl_status imgrl_build_oracle(const imgrl_config* cfg, const char* images_dir, const char* out_csv, int jobs,
                                int* count) {
  return guarded([&] {
    require(cfg && images_dir && out_csv, "NULL argument");
    require(jobs >= 1, "jobs must be >= 1");
    const auto table = imgrl::build_oracle_from_files(cfg->cfg, images_dir, out_csv, jobs);
    if (count) *count = static_cast<int>(table.entries.size());
  });
}

imgrl_status imgrl_run(const imgrl_config* cfg, imgrl_run_summary* out) {
  return guarded([&] {
    require(cfg != nullptr, "cfg is NULL");
    const auto res = imgrl::run_from_files(cfg->cfg);
    if (out) {
      *out = imgrl_run_summary{static_cast<int64_t>(res.records.size()), res.final_running_accuracy,
                               res.mean_reward};
    }
  });
}

imgrl_status imgrl_report(const char* log, const char* out_dir, const char* const* compare, size_t compare_count,
                          int run_bands, int accuracy, size_t* rounds) {
  return guarded([&] {
    require(log && out_dir, "NULL argument");
    require(compare_count == 0 || compare != nullptr, "compare is NULL");
    require(accuracy >= IMGRL_ACCURACY_LOGGED && accuracy <= IMGRL_ACCURACY_LENIENT, "unknown accuracy mode");
    imgrl::ReportOptions opt;
    opt.log = log;
    opt.out_dir = out_dir;
    for (size_t i = 0; i < compare_count; ++i) {
      require(compare[i] != nullptr, "compare entry is NULL");
      opt.compare.emplace_back(compare[i]);
    }
    opt.run_bands = run_bands != 0;
    opt.accuracy = static_cast<imgrl::AccuracyMode>(accuracy);
    const auto res = imgrl::write_report(opt);
    if (rounds) *rounds = res.rounds;
  });
}

imgrl_status imgrl_agent_new(const imgrl_config* cfg, imgrl_agent** out) {
  return guarded([&] {
    require(cfg && out, "NULL argument");
    *out = nullptr;
    const auto ac = cfg->cfg.agent_config();
    if (auto errs = ac.validate(); !errs.empty()) throw imgrl::Error(imgrl::ErrorCode::Config, errs.front());
    *out = new imgrl_agent{imgrl::make_agent(ac)};
  });
}

imgrl_status imgrl_agent_restore(const char* snapshot, imgrl_agent** out) {
  return guarded([&] {
    require(snapshot && out, "NULL argument");
    *out = nullptr;
    *out = new imgrl_agent{imgrl::restore_agent(snapshot)};
  });
}

void imgrl_agent_free(imgrl_agent* agent) { delete agent; }

imgrl_status imgrl_agent_select(imgrl_agent* agent, const imgrl_state* s, int* action) {
  return guarded([&] {
    require(agent && action, "NULL argument");
    *action = imgrl::ordinal(agent->agent->select(to_state(s)));
  });
}

imgrl_status imgrl_agent_update(imgrl_agent* agent, const imgrl_state* s, int action, int reward,
                                const imgrl_state* next) {
  return guarded([&] {
    require(agent != nullptr, "agent is NULL");
    const auto st = to_state(s);
    std::optional<imgrl::AgentState> nx;
    if (next) nx = to_state(next);
    agent->agent->update(st, imgrl::action_from_ordinal(action), reward, nx);
  });
}

imgrl_status imgrl_agent_snapshot(const imgrl_agent* agent, char** out) {
  return guarded([&] {
    require(agent && out, "NULL argument");
    *out = nullptr;
    *out = dup_string(agent->agent->snapshot());
  });
}

}  // extern "C"
