#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imgrl/imgrl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct ConfigDeleter {
  void operator()(imgrl_config* c) const { imgrl_config_free(c); }
};
using ConfigPtr = std::unique_ptr<imgrl_config, ConfigDeleter>;

struct StatusError {
  imgrl_status status;
  std::string message;
};

void print_error(const std::string& message) {
  std::size_t start = 0;
  while (start <= message.size()) {
    const auto end = message.find('\n', start);
    const auto line = message.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::fprintf(stderr, "error: %s\n", line.c_str());
    if (end == std::string::npos) break;
    start = end + 1;
  }
}

void check(imgrl_status s) {
  if (s != IMGRL_OK) throw StatusError{s, imgrl_last_error()};
}

int exit_code_for(imgrl_status s) {
  return s == IMGRL_E_CONFIG || s == IMGRL_E_INVALID_PARAMETER ? kExitUsage : kExitRuntime;
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<unsigned long long> seed;
  int jobs = 1;
};

ConfigPtr load_config(const Common& common) {
  imgrl_config* raw = nullptr;
  if (common.config_path.empty()) {
    check(imgrl_config_new(&raw));
  } else {
    check(imgrl_config_load(common.config_path.c_str(), &raw));
  }
  ConfigPtr cfg(raw);
  for (const auto& o : common.overrides) check(imgrl_config_set(cfg.get(), o.c_str()));
  return cfg;
}

void set(imgrl_config* cfg, const std::string& key, const std::string& value) {
  const auto assignment = key + "=" + value;
  check(imgrl_config_set(cfg, assignment.c_str()));
}

std::string get(const imgrl_config* cfg, const char* key) {
  char* raw = nullptr;
  check(imgrl_config_get(cfg, key, &raw));
  std::string out = raw;
  imgrl_string_free(raw);
  return out;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void validate(const imgrl_config* cfg) {
  char* messages = nullptr;
  const auto s = imgrl_config_validate(cfg, &messages);
  if (s == IMGRL_OK) return;
  std::string text = messages ? messages : imgrl_last_error();
  imgrl_string_free(messages);
  throw StatusError{s, text};
}

struct SynthArgs {
  std::string textures;
  std::string in;
  std::string out;
  std::string kinds;
  std::optional<int> count;
};

int cmd_synth(const Common& common, const SynthArgs& a) {
  if (a.textures.empty() && a.out.empty()) {
    print_error("synth: give --textures DIR and/or --out DIR");
    return kExitUsage;
  }
  auto cfg = load_config(common);
  if (common.seed) set(cfg.get(), "texgen.seed", std::to_string(*common.seed));
  if (a.count) set(cfg.get(), "texgen.count", std::to_string(*a.count));
  validate(cfg.get());
  if (!a.textures.empty()) {
    int n = 0;
    check(imgrl_synth_textures(cfg.get(), a.textures.c_str(), &n));
    std::printf("textures=%d dir=%s\n", n, a.textures.c_str());
  }
  if (!a.out.empty()) {
    const std::string in = a.in.empty() ? a.textures : a.in;
    if (in.empty()) {
      print_error("synth: --out needs --in DIR or --textures DIR");
      return kExitUsage;
    }
    int n = 0;
    check(imgrl_synth_noisy(cfg.get(), in.c_str(), a.out.c_str(), a.kinds.c_str(), &n));
    std::printf("noisy=%d dir=%s\n", n, a.out.c_str());
  }
  return kExitOk;
}

struct OracleArgs {
  std::string images;
  std::string out;
  std::string detector_url;
};

int cmd_oracle(const Common& common, const OracleArgs& a) {
  auto cfg = load_config(common);
  if (!a.images.empty()) set(cfg.get(), "paths.images", quoted(a.images));
  if (!a.out.empty()) set(cfg.get(), "paths.oracle", quoted(a.out));
  if (!a.detector_url.empty()) {
    set(cfg.get(), "detector.kind", "\"remote\"");
    set(cfg.get(), "detector.url", quoted(a.detector_url));
  }
  validate(cfg.get());
  const std::string images = a.images.empty() ? get(cfg.get(), "paths.images") : a.images;
  const std::string out = a.out.empty() ? get(cfg.get(), "paths.oracle") : a.out;
  if (images.empty() || out.empty()) {
    print_error("oracle: set --images and --out (or paths.images / paths.oracle)");
    return kExitUsage;
  }
  int n = 0;
  check(imgrl_build_oracle(cfg.get(), images.c_str(), out.c_str(), common.jobs, &n));
  std::printf("oracle_rows=%d file=%s\n", n, out.c_str());
  return kExitOk;
}

struct RunArgs {
  std::string agent;
  std::optional<int> rounds;
  std::string images;
  std::string oracle;
  std::string log;
  std::string snapshot;
  std::string resume;
};

int cmd_run(const Common& common, const RunArgs& a) {
  auto cfg = load_config(common);
  if (!a.agent.empty()) set(cfg.get(), "agent.kind", quoted(a.agent));
  if (a.rounds) set(cfg.get(), "rounds", std::to_string(*a.rounds));
  if (common.seed) set(cfg.get(), "seed", std::to_string(*common.seed));
  if (!a.images.empty()) set(cfg.get(), "paths.images", quoted(a.images));
  if (!a.oracle.empty()) set(cfg.get(), "paths.oracle", quoted(a.oracle));
  if (!a.log.empty()) set(cfg.get(), "paths.log", quoted(a.log));
  if (!a.snapshot.empty()) set(cfg.get(), "paths.snapshot", quoted(a.snapshot));
  if (!a.resume.empty()) set(cfg.get(), "paths.resume", quoted(a.resume));
  validate(cfg.get());
  imgrl_run_summary summary{};
  check(imgrl_run(cfg.get(), &summary));
  std::printf("iterations=%lld final_running_accuracy=%.6f mean_reward=%.6f\n",
              static_cast<long long>(summary.iterations), summary.final_running_accuracy, summary.mean_reward);
  return kExitOk;
}

struct ReportArgs {
  std::string log;
  std::string out;
  std::vector<std::string> compare;
  bool bands = false;
  std::string accuracy = "logged";
};

int cmd_report(const ReportArgs& a) {
  int mode = IMGRL_ACCURACY_LOGGED;
  if (a.accuracy == "strict") mode = IMGRL_ACCURACY_STRICT;
  if (a.accuracy == "lenient") mode = IMGRL_ACCURACY_LENIENT;
  std::vector<const char*> compare;
  for (const auto& c : a.compare) compare.push_back(c.c_str());
  std::size_t rounds = 0;
  check(imgrl_report(a.log.c_str(), a.out.c_str(), compare.data(), compare.size(), a.bands ? 1 : 0, mode, &rounds));
  std::printf("rounds=%zu dir=%s\n", rounds, a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Filter-selection agents for noisy images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", imgrl_version());

  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides, "Override section.key=value (repeatable)");
    sub->add_option("--seed", common.seed, "Seed override");
    sub->add_option("--jobs", common.jobs, "Worker threads for detector calls")->check(CLI::PositiveNumber);
  };

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate originals and noisy variants");
  add_common(synth_cmd);
  synth_cmd->add_option("--textures", synth.textures, "Write the procedural original set here");
  synth_cmd->add_option("--count", synth.count, "Number of originals")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--in", synth.in, "Originals to corrupt (defaults to --textures)");
  synth_cmd->add_option("--out", synth.out, "Write noisy variants here");
  synth_cmd->add_option("--kinds", synth.kinds, "Comma-separated noise kinds (default blur,dark,white)");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Score originals and write the oracle table");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--images", oracle.images, "Originals directory");
  oracle_cmd->add_option("--out", oracle.out, "Oracle CSV path");
  oracle_cmd->add_option("--detector-url", oracle.detector_url, "Use the remote detector at this base URL");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the online learning loop");
  add_common(run_cmd);
  run_cmd->add_option("--agent", run.agent, "linucb or qlearn");
  run_cmd->add_option("--rounds", run.rounds, "Rounds over the image set")->check(CLI::PositiveNumber);
  run_cmd->add_option("--images", run.images, "Originals directory");
  run_cmd->add_option("--oracle", run.oracle, "Oracle CSV");
  run_cmd->add_option("--log", run.log, "Iteration log output");
  run_cmd->add_option("--snapshot", run.snapshot, "Final agent snapshot output");
  run_cmd->add_option("--resume", run.resume, "Continue from this agent snapshot");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summaries and running series from iteration logs");
  report_cmd->add_option("--log", report.log, "Iteration log")->required();
  report_cmd->add_option("--out", report.out, "Output directory")->required();
  report_cmd->add_option("--compare", report.compare, "Extra logs for side-by-side series (repeatable)");
  report_cmd->add_flag("--bands", report.bands, "Cross-run bands over --log and --compare");
  report_cmd->add_option("--accuracy", report.accuracy, "logged, strict or lenient")
      ->check(CLI::IsMember({"logged", "strict", "lenient"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(e.what());
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(common, synth);
    if (*oracle_cmd) return cmd_oracle(common, oracle);
    if (*run_cmd) return cmd_run(common, run);
    return cmd_report(report);
  } catch (const StatusError& e) {
    print_error(std::string(imgrl_status_name(e.status)) + ": " + e.message);
    return exit_code_for(e.status);
  }
}
