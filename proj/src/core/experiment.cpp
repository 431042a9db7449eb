#include "experiment.hpp"

#include <fstream>

#include "error.hpp"
#include "textio.hpp"

namespace imgrl {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void throw_config(const std::vector<std::string>& errs) {
  std::string all;
  for (const auto& e : errs) all += (all.empty() ? "" : "\n") + e;
  throw Error(ErrorCode::Config, all);
}

}  // namespace

std::unique_ptr<Detector> make_detector(const RunConfig& cfg, const std::vector<NamedRaster>& originals) {
  if (cfg.detector.kind == DetectorKind::Remote) {
    return std::make_unique<RemoteDetector>(cfg.detector.url, cfg.detector.timeout_s);
  }
  return std::make_unique<SurrogateDetector>(cfg.surrogate, originals);
}

RunResult run_experiment(const RunConfig& cfg, const std::vector<NamedRaster>& originals, const OracleTable& oracle,
                         const Detector& detector, std::unique_ptr<Agent> agent, const RecordSink& sink) {
  if (auto errs = cfg.validate(); !errs.empty()) throw_config(errs);
  EnvConfig env_cfg = cfg.env_config();
  if (cfg.brightness_ref_from_oracle) env_cfg.sense.brightness_ref = oracle.brightness_ref;

  RunResult result;
  result.agent = agent ? std::move(agent) : make_agent(cfg.agent_config());
  Environment env(originals, oracle, detector, env_cfg);
  for (int round = 1; round <= cfg.rounds; ++round) {
    auto recs = env.run_round(*result.agent, round, sink);
    result.records.insert(result.records.end(), std::make_move_iterator(recs.begin()),
                          std::make_move_iterator(recs.end()));
  }
  const auto [reward, acc] = running_series(result.records);
  result.final_running_accuracy = acc.final_value();
  result.mean_reward = reward.final_value();
  return result;
}

RunResult run_from_files(const RunConfig& cfg) {
  std::vector<std::string> errs = cfg.validate();
  if (cfg.paths.images.empty()) errs.push_back("paths.images is required");
  if (cfg.paths.oracle.empty()) errs.push_back("paths.oracle is required");
  if (cfg.paths.log.empty()) errs.push_back("paths.log is required");
  if (!cfg.paths.images.empty() && !fs::is_directory(cfg.paths.images)) {
    errs.push_back("paths.images: no such directory '" + cfg.paths.images + "'");
  }
  if (!cfg.paths.oracle.empty() && !fs::is_regular_file(cfg.paths.oracle)) {
    errs.push_back("paths.oracle: no such file '" + cfg.paths.oracle + "'");
  }
  if (!cfg.paths.resume.empty() && !fs::is_regular_file(cfg.paths.resume)) {
    errs.push_back("paths.resume: no such file '" + cfg.paths.resume + "'");
  }
  if (!errs.empty()) throw_config(errs);

  const auto originals = load_image_set(cfg.paths.images);
  if (originals.empty()) throw Error(ErrorCode::Config, "paths.images contains no .ppm files");
  const auto oracle = load_oracle_table(cfg.paths.oracle);
  const auto detector = make_detector(cfg, originals);
  std::unique_ptr<Agent> agent;
  if (!cfg.paths.resume.empty()) agent = restore_agent(text::read_file(cfg.paths.resume));

  std::ofstream log(cfg.paths.log, std::ios::binary | std::ios::trunc);
  if (!log) throw Error(ErrorCode::Io, "cannot write " + cfg.paths.log);
  log << kLogHeader << '\n';
  RunResult result;
  try {
    result = run_experiment(cfg, originals, oracle, *detector, std::move(agent),
                            [&log](const IterationRecord& r) { log << format_log_row(r) << '\n'; });
  } catch (...) {
    log.flush();
    throw;
  }
  log.flush();
  if (!log) throw Error(ErrorCode::Io, "write failed for " + cfg.paths.log);
  if (!cfg.paths.snapshot.empty()) text::write_file(cfg.paths.snapshot, result.agent->snapshot());
  return result;
}

int synth_textures(const RunConfig& cfg, const fs::path& out_dir) {
  const auto images = generate_textures(cfg.texgen);
  write_image_set(images, out_dir);
  return static_cast<int>(images.size());
}

int synth_noisy(const RunConfig& cfg, const fs::path& in_dir, const fs::path& out_dir,
                const std::vector<NoiseKind>& kinds) {
  if (auto errs = cfg.filters.validate(); !errs.empty()) throw_config(errs);
  const auto originals = load_image_set(in_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  int written = 0;
  for (const auto& o : originals) {
    const auto stem = fs::path(o.name).stem().string();
    for (auto kind : kinds) {
      save_ppm(apply_noise(o.image, kind, cfg.filters), out_dir / (stem + "_" + std::string(to_string(kind)) + ".ppm"));
      ++written;
    }
  }
  return written;
}

OracleTable build_oracle_from_files(const RunConfig& cfg, const fs::path& images_dir, const fs::path& out_csv,
                                    int jobs) {
  if (auto errs = cfg.surrogate.validate(); !errs.empty()) throw_config(errs);
  const auto originals = load_image_set(images_dir);
  if (originals.empty()) throw Error(ErrorCode::Io, images_dir.string() + " contains no .ppm files");
  const auto detector = make_detector(cfg, originals);
  auto table = build_oracle_table(originals, *detector, jobs);
  save_oracle_table(table, out_csv);
  return table;
}

ReportResult write_report(const ReportOptions& opt) {
  const auto records = load_log(opt.log);
  if (records.empty()) throw Error(ErrorCode::MalformedLog, opt.log.string() + ": log has no records");
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + opt.out_dir.string() + ": " + ec.message());

  ReportResult res;
  res.rounds = summarize_rounds(records, opt.accuracy).size();
  auto emit = [&](const std::string& name, const std::string& body) {
    text::write_file(opt.out_dir / name, body);
    res.written.push_back(opt.out_dir / name);
  };
  emit("summary.csv", export_summary(records, opt.accuracy));
  emit("series.csv", export_series(records, opt.accuracy));

  if (!opt.compare.empty()) {
    std::vector<LabeledLog> logs;
    logs.push_back({opt.log.stem().string(), records});
    for (const auto& p : opt.compare) {
      auto recs = load_log(p);
      if (recs.empty()) throw Error(ErrorCode::MalformedLog, p.string() + ": log has no records");
      logs.push_back({p.stem().string(), std::move(recs)});
    }
    emit("comparison.csv", export_comparison(logs, opt.accuracy));
    if (opt.run_bands) emit("bands.csv", export_run_bands(logs, opt.accuracy));
  } else if (opt.run_bands) {
    std::vector<LabeledLog> logs{{opt.log.stem().string(), records}};
    emit("bands.csv", export_run_bands(logs, opt.accuracy));
  }
  return res;
}

}  // namespace imgrl
