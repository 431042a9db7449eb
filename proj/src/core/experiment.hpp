#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"

namespace imgrl {

std::unique_ptr<Detector> make_detector(const RunConfig& cfg, const std::vector<NamedRaster>& originals);

struct RunResult {
  std::vector<IterationRecord> records;
  std::unique_ptr<Agent> agent;
  double final_running_accuracy = 0.0;
  double mean_reward = 0.0;
};

/// Runs cfg.rounds rounds against in-memory data; the agent persists across
/// rounds. `agent` may carry a restored learner, otherwise a fresh one is made.
RunResult run_experiment(const RunConfig& cfg, const std::vector<NamedRaster>& originals, const OracleTable& oracle,
                         const Detector& detector, std::unique_ptr<Agent> agent = nullptr,
                         const RecordSink& sink = {});

/// File-backed run: reads paths.images and paths.oracle, streams the iteration
/// log to paths.log (flushed even when a round aborts) and writes the final
/// agent snapshot to paths.snapshot when set.
RunResult run_from_files(const RunConfig& cfg);

/// Writes the texgen set into `out_dir`; returns the number of images.
int synth_textures(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Writes <stem>_<kind>.ppm for every *.ppm in `in_dir` and every kind.
int synth_noisy(const RunConfig& cfg, const std::filesystem::path& in_dir, const std::filesystem::path& out_dir,
                const std::vector<NoiseKind>& kinds);

/// Builds and saves the oracle table for the images in `images_dir`.
OracleTable build_oracle_from_files(const RunConfig& cfg, const std::filesystem::path& images_dir,
                                    const std::filesystem::path& out_csv, int jobs);

struct ReportOptions {
  std::filesystem::path log;
  std::filesystem::path out_dir;
  /// Extra logs shown side by side with `log` (comparison.csv).
  std::vector<std::filesystem::path> compare;
  /// Aggregate `log` and `compare` as re-seeded runs (bands.csv).
  bool run_bands = false;
  AccuracyMode accuracy = AccuracyMode::Logged;
};

struct ReportResult {
  std::size_t rounds = 0;
  std::vector<std::filesystem::path> written;
};

ReportResult write_report(const ReportOptions& opt);

}  // namespace imgrl
