#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "raster.hpp"

namespace imgrl {

/// Softmax output of a detector: C >= 2 probabilities summing to one.
class ProbVector {
 public:
  /// Validates the invariants with the given sum tolerance; throws
  /// InvalidProbability on violation. Values are never renormalized.
  static ProbVector from_values(std::vector<double> probs, double sum_tol = 1e-9);

  std::size_t class_count() const noexcept { return probs_.size(); }
  const std::vector<double>& values() const noexcept { return probs_; }

 private:
  explicit ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

double correct_prob(const ProbVector& p, std::size_t true_class);

/// Deterministic label assignment: FNV-1a of the image name, modulo C.
std::size_t true_class_for(std::string_view image_name, std::size_t class_count);

struct NamedRaster {
  std::string name;
  Raster image;
};

/// The task network D. Implementations must be callable concurrently.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual ProbVector infer(const Raster& img, std::string_view image_name) const = 0;
  virtual std::string describe() const = 0;
};

/// Probability on the image's deterministic true class.
double score(const Detector& d, const Raster& img, std::string_view image_name);

struct SurrogateConfig {
  int class_count = 10;
  double p_oracle = 0.68;
  double decay = 12.0;

  std::vector<std::string> validate() const;
};

/// CNN-free stand-in for D: the true-class probability decays exponentially
/// with RMSE from the registered original,
///   p_true = 1/C + (p_oracle - 1/C) * exp(-decay * rmse / 255),
/// and the remaining mass is spread evenly over the other classes.
class SurrogateDetector final : public Detector {
 public:
  SurrogateDetector(SurrogateConfig cfg, const std::vector<NamedRaster>& originals);

  ProbVector infer(const Raster& img, std::string_view image_name) const override;
  std::string describe() const override;

  double true_class_probability(double rmse_to_original) const noexcept;

 private:
  SurrogateConfig cfg_;
  std::map<std::string, Raster, std::less<>> registry_;
};

/// HTTP client for the detector service: POST <base>/infer with PPM bytes,
/// expects {"class_count": C, "probs": [...], "model": "..."}.
class RemoteDetector final : public Detector {
 public:
  explicit RemoteDetector(std::string base_url, double timeout_s = 30.0);
  ~RemoteDetector() override;

  ProbVector infer(const Raster& img, std::string_view image_name) const override;
  std::string describe() const override;

  /// Parses and validates a service response body.
  static ProbVector parse_response(std::string_view body);

 private:
  struct Impl;
  std::string base_url_;
  std::unique_ptr<Impl> impl_;
};

struct OracleTable {
  std::map<std::string, double, std::less<>> entries;
  double brightness_ref = 0.0;

  double lookup(std::string_view image_name) const;
};

/// Scores every original with D. `jobs` > 1 spreads calls over a worker pool;
/// the result does not depend on `jobs`.
OracleTable build_oracle_table(const std::vector<NamedRaster>& originals, const Detector& detector, int jobs = 1);

std::string write_oracle_csv(const OracleTable& table);
OracleTable read_oracle_csv(std::string_view text);
void save_oracle_table(const OracleTable& table, const std::filesystem::path& path);
OracleTable load_oracle_table(const std::filesystem::path& path);

}  // namespace imgrl
