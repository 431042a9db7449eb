#pragma once

#include <array>
#include <string>
#include <vector>

#include "raster.hpp"

namespace imgrl {

inline constexpr int kStateCount = 81;
inline constexpr int kFeatureDim = 5;

/// Quantized image-quality observation.
///   blur:       0 sharp .. 2 blurriest (variance of Laplacian)
///   brightness: -1 / 0 / +1 relative to the detector's training-set mean
///   value:      tertile of mean HSV V
///   lightness:  tertile of mean HSL L
struct AgentState {
  int blur = 0;
  int brightness = 0;
  int value = 0;
  int lightness = 0;

  bool valid() const noexcept {
    return blur >= 0 && blur <= 2 && brightness >= -1 && brightness <= 1 && value >= 0 && value <= 2 &&
           lightness >= 0 && lightness <= 2;
  }

  /// Dense index in [0, 81).
  int index() const noexcept { return blur * 27 + (brightness + 1) * 9 + value * 3 + lightness; }
  static AgentState from_index(int index);

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct SenseConfig {
  double lap_var_hi = 100.0;
  double lap_var_lo = 30.0;
  double brightness_ref = 128.0;
  double brightness_band = 20.0;
  double tertile_lo = 85.0;
  double tertile_hi = 170.0;

  std::vector<std::string> validate() const;
};

/// Raw measurements behind an AgentState.
struct QualityFeatures {
  double lap_var = 0.0;
  double mean_gray = 0.0;
  double mean_v = 0.0;
  double mean_l = 0.0;
};

/// Population variance of the 4-neighbour Laplacian response over the
/// grayscale image, replicate-padded, unclamped.
double laplacian_variance(const Raster& img);

QualityFeatures measure_quality(const Raster& img);
AgentState quantize_state(const QualityFeatures& f, const SenseConfig& cfg);
AgentState sense_state(const Raster& img, const SenseConfig& cfg);

/// [1, blur/2, brightness, value/2, lightness/2]
std::array<double, kFeatureDim> feature_vector(const AgentState& s);

}  // namespace imgrl
