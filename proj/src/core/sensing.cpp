#include "sensing.hpp"

#include <cmath>

#include "error.hpp"

namespace imgrl {

AgentState AgentState::from_index(int index) {
  if (index < 0 || index >= kStateCount) {
    throw Error(ErrorCode::IndexOutOfRange, "state index " + std::to_string(index) + " out of range");
  }
  return AgentState{index / 27, (index / 9) % 3 - 1, (index / 3) % 3, index % 3};
}

std::vector<std::string> SenseConfig::validate() const {
  std::vector<std::string> errs;
  if (!(std::isfinite(lap_var_hi) && std::isfinite(lap_var_lo) && lap_var_hi > lap_var_lo && lap_var_lo >= 0.0)) {
    errs.push_back("sense: require lap_var_hi > lap_var_lo >= 0");
  }
  if (!(std::isfinite(tertile_lo) && std::isfinite(tertile_hi) && 0.0 < tertile_lo && tertile_lo < tertile_hi &&
        tertile_hi < 255.0)) {
    errs.push_back("sense: require 0 < tertile_lo < tertile_hi < 255");
  }
  if (!(std::isfinite(brightness_band) && brightness_band > 0.0)) errs.push_back("sense.brightness_band must be > 0");
  if (!(std::isfinite(brightness_ref) && brightness_ref >= 0.0 && brightness_ref <= 255.0)) {
    errs.push_back("sense.brightness_ref must lie in [0, 255]");
  }
  return errs;
}

double laplacian_variance(const Raster& img) {
  const auto g = to_gray(img);
  const int w = g.width;
  const int h = g.height;
  auto px = [&](int x, int y) {
    x = x < 0 ? 0 : (x >= w ? w - 1 : x);
    y = y < 0 ? 0 : (y >= h ? h - 1 : y);
    return static_cast<double>(g.at(x, y));
  };
  // two-pass variance
  std::vector<double> resp(static_cast<std::size_t>(w) * h);
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = px(x - 1, y) + px(x + 1, y) + px(x, y - 1) + px(x, y + 1) - 4.0 * px(x, y);
      resp[static_cast<std::size_t>(y) * w + x] = r;
      sum += r;
    }
  }
  const double mean = sum / static_cast<double>(resp.size());
  double ss = 0.0;
  for (double r : resp) ss += (r - mean) * (r - mean);
  return ss / static_cast<double>(resp.size());
}

QualityFeatures measure_quality(const Raster& img) {
  return QualityFeatures{laplacian_variance(img), mean_gray(img), mean_v(img), mean_l(img)};
}

namespace {

int tertile(double v, const SenseConfig& cfg) {
  if (v < cfg.tertile_lo) return 0;
  if (v < cfg.tertile_hi) return 1;
  return 2;
}

}  // namespace

AgentState quantize_state(const QualityFeatures& f, const SenseConfig& cfg) {
  AgentState s;
  if (f.lap_var >= cfg.lap_var_hi) {
    s.blur = 0;
  } else if (f.lap_var >= cfg.lap_var_lo) {
    s.blur = 1;
  } else {
    s.blur = 2;
  }
  if (f.mean_gray < cfg.brightness_ref - cfg.brightness_band) {
    s.brightness = -1;
  } else if (f.mean_gray > cfg.brightness_ref + cfg.brightness_band) {
    s.brightness = 1;
  } else {
    s.brightness = 0;
  }
  s.value = tertile(f.mean_v, cfg);
  s.lightness = tertile(f.mean_l, cfg);
  return s;
}

AgentState sense_state(const Raster& img, const SenseConfig& cfg) { return quantize_state(measure_quality(img), cfg); }

std::array<double, kFeatureDim> feature_vector(const AgentState& s) {
  return {1.0, s.blur / 2.0, static_cast<double>(s.brightness), s.value / 2.0, s.lightness / 2.0};
}

}  // namespace imgrl
