#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "filters.hpp"
#include "sensing.hpp"
#include "texgen.hpp"

using namespace imgrl;

namespace {

double brute_lapvar(const Raster& img) {
  const int w = img.width();
  const int h = img.height();
  auto gray = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    const double g = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    return std::floor(g + 0.5);
  };
  std::vector<double> resp;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      resp.push_back(gray(x - 1, y) + gray(x + 1, y) + gray(x, y - 1) + gray(x, y + 1) - 4 * gray(x, y));
  double mean = 0.0;
  for (double r : resp) mean += r;
  mean /= static_cast<double>(resp.size());
  double var = 0.0;
  for (double r : resp) var += (r - mean) * (r - mean);
  return var / static_cast<double>(resp.size());
}

}  // namespace

TEST_CASE("laplacian variance") {
  CHECK(laplacian_variance(Raster::filled(6, 6, 77, 77, 77)) == 0.0);

  Raster stripes(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) stripes.at(x, y, c) = x % 2 ? 255 : 0;
  const double oracle = brute_lapvar(stripes);
  CHECK(oracle > 0.0);
  CHECK(laplacian_variance(stripes) == doctest::Approx(oracle).epsilon(1e-12));

  TexSpec spec;
  spec.count = 12;
  for (const auto& t : generate_textures(spec)) {
    CHECK(laplacian_variance(t.image) == doctest::Approx(brute_lapvar(t.image)).epsilon(1e-9));
    CHECK(laplacian_variance(apply_noise(t.image, NoiseKind::Blur)) < laplacian_variance(t.image));
  }
}

TEST_CASE("sense_state on flat images") {
  SenseConfig cfg;
  CHECK(sense_state(Raster::filled(4, 4, 0, 0, 0), cfg) == AgentState{2, -1, 0, 0});
  CHECK(sense_state(Raster::filled(4, 4, 255, 255, 255), cfg) == AgentState{2, 1, 2, 2});
}

TEST_CASE("quantize_state bucket rules") {
  SenseConfig cfg;
  CHECK(quantize_state({64.2, 130.0, 180.0, 150.0}, cfg) == AgentState{1, 0, 2, 1});
  CHECK(quantize_state({100.0, 148.0, 85.0, 170.0}, cfg).blur == 0);
  CHECK(quantize_state({30.0, 0, 0, 0}, cfg).blur == 1);
  CHECK(quantize_state({29.999, 0, 0, 0}, cfg).blur == 2);
  CHECK(quantize_state({0, 148.0, 85.0, 170.0}, cfg) == AgentState{2, 0, 1, 2});
  CHECK(quantize_state({0, 148.01, 84.99, 169.99}, cfg) == AgentState{2, 1, 0, 1});
  CHECK(quantize_state({0, 107.99, 0, 0}, cfg).brightness == -1);
  CHECK(quantize_state({0, 108.0, 0, 0}, cfg).brightness == 0);
}

TEST_CASE("dense state index is a bijection") {
  std::set<int> seen;
  for (int b = 0; b < 3; ++b)
    for (int br = -1; br <= 1; ++br)
      for (int v = 0; v < 3; ++v)
        for (int l = 0; l < 3; ++l) {
          const AgentState s{b, br, v, l};
          CHECK(s.index() == b * 27 + (br + 1) * 9 + v * 3 + l);
          CHECK(AgentState::from_index(s.index()) == s);
          seen.insert(s.index());
        }
  CHECK(seen.size() == 81);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 80);
  CHECK_THROWS(AgentState::from_index(81));
  CHECK_THROWS(AgentState::from_index(-1));
}

TEST_CASE("feature vector scaling") {
  using F = std::array<double, kFeatureDim>;
  CHECK(feature_vector({0, 0, 0, 0}) == F{1, 0, 0, 0, 0});
  CHECK(feature_vector({2, 1, 2, 2}) == F{1, 1, 1, 1, 1});
  CHECK(feature_vector({1, -1, 2, 0}) == F{1, 0.5, -1, 1, 0});
  for (int i = 0; i < kStateCount; ++i) {
    const auto f = feature_vector(AgentState::from_index(i));
    CHECK(f[0] == 1.0);
    for (double v : f) CHECK(std::abs(v) <= 1.0);
  }
}

TEST_CASE("sense config invariants") {
  CHECK(SenseConfig{}.validate().empty());
  SenseConfig c;
  c.lap_var_lo = 200.0;
  CHECK_FALSE(c.validate().empty());
  c = {};
  c.tertile_hi = 60.0;
  CHECK_FALSE(c.validate().empty());
  c = {};
  c.brightness_band = 0.0;
  CHECK_FALSE(c.validate().empty());
}
