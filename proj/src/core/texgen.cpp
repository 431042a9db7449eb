#include "texgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "agents.hpp"
#include "error.hpp"

namespace imgrl {

namespace {

// Stripe frequency (rad/px) at which the unit-sum 3x3 sharpen exactly undoes
// the 5x5 box blur along one axis: cos w is the positive root of 6c^2+2c-3.
double stripe_frequency() {
  const double c = (-2.0 + std::sqrt(76.0)) / 12.0;
  return std::acos(c);
}

double symmetric(std::mt19937_64& rng) { return 2.0 * uniform01(rng) - 1.0; }

// Blur-then-sharpen along one axis with replicate padding, as a matrix.
Eigen::MatrixXd round_trip_matrix(int n) {
  auto clampi = [n](int i) { return std::clamp(i, 0, n - 1); };
  Eigen::MatrixXd blur = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd sharpen = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = -2; k <= 2; ++k) blur(i, clampi(i + k)) += 0.2;
    sharpen(i, i) += 10.0;
    for (int k = -1; k <= 1; ++k) sharpen(i, clampi(i + k)) -= 3.0;
  }
  return sharpen * blur;
}

// Replaces the `edge` outermost samples at each end of a stripe profile with
// the values that minimise the blur/sharpen round-trip residual.
void fit_edges(std::vector<double>& profile, const Eigen::MatrixXd& residual, int edge) {
  const int n = static_cast<int>(profile.size());
  edge = std::min(edge, n / 4);
  if (edge <= 0) return;
  std::vector<int> free_idx;
  for (int i = 0; i < edge; ++i) free_idx.push_back(i);
  for (int i = n - edge; i < n; ++i) free_idx.push_back(i);
  Eigen::MatrixXd a(n, static_cast<Eigen::Index>(free_idx.size()));
  Eigen::VectorXd fixed = Eigen::VectorXd::Map(profile.data(), n);
  for (std::size_t j = 0; j < free_idx.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)) = residual.col(free_idx[j]);
    fixed[free_idx[j]] = 0.0;
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(-(residual * fixed));
  for (std::size_t j = 0; j < free_idx.size(); ++j) profile[free_idx[j]] = sol[static_cast<Eigen::Index>(j)];
}

}  // namespace

std::vector<std::string> TexSpec::validate() const {
  std::vector<std::string> errs;
  if (width < 8 || height < 8) errs.push_back("texgen: width and height must be >= 8");
  if (count < 1) errs.push_back("texgen: count must be >= 1");
  if (levels < 1) errs.push_back("texgen: levels must be >= 1");
  if (soft_every < 0) errs.push_back("texgen: soft_every must be >= 0");
  if (!(brightness_lo >= 0.0 && brightness_hi <= 255.0 && brightness_lo <= brightness_hi)) {
    errs.push_back("texgen: require 0 <= brightness_lo <= brightness_hi <= 255");
  }
  if (edge_fit < 0) errs.push_back("texgen: edge_fit must be >= 0");
  if (!std::isfinite(warm_from)) errs.push_back("texgen: warm_from must be finite");
  for (double v : {chroma, warm_chroma, sharp_amplitude, sharp_jitter, soft_amplitude, blob_amplitude, gradient_amplitude}) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      errs.push_back("texgen: amplitudes must be finite and >= 0");
      break;
    }
  }
  return errs;
}

bool is_soft_texture(const TexSpec& spec, int index) {
  return spec.soft_every > 0 && index % spec.soft_every == spec.soft_every - 1;
}

std::vector<NamedRaster> generate_textures(const TexSpec& spec) {
  if (auto errs = spec.validate(); !errs.empty()) throw Error(ErrorCode::InvalidParameter, errs.front());
  std::mt19937_64 rng(spec.seed);
  const double omega = stripe_frequency();
  const double w = spec.width;
  const double h = spec.height;
  const Eigen::MatrixXd residual_x = round_trip_matrix(spec.width) - Eigen::MatrixXd::Identity(spec.width, spec.width);
  const Eigen::MatrixXd residual_y =
      round_trip_matrix(spec.height) - Eigen::MatrixXd::Identity(spec.height, spec.height);

  std::vector<NamedRaster> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    // Level index is decorrelated from the soft subset by striding with the
    // image index divided by the level count.
    const int level_idx = (i + i / spec.levels) % spec.levels;
    const double level =
        spec.levels == 1 ? spec.brightness_lo
                         : spec.brightness_lo + (spec.brightness_hi - spec.brightness_lo) * level_idx / (spec.levels - 1);
    const double base = level + 3.0 * symmetric(rng);
    const bool soft = is_soft_texture(spec, i);

    // Tint with zero luma so the tint moves V and L but not the gray mean.
    double tint[3];
    if (level >= spec.warm_from) {
      tint[0] = spec.warm_chroma * (0.8 + 0.2 * uniform01(rng));
      tint[1] = spec.warm_chroma * (0.8 + 0.2 * uniform01(rng));
      tint[2] = -(0.299 * tint[0] + 0.587 * tint[1]) / 0.114;
    } else {
      tint[0] = spec.chroma * symmetric(rng);
      tint[1] = spec.chroma * symmetric(rng);
      tint[2] = -(0.299 * tint[0] + 0.587 * tint[1]) / 0.114;
      const double tint_scale = std::max(1.0, std::abs(tint[2]) / std::max(spec.chroma, 1e-9));
      for (double& t : tint) t /= tint_scale;
    }

    const bool vertical = uniform01(rng) < 0.5;
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    const double amp = soft ? spec.soft_amplitude * (0.9 + 0.2 * uniform01(rng))
                            : spec.sharp_amplitude * (1.0 + spec.sharp_jitter * symmetric(rng));
    const int across = vertical ? spec.width : spec.height;
    std::vector<double> stripes(static_cast<std::size_t>(across));
    for (int t = 0; t < across; ++t) stripes[static_cast<std::size_t>(t)] = amp * std::sin(omega * t + phase);
    fit_edges(stripes, vertical ? residual_x : residual_y, spec.edge_fit);

    // Only soft textures carry the smooth gradient and blobs; sharp ones stay
    // constant along the stripes so blur and sharpen round-trip cleanly.
    double grad_angle = 0.0;
    double grad = 0.0;
    struct Blob {
      double cx, cy, sigma, amp;
    };
    Blob blobs[2] = {};
    if (soft) {
      grad_angle = 2.0 * std::numbers::pi * uniform01(rng);
      grad = spec.gradient_amplitude * symmetric(rng);
      for (auto& b : blobs) {
        b.cx = w * uniform01(rng);
        b.cy = h * uniform01(rng);
        b.sigma = 8.0 + 8.0 * uniform01(rng);
        b.amp = spec.blob_amplitude * symmetric(rng);
      }
    }

    Raster img(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        double v = base + stripes[static_cast<std::size_t>(vertical ? x : y)];
        if (soft) {
          const double nx = 2.0 * x / (w - 1.0) - 1.0;
          const double ny = 2.0 * y / (h - 1.0) - 1.0;
          v += grad * (nx * std::cos(grad_angle) + ny * std::sin(grad_angle)) / std::numbers::sqrt2;
          for (const auto& b : blobs) {
            const double dx = x - b.cx;
            const double dy = y - b.cy;
            v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
          }
        }
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = quantize_channel(v + tint[c]);
      }
    }
    out.push_back({"tex_" + std::to_string(spec.seed) + "_" + std::to_string(i) + ".ppm", std::move(img)});
  }
  return out;
}

void write_image_set(const std::vector<NamedRaster>& images, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& img : images) save_ppm(img.image, dir / img.name);
}

std::vector<NamedRaster> load_image_set(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  std::vector<NamedRaster> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back({f.filename().string(), load_ppm(f)});
  return out;
}

}  // namespace imgrl
