#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace imgrl {

/// 8-bit interleaved RGB image, row-major, at least 1x1.
class Raster {
 public:
  Raster(int width, int height);
  Raster(int width, int height, std::vector<std::uint8_t> pixels);

  /// Uniformly filled image.
  static Raster filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t sample_count() const noexcept { return data_.size(); }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t at(int x, int y, int c) const noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::uint8_t& at(int x, int y, int c) noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Single-channel 8-bit image.
struct GrayRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  std::uint8_t at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

/// Square convolution kernel, side 3 or 5. weights[j * side + i] multiplies the
/// sample at (x + i - c, y + j - c), c = side / 2.
class Kernel {
 public:
  Kernel(int side, std::vector<double> weights);

  static Kernel identity(int side);
  static Kernel box(int side);
  /// Unit-sum sharpen: center value `center`, every other tap `off`.
  static Kernel sharpen3(double center, double off);

  int side() const noexcept { return side_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  int side_;
  std::vector<double> weights_;
};

/// Round half away from zero and clamp into [0, 255].
std::uint8_t quantize_channel(double v) noexcept;

GrayRaster to_gray(const Raster& img);
Raster convolve(const Raster& img, const Kernel& k);

/// out = 255 * (in / 255)^(1 / g). g > 1 brightens, g < 1 darkens.
Raster gamma_map(const Raster& img, double g);
/// The per-value table gamma_map applies.
std::array<std::uint8_t, 256> gamma_lut(double g);

double mean_gray(const Raster& img);
double mean_v(const Raster& img);
double mean_l(const Raster& img);

double rmse(const Raster& a, const Raster& b);

Raster read_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_ppm(const Raster& img);

Raster load_ppm(const std::filesystem::path& path);
void save_ppm(const Raster& img, const std::filesystem::path& path);

}  // namespace imgrl
