#include "raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "error.hpp"

namespace imgrl {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidParameter,
                "raster dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

int clamp_index(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

}  // namespace

Raster::Raster(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), data_(std::move(pixels)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorCode::DimensionMismatch, "pixel buffer length does not match " +
                                                  std::to_string(width) + "x" +
                                                  std::to_string(height) + "x3");
  }
}

Raster Raster::filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Raster img(width, height);
  auto d = img.data();
  for (std::size_t i = 0; i < d.size(); i += 3) {
    d[i] = r;
    d[i + 1] = g;
    d[i + 2] = b;
  }
  return img;
}

Kernel::Kernel(int side, std::vector<double> weights) : side_(side), weights_(std::move(weights)) {
  if (side != 3 && side != 5) {
    throw Error(ErrorCode::InvalidParameter, "kernel side must be 3 or 5");
  }
  if (weights_.size() != static_cast<std::size_t>(side) * side) {
    throw Error(ErrorCode::InvalidParameter, "kernel weight count must be side*side");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidParameter, "kernel weights must be finite");
  }
}

Kernel Kernel::identity(int side) {
  std::vector<double> w(static_cast<std::size_t>(side) * side, 0.0);
  if (side == 3 || side == 5) w[w.size() / 2] = 1.0;
  return Kernel(side, std::move(w));
}

Kernel Kernel::box(int side) {
  return Kernel(side, std::vector<double>(static_cast<std::size_t>(side) * side,
                                          1.0 / (static_cast<double>(side) * side)));
}

Kernel Kernel::sharpen3(double center, double off) {
  std::vector<double> w(9, off);
  w[4] = center;
  return Kernel(3, std::move(w));
}

std::uint8_t quantize_channel(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(v));
}

GrayRaster to_gray(const Raster& img) {
  GrayRaster g{img.width(), img.height(), {}};
  auto d = img.data();
  g.values.resize(d.size() / 3);
  for (std::size_t p = 0; p < g.values.size(); ++p) {
    g.values[p] = quantize_channel(0.299 * d[3 * p] + 0.587 * d[3 * p + 1] + 0.114 * d[3 * p + 2]);
  }
  return g;
}

Raster convolve(const Raster& img, const Kernel& k) {
  const int w = img.width();
  const int h = img.height();
  const int side = k.side();
  const int c = side / 2;
  auto weights = k.weights();
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int j = 0; j < side; ++j) {
          const int sy = clamp_index(y + j - c, h - 1);
          for (int i = 0; i < side; ++i) {
            const int sx = clamp_index(x + i - c, w - 1);
            acc += weights[static_cast<std::size_t>(j) * side + i] * img.at(sx, sy, ch);
          }
        }
        out.at(x, y, ch) = quantize_channel(acc);
      }
    }
  }
  return out;
}

std::array<std::uint8_t, 256> gamma_lut(double g) {
  if (!std::isfinite(g) || g <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "gamma must be finite and positive");
  }
  std::array<std::uint8_t, 256> lut{};
  const double inv = 1.0 / g;
  for (int v = 0; v < 256; ++v) {
    lut[v] = quantize_channel(255.0 * std::pow(v / 255.0, inv));
  }
  return lut;
}

Raster gamma_map(const Raster& img, double g) {
  const auto lut = gamma_lut(g);
  Raster out = img;
  for (auto& v : out.data()) v = lut[v];
  return out;
}

double mean_gray(const Raster& img) {
  const auto g = to_gray(img);
  double sum = 0.0;
  for (auto v : g.values) sum += v;
  return sum / static_cast<double>(g.values.size());
}

double mean_v(const Raster& img) {
  auto d = img.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); i += 3) {
    sum += std::max({d[i], d[i + 1], d[i + 2]});
  }
  return sum / static_cast<double>(d.size() / 3);
}

double mean_l(const Raster& img) {
  auto d = img.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); i += 3) {
    const auto [lo, hi] = std::minmax({d[i], d[i + 1], d[i + 2]});
    sum += (static_cast<double>(lo) + hi) / 2.0;
  }
  return sum / static_cast<double>(d.size() / 3);
}

double rmse(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "rmse: images differ in size (" +
                                                  std::to_string(a.width()) + "x" +
                                                  std::to_string(a.height()) + " vs " +
                                                  std::to_string(b.width()) + "x" +
                                                  std::to_string(b.height()) + ")");
  }
  auto da = a.data();
  auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - db[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(da.size()));
}

// --- PPM ---------------------------------------------------------------------

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000) throw Error(ErrorCode::MalformedHeader, std::string("ppm: ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::MalformedHeader, std::string("ppm: expected ") + what);
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Raster read_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(ErrorCode::MalformedHeader, "ppm: missing P6 magic");
  }
  HeaderReader rd(bytes.subspan(2));
  if (rd.at_end() || !HeaderReader::is_space(rd.peek())) {
    throw Error(ErrorCode::MalformedHeader, "ppm: expected whitespace after magic");
  }
  const long width = rd.read_uint("width");
  const long height = rd.read_uint("height");
  const long maxval = rd.read_uint("maxval");
  if (width < 1 || height < 1) throw Error(ErrorCode::MalformedHeader, "ppm: zero dimension");
  if (maxval != 255) {
    throw Error(ErrorCode::UnsupportedMaxval, "ppm: maxval " + std::to_string(maxval) + " unsupported");
  }
  if (rd.at_end() || !HeaderReader::is_space(rd.peek())) {
    throw Error(ErrorCode::MalformedHeader, "ppm: expected single whitespace before payload");
  }
  rd.advance();
  const std::size_t offset = 2 + rd.pos();
  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - offset < need) {
    throw Error(ErrorCode::TruncatedPayload, "ppm: payload has " + std::to_string(bytes.size() - offset) +
                                                 " bytes, expected " + std::to_string(need));
  }
  auto first = bytes.begin() + static_cast<std::ptrdiff_t>(offset);
  return Raster(static_cast<int>(width), static_cast<int>(height),
                std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(need)));
}

std::vector<std::uint8_t> write_ppm(const Raster& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  auto d = img.data();
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

Raster load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return read_ppm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_ppm(const Raster& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const auto bytes = write_ppm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace imgrl
