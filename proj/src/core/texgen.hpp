#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "detector.hpp"

namespace imgrl {

/// Procedural stand-ins for a photo set. Base levels cycle through `levels`
/// evenly spaced values in [brightness_lo, brightness_hi]. Sharp textures are
/// a tinted level plus strong stripes along one axis; every `soft_every`-th
/// image is soft instead: weak stripes over a smooth gradient and two blobs.
/// Stripes sit at the frequency the default sharpen inverts exactly, and the
/// `edge_fit` outermost samples are solved so the replicate-padded border
/// round-trips too. Levels at or above `warm_from` get a blue-deficient tint
/// that keeps HSL lightness in the middle tertile.
struct TexSpec {
  int width = 64;
  int height = 64;
  std::uint64_t seed = 7;
  int count = 64;
  double brightness_lo = 135.0;
  double brightness_hi = 190.0;
  int levels = 4;
  double chroma = 14.0;
  double sharp_amplitude = 36.0;
  double sharp_jitter = 0.03;
  double soft_amplitude = 12.0;
  int soft_every = 8;
  double blob_amplitude = 6.0;
  double gradient_amplitude = 4.0;
  double warm_from = 185.0;
  double warm_chroma = 10.0;
  int edge_fit = 12;

  std::vector<std::string> validate() const;
};

/// Deterministic for a fixed spec. Names are tex_<seed>_<i>.ppm.
std::vector<NamedRaster> generate_textures(const TexSpec& spec);
bool is_soft_texture(const TexSpec& spec, int index);

/// Writes each image as <dir>/<name>; creates `dir` if needed.
void write_image_set(const std::vector<NamedRaster>& images, const std::filesystem::path& dir);
/// Every *.ppm in `dir`, sorted by file name; the name is the file name.
std::vector<NamedRaster> load_image_set(const std::filesystem::path& dir);

}  // namespace imgrl
