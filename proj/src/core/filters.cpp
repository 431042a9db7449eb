#include "filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace imgrl {

namespace {

constexpr std::array<std::string_view, kNoiseKindCount> kNoiseNames = {"blur", "dark", "white", "clean"};
constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "none", "deblur", "weak_whiten", "strong_whiten", "weak_darken", "strong_darken"};

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

Action action_from_ordinal(int ordinal) {
  if (ordinal < 0 || ordinal >= kActionCount) {
    throw Error(ErrorCode::IndexOutOfRange, "action ordinal " + std::to_string(ordinal) + " out of range");
  }
  return static_cast<Action>(ordinal);
}

std::string_view to_string(NoiseKind kind) noexcept { return kNoiseNames[static_cast<int>(kind)]; }
std::string_view to_string(Action a) noexcept { return kActionNames[ordinal(a)]; }

std::optional<NoiseKind> parse_noise_kind(std::string_view name) noexcept {
  for (int i = 0; i < kNoiseKindCount; ++i) {
    if (kNoiseNames[i] == name) return static_cast<NoiseKind>(i);
  }
  return std::nullopt;
}

std::optional<Action> parse_action(std::string_view name) noexcept {
  for (int i = 0; i < kActionCount; ++i) {
    if (kActionNames[i] == name) return static_cast<Action>(i);
  }
  return std::nullopt;
}

std::vector<std::string> FilterParams::validate() const {
  std::vector<std::string> errs;
  if (blur_kernel_side != 3 && blur_kernel_side != 5) errs.push_back("filters.blur_kernel_side must be 3 or 5");
  if (!std::isfinite(sharpen_center) || !std::isfinite(sharpen_off)) errs.push_back("filters.sharpen_* must be finite");
  const std::pair<const char*, double> gammas[] = {
      {"noise_white_gamma", noise_white_gamma},     {"noise_dark_gamma", noise_dark_gamma},
      {"weak_whiten_gamma", weak_whiten_gamma},     {"strong_whiten_gamma", strong_whiten_gamma},
      {"weak_darken_gamma", weak_darken_gamma},     {"strong_darken_gamma", strong_darken_gamma}};
  bool all_ok = true;
  for (const auto& [name, g] : gammas) {
    if (!positive_finite(g)) {
      errs.push_back(std::string("filters.") + name + " must be finite and > 0");
      all_ok = false;
    }
  }
  if (all_ok) {
    if (!(strong_whiten_gamma > weak_whiten_gamma && weak_whiten_gamma > 1.0)) {
      errs.push_back("filters: require strong_whiten_gamma > weak_whiten_gamma > 1");
    }
    if (!(strong_darken_gamma < weak_darken_gamma && weak_darken_gamma < 1.0)) {
      errs.push_back("filters: require 0 < strong_darken_gamma < weak_darken_gamma < 1");
    }
  }
  return errs;
}

Raster apply_noise(const Raster& img, NoiseKind kind, const FilterParams& p) {
  switch (kind) {
    case NoiseKind::Blur: return convolve(img, Kernel::box(p.blur_kernel_side));
    case NoiseKind::White: return gamma_map(img, p.noise_white_gamma);
    case NoiseKind::Dark: return gamma_map(img, p.noise_dark_gamma);
    case NoiseKind::Clean: return img;
  }
  throw Error(ErrorCode::InvalidParameter, "unknown noise kind");
}

Raster apply_action(const Raster& img, Action a, const FilterParams& p) {
  switch (a) {
    case Action::None: return img;
    case Action::Deblur: return convolve(img, Kernel::sharpen3(p.sharpen_center, p.sharpen_off));
    case Action::WeakWhiten: return gamma_map(img, p.weak_whiten_gamma);
    case Action::StrongWhiten: return gamma_map(img, p.strong_whiten_gamma);
    case Action::WeakDarken: return gamma_map(img, p.weak_darken_gamma);
    case Action::StrongDarken: return gamma_map(img, p.strong_darken_gamma);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown action");
}

std::vector<Action> counter_action(NoiseKind kind, bool lenient) {
  switch (kind) {
    case NoiseKind::Blur: return {Action::Deblur};
    case NoiseKind::Clean: return {Action::None};
    case NoiseKind::Dark:
      return lenient ? std::vector{Action::WeakWhiten, Action::StrongWhiten} : std::vector{Action::StrongWhiten};
    case NoiseKind::White:
      return lenient ? std::vector{Action::WeakDarken, Action::StrongDarken} : std::vector{Action::StrongDarken};
  }
  return {};
}

bool is_counter_action(NoiseKind kind, Action a, bool lenient) {
  const auto set = counter_action(kind, lenient);
  return std::find(set.begin(), set.end(), a) != set.end();
}

}  // namespace imgrl
