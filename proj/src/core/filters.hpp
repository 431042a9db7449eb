#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "raster.hpp"

namespace imgrl {

enum class NoiseKind { Blur = 0, Dark = 1, White = 2, Clean = 3 };
inline constexpr int kNoiseKindCount = 4;

/// De-noise filter arms. The ordinal is stable and used by agents and logs.
enum class Action { None = 0, Deblur, WeakWhiten, StrongWhiten, WeakDarken, StrongDarken };
inline constexpr int kActionCount = 6;

inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::None,       Action::Deblur,     Action::WeakWhiten,
    Action::StrongWhiten, Action::WeakDarken, Action::StrongDarken};

inline constexpr int ordinal(Action a) noexcept { return static_cast<int>(a); }
Action action_from_ordinal(int ordinal);

std::string_view to_string(NoiseKind kind) noexcept;
std::string_view to_string(Action a) noexcept;
std::optional<NoiseKind> parse_noise_kind(std::string_view name) noexcept;
std::optional<Action> parse_action(std::string_view name) noexcept;

struct FilterParams {
  int blur_kernel_side = 5;
  double sharpen_center = 9.0;
  double sharpen_off = -1.0;
  double noise_white_gamma = 3.5;
  double noise_dark_gamma = 0.2;
  double weak_whiten_gamma = 2.0;
  double strong_whiten_gamma = 5.0;
  double weak_darken_gamma = 0.5;
  double strong_darken_gamma = 1.0 / 3.5;

  /// Empty when valid; otherwise one message per violated invariant.
  std::vector<std::string> validate() const;
};

Raster apply_noise(const Raster& img, NoiseKind kind, const FilterParams& p = {});
Raster apply_action(const Raster& img, Action a, const FilterParams& p = {});

/// Actions counted as "accurate" for an injected noise kind. Lenient mode also
/// accepts the weak whiten/darken variant.
std::vector<Action> counter_action(NoiseKind kind, bool lenient = false);
bool is_counter_action(NoiseKind kind, Action a, bool lenient = false);

}  // namespace imgrl
