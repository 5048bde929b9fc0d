// Adversarial target construction: a localized bump on the original
// forecast with Gaussian temporal decay and exponential spatial decay.
//
// The perturbed value at frame tau and cell (i, j) is
//   y'[tau,i,j] = y[tau,i,j]
//               + delta * exp(-(tau - tau_c)^2 / sigma_tau^2)
//                       * exp(-d((i_c,j_c),(i,j)) / sigma_d)
// restricted to the configured neighborhood of the center, with the
// temporal decay truncated below a threshold so the attack domain S stays
// finite.  delta is sampled so extreme forecasts are pushed non-extreme and
// vice versa.

#pragma once

#include <cstdint>
#include <optional>

#include "fable/metrics.hpp"
#include "fable/rng.hpp"
#include "fable/tensor.hpp"

namespace fable::target {

struct TargetSpec {
  // Center cell (tau_c, i_c, j_c), 0-based within the forecast bounds.
  std::array<std::size_t, 3> center = {0, 0, 0};
  double sigma_tau = 1.0;  // > 0
  double sigma_d = 1.0;    // > 0
  // Spatial neighborhood: nullopt = center cell only; radius k >= 1 = all
  // grid cells within Chebyshev distance k (radius 1 adds the 8 adjacent
  // cells).
  std::optional<std::size_t> radius;
  double extreme_threshold = 0.0;  // Y*
  double offset_low = 0.0;         // |delta| range, offset_low <= offset_high
  double offset_high = 0.0;
  double clip_low = 0.0;  // target value bounds, clip_low <= clip_high
  double clip_high = 0.0;
  std::uint64_t seed = 0;
  // Frames whose temporal decay falls below this gain no perturbed cells.
  double truncation = 1e-3;
};

struct BuiltTarget {
  Tensor3 y_target;
  metrics::AttackDomain domain;
  double delta_center = 0.0;  // sampled target value minus original forecast
};

// Draws the target value for the center cell: below the extreme threshold
// the forecast is pushed up into [y + offset_low, y + offset_high],
// otherwise down into [y - offset_high, y - offset_low]; the result is then
// clipped into [clip_low, clip_high].
double sample_target_value(double y_center, const TargetSpec& spec, Rng& rng);

// Builds the full target tensor and its attack domain.  Cells outside the
// domain equal y_hat bit-exactly; perturbed cells are clipped into
// [clip_low, clip_high].  Throws CenterOutOfBounds, BadTargetSpec.
BuiltTarget build_target(const Tensor3& y_hat, const TargetSpec& spec,
                         Rng& rng);

// Convenience overload seeding the draw from spec.seed.
BuiltTarget build_target(const Tensor3& y_hat, const TargetSpec& spec);

// Default center-frame draw: uniform over the middle third of a forecast
// window of beta frames.
std::size_t sample_center_frame(std::size_t beta, Rng& rng);

}  // namespace fable::target
