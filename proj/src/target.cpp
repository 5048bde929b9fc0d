#include "fable/target.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fable/error.hpp"

namespace fable::target {

namespace {

void check_spec(const TargetSpec& spec) {
  if (!(spec.sigma_tau > 0.0) || !(spec.sigma_d > 0.0)) {
    raise("BadTargetSpec", "sigma_tau and sigma_d must be > 0");
  }
  if (spec.offset_low > spec.offset_high) {
    raise("BadTargetSpec", "offset_low > offset_high");
  }
  if (spec.clip_low > spec.clip_high) {
    raise("BadTargetSpec", "clip_low > clip_high");
  }
  if (spec.radius && *spec.radius < 1) {
    raise("BadTargetSpec", "radius must be >= 1 when set");
  }
  if (!(spec.truncation >= 0.0)) {
    raise("BadTargetSpec", "truncation must be >= 0");
  }
}

}  // namespace

double sample_target_value(double y_center, const TargetSpec& spec, Rng& rng) {
  const double magnitude = rng.uniform(spec.offset_low, spec.offset_high);
  const double raw = y_center < spec.extreme_threshold ? y_center + magnitude
                                                       : y_center - magnitude;
  return std::min(std::max(raw, spec.clip_low), spec.clip_high);
}

BuiltTarget build_target(const Tensor3& y_hat, const TargetSpec& spec,
                         Rng& rng) {
  check_spec(spec);
  const Dims3& d = y_hat.dims();
  const auto [tau_c, i_c, j_c] = spec.center;
  if (tau_c >= d.t || i_c >= d.r || j_c >= d.c) {
    raise("CenterOutOfBounds",
          "target center (" + std::to_string(tau_c) + "," +
              std::to_string(i_c) + "," + std::to_string(j_c) +
              ") outside forecast bounds");
  }

  const double y_center = y_hat(tau_c, i_c, j_c);
  const double target_value = sample_target_value(y_center, spec, rng);
  const double delta = target_value - y_center;

  const std::size_t radius = spec.radius.value_or(0);
  std::vector<double> values = y_hat.values();
  std::vector<std::array<std::size_t, 3>> cells;

  for (std::size_t tau = 0; tau < d.t; ++tau) {
    const double dt = static_cast<double>(tau) - static_cast<double>(tau_c);
    const double temporal = std::exp(-(dt * dt) / (spec.sigma_tau *
                                                   spec.sigma_tau));
    if (temporal < spec.truncation) continue;
    const double delta_tau = delta * temporal;

    const std::size_t i_lo = i_c >= radius ? i_c - radius : 0;
    const std::size_t i_hi = std::min(d.r - 1, i_c + radius);
    const std::size_t j_lo = j_c >= radius ? j_c - radius : 0;
    const std::size_t j_hi = std::min(d.c - 1, j_c + radius);
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      for (std::size_t j = j_lo; j <= j_hi; ++j) {
        const double di = static_cast<double>(i) - static_cast<double>(i_c);
        const double dj = static_cast<double>(j) - static_cast<double>(j_c);
        const double dist = std::sqrt(di * di + dj * dj);
        const double spatial = std::exp(-dist / spec.sigma_d);
        const std::size_t flat = (tau * d.r + i) * d.c + j;
        const double perturbed = std::min(
            std::max(values[flat] + delta_tau * spatial, spec.clip_low),
            spec.clip_high);
        if (perturbed != values[flat]) {
          values[flat] = perturbed;
          cells.push_back({tau, i, j});
        }
      }
    }
  }

  BuiltTarget built;
  built.y_target = Tensor3(d, std::move(values));
  built.domain = metrics::AttackDomain(d, std::move(cells));
  built.delta_center = delta;
  return built;
}

BuiltTarget build_target(const Tensor3& y_hat, const TargetSpec& spec) {
  Rng rng(spec.seed);
  return build_target(y_hat, spec, rng);
}

std::size_t sample_center_frame(std::size_t beta, Rng& rng) {
  const std::size_t lo = beta / 3;
  const std::size_t hi = (2 * beta) / 3;  // exclusive
  if (hi <= lo) return beta / 2;
  return lo + rng.index(hi - lo);
}

}  // namespace fable::target
