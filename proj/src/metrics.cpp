#include "fable/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fable/error.hpp"

namespace fable::metrics {

namespace {

void check_same_dims(const Tensor3& a, const Tensor3& b, const char* op) {
  if (!(a.dims() == b.dims())) {
    raise("DimMismatch", std::string(op) + ": tensor dims differ");
  }
}

bool frame_constant(const Tensor3& x, std::size_t frame) {
  const std::size_t plane = x.dims().r * x.dims().c;
  const std::size_t base = frame * plane;
  double lo = x[base], hi = x[base];
  for (std::size_t p = 1; p < plane; ++p) {
    lo = std::min(lo, x[base + p]);
    hi = std::max(hi, x[base + p]);
  }
  return lo == hi;
}

}  // namespace

AttackDomain::AttackDomain(Dims3 bounds,
                           std::vector<std::array<std::size_t, 3>> cells)
    : bounds_(bounds), cells_(std::move(cells)) {
  mask_.assign(bounds_.count(), 0);
  for (const auto& [tau, i, j] : cells_) {
    if (tau >= bounds_.t || i >= bounds_.r || j >= bounds_.c) {
      raise("CellOutOfBounds",
            "domain cell (" + std::to_string(tau) + "," + std::to_string(i) +
                "," + std::to_string(j) + ") outside bounds");
    }
    char& slot = mask_[(tau * bounds_.r + i) * bounds_.c + j];
    if (slot != 0) {
      raise("DuplicateCell",
            "domain cell (" + std::to_string(tau) + "," + std::to_string(i) +
                "," + std::to_string(j) + ") listed twice");
    }
    slot = 1;
  }
  std::sort(cells_.begin(), cells_.end());
}

SpatialWeights spatial_weights(std::size_t r, std::size_t c) {
  const std::size_t n = r * c;
  if (n < 2) raise("DegenerateGrid", "spatial_weights needs r*c >= 2");
  SpatialWeights sw;
  sw.r = r;
  sw.c = c;
  sw.w.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const double ia = static_cast<double>(a / c);
    const double ja = static_cast<double>(a % c);
    for (std::size_t b = a + 1; b < n; ++b) {
      const double ib = static_cast<double>(b / c);
      const double jb = static_cast<double>(b % c);
      const double dist =
          std::sqrt((ia - ib) * (ia - ib) + (ja - jb) * (ja - jb));
      const double weight = 1.0 / dist;
      sw.w[a * n + b] = weight;
      sw.w[b * n + a] = weight;
      sw.total += 2.0 * weight;
    }
  }
  return sw;
}

double morans_i(const std::vector<double>& map, const SpatialWeights& weights,
                MoransPrefactor prefactor) {
  const std::size_t n = weights.r * weights.c;
  if (map.size() != n) {
    raise("DimMismatch", "morans_i: map size " + std::to_string(map.size()) +
                             " != grid cells " + std::to_string(n));
  }
  double mean = 0.0;
  for (double v : map) mean += v;
  mean /= static_cast<double>(n);

  double denom = 0.0;
  for (double v : map) denom += (v - mean) * (v - mean);
  if (denom == 0.0) raise("ZeroVariance", "morans_i: constant map");

  double numer = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double da = map[a] - mean;
    for (std::size_t b = 0; b < n; ++b) {
      numer += weights.w[a * n + b] * da * (map[b] - mean);
    }
  }
  const double scale = prefactor == MoransPrefactor::paper
                           ? static_cast<double>(n) * static_cast<double>(n)
                           : static_cast<double>(n);
  return (scale / weights.total) * numer / denom;
}

double morans_i_frame(const Tensor3& x, std::size_t frame,
                      const SpatialWeights& weights,
                      MoransPrefactor prefactor) {
  if (frame >= x.dims().t) raise("IndexOutOfRange", "morans_i_frame: frame");
  if (x.dims().r != weights.r || x.dims().c != weights.c) {
    raise("DimMismatch", "morans_i_frame: weights grid differs from tensor");
  }
  const std::size_t plane = x.dims().r * x.dims().c;
  std::vector<double> map(plane);
  for (std::size_t p = 0; p < plane; ++p) map[p] = x[frame * plane + p];
  return morans_i(map, weights, prefactor);
}

double lag_autocorr(const std::vector<double>& series, std::size_t lag) {
  const std::size_t n = series.size();
  if (lag < 1 || lag > n) {
    raise("LagOutOfRange", "lag " + std::to_string(lag) +
                               " outside 1.." + std::to_string(n));
  }
  if (lag == n) return 0.0;  // empty numerator

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) return 0.0;  // constant series, by convention

  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  double numer = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) {
    numer += (series[t] - mean) * (series[t + lag] - mean);
  }
  return numer / denom;
}

double closeness(const Tensor3& x, const Tensor3& x_adv) {
  check_same_dims(x, x_adv, "closeness");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x_adv[i] - x[i]);
  return acc;
}

double in_ae(const Tensor3& forecast, const Tensor3& target,
             const AttackDomain& s) {
  check_same_dims(forecast, target, "in_ae");
  if (s.empty()) raise("EmptyDomain", "in_ae: empty attack domain");
  if (!(s.bounds() == forecast.dims())) {
    raise("DimMismatch", "in_ae: domain bounds differ from tensors");
  }
  double acc = 0.0;
  for (const auto& [tau, i, j] : s.cells()) {
    acc += std::abs(forecast(tau, i, j) - target(tau, i, j));
  }
  return acc;
}

double out_ae(const Tensor3& forecast, const Tensor3& target,
              const AttackDomain& s) {
  check_same_dims(forecast, target, "out_ae");
  if (!(s.bounds() == forecast.dims())) {
    raise("DimMismatch", "out_ae: domain bounds differ from tensors");
  }
  const Dims3& d = forecast.dims();
  double acc = 0.0;
  for (std::size_t tau = 0; tau < d.t; ++tau) {
    for (std::size_t i = 0; i < d.r; ++i) {
      for (std::size_t j = 0; j < d.c; ++j) {
        if (!s.contains(tau, i, j)) {
          acc += std::abs(forecast(tau, i, j) - target(tau, i, j));
        }
      }
    }
  }
  return acc;
}

double r_s(const Tensor3& x_adv, const Tensor3& x,
           const SpatialWeights& weights, MoransPrefactor prefactor) {
  check_same_dims(x_adv, x, "r_s");
  if (x.dims().r != weights.r || x.dims().c != weights.c) {
    raise("DimMismatch", "r_s: weights grid differs from tensors");
  }
  double acc = 0.0;
  std::size_t valid = 0;
  for (std::size_t frame = 0; frame < x.dims().t; ++frame) {
    if (frame_constant(x, frame) || frame_constant(x_adv, frame)) continue;
    acc += std::abs(morans_i_frame(x_adv, frame, weights, prefactor) -
                    morans_i_frame(x, frame, weights, prefactor));
    ++valid;
  }
  if (valid == 0) raise("AllFramesDegenerate", "r_s: every frame constant");
  return acc / static_cast<double>(valid);
}

double r_t(const Tensor3& x_adv, const Tensor3& x) {
  check_same_dims(x_adv, x, "r_t");
  const Dims3& d = x.dims();
  const std::size_t plane = d.r * d.c;
  double acc = 0.0;
  std::vector<double> series(d.t), series_adv(d.t);
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t t = 0; t < d.t; ++t) {
      series[t] = x[t * plane + p];
      series_adv[t] = x_adv[t * plane + p];
    }
    for (std::size_t lag = 1; lag <= d.t; ++lag) {
      acc += std::abs(lag_autocorr(series_adv, lag) -
                      lag_autocorr(series, lag));
    }
  }
  return acc / (static_cast<double>(plane) * static_cast<double>(d.t));
}

}  // namespace fable::metrics
