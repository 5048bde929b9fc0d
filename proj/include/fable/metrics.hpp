// Evaluation metrics: closeness, in/out-target absolute error, Moran's I,
// lag-l temporal autocorrelation, and the realisticness deltas R_S / R_T.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fable/tensor.hpp"

namespace fable::metrics {

// The set S of forecast cells (tau, i, j) an attack targets.  Cells are
// stored sorted and deduplicated, with a dense mask for O(1) membership.
class AttackDomain {
 public:
  AttackDomain() = default;

  // Validates every cell against bounds (CellOutOfBounds) and rejects
  // duplicates (DuplicateCell).
  AttackDomain(Dims3 bounds, std::vector<std::array<std::size_t, 3>> cells);

  const Dims3& bounds() const { return bounds_; }
  const std::vector<std::array<std::size_t, 3>>& cells() const {
    return cells_;
  }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  bool contains(std::size_t tau, std::size_t i, std::size_t j) const {
    if (tau >= bounds_.t || i >= bounds_.r || j >= bounds_.c) return false;
    return mask_[(tau * bounds_.r + i) * bounds_.c + j] != 0;
  }

 private:
  Dims3 bounds_;
  std::vector<std::array<std::size_t, 3>> cells_;
  std::vector<char> mask_;
};

// Inverse-distance weight matrix over an r x c grid, flattened row-major:
// w[a*rc + b] = 1/dist(a, b) for a != b, zero diagonal, symmetric.
struct SpatialWeights {
  std::size_t r = 0;
  std::size_t c = 0;
  std::vector<double> w;
  double total = 0.0;  // sum of all entries
};

// Euclidean grid distance d((i,j),(k,l)) = sqrt((i-k)^2 + (j-l)^2).
// Requires r*c >= 2 (DegenerateGrid).
SpatialWeights spatial_weights(std::size_t r, std::size_t c);

// The source formula uses prefactor r^2*c^2 / W; the classical statistic
// uses N / W = rc / W.  Realisticness only ever differences two I values,
// so either choice is self-consistent.
enum class MoransPrefactor { paper, classical };

// Moran's I of a flattened r x c map (map.size() must equal weights.r *
// weights.c).  Throws ZeroVariance on a constant map.
double morans_i(const std::vector<double>& map, const SpatialWeights& weights,
                MoransPrefactor prefactor = MoransPrefactor::paper);

// Moran's I of one time slice of a tensor.
double morans_i_frame(const Tensor3& x, std::size_t frame,
                      const SpatialWeights& weights,
                      MoransPrefactor prefactor = MoransPrefactor::paper);

// Lag-l autocorrelation: sum_{t=1}^{n-l} (x_t - mean)(x_{t+l} - mean) /
// sum (x_t - mean)^2, 1-based.  Requires 1 <= l <= n (LagOutOfRange);
// returns 0 for l == n (empty numerator) and for constant series.
double lag_autocorr(const std::vector<double>& series, std::size_t lag);

// ||x_adv - x||_1.
double closeness(const Tensor3& x, const Tensor3& x_adv);

// Sum over the domain cells of |forecast - target|; EmptyDomain if s is
// empty.  out_ae sums the complement (0 when s covers everything).
double in_ae(const Tensor3& forecast, const Tensor3& target,
             const AttackDomain& s);
double out_ae(const Tensor3& forecast, const Tensor3& target,
              const AttackDomain& s);

// Mean over time frames of |I(x_adv frame) - I(x frame)|.  Frames where
// either tensor is constant are skipped and the mean is over the frames
// that remain; AllFramesDegenerate if none are valid.
double r_s(const Tensor3& x_adv, const Tensor3& x,
           const SpatialWeights& weights,
           MoransPrefactor prefactor = MoransPrefactor::paper);

// Mean over grid locations and lags 1..t of |rho_l(x_adv series) -
// rho_l(x series)| for the per-location time series.
double r_t(const Tensor3& x_adv, const Tensor3& x);

}  // namespace fable::metrics
