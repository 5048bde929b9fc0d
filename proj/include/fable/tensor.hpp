// Dense 3D tensor of doubles, the carrier type for input windows (alpha+1,
// r, c), forecasts (beta, r, c), and wavelet sub-band blocks.
//
// Layout is row-major (t, r, c): flat = (t * rows + r) * cols + c.  Values
// are validated finite at construction and immutable afterwards; every
// operation returns a fresh tensor.  At the scales this library targets the
// copies are cheap, and the no-alias guarantee keeps the attack loops and
// transform adjoints easy to reason about.

#pragma once

#include <cstddef>
#include <vector>

namespace fable {

struct Dims3 {
  std::size_t t = 0;
  std::size_t r = 0;
  std::size_t c = 0;

  std::size_t count() const { return t * r * c; }
  friend bool operator==(const Dims3&, const Dims3&) = default;
};

class Tensor3 {
 public:
  Tensor3() = default;

  // Takes ownership of `values`; throws LengthMismatch if the length is not
  // dims.count() and NonFiniteValue if any entry is NaN or infinite.
  Tensor3(Dims3 dims, std::vector<double> values);

  static Tensor3 zeros(Dims3 dims);
  static Tensor3 full(Dims3 dims, double value);

  const Dims3& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t t, std::size_t r, std::size_t c) const {
    return values_[(t * dims_.r + r) * dims_.c + c];
  }
  double operator[](std::size_t flat) const { return values_[flat]; }
  const std::vector<double>& values() const { return values_; }

  std::size_t flat_index(std::size_t t, std::size_t r, std::size_t c) const {
    return (t * dims_.r + r) * dims_.c + c;
  }

  // Bounds-checked element access; throws IndexOutOfRange.
  double at(std::size_t t, std::size_t r, std::size_t c) const;

 private:
  Dims3 dims_;
  std::vector<double> values_;
};

enum class Norm { L1, L2, Linf };

double norm(const Tensor3& x, Norm kind);

// Elementwise a - b; throws DimMismatch.
Tensor3 sub(const Tensor3& a, const Tensor3& b);
Tensor3 add(const Tensor3& a, const Tensor3& b);
Tensor3 scale(const Tensor3& a, double factor);

// Projects x onto the L-infinity ball of radius eps around center:
// out_i = min(max(x_i, center_i - eps), center_i + eps).  eps must be >= 0.
Tensor3 clip_to_ball(const Tensor3& x, const Tensor3& center, double eps);

// (x - mean) / std and its inverse.  std must be positive (ZeroStd).
Tensor3 standardize(const Tensor3& x, double mean, double std_dev);
Tensor3 destandardize(const Tensor3& x, double mean, double std_dev);

// log(1 + x) and its inverse, used for heavy-tailed nonnegative data such
// as precipitation; log1p keeps zero cells at exactly 0.  Requires all
// entries >= 0 (NegativeInput).
Tensor3 log1p_transform(const Tensor3& x);
Tensor3 expm1_transform(const Tensor3& x);

double mean_of(const Tensor3& x);
double std_of(const Tensor3& x);  // population standard deviation

}  // namespace fable
