#include "fable/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fable/error.hpp"

namespace fable {

namespace {

void check_same_dims(const Tensor3& a, const Tensor3& b, const char* op) {
  if (!(a.dims() == b.dims())) {
    raise("DimMismatch", std::string(op) + ": (" + std::to_string(a.dims().t) +
                             "," + std::to_string(a.dims().r) + "," +
                             std::to_string(a.dims().c) + ") vs (" +
                             std::to_string(b.dims().t) + "," +
                             std::to_string(b.dims().r) + "," +
                             std::to_string(b.dims().c) + ")");
  }
}

}  // namespace

Tensor3::Tensor3(Dims3 dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (values_.size() != dims_.count()) {
    raise("LengthMismatch",
          "expected " + std::to_string(dims_.count()) + " values, got " +
              std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      raise("NonFiniteValue", "tensor contains NaN or Inf");
    }
  }
}

Tensor3 Tensor3::zeros(Dims3 dims) {
  return Tensor3(dims, std::vector<double>(dims.count(), 0.0));
}

Tensor3 Tensor3::full(Dims3 dims, double value) {
  return Tensor3(dims, std::vector<double>(dims.count(), value));
}

double Tensor3::at(std::size_t t, std::size_t r, std::size_t c) const {
  if (t >= dims_.t || r >= dims_.r || c >= dims_.c) {
    raise("IndexOutOfRange", "(" + std::to_string(t) + "," + std::to_string(r) +
                                 "," + std::to_string(c) + ") outside (" +
                                 std::to_string(dims_.t) + "," +
                                 std::to_string(dims_.r) + "," +
                                 std::to_string(dims_.c) + ")");
  }
  return (*this)(t, r, c);
}

double norm(const Tensor3& x, Norm kind) {
  double acc = 0.0;
  switch (kind) {
    case Norm::L1:
      for (double v : x.values()) acc += std::abs(v);
      return acc;
    case Norm::L2:
      for (double v : x.values()) acc += v * v;
      return std::sqrt(acc);
    case Norm::Linf:
      for (double v : x.values()) acc = std::max(acc, std::abs(v));
      return acc;
  }
  return acc;
}

Tensor3 sub(const Tensor3& a, const Tensor3& b) {
  check_same_dims(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return Tensor3(a.dims(), std::move(out));
}

Tensor3 add(const Tensor3& a, const Tensor3& b) {
  check_same_dims(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Tensor3(a.dims(), std::move(out));
}

Tensor3 scale(const Tensor3& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * factor;
  return Tensor3(a.dims(), std::move(out));
}

Tensor3 clip_to_ball(const Tensor3& x, const Tensor3& center, double eps) {
  check_same_dims(x, center, "clip_to_ball");
  if (eps < 0.0) raise("NegativeEps", "clip_to_ball: eps must be >= 0");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(std::max(x[i], center[i] - eps), center[i] + eps);
  }
  return Tensor3(x.dims(), std::move(out));
}

Tensor3 standardize(const Tensor3& x, double mean, double std_dev) {
  if (!(std_dev > 0.0)) raise("ZeroStd", "standardize: std must be > 0");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x[i] - mean) / std_dev;
  return Tensor3(x.dims(), std::move(out));
}

Tensor3 destandardize(const Tensor3& x, double mean, double std_dev) {
  if (!(std_dev > 0.0)) raise("ZeroStd", "destandardize: std must be > 0");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * std_dev + mean;
  return Tensor3(x.dims(), std::move(out));
}

Tensor3 log1p_transform(const Tensor3& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (x[i] < 0.0) raise("NegativeInput", "log1p_transform: entry < 0");
    out[i] = std::log1p(x[i]);
  }
  return Tensor3(x.dims(), std::move(out));
}

Tensor3 expm1_transform(const Tensor3& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::expm1(x[i]);
  return Tensor3(x.dims(), std::move(out));
}

double mean_of(const Tensor3& x) {
  if (x.size() == 0) return 0.0;
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return acc / static_cast<double>(x.size());
}

double std_of(const Tensor3& x) {
  if (x.size() == 0) return 0.0;
  const double mu = mean_of(x);
  double acc = 0.0;
  for (double v : x.values()) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace fable
