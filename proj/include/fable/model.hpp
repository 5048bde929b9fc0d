// White-box surrogate forecast models g: R^{(alpha+1) x r x c} -> R^{beta x
// r x c} with exact hand-derived gradients.
//
// Three architectures:
//   * CopyLastModel  — persistence forecast, parameter-free; every output
//     frame repeats the last input frame.  Serves as an analytic-gradient
//     oracle in tests.
//   * LinearLagModel — per-location temporal mixing, Y[tau] = sum_s
//     W[tau,s] X[s] + b[tau].
//   * ConvARModel    — a shared 3x3 spatial kernel (cross-correlation, zero
//     padding) followed by temporal mixing and tanh; the spatial coupling is
//     what makes localized attacks nontrivial.
//
// input_grad computes the exact vector-Jacobian product d<cot, g(x)>/dx,
// which is the model-side factor of every attack's chain rule.  Models are
// immutable once built; only fit() and load() assign parameters.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fable/tensor.hpp"

namespace fable::model {

enum class Arch : std::uint8_t { copy_last = 0, linear_lag = 1, conv_ar = 2 };

const char* arch_name(Arch arch);
Arch arch_from_name(const std::string& name);  // throws UnknownArch

struct ModelDims {
  std::size_t alpha_plus_1 = 0;  // input frames
  std::size_t beta = 0;          // forecast frames
  std::size_t r = 0;
  std::size_t c = 0;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
  Dims3 input_dims() const { return {alpha_plus_1, r, c}; }
  Dims3 output_dims() const { return {beta, r, c}; }
};

class ForecastModel;

struct FitResult {
  std::unique_ptr<ForecastModel> model;
  double final_loss = 0.0;  // mean squared forecast error after training
};

FitResult fit(Arch arch,
              const std::vector<std::pair<Tensor3, Tensor3>>& dataset,
              std::size_t epochs, double lr, std::uint64_t seed);

void save(const ForecastModel& m, const std::filesystem::path& path);
std::unique_ptr<ForecastModel> load(const std::filesystem::path& path);

class ForecastModel {
 public:
  virtual ~ForecastModel() = default;

  virtual Arch arch() const = 0;
  const ModelDims& dims() const { return dims_; }

  // Forecast of dims (beta, r, c); throws DimMismatch unless x has dims
  // (alpha+1, r, c).  Deterministic and pure.
  Tensor3 forward(const Tensor3& x) const;

  // Exact vector-Jacobian product d<cotangent, g(x)>/dx, dims (alpha+1, r,
  // c); cotangent must have dims (beta, r, c).
  Tensor3 input_grad(const Tensor3& x, const Tensor3& cotangent) const;

  // Gradient of <cotangent, g(x)> with respect to the flat parameter
  // vector; used by fit().
  std::vector<double> param_grad(const Tensor3& x,
                                 const Tensor3& cotangent) const;

  virtual std::vector<double> parameters() const = 0;
  std::size_t parameter_count() const { return parameters().size(); }

 protected:
  explicit ForecastModel(ModelDims dims) : dims_(dims) {}

  virtual Tensor3 do_forward(const Tensor3& x) const = 0;
  virtual Tensor3 do_input_grad(const Tensor3& x,
                                const Tensor3& cotangent) const = 0;
  virtual std::vector<double> do_param_grad(const Tensor3& x,
                                            const Tensor3& cotangent) const = 0;
  virtual void set_parameters(const std::vector<double>& params) = 0;

 private:
  friend FitResult fit(Arch, const std::vector<std::pair<Tensor3, Tensor3>>&,
                       std::size_t, double, std::uint64_t);
  friend std::unique_ptr<ForecastModel> load(const std::filesystem::path&);

  ModelDims dims_;
};

// Fresh untrained instance with deterministic parameter initialization.
std::unique_ptr<ForecastModel> make_model(Arch arch, const ModelDims& dims,
                                          std::uint64_t seed);

class CopyLastModel final : public ForecastModel {
 public:
  explicit CopyLastModel(ModelDims dims) : ForecastModel(dims) {}
  Arch arch() const override { return Arch::copy_last; }
  std::vector<double> parameters() const override { return {}; }

 protected:
  Tensor3 do_forward(const Tensor3& x) const override;
  Tensor3 do_input_grad(const Tensor3& x,
                        const Tensor3& cotangent) const override;
  std::vector<double> do_param_grad(const Tensor3& x,
                                    const Tensor3& cotangent) const override;
  void set_parameters(const std::vector<double>& params) override;
};

class LinearLagModel final : public ForecastModel {
 public:
  // Parameter layout: W row-major (beta x (alpha+1)), then b (beta).
  LinearLagModel(ModelDims dims, std::vector<double> params);
  Arch arch() const override { return Arch::linear_lag; }
  std::vector<double> parameters() const override;

  double w(std::size_t tau, std::size_t s) const;
  double b(std::size_t tau) const;

 protected:
  Tensor3 do_forward(const Tensor3& x) const override;
  Tensor3 do_input_grad(const Tensor3& x,
                        const Tensor3& cotangent) const override;
  std::vector<double> do_param_grad(const Tensor3& x,
                                    const Tensor3& cotangent) const override;
  void set_parameters(const std::vector<double>& params) override;

 private:
  std::vector<double> weights_;  // beta * (alpha+1)
  std::vector<double> bias_;     // beta
};

class ConvARModel final : public ForecastModel {
 public:
  // Parameter layout: K row-major (3 x 3), W row-major (beta x (alpha+1)),
  // then b (beta).
  ConvARModel(ModelDims dims, std::vector<double> params);
  Arch arch() const override { return Arch::conv_ar; }
  std::vector<double> parameters() const override;

 protected:
  Tensor3 do_forward(const Tensor3& x) const override;
  Tensor3 do_input_grad(const Tensor3& x,
                        const Tensor3& cotangent) const override;
  std::vector<double> do_param_grad(const Tensor3& x,
                                    const Tensor3& cotangent) const override;
  void set_parameters(const std::vector<double>& params) override;

 private:
  // Per-frame kernel response (K applied to one input frame, zero padding).
  std::vector<double> correlate(const Tensor3& x, std::size_t s) const;

  std::vector<double> kernel_;   // 9
  std::vector<double> weights_;  // beta * (alpha+1)
  std::vector<double> bias_;     // beta
};

std::size_t expected_param_count(Arch arch, const ModelDims& dims);

}  // namespace fable::model
