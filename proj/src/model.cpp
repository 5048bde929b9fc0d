#include "fable/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "fable/error.hpp"
#include "fable/io.hpp"
#include "fable/rng.hpp"

namespace fable::model {

namespace {

constexpr char kMagic[4] = {'F', 'C', 'K', '1'};

void check_dims(const Dims3& got, const Dims3& want, const char* what) {
  if (!(got == want)) {
    raise("DimMismatch", std::string(what) + ": expected (" +
                             std::to_string(want.t) + "," +
                             std::to_string(want.r) + "," +
                             std::to_string(want.c) + "), got (" +
                             std::to_string(got.t) + "," +
                             std::to_string(got.r) + "," +
                             std::to_string(got.c) + ")");
  }
}

}  // namespace

const char* arch_name(Arch arch) {
  switch (arch) {
    case Arch::copy_last:
      return "copy_last";
    case Arch::linear_lag:
      return "linear_lag";
    case Arch::conv_ar:
      return "conv_ar";
  }
  return "unknown";
}

Arch arch_from_name(const std::string& name) {
  if (name == "copy_last") return Arch::copy_last;
  if (name == "linear_lag") return Arch::linear_lag;
  if (name == "conv_ar") return Arch::conv_ar;
  raise("UnknownArch", "no architecture named '" + name + "'");
}

std::size_t expected_param_count(Arch arch, const ModelDims& dims) {
  const std::size_t mix = dims.beta * dims.alpha_plus_1 + dims.beta;
  switch (arch) {
    case Arch::copy_last:
      return 0;
    case Arch::linear_lag:
      return mix;
    case Arch::conv_ar:
      return 9 + mix;
  }
  return 0;
}

Tensor3 ForecastModel::forward(const Tensor3& x) const {
  check_dims(x.dims(), dims_.input_dims(), "forward input");
  return do_forward(x);
}

Tensor3 ForecastModel::input_grad(const Tensor3& x,
                                  const Tensor3& cotangent) const {
  check_dims(x.dims(), dims_.input_dims(), "input_grad input");
  check_dims(cotangent.dims(), dims_.output_dims(), "input_grad cotangent");
  return do_input_grad(x, cotangent);
}

std::vector<double> ForecastModel::param_grad(const Tensor3& x,
                                              const Tensor3& cotangent) const {
  check_dims(x.dims(), dims_.input_dims(), "param_grad input");
  check_dims(cotangent.dims(), dims_.output_dims(), "param_grad cotangent");
  return do_param_grad(x, cotangent);
}

// ---------------------------------------------------------------------------
// CopyLastModel

Tensor3 CopyLastModel::do_forward(const Tensor3& x) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  std::vector<double> out(d.beta * plane);
  const std::size_t last = (d.alpha_plus_1 - 1) * plane;
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      out[tau * plane + p] = x[last + p];
    }
  }
  return Tensor3(d.output_dims(), std::move(out));
}

Tensor3 CopyLastModel::do_input_grad(const Tensor3&,
                                     const Tensor3& cotangent) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  std::vector<double> grad(d.alpha_plus_1 * plane, 0.0);
  const std::size_t last = (d.alpha_plus_1 - 1) * plane;
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      grad[last + p] += cotangent[tau * plane + p];
    }
  }
  return Tensor3(d.input_dims(), std::move(grad));
}

std::vector<double> CopyLastModel::do_param_grad(const Tensor3&,
                                                 const Tensor3&) const {
  return {};
}

void CopyLastModel::set_parameters(const std::vector<double>& params) {
  if (!params.empty()) {
    raise("LengthMismatch", "copy_last takes no parameters");
  }
}

// ---------------------------------------------------------------------------
// LinearLagModel

LinearLagModel::LinearLagModel(ModelDims dims, std::vector<double> params)
    : ForecastModel(dims) {
  set_parameters(params);
}

std::vector<double> LinearLagModel::parameters() const {
  std::vector<double> out = weights_;
  out.insert(out.end(), bias_.begin(), bias_.end());
  return out;
}

double LinearLagModel::w(std::size_t tau, std::size_t s) const {
  return weights_[tau * dims().alpha_plus_1 + s];
}

double LinearLagModel::b(std::size_t tau) const { return bias_[tau]; }

void LinearLagModel::set_parameters(const std::vector<double>& params) {
  const ModelDims& d = dims();
  const std::size_t want = expected_param_count(Arch::linear_lag, d);
  if (params.size() != want) {
    raise("LengthMismatch",
          "linear_lag expects " + std::to_string(want) + " parameters, got " +
              std::to_string(params.size()));
  }
  const std::size_t wlen = d.beta * d.alpha_plus_1;
  weights_.assign(params.begin(), params.begin() + wlen);
  bias_.assign(params.begin() + wlen, params.end());
}

Tensor3 LinearLagModel::do_forward(const Tensor3& x) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  std::vector<double> out(d.beta * plane);
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      double acc = bias_[tau];
      for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
        acc += weights_[tau * d.alpha_plus_1 + s] * x[s * plane + p];
      }
      out[tau * plane + p] = acc;
    }
  }
  return Tensor3(d.output_dims(), std::move(out));
}

Tensor3 LinearLagModel::do_input_grad(const Tensor3&,
                                      const Tensor3& cotangent) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  std::vector<double> grad(d.alpha_plus_1 * plane, 0.0);
  for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
    for (std::size_t p = 0; p < plane; ++p) {
      double acc = 0.0;
      for (std::size_t tau = 0; tau < d.beta; ++tau) {
        acc += weights_[tau * d.alpha_plus_1 + s] * cotangent[tau * plane + p];
      }
      grad[s * plane + p] = acc;
    }
  }
  return Tensor3(d.input_dims(), std::move(grad));
}

std::vector<double> LinearLagModel::do_param_grad(
    const Tensor3& x, const Tensor3& cotangent) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  std::vector<double> grad(expected_param_count(Arch::linear_lag, d), 0.0);
  const std::size_t bias_off = d.beta * d.alpha_plus_1;
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      const double ct = cotangent[tau * plane + p];
      for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
        grad[tau * d.alpha_plus_1 + s] += ct * x[s * plane + p];
      }
      grad[bias_off + tau] += ct;
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------
// ConvARModel

ConvARModel::ConvARModel(ModelDims dims, std::vector<double> params)
    : ForecastModel(dims) {
  set_parameters(params);
}

std::vector<double> ConvARModel::parameters() const {
  std::vector<double> out = kernel_;
  out.insert(out.end(), weights_.begin(), weights_.end());
  out.insert(out.end(), bias_.begin(), bias_.end());
  return out;
}

void ConvARModel::set_parameters(const std::vector<double>& params) {
  const ModelDims& d = dims();
  const std::size_t want = expected_param_count(Arch::conv_ar, d);
  if (params.size() != want) {
    raise("LengthMismatch",
          "conv_ar expects " + std::to_string(want) + " parameters, got " +
              std::to_string(params.size()));
  }
  const std::size_t wlen = d.beta * d.alpha_plus_1;
  kernel_.assign(params.begin(), params.begin() + 9);
  weights_.assign(params.begin() + 9, params.begin() + 9 + wlen);
  bias_.assign(params.begin() + 9 + wlen, params.end());
}

// conv[i,j] = sum_{p,q in 0..2} K[p,q] * x[s, i+p-1, j+q-1], zero outside.
std::vector<double> ConvARModel::correlate(const Tensor3& x,
                                           std::size_t s) const {
  const ModelDims& d = dims();
  std::vector<double> out(d.r * d.c, 0.0);
  for (std::size_t i = 0; i < d.r; ++i) {
    for (std::size_t j = 0; j < d.c; ++j) {
      double acc = 0.0;
      for (int p = 0; p < 3; ++p) {
        const int ii = static_cast<int>(i) + p - 1;
        if (ii < 0 || ii >= static_cast<int>(d.r)) continue;
        for (int q = 0; q < 3; ++q) {
          const int jj = static_cast<int>(j) + q - 1;
          if (jj < 0 || jj >= static_cast<int>(d.c)) continue;
          acc += kernel_[p * 3 + q] * x(s, static_cast<std::size_t>(ii),
                                        static_cast<std::size_t>(jj));
        }
      }
      out[i * d.c + j] = acc;
    }
  }
  return out;
}

Tensor3 ConvARModel::do_forward(const Tensor3& x) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  std::vector<std::vector<double>> conv(d.alpha_plus_1);
  for (std::size_t s = 0; s < d.alpha_plus_1; ++s) conv[s] = correlate(x, s);

  std::vector<double> out(d.beta * plane);
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      double z = bias_[tau];
      for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
        z += weights_[tau * d.alpha_plus_1 + s] * conv[s][p];
      }
      out[tau * plane + p] = std::tanh(z);
    }
  }
  return Tensor3(d.output_dims(), std::move(out));
}

Tensor3 ConvARModel::do_input_grad(const Tensor3& x,
                                   const Tensor3& cotangent) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  const Tensor3 y = do_forward(x);

  // dz[tau,p] = cot[tau,p] * (1 - y^2), then pull back through the temporal
  // mix and the kernel response.
  std::vector<double> dconv(d.alpha_plus_1 * plane, 0.0);
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      const double yv = y[tau * plane + p];
      const double dz = cotangent[tau * plane + p] * (1.0 - yv * yv);
      for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
        dconv[s * plane + p] += weights_[tau * d.alpha_plus_1 + s] * dz;
      }
    }
  }

  // Adjoint of the zero-padded cross-correlation:
  // grad[s,a,b] = sum_{p,q} K[p,q] * dconv[s, a-p+1, b-q+1].
  std::vector<double> grad(d.alpha_plus_1 * plane, 0.0);
  for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
    for (std::size_t a = 0; a < d.r; ++a) {
      for (std::size_t b = 0; b < d.c; ++b) {
        double acc = 0.0;
        for (int p = 0; p < 3; ++p) {
          const int i = static_cast<int>(a) - p + 1;
          if (i < 0 || i >= static_cast<int>(d.r)) continue;
          for (int q = 0; q < 3; ++q) {
            const int j = static_cast<int>(b) - q + 1;
            if (j < 0 || j >= static_cast<int>(d.c)) continue;
            acc += kernel_[p * 3 + q] *
                   dconv[s * plane + static_cast<std::size_t>(i) * d.c +
                         static_cast<std::size_t>(j)];
          }
        }
        grad[s * plane + a * d.c + b] = acc;
      }
    }
  }
  return Tensor3(d.input_dims(), std::move(grad));
}

std::vector<double> ConvARModel::do_param_grad(const Tensor3& x,
                                               const Tensor3& cotangent) const {
  const ModelDims& d = dims();
  const std::size_t plane = d.r * d.c;
  const Tensor3 y = do_forward(x);
  std::vector<std::vector<double>> conv(d.alpha_plus_1);
  for (std::size_t s = 0; s < d.alpha_plus_1; ++s) conv[s] = correlate(x, s);

  std::vector<double> grad(expected_param_count(Arch::conv_ar, d), 0.0);
  const std::size_t w_off = 9;
  const std::size_t b_off = 9 + d.beta * d.alpha_plus_1;

  std::vector<double> dconv(d.alpha_plus_1 * plane, 0.0);
  for (std::size_t tau = 0; tau < d.beta; ++tau) {
    for (std::size_t p = 0; p < plane; ++p) {
      const double yv = y[tau * plane + p];
      const double dz = cotangent[tau * plane + p] * (1.0 - yv * yv);
      for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
        grad[w_off + tau * d.alpha_plus_1 + s] += dz * conv[s][p];
        dconv[s * plane + p] += weights_[tau * d.alpha_plus_1 + s] * dz;
      }
      grad[b_off + tau] += dz;
    }
  }

  // dK[p,q] = sum_s sum_{i,j} dconv[s,i,j] * x[s, i+p-1, j+q-1].
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      double acc = 0.0;
      for (std::size_t s = 0; s < d.alpha_plus_1; ++s) {
        for (std::size_t i = 0; i < d.r; ++i) {
          const int ii = static_cast<int>(i) + p - 1;
          if (ii < 0 || ii >= static_cast<int>(d.r)) continue;
          for (std::size_t j = 0; j < d.c; ++j) {
            const int jj = static_cast<int>(j) + q - 1;
            if (jj < 0 || jj >= static_cast<int>(d.c)) continue;
            acc += dconv[s * plane + i * d.c + j] *
                   x(s, static_cast<std::size_t>(ii),
                     static_cast<std::size_t>(jj));
          }
        }
      }
      grad[static_cast<std::size_t>(p * 3 + q)] = acc;
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Construction, fit, serialization

std::unique_ptr<ForecastModel> make_model(Arch arch, const ModelDims& dims,
                                          std::uint64_t seed) {
  if (dims.alpha_plus_1 == 0 || dims.beta == 0 || dims.r == 0 || dims.c == 0) {
    raise("DimMismatch", "model dims must all be positive");
  }
  Rng rng(seed);
  switch (arch) {
    case Arch::copy_last:
      return std::make_unique<CopyLastModel>(dims);
    case Arch::linear_lag: {
      std::vector<double> params(expected_param_count(arch, dims));
      const std::size_t wlen = dims.beta * dims.alpha_plus_1;
      for (std::size_t i = 0; i < wlen; ++i) params[i] = rng.uniform(-0.1, 0.1);
      return std::make_unique<LinearLagModel>(dims, std::move(params));
    }
    case Arch::conv_ar: {
      std::vector<double> params(expected_param_count(arch, dims));
      for (std::size_t i = 0; i < 9; ++i) params[i] = rng.uniform(-0.05, 0.05);
      params[4] += 1.0;  // start near a delta kernel
      const std::size_t wlen = dims.beta * dims.alpha_plus_1;
      for (std::size_t i = 0; i < wlen; ++i) {
        params[9 + i] = rng.uniform(-0.1, 0.1);
      }
      return std::make_unique<ConvARModel>(dims, std::move(params));
    }
  }
  raise("UnknownArch", "bad architecture tag");
}

FitResult fit(Arch arch,
              const std::vector<std::pair<Tensor3, Tensor3>>& dataset,
              std::size_t epochs, double lr, std::uint64_t seed) {
  if (dataset.empty()) raise("EmptyDataset", "fit needs at least one pair");
  const Dims3 xd = dataset.front().first.dims();
  const Dims3 yd = dataset.front().second.dims();
  if (xd.r != yd.r || xd.c != yd.c) {
    raise("DimMismatch", "fit: input and target grids differ");
  }
  for (const auto& [x, y] : dataset) {
    if (!(x.dims() == xd) || !(y.dims() == yd)) {
      raise("DimMismatch", "fit: inconsistent dims across dataset");
    }
  }
  const ModelDims dims{xd.t, yd.t, xd.r, xd.c};
  auto model = make_model(arch, dims, seed);

  const double denom =
      static_cast<double>(dataset.size()) * static_cast<double>(yd.count());
  const auto mse = [&](const ForecastModel& m) {
    double acc = 0.0;
    for (const auto& [x, y] : dataset) {
      const Tensor3 pred = m.forward(x);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred[i] - y[i];
        acc += diff * diff;
      }
    }
    return acc / denom;
  };

  const std::size_t n_params = model->parameters().size();
  for (std::size_t epoch = 0; epoch < epochs && n_params > 0; ++epoch) {
    std::vector<double> grad(n_params, 0.0);
    for (const auto& [x, y] : dataset) {
      const Tensor3 pred = model->forward(x);
      std::vector<double> cot(pred.size());
      for (std::size_t i = 0; i < cot.size(); ++i) {
        cot[i] = 2.0 * (pred[i] - y[i]) / denom;
      }
      const std::vector<double> pg =
          model->param_grad(x, Tensor3(yd, std::move(cot)));
      for (std::size_t i = 0; i < n_params; ++i) grad[i] += pg[i];
    }
    std::vector<double> params = model->parameters();
    for (std::size_t i = 0; i < n_params; ++i) params[i] -= lr * grad[i];
    model->set_parameters(params);
  }

  FitResult result;
  result.final_loss = mse(*model);
  result.model = std::move(model);
  return result;
}

void save(const ForecastModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise("IoError", "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  out.put(static_cast<char>(m.arch()));
  const ModelDims& d = m.dims();
  io::put_u32le(out, static_cast<std::uint32_t>(d.alpha_plus_1));
  io::put_u32le(out, static_cast<std::uint32_t>(d.beta));
  io::put_u32le(out, static_cast<std::uint32_t>(d.r));
  io::put_u32le(out, static_cast<std::uint32_t>(d.c));
  const std::vector<double> params = m.parameters();
  io::put_u64le(out, params.size());
  for (double p : params) io::put_f64le(out, p);
  if (!out) raise("IoError", "write failed for " + path.string());
}

std::unique_ptr<ForecastModel> load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise("IoError", "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    raise("CorruptCheckpoint", "bad checkpoint magic in " + path.string());
  }
  const int tag = in.get();
  if (tag < 0 || tag > 2) {
    raise("CorruptCheckpoint", "bad architecture tag in " + path.string());
  }
  const Arch arch = static_cast<Arch>(tag);
  ModelDims dims;
  try {
    dims.alpha_plus_1 = io::get_u32le(in);
    dims.beta = io::get_u32le(in);
    dims.r = io::get_u32le(in);
    dims.c = io::get_u32le(in);
  } catch (const Error&) {
    raise("CorruptCheckpoint", "truncated checkpoint header in " +
                                   path.string());
  }
  if (dims.alpha_plus_1 == 0 || dims.beta == 0 || dims.r == 0 || dims.c == 0) {
    raise("CorruptCheckpoint", "zero dimension in " + path.string());
  }
  std::uint64_t count = 0;
  std::vector<double> params;
  try {
    count = io::get_u64le(in);
    if (count != expected_param_count(arch, dims)) {
      raise("CorruptCheckpoint", "parameter count mismatch in " +
                                     path.string());
    }
    params.resize(count);
    for (double& p : params) p = io::get_f64le(in);
  } catch (const Error& e) {
    if (e.kind() == "CorruptCheckpoint") throw;
    raise("CorruptCheckpoint", "truncated checkpoint in " + path.string());
  }
  for (double p : params) {
    if (!std::isfinite(p)) {
      raise("CorruptCheckpoint", "non-finite parameter in " + path.string());
    }
  }
  auto model = make_model(arch, dims, 0);
  model->set_parameters(params);
  return model;
}

}  // namespace fable::model
