#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <utility>
#include <vector>

#include <doctest.h>

#include "fable/error.hpp"
#include "fable/model.hpp"
#include "fable/rng.hpp"
#include "fable/tensor.hpp"
#include "helpers.hpp"

using fable::Dims3;
using fable::Norm;
using fable::Rng;
using fable::Tensor3;
using testutil::random_tensor;
using testutil::thrown_kind;
namespace md = fable::model;
namespace fs = std::filesystem;

namespace {

// Central finite differences of f(x) = <cotangent, forward(x)> against the
// analytic input_grad; returns the max relative error over all coordinates
// (absolute where the reference is tiny).
double grad_fd_error(const md::ForecastModel& m, const Tensor3& x,
                     const Tensor3& cot, double h = 1e-5) {
  const Tensor3 analytic = m.input_grad(x, cot);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> plus = x.values(), minus = x.values();
    plus[i] += h;
    minus[i] -= h;
    double fp = 0.0, fm = 0.0;
    const Tensor3 yp = m.forward(Tensor3(x.dims(), std::move(plus)));
    const Tensor3 ym = m.forward(Tensor3(x.dims(), std::move(minus)));
    for (std::size_t k = 0; k < cot.size(); ++k) {
      fp += cot[k] * yp[k];
      fm += cot[k] * ym[k];
    }
    const double fd = (fp - fm) / (2.0 * h);
    const double scale = std::max(1.0, std::abs(fd));
    worst = std::max(worst, std::abs(analytic[i] - fd) / scale);
  }
  return worst;
}

std::unique_ptr<md::ForecastModel> random_model(md::Arch arch,
                                                const md::ModelDims& dims,
                                                std::uint64_t seed) {
  auto m = md::make_model(arch, dims, seed);
  return m;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("copy_last repeats the final input frame") {
  const md::ModelDims dims{3, 2, 2, 2};
  md::CopyLastModel m(dims);
  Rng rng(51);
  const Tensor3 x = random_tensor(dims.input_dims(), rng);
  const Tensor3 y = m.forward(x);
  REQUIRE(y.dims() == dims.output_dims());
  for (std::size_t tau = 0; tau < dims.beta; ++tau) {
    for (std::size_t i = 0; i < dims.r; ++i) {
      for (std::size_t j = 0; j < dims.c; ++j) {
        CHECK(y(tau, i, j) == x(dims.alpha_plus_1 - 1, i, j));
      }
    }
  }

  // The transpose map stacks every cotangent frame into the last input
  // frame and leaves the others zero.
  const Tensor3 cot = random_tensor(dims.output_dims(), rng);
  const Tensor3 g = m.input_grad(x, cot);
  for (std::size_t s = 0; s + 1 < dims.alpha_plus_1; ++s) {
    for (std::size_t i = 0; i < dims.r; ++i) {
      for (std::size_t j = 0; j < dims.c; ++j) CHECK(g(s, i, j) == 0.0);
    }
  }
  for (std::size_t i = 0; i < dims.r; ++i) {
    for (std::size_t j = 0; j < dims.c; ++j) {
      double sum = 0.0;
      for (std::size_t tau = 0; tau < dims.beta; ++tau) sum += cot(tau, i, j);
      CHECK(g(dims.alpha_plus_1 - 1, i, j) == doctest::Approx(sum));
    }
  }
}

TEST_CASE("linear_lag with a one-hot last-frame row equals copy_last") {
  const md::ModelDims dims{4, 2, 3, 3};
  std::vector<double> params(dims.beta * dims.alpha_plus_1 + dims.beta, 0.0);
  for (std::size_t tau = 0; tau < dims.beta; ++tau) {
    params[tau * dims.alpha_plus_1 + (dims.alpha_plus_1 - 1)] = 1.0;
  }
  md::LinearLagModel lin(dims, std::move(params));
  md::CopyLastModel copy(dims);
  Rng rng(52);
  const Tensor3 x = random_tensor(dims.input_dims(), rng);
  const Tensor3 a = lin.forward(x);
  const Tensor3 b = copy.forward(x);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("linear_lag gradient is the weight transpose") {
  const md::ModelDims dims{3, 2, 2, 2};
  auto m = random_model(md::Arch::linear_lag, dims, 5);
  const auto* lin = dynamic_cast<const md::LinearLagModel*>(m.get());
  REQUIRE(lin != nullptr);
  Rng rng(53);
  const Tensor3 x = random_tensor(dims.input_dims(), rng);
  const Tensor3 cot = random_tensor(dims.output_dims(), rng);
  const Tensor3 g = m->input_grad(x, cot);
  for (std::size_t s = 0; s < dims.alpha_plus_1; ++s) {
    for (std::size_t i = 0; i < dims.r; ++i) {
      for (std::size_t j = 0; j < dims.c; ++j) {
        double expect = 0.0;
        for (std::size_t tau = 0; tau < dims.beta; ++tau) {
          expect += lin->w(tau, s) * cot(tau, i, j);
        }
        CHECK(g(s, i, j) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conv_ar with a centered delta kernel is tanh of the last frame") {
  const md::ModelDims dims{2, 1, 3, 3};
  std::vector<double> params(9 + dims.beta * dims.alpha_plus_1 + dims.beta,
                             0.0);
  params[4] = 1.0;                          // kernel center
  params[9 + (dims.alpha_plus_1 - 1)] = 1.0;  // W[0, last] = 1
  md::ConvARModel m(dims, std::move(params));
  Rng rng(54);
  const Tensor3 x = random_tensor(dims.input_dims(), rng, 0.5);
  const Tensor3 y = m.forward(x);
  for (std::size_t i = 0; i < dims.r; ++i) {
    for (std::size_t j = 0; j < dims.c; ++j) {
      CHECK(y(0, i, j) == doctest::Approx(std::tanh(x(1, i, j))));
    }
  }
}

TEST_CASE("input gradients match finite differences for every architecture") {
  const md::ModelDims dims{4, 3, 4, 4};
  Rng rng(55);
  int case_id = 0;
  for (md::Arch arch :
       {md::Arch::copy_last, md::Arch::linear_lag, md::Arch::conv_ar}) {
    auto m = random_model(arch, dims, 100 + case_id);
    for (int trial = 0; trial < 5; ++trial) {
      const Tensor3 x = random_tensor(dims.input_dims(), rng);
      const Tensor3 cot = random_tensor(dims.output_dims(), rng);
      CHECK(grad_fd_error(*m, x, cot) <= 1e-5);
      ++case_id;
    }
  }
}

TEST_CASE("forward is deterministic and checks dims") {
  const md::ModelDims dims{4, 2, 3, 3};
  auto m = random_model(md::Arch::conv_ar, dims, 11);
  Rng rng(56);
  const Tensor3 x = random_tensor(dims.input_dims(), rng);
  const Tensor3 a = m->forward(x);
  const Tensor3 b = m->forward(x);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(thrown_kind([&] {
          m->forward(Tensor3::zeros({1, 3, 3}));
        }) == "DimMismatch");
  CHECK(thrown_kind([&] {
          m->input_grad(x, Tensor3::zeros({1, 3, 3}));
        }) == "DimMismatch");
}

TEST_CASE("linear models are affine in the input") {
  const md::ModelDims dims{3, 2, 2, 2};
  Rng rng(57);
  for (md::Arch arch : {md::Arch::copy_last, md::Arch::linear_lag}) {
    auto m = random_model(arch, dims, 21);
    const Tensor3 x = random_tensor(dims.input_dims(), rng);
    const Tensor3 y = random_tensor(dims.input_dims(), rng);
    const double a = 0.3, b = 1.9;
    // forward(aX + bY) = a forward(X) + b forward(Y) - (a+b-1) * bias,
    // where the bias term is forward(0).
    const Tensor3 fz = m->forward(Tensor3::zeros(dims.input_dims()));
    const Tensor3 lhs = m->forward(add(scale(x, a), scale(y, b)));
    const Tensor3 rhs = add(sub(add(scale(m->forward(x), a),
                                    scale(m->forward(y), b)),
                                scale(fz, a + b)),
                            fz);
    CHECK(norm(sub(lhs, rhs), Norm::Linf) <= 1e-10);
  }
}

TEST_CASE("fit recovers a linear_lag teacher") {
  const md::ModelDims dims{3, 2, 3, 3};
  auto teacher = random_model(md::Arch::linear_lag, dims, 77);
  Rng rng(58);
  std::vector<std::pair<Tensor3, Tensor3>> dataset;
  for (int n = 0; n < 24; ++n) {
    Tensor3 x = random_tensor(dims.input_dims(), rng);
    Tensor3 y = teacher->forward(x);
    dataset.emplace_back(std::move(x), std::move(y));
  }
  const md::FitResult res =
      md::fit(md::Arch::linear_lag, dataset, 4000, 0.05, 1);
  CHECK(res.final_loss <= 1e-6);
  const std::vector<double> got = res.model->parameters();
  const std::vector<double> want = teacher->parameters();
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(std::abs(got[i] - want[i]) <= 1e-3);
  }
}

TEST_CASE("fit edge cases") {
  const md::ModelDims dims{2, 1, 2, 2};
  Rng rng(59);
  std::vector<std::pair<Tensor3, Tensor3>> dataset;
  dataset.emplace_back(random_tensor(dims.input_dims(), rng),
                       random_tensor(dims.output_dims(), rng));

  SUBCASE("zero epochs returns the seeded initialization unchanged") {
    const md::FitResult res = md::fit(md::Arch::conv_ar, dataset, 0, 0.1, 42);
    const auto init = md::make_model(md::Arch::conv_ar, dims, 42);
    CHECK(res.model->parameters() == init->parameters());
  }
  SUBCASE("copy_last fit is a no-op returning the persistence error") {
    const md::FitResult res = md::fit(md::Arch::copy_last, dataset, 10, 0.1, 0);
    CHECK(res.model->parameter_count() == 0);
    // Persistence MSE of the dataset, computed directly.
    const Tensor3 pred = res.model->forward(dataset[0].first);
    const Tensor3 d = sub(pred, dataset[0].second);
    const double mse = std::pow(norm(d, Norm::L2), 2) /
                       static_cast<double>(d.size());
    CHECK(res.final_loss == doctest::Approx(mse));
  }
  SUBCASE("empty dataset is rejected") {
    CHECK(thrown_kind([&] {
            md::fit(md::Arch::linear_lag, {}, 10, 0.1, 0);
          }) == "EmptyDataset");
  }
}

TEST_CASE("checkpoint round trip reproduces forward bit-exactly") {
  const md::ModelDims dims{4, 2, 3, 3};
  auto m = random_model(md::Arch::conv_ar, dims, 31);
  const fs::path path = fs::temp_directory_path() / "fable_model_rt.fck";
  md::save(*m, path);
  auto back = md::load(path);
  CHECK(back->arch() == m->arch());
  CHECK(back->dims() == m->dims());
  Rng rng(60);
  const Tensor3 x = random_tensor(dims.input_dims(), rng);
  const Tensor3 a = m->forward(x);
  const Tensor3 b = back->forward(x);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  fs::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const md::ModelDims dims{2, 1, 2, 2};
  auto m = random_model(md::Arch::linear_lag, dims, 3);
  const fs::path path = fs::temp_directory_path() / "fable_model_bad.fck";
  md::save(*m, path);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    bytes = buf.str();
  }
  auto write_bytes = [&](const std::string& s) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << s;
  };

  SUBCASE("truncated file") {
    write_bytes(bytes.substr(0, bytes.size() - 5));
    CHECK(thrown_kind([&] { md::load(path); }) == "CorruptCheckpoint");
  }
  SUBCASE("bad magic") {
    std::string s = bytes;
    s[0] = 'X';
    write_bytes(s);
    CHECK(thrown_kind([&] { md::load(path); }) == "CorruptCheckpoint");
  }
  SUBCASE("unknown arch tag") {
    std::string s = bytes;
    s[4] = static_cast<char>(9);
    write_bytes(s);
    CHECK(thrown_kind([&] { md::load(path); }) == "CorruptCheckpoint");
  }
  fs::remove(path);
}

TEST_CASE("arch names round trip") {
  for (md::Arch arch :
       {md::Arch::copy_last, md::Arch::linear_lag, md::Arch::conv_ar}) {
    CHECK(md::arch_from_name(md::arch_name(arch)) == arch);
  }
  CHECK(thrown_kind([] { md::arch_from_name("transformer"); }) ==
        "UnknownArch");
  const md::ModelDims dims{4, 2, 3, 5};
  CHECK(md::expected_param_count(md::Arch::copy_last, dims) == 0);
  CHECK(md::expected_param_count(md::Arch::linear_lag, dims) == 2 * 4 + 2);
  CHECK(md::expected_param_count(md::Arch::conv_ar, dims) == 9 + 2 * 4 + 2);
}

}  // TEST_SUITE
