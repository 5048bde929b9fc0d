#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "fable/attack.hpp"
#include "fable/error.hpp"
#include "fable/metrics.hpp"
#include "fable/model.hpp"
#include "fable/rng.hpp"
#include "fable/target.hpp"
#include "fable/tensor.hpp"
#include "fable/wavelet.hpp"
#include "helpers.hpp"

using fable::Dims3;
using fable::Norm;
using fable::Rng;
using fable::Tensor3;
using testutil::random_tensor;
using testutil::thrown_kind;
namespace atk = fable::attack;
namespace md = fable::model;
namespace mt = fable::metrics;
namespace tg = fable::target;
namespace wv = fable::wavelet;

namespace {

// A small deterministic scenario shared by the run-once fixtures: a seeded
// surrogate, a seeded input window, and a localized target built on the
// model's own forecast.
struct Scenario {
  std::unique_ptr<md::ForecastModel> model;
  Tensor3 x;
  Tensor3 y_target;
  mt::AttackDomain domain;
};

Scenario make_scenario(md::Arch arch, std::uint64_t seed) {
  const md::ModelDims dims{4, 2, 4, 4};
  Scenario s;
  s.model = md::make_model(arch, dims, seed);
  Rng rng(seed + 1);
  s.x = random_tensor(dims.input_dims(), rng, 0.5);

  tg::TargetSpec spec;
  spec.center = {1, 1, 2};
  spec.sigma_tau = 1.5;
  spec.sigma_d = 1.0;
  spec.radius = 1;
  spec.offset_low = 0.4;
  spec.offset_high = 0.6;
  spec.clip_low = -3.0;
  spec.clip_high = 3.0;
  spec.seed = seed + 2;
  tg::BuiltTarget built = tg::build_target(s.model->forward(s.x), spec);
  s.y_target = std::move(built.y_target);
  s.domain = std::move(built.domain);
  return s;
}

atk::AttackBudget small_budget() {
  atk::AttackBudget b;
  b.eps = 2.5;
  b.steps = 60;
  b.step_size = 0.02;
  b.lambda = 1e-6;
  b.seed = 3;
  return b;
}

double linf_gap(const Tensor3& a, const Tensor3& b) {
  return norm(sub(a, b), Norm::Linf);
}

bool bit_equal(const Tensor3& a, const Tensor3& b) {
  if (!(a.dims() == b.dims())) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

// The composed FABLE objective as a plain function of the flattened
// coefficient vector, for finite differencing.
double fable_objective(const std::vector<double>& flat,
                       const wv::WaveletCoeffs& c_orig, const Tensor3& x,
                       double eps, const md::ForecastModel& g,
                       const Tensor3& y, double lambda,
                       const std::array<double, 8>& omega,
                       const wv::WaveletBasis& basis) {
  wv::WaveletCoeffs c = c_orig;
  const std::size_t band_len = c_orig.band_dims().count();
  for (int f = 0; f < 8; ++f) {
    std::vector<double> v(flat.begin() + f * band_len,
                          flat.begin() + (f + 1) * band_len);
    c.bands[f] = Tensor3(c_orig.band_dims(), std::move(v));
  }
  const Tensor3 x_clip = clip_to_ball(wv::idwt3(c, basis), x, eps);
  return atk::fable_loss(c_orig, c, x_clip, g, y, lambda, omega);
}

}  // namespace

TEST_SUITE("attack") {

TEST_CASE("budget defaults and validation") {
  atk::AttackBudget b;
  b.eps = 2.0;
  b.steps = 100;
  b.step_size.reset();
  CHECK(b.step_size_or_default() == doctest::Approx(2.0 * 2.0 / 100.0));
  CHECK(atk::AttackBudget::default_omega() ==
        std::array<double, 8>{0.0, 0.8, 0.8, 0.5, 0.8, 0.5, 0.5, 0.2});
  CHECK(b.freeze_lll);

  Scenario s = make_scenario(md::Arch::linear_lag, 10);
  b.eps = -1.0;
  CHECK(thrown_kind([&] { atk::fgsm(*s.model, s.x, s.y_target, b); }) ==
        "BadBudget");
  b.eps = 1.0;
  b.lambda = -0.5;
  CHECK(thrown_kind([&] { atk::fable(*s.model, s.x, s.y_target, b); }) ==
        "BadBudget");
  b.lambda = 0.0;
  b.step_size = 0.0;
  CHECK(thrown_kind([&] {
          atk::pgd_taaowpf(*s.model, s.x, s.y_target, b);
        }) == "BadBudget");
}

TEST_CASE("adam_update first steps") {
  const std::vector<double> params{1.0, -2.0, 0.5};
  const std::vector<double> grad{3.0, -0.2, 0.0};

  SUBCASE("zero gradient leaves parameters unchanged") {
    atk::AdamState st(3);
    const std::vector<double> out =
        atk::adam_update(st, params, {0.0, 0.0, 0.0}, 0.1);
    CHECK(out == params);
    CHECK(st.t == 1);
  }
  SUBCASE("first step moves by about -lr * sign(grad)") {
    atk::AdamState st(3);
    const std::vector<double> out = atk::adam_update(st, params, grad, 0.1);
    CHECK(out[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-6));
    CHECK(out[1] == doctest::Approx(-2.0 + 0.1).epsilon(1e-6));
    CHECK(out[2] == 0.5);  // zero gradient coordinate
  }
  SUBCASE("repeated identical gradients keep moving the same way") {
    atk::AdamState st(3);
    std::vector<double> cur = params;
    double prev = cur[0];
    for (int i = 0; i < 5; ++i) {
      cur = atk::adam_update(st, cur, grad, 0.1);
      CHECK(cur[0] < prev);
      prev = cur[0];
    }
  }
  SUBCASE("length mismatch is rejected") {
    atk::AdamState st(2);
    CHECK(thrown_kind([&] { atk::adam_update(st, params, grad, 0.1); }) ==
          "LengthMismatch");
  }
}

TEST_CASE("fgsm on copy_last places +step at the targeted input cell") {
  const md::ModelDims dims{2, 1, 2, 2};
  md::CopyLastModel m(dims);
  const Tensor3 x = Tensor3::zeros(dims.input_dims());
  std::vector<double> tv(4, 0.0);
  tv[0] = 1.0;  // raise the forecast at out-cell (0, 0, 0)
  const Tensor3 y_target({1, 2, 2}, std::move(tv));

  atk::AttackBudget b;
  b.eps = 1.0;
  b.steps = 1;
  b.step_size = 0.25;
  const atk::AttackResult res = atk::fgsm(m, x, y_target, b);

  // The loss gradient lives only at the last input frame's (0,0) cell and
  // is negative there, so the signed step is +0.25; sign(0) = 0 leaves
  // every other cell untouched.
  CHECK(res.x_adv(1, 0, 0) == 0.25);
  for (std::size_t i = 0; i < res.x_adv.size(); ++i) {
    if (i != res.x_adv.flat_index(1, 0, 0)) CHECK(res.x_adv[i] == 0.0);
  }
  REQUIRE(res.loss_trace.size() == 1);
  CHECK(res.loss_trace[0] == doctest::Approx(1.0));
}

TEST_CASE("pgd with one step bit-equals fgsm") {
  Scenario s = make_scenario(md::Arch::conv_ar, 20);
  atk::AttackBudget b = small_budget();
  b.steps = 1;
  const atk::AttackResult a = atk::fgsm(*s.model, s.x, s.y_target, b);
  const atk::AttackResult p = atk::pgd_taaowpf(*s.model, s.x, s.y_target, b);
  CHECK(bit_equal(a.x_adv, p.x_adv));
  CHECK(a.loss_trace == p.loss_trace);
}

TEST_CASE("pgd loss trace is nonincreasing on the linear scenario") {
  Scenario s = make_scenario(md::Arch::linear_lag, 30);
  atk::AttackBudget b = small_budget();
  b.steps = 40;
  b.step_size = 0.01;
  const atk::AttackResult res =
      atk::pgd_taaowpf(*s.model, s.x, s.y_target, b);
  REQUIRE(res.loss_trace.size() == 40);
  for (std::size_t i = 1; i < res.loss_trace.size(); ++i) {
    CHECK(res.loss_trace[i] <= res.loss_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("ala is the identity under a zero-gradient model") {
  const md::ModelDims dims{3, 2, 2, 2};
  // All-zero weights make the forecast a constant bias: no input gradient.
  md::LinearLagModel constant(
      dims, std::vector<double>(dims.beta * dims.alpha_plus_1 + dims.beta,
                                0.0));
  Rng rng(81);
  const Tensor3 x = random_tensor(dims.input_dims(), rng);
  const Tensor3 y = random_tensor(dims.output_dims(), rng);
  atk::AttackBudget b = small_budget();
  const atk::AttackResult res = atk::ala(constant, x, y, b);
  CHECK(bit_equal(res.x_adv, x));
}

TEST_CASE("ala lands closer than pgd on the shared scenario") {
  // A linear surrogate converges well before the step budget runs out;
  // there Adam's shrinking steps settle while signed steps keep bouncing
  // at full magnitude, which is exactly the gap this fixture pins.
  Scenario s = make_scenario(md::Arch::linear_lag, 40);
  atk::AttackBudget b = small_budget();
  b.steps = 200;
  b.step_size = 0.01;
  const atk::AttackResult a = atk::ala(*s.model, s.x, s.y_target, b);
  const atk::AttackResult p = atk::pgd_taaowpf(*s.model, s.x, s.y_target, b);
  CHECK(mt::closeness(s.x, a.x_adv) <= mt::closeness(s.x, p.x_adv));
}

TEST_CASE("saliency scores") {
  SUBCASE("zero-gradient model scores zero everywhere") {
    const md::ModelDims dims{3, 2, 2, 2};
    md::LinearLagModel constant(
        dims, std::vector<double>(dims.beta * dims.alpha_plus_1 + dims.beta,
                                  0.0));
    Rng rng(82);
    const std::vector<double> scores = atk::saliency_scores(
        constant, random_tensor(dims.input_dims(), rng),
        random_tensor(dims.output_dims(), rng));
    for (double v : scores) CHECK(v == 0.0);
  }
  SUBCASE("copy_last with one lowered target cell singles out the location") {
    const md::ModelDims dims{2, 1, 3, 3};
    md::CopyLastModel m(dims);
    const Tensor3 x = Tensor3::zeros(dims.input_dims());
    std::vector<double> tv(9, 0.0);
    tv[4] = -1.0;  // the forecast must drop at location (1, 1)
    const Tensor3 y({1, 3, 3}, std::move(tv));
    // Residual +1 at the center: the only positive gradient entry.
    const std::vector<double> scores = atk::saliency_scores(m, x, y);
    for (std::size_t loc = 0; loc < scores.size(); ++loc) {
      if (loc == 4) {
        CHECK(scores[loc] > 0.0);
      } else {
        CHECK(scores[loc] < scores[4]);
      }
    }
  }
  SUBCASE("location-decoupled models give permutation-equivariant scores") {
    const md::ModelDims dims{4, 2, 3, 3};
    auto m = md::make_model(md::Arch::linear_lag, dims, 5);
    Rng rng(83);
    const Tensor3 x = random_tensor(dims.input_dims(), rng);
    const Tensor3 y = random_tensor(dims.output_dims(), rng);

    // A fixed permutation of the 9 grid locations.
    std::vector<std::size_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.index(i)]);
    }
    auto permute = [&](const Tensor3& t) {
      std::vector<double> out(t.size());
      const std::size_t plane = 9;
      for (std::size_t f = 0; f < t.dims().t; ++f) {
        for (std::size_t loc = 0; loc < plane; ++loc) {
          out[f * plane + perm[loc]] = t[f * plane + loc];
        }
      }
      return Tensor3(t.dims(), std::move(out));
    };
    const std::vector<double> base = atk::saliency_scores(m.get()[0], x, y);
    const std::vector<double> moved =
        atk::saliency_scores(m.get()[0], permute(x), permute(y));
    for (std::size_t loc = 0; loc < base.size(); ++loc) {
      CHECK(moved[perm[loc]] == doctest::Approx(base[loc]).epsilon(1e-12));
    }
  }
}

TEST_CASE("stpgd masks and identities") {
  Scenario s = make_scenario(md::Arch::conv_ar, 50);
  atk::AttackBudget b = small_budget();
  const std::size_t rc = s.x.dims().r * s.x.dims().c;

  SUBCASE("k = r*c is bit-identical to pgd") {
    const atk::AttackResult full =
        atk::stpgd(*s.model, s.x, s.y_target, b, rc);
    const atk::AttackResult pgd =
        atk::pgd_taaowpf(*s.model, s.x, s.y_target, b);
    CHECK(bit_equal(full.x_adv, pgd.x_adv));
  }
  SUBCASE("k = 1 perturbs at most one location") {
    const atk::AttackResult res =
        atk::stpgd(*s.model, s.x, s.y_target, b, 1);
    std::size_t touched = 0;
    for (std::size_t loc = 0; loc < rc; ++loc) {
      bool moved = false;
      for (std::size_t f = 0; f < s.x.dims().t; ++f) {
        if (res.x_adv[f * rc + loc] != s.x[f * rc + loc]) moved = true;
      }
      if (moved) ++touched;
    }
    CHECK(touched <= 1);
  }
  SUBCASE("off-mask locations never change") {
    const std::size_t k = 3;
    const std::vector<double> scores =
        atk::saliency_scores(*s.model, s.x, s.y_target);
    std::vector<std::size_t> order(rc);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) {
                       return scores[a] > scores[c];
                     });
    const atk::AttackResult res = atk::stpgd(*s.model, s.x, s.y_target, b, k);
    for (std::size_t rank = k; rank < rc; ++rank) {
      const std::size_t loc = order[rank];
      for (std::size_t f = 0; f < s.x.dims().t; ++f) {
        CHECK(res.x_adv[f * rc + loc] == s.x[f * rc + loc]);
      }
    }
  }
  SUBCASE("k bounds are enforced") {
    CHECK(thrown_kind([&] {
            atk::stpgd(*s.model, s.x, s.y_target, b, 0);
          }) == "BadK");
    CHECK(thrown_kind([&] {
            atk::stpgd(*s.model, s.x, s.y_target, b, rc + 1);
          }) == "BadK");
  }
}

TEST_CASE("noise attack draws, clips, and takes the argmin") {
  Scenario s = make_scenario(md::Arch::conv_ar, 60);
  atk::AttackBudget b = small_budget();

  SUBCASE("one candidate with sigma 0 is the identity") {
    const atk::AttackResult res =
        atk::noise_attack(*s.model, s.x, s.y_target, b, 1, 0.0);
    CHECK(bit_equal(res.x_adv, s.x));
  }
  SUBCASE("the winner's loss is the trace minimum") {
    const atk::AttackResult res =
        atk::noise_attack(*s.model, s.x, s.y_target, b, 8, 1.0);
    REQUIRE(res.loss_trace.size() == 8);
    const double winner_loss = *std::min_element(res.loss_trace.begin(),
                                                 res.loss_trace.end());
    // Recompute the winner's loss directly.
    const Tensor3 pred = s.model->forward(res.x_adv);
    CHECK(norm(sub(pred, s.y_target), Norm::L2) ==
          doctest::Approx(winner_loss).epsilon(1e-12));
  }
  SUBCASE("same seed, same result") {
    const atk::AttackResult a =
        atk::noise_attack(*s.model, s.x, s.y_target, b, 4, 1.0);
    const atk::AttackResult c =
        atk::noise_attack(*s.model, s.x, s.y_target, b, 4, 1.0);
    CHECK(bit_equal(a.x_adv, c.x_adv));
  }
  SUBCASE("candidate count must be positive") {
    CHECK(thrown_kind([&] {
            atk::noise_attack(*s.model, s.x, s.y_target, b, 0, 1.0);
          }) == "BadCandidates");
  }
}

TEST_CASE("every attack stays inside the eps ball") {
  Scenario s = make_scenario(md::Arch::conv_ar, 70);
  atk::AttackBudget b = small_budget();
  b.eps = 0.3;  // tight enough that clipping is active
  b.steps = 50;
  b.step_size = 0.05;
  const double bound = b.eps + 1e-12;

  CHECK(linf_gap(atk::fgsm(*s.model, s.x, s.y_target, b).x_adv, s.x) <= bound);
  CHECK(linf_gap(atk::pgd_taaowpf(*s.model, s.x, s.y_target, b).x_adv, s.x) <=
        bound);
  CHECK(linf_gap(atk::ala(*s.model, s.x, s.y_target, b).x_adv, s.x) <= bound);
  CHECK(linf_gap(atk::stpgd(*s.model, s.x, s.y_target, b, 5).x_adv, s.x) <=
        bound);
  CHECK(linf_gap(
            atk::noise_attack(*s.model, s.x, s.y_target, b, 6, 2.0).x_adv,
            s.x) <= bound);
  CHECK(linf_gap(atk::fable(*s.model, s.x, s.y_target, b).x_adv, s.x) <=
        bound);
  atk::AttackBudget uniform = b;
  uniform.omega.fill(1.0);
  uniform.freeze_lll = false;
  CHECK(linf_gap(atk::fable(*s.model, s.x, s.y_target, uniform).x_adv, s.x) <=
        bound);
}

TEST_CASE("eps = 0 and N = 0 are exact no-ops") {
  Scenario s = make_scenario(md::Arch::conv_ar, 80);
  atk::AttackBudget b = small_budget();

  SUBCASE("zero steps") {
    b.steps = 0;
    const atk::AttackResult f = atk::fable(*s.model, s.x, s.y_target, b);
    CHECK(bit_equal(f.x_adv, s.x));
    CHECK(f.loss_trace.empty());
    CHECK(bit_equal(
        atk::pgd_taaowpf(*s.model, s.x, s.y_target, b).x_adv, s.x));
    CHECK(bit_equal(atk::ala(*s.model, s.x, s.y_target, b).x_adv, s.x));
  }
  SUBCASE("zero radius") {
    b.eps = 0.0;
    for (const atk::AttackResult& res :
         {atk::fgsm(*s.model, s.x, s.y_target, b),
          atk::pgd_taaowpf(*s.model, s.x, s.y_target, b),
          atk::ala(*s.model, s.x, s.y_target, b),
          atk::fable(*s.model, s.x, s.y_target, b)}) {
      CHECK(bit_equal(res.x_adv, s.x));
    }
  }
}

TEST_CASE("fable_loss composition") {
  Scenario s = make_scenario(md::Arch::copy_last, 90);
  const wv::WaveletBasis basis = wv::WaveletBasis::haar();
  const wv::WaveletCoeffs c = wv::dwt3(s.x, basis);
  const std::array<double, 8> omega = atk::AttackBudget::default_omega();

  // With the target equal to the model's own forecast and no perturbation,
  // the objective vanishes.
  const Tensor3 own = s.model->forward(s.x);
  CHECK(atk::fable_loss(c, c, s.x, *s.model, own, 1.0, omega) == 0.0);

  // The coefficient term is linear in lambda.
  Rng rng(91);
  wv::WaveletCoeffs cp = c;
  cp.bands[3] = add(cp.bands[3], random_tensor(c.band_dims(), rng, 0.2));
  const double l0 = atk::fable_loss(c, cp, s.x, *s.model, s.y_target, 0.0,
                                    omega);
  const double l1 = atk::fable_loss(c, cp, s.x, *s.model, s.y_target, 0.5,
                                    omega);
  const double l2 = atk::fable_loss(c, cp, s.x, *s.model, s.y_target, 1.0,
                                    omega);
  CHECK(l2 - l0 == doctest::Approx(2.0 * (l1 - l0)).epsilon(1e-12));
}

TEST_CASE("fable coefficient gradient matches finite differences") {
  Scenario s = make_scenario(md::Arch::conv_ar, 100);
  const wv::WaveletBasis basis = wv::WaveletBasis::haar();
  const wv::WaveletCoeffs c_orig = wv::dwt3(s.x, basis);
  const std::array<double, 8> omega = atk::AttackBudget::default_omega();
  const double lambda = 1e-3;
  const double eps = 5.0;  // wide ball: the clip is inactive, so no kinks

  Rng rng(101);
  wv::WaveletCoeffs c_pert = c_orig;
  for (int f = 0; f < 8; ++f) {
    c_pert.bands[f] =
        add(c_pert.bands[f], random_tensor(c_orig.band_dims(), rng, 0.1));
  }

  const wv::WaveletCoeffs analytic = atk::fable_coeff_grad(
      c_orig, c_pert, s.x, eps, *s.model, s.y_target, lambda, omega, basis);

  const std::size_t band_len = c_orig.band_dims().count();
  std::vector<double> flat(8 * band_len);
  for (int f = 0; f < 8; ++f) {
    for (std::size_t i = 0; i < band_len; ++i) {
      flat[f * band_len + i] = c_pert.bands[f][i];
    }
  }
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    std::vector<double> plus = flat, minus = flat;
    plus[i] += h;
    minus[i] -= h;
    const double fd =
        (fable_objective(plus, c_orig, s.x, eps, *s.model, s.y_target, lambda,
                         omega, basis) -
         fable_objective(minus, c_orig, s.x, eps, *s.model, s.y_target,
                         lambda, omega, basis)) /
        (2.0 * h);
    const double a = analytic.bands[i / band_len][i % band_len];
    worst = std::max(worst, std::abs(a - fd) / std::max(1.0, std::abs(fd)));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("fable strictly descends when unconstrained") {
  Scenario s = make_scenario(md::Arch::linear_lag, 110);
  atk::AttackBudget b;
  b.eps = 1e9;
  b.steps = 10;
  b.step_size = 0.02;
  b.lambda = 0.0;
  b.freeze_lll = false;
  const atk::AttackResult res = atk::fable(*s.model, s.x, s.y_target, b);
  REQUIRE(res.loss_trace.size() == 10);
  for (std::size_t i = 1; i < res.loss_trace.size(); ++i) {
    CHECK(res.loss_trace[i] < res.loss_trace[i - 1]);
  }
}

TEST_CASE("fable is deterministic and respects the frozen band") {
  Scenario s = make_scenario(md::Arch::conv_ar, 120);
  atk::AttackBudget b = small_budget();
  const atk::AttackResult a = atk::fable(*s.model, s.x, s.y_target, b);
  const atk::AttackResult c = atk::fable(*s.model, s.x, s.y_target, b);
  CHECK(bit_equal(a.x_adv, c.x_adv));
  CHECK(a.loss_trace == c.loss_trace);

  // With freeze_lll the LLL coefficients of the (unclipped) reconstruction
  // equal the originals; verify through the transform of the output when
  // the clip is inactive.
  atk::AttackBudget wide = b;
  wide.eps = 1e9;
  const atk::AttackResult w = atk::fable(*s.model, s.x, s.y_target, wide);
  const wv::WaveletCoeffs c_orig = wv::dwt3(s.x, wv::WaveletBasis::haar());
  const wv::WaveletCoeffs c_adv = wv::dwt3(w.x_adv, wv::WaveletBasis::haar());
  CHECK(norm(sub(c_adv.band(wv::SubBand::LLL), c_orig.band(wv::SubBand::LLL)),
             Norm::Linf) <= 1e-10);
  // And the attack did move the detail bands.
  CHECK(norm(sub(c_adv.band(wv::SubBand::HHH), c_orig.band(wv::SubBand::HHH)),
             Norm::Linf) > 1e-6);
}

TEST_CASE("fable with a general basis still reconstructs inside the ball") {
  Scenario s = make_scenario(md::Arch::conv_ar, 130);
  atk::AttackBudget b = small_budget();
  b.steps = 30;
  const atk::AttackResult res =
      atk::fable(*s.model, s.x, s.y_target, b, wv::WaveletBasis::db2());
  CHECK(linf_gap(res.x_adv, s.x) <= b.eps + 1e-12);
  CHECK(res.steps_run == 30);
}

TEST_CASE("noise does not beat fable at reaching the target") {
  Scenario s = make_scenario(md::Arch::conv_ar, 140);
  atk::AttackBudget b = small_budget();
  b.steps = 80;
  const atk::AttackResult f = atk::fable(*s.model, s.x, s.y_target, b);
  const atk::AttackResult n =
      atk::noise_attack(*s.model, s.x, s.y_target, b, 8, 1.0);
  const double in_f =
      mt::in_ae(s.model->forward(f.x_adv), s.y_target, s.domain);
  const double in_n =
      mt::in_ae(s.model->forward(n.x_adv), s.y_target, s.domain);
  CHECK(in_n >= in_f);
}

}  // TEST_SUITE
