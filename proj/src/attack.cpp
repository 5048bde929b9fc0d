#include "fable/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fable/error.hpp"
#include "fable/rng.hpp"

namespace fable::attack {

namespace {

void check_budget(const AttackBudget& b) {
  if (!(b.eps >= 0.0)) raise("BadBudget", "eps must be >= 0");
  if (!(b.lambda >= 0.0)) raise("BadBudget", "lambda must be >= 0");
  for (double w : b.omega) {
    if (!(w >= 0.0)) raise("BadBudget", "omega weights must be >= 0");
  }
  if (b.step_size && b.steps > 0 && !(*b.step_size > 0.0)) {
    raise("BadBudget", "step_size must be > 0 when steps > 0");
  }
}

void check_attack_dims(const model::ForecastModel& g, const Tensor3& x,
                       const Tensor3& y_target) {
  if (!(x.dims() == g.dims().input_dims())) {
    raise("DimMismatch", "attack input dims differ from model input");
  }
  if (!(y_target.dims() == g.dims().output_dims())) {
    raise("DimMismatch", "attack target dims differ from model output");
  }
}

// Shared Adam step arithmetic; t is the already-advanced step counter.
void adam_core(double* m, double* v, std::size_t t, const double* params,
               const double* grad, double* out, std::size_t n, double lr) {
  const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(t));
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = AdamState::kBeta1 * m[i] + (1.0 - AdamState::kBeta1) * grad[i];
    v[i] = AdamState::kBeta2 * v[i] + (1.0 - AdamState::kBeta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    out[i] = params[i] - lr * m_hat / (std::sqrt(v_hat) + AdamState::kAdamEps);
  }
}

// Loss ||g(cur) - y||_2; when grad_out is set, also its gradient with
// respect to cur (zero at an exact hit, where the norm is not
// differentiable).
double baseline_loss_grad(const model::ForecastModel& g, const Tensor3& cur,
                          const Tensor3& y, Tensor3* grad_out) {
  const Tensor3 pred = g.forward(cur);
  std::vector<double> diff(pred.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = pred[i] - y[i];
    sq += diff[i] * diff[i];
  }
  const double loss = std::sqrt(sq);
  if (grad_out != nullptr) {
    if (loss == 0.0) {
      *grad_out = Tensor3::zeros(cur.dims());
    } else {
      for (double& d : diff) d /= loss;
      *grad_out = g.input_grad(cur, Tensor3(pred.dims(), std::move(diff)));
    }
  }
  return loss;
}

// PGD machinery shared by fgsm (1 step), pgd_taaowpf (full mask), and stpgd
// (saliency mask).  An empty mask means every location updates.
AttackResult run_masked_pgd(const model::ForecastModel& g, const Tensor3& x,
                            const Tensor3& y_target,
                            const AttackBudget& budget,
                            const std::vector<char>& mask,
                            std::size_t steps) {
  check_budget(budget);
  check_attack_dims(g, x, y_target);
  const double alpha = budget.step_size_or_default();
  const std::size_t plane = x.dims().r * x.dims().c;

  AttackResult res;
  Tensor3 cur = x;
  for (std::size_t step = 0; step < steps; ++step) {
    Tensor3 grad;
    res.loss_trace.push_back(baseline_loss_grad(g, cur, y_target, &grad));
    std::vector<double> next(cur.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      double s = grad[i] > 0.0 ? 1.0 : grad[i] < 0.0 ? -1.0 : 0.0;
      if (!mask.empty() && mask[i % plane] == 0) s = 0.0;
      next[i] = cur[i] - alpha * s;
    }
    cur = clip_to_ball(Tensor3(x.dims(), std::move(next)), x, budget.eps);
  }
  res.x_adv = std::move(cur);
  res.steps_run = steps;
  return res;
}

}  // namespace

double AttackBudget::step_size_or_default() const {
  if (step_size) return *step_size;
  if (steps == 0) return 0.0;
  return 2.0 * eps / static_cast<double>(steps);
}

std::array<double, 8> AttackBudget::default_omega() {
  // One-H bands 0.8, two-H bands 0.5, HHH 0.2; LLL carries no weight (it is
  // frozen by default, so its closeness term is zero either way).
  return {0.0, 0.8, 0.8, 0.5, 0.8, 0.5, 0.5, 0.2};
}

std::vector<double> adam_update(AdamState& state,
                                const std::vector<double>& params,
                                const std::vector<double>& grad, double lr) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    raise("LengthMismatch", "adam_update: params, grad, and state disagree");
  }
  state.t += 1;
  std::vector<double> out(params.size());
  adam_core(state.m.data(), state.v.data(), state.t, params.data(),
            grad.data(), out.data(), params.size(), lr);
  return out;
}

double fable_loss(const wavelet::WaveletCoeffs& c_orig,
                  const wavelet::WaveletCoeffs& c_pert,
                  const Tensor3& x_clipped, const model::ForecastModel& g,
                  const Tensor3& y_target, double lambda,
                  const std::array<double, 8>& omega) {
  const double forecast_norm = baseline_loss_grad(g, x_clipped, y_target,
                                                  nullptr);
  const double scale =
      1.0 / std::sqrt(static_cast<double>(y_target.size()));
  return scale * forecast_norm +
         lambda * wavelet::coeff_distance(c_orig, c_pert, omega);
}

wavelet::WaveletCoeffs fable_coeff_grad(const wavelet::WaveletCoeffs& c_orig,
                                        const wavelet::WaveletCoeffs& c_pert,
                                        const Tensor3& x, double eps,
                                        const model::ForecastModel& g,
                                        const Tensor3& y_target, double lambda,
                                        const std::array<double, 8>& omega,
                                        const wavelet::WaveletBasis& basis) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(y_target.size()));
  const Tensor3 x_raw = wavelet::idwt3(c_pert, basis);
  const Tensor3 x_clip = clip_to_ball(x_raw, x, eps);

  // Forecast-term gradient with respect to the clipped reconstruction.
  const Tensor3 pred = g.forward(x_clip);
  std::vector<double> diff(pred.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = pred[i] - y_target[i];
    sq += diff[i] * diff[i];
  }
  const double forecast_norm = std::sqrt(sq);

  Tensor3 gx = Tensor3::zeros(x.dims());
  if (forecast_norm > 0.0) {
    for (double& d : diff) d *= scale / forecast_norm;
    gx = g.input_grad(x_clip, Tensor3(pred.dims(), std::move(diff)));
  }

  // Through the clip (pass-through inside the ball, zero outside), then
  // through idwt3 via its exact adjoint, which is dwt3.
  std::vector<double> masked(gx.size());
  for (std::size_t i = 0; i < masked.size(); ++i) {
    const bool inside = x_raw[i] >= x[i] - eps && x_raw[i] <= x[i] + eps;
    masked[i] = inside ? gx[i] : 0.0;
  }
  wavelet::WaveletCoeffs gc =
      wavelet::dwt3(Tensor3(x.dims(), std::move(masked)), basis);

  const std::size_t band_len = c_orig.band_dims().count();
  for (int f = 0; f < 8; ++f) {
    if (!(lambda > 0.0 && omega[f] > 0.0)) continue;
    const Tensor3& co = c_orig.bands[f];
    const Tensor3& cp = c_pert.bands[f];
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < band_len; ++i) {
      const double d = cp[i] - co[i];
      dist_sq += d * d;
    }
    const double dist = std::sqrt(dist_sq);
    if (dist == 0.0) continue;
    const double w = lambda * omega[f] / dist;
    std::vector<double> grad = gc.bands[f].values();
    for (std::size_t i = 0; i < band_len; ++i) {
      grad[i] += w * (cp[i] - co[i]);
    }
    gc.bands[f] = Tensor3(gc.band_dims(), std::move(grad));
  }
  return gc;
}

AttackResult fable(const model::ForecastModel& g, const Tensor3& x,
                   const Tensor3& y_target, const AttackBudget& budget,
                   const wavelet::WaveletBasis& basis) {
  check_budget(budget);
  check_attack_dims(g, x, y_target);

  AttackResult res;
  if (budget.steps == 0) {  // no-op budget: the input itself, bit-exact
    res.x_adv = x;
    return res;
  }

  const double eta = budget.step_size_or_default();
  const wavelet::WaveletCoeffs c_orig = wavelet::dwt3(x, basis);
  wavelet::WaveletCoeffs c_pert = c_orig;
  const Dims3 band_dims = c_orig.band_dims();
  const std::size_t band_len = band_dims.count();

  // Per-band Adam states share the step counter by construction (every
  // unfrozen band updates exactly once per iteration).  The global variant
  // threads one band-shaped state through the loop, as the update line of
  // the algorithm literally reads.
  std::vector<AdamState> states;
  if (budget.adam_global) {
    states.emplace_back(band_len);
  } else {
    for (int f = 0; f < 8; ++f) states.emplace_back(band_len);
  }

  for (std::size_t step = 0; step < budget.steps; ++step) {
    const Tensor3 x_clip =
        clip_to_ball(wavelet::idwt3(c_pert, basis), x, budget.eps);
    res.loss_trace.push_back(fable_loss(c_orig, c_pert, x_clip, g, y_target,
                                        budget.lambda, budget.omega));
    const wavelet::WaveletCoeffs gc =
        fable_coeff_grad(c_orig, c_pert, x, budget.eps, g, y_target,
                         budget.lambda, budget.omega, basis);

    for (int f = 0; f < 8; ++f) {
      if (budget.freeze_lll && f == static_cast<int>(wavelet::SubBand::LLL)) {
        continue;
      }
      AdamState& state = budget.adam_global ? states[0] : states[f];
      c_pert.bands[f] =
          Tensor3(band_dims, adam_update(state, c_pert.bands[f].values(),
                                         gc.bands[f].values(), eta));
    }
  }

  res.x_adv = clip_to_ball(wavelet::idwt3(c_pert, basis), x, budget.eps);
  res.steps_run = budget.steps;
  return res;
}

AttackResult fable(const model::ForecastModel& g, const Tensor3& x,
                   const Tensor3& y_target, const AttackBudget& budget) {
  return fable(g, x, y_target, budget, wavelet::WaveletBasis::haar());
}

AttackResult fgsm(const model::ForecastModel& g, const Tensor3& x,
                  const Tensor3& y_target, const AttackBudget& budget) {
  return run_masked_pgd(g, x, y_target, budget, {}, 1);
}

AttackResult pgd_taaowpf(const model::ForecastModel& g, const Tensor3& x,
                         const Tensor3& y_target, const AttackBudget& budget) {
  return run_masked_pgd(g, x, y_target, budget, {}, budget.steps);
}

AttackResult ala(const model::ForecastModel& g, const Tensor3& x,
                 const Tensor3& y_target, const AttackBudget& budget) {
  check_budget(budget);
  check_attack_dims(g, x, y_target);
  const double alpha = budget.step_size_or_default();

  AttackResult res;
  Tensor3 cur = x;
  AdamState state(x.size());
  for (std::size_t step = 0; step < budget.steps; ++step) {
    Tensor3 grad;
    res.loss_trace.push_back(baseline_loss_grad(g, cur, y_target, &grad));
    cur = clip_to_ball(
        Tensor3(x.dims(), adam_update(state, cur.values(), grad.values(),
                                      alpha)),
        x, budget.eps);
  }
  res.x_adv = std::move(cur);
  res.steps_run = budget.steps;
  return res;
}

std::vector<double> saliency_scores(const model::ForecastModel& g,
                                    const Tensor3& x,
                                    const Tensor3& y_target) {
  check_attack_dims(g, x, y_target);
  Tensor3 grad;
  baseline_loss_grad(g, x, y_target, &grad);
  const std::size_t plane = x.dims().r * x.dims().c;
  std::vector<double> scores(plane, 0.0);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double positive = std::max(grad[i], 0.0);
    scores[i % plane] += positive * positive;
  }
  for (double& s : scores) s = std::sqrt(s);
  return scores;
}

AttackResult stpgd(const model::ForecastModel& g, const Tensor3& x,
                   const Tensor3& y_target, const AttackBudget& budget,
                   std::size_t k) {
  check_attack_dims(g, x, y_target);
  const std::size_t plane = x.dims().r * x.dims().c;
  if (k < 1 || k > plane) {
    raise("BadK", "stpgd: k must be in 1.." + std::to_string(plane));
  }
  const std::vector<double> scores = saliency_scores(g, x, y_target);
  std::vector<std::size_t> order(plane);
  std::iota(order.begin(), order.end(), 0);
  // Descending score; stable sort keeps ties in ascending location index.
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  std::vector<char> mask(plane, 0);
  for (std::size_t i = 0; i < k; ++i) mask[order[i]] = 1;
  return run_masked_pgd(g, x, y_target, budget, mask, budget.steps);
}

AttackResult noise_attack(const model::ForecastModel& g, const Tensor3& x,
                          const Tensor3& y_target, const AttackBudget& budget,
                          std::size_t candidates, double sigma) {
  check_budget(budget);
  check_attack_dims(g, x, y_target);
  if (candidates < 1) raise("BadCandidates", "noise_attack needs >= 1");

  Rng rng(budget.seed);
  AttackResult res;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t cand = 0; cand < candidates; ++cand) {
    // The Gaussian draw happens regardless of sigma so candidate streams
    // line up; sigma = 0 yields the unperturbed input bit-exactly.
    std::vector<double> noisy(x.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      noisy[i] = x[i] + sigma * rng.gaussian();
    }
    const Tensor3 clipped =
        clip_to_ball(Tensor3(x.dims(), std::move(noisy)), x, budget.eps);
    const double loss = baseline_loss_grad(g, clipped, y_target, nullptr);
    res.loss_trace.push_back(loss);
    if (loss < best) {
      best = loss;
      res.x_adv = clipped;
    }
  }
  res.steps_run = candidates;
  return res;
}

}  // namespace fable::attack
