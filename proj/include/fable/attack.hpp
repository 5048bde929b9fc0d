// FABLE and the five baseline attacks, each a pure function from (model,
// predictor, target, budget) to an adversarial predictor inside the
// l-infinity eps-ball around the original input.
//
// FABLE optimizes the 8 wavelet sub-band coefficient tensors of the input
// with Adam, balancing forecast loss against a weighted coefficient-space
// closeness penalty; the baselines (FGSM, PGD, Adam in input space, saliency
// -masked PGD, and random noise search) operate directly on input cells.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fable/model.hpp"
#include "fable/tensor.hpp"
#include "fable/wavelet.hpp"

namespace fable::attack {

struct AttackBudget {
  double eps = 2.5;          // l-infinity bound, >= 0
  std::size_t steps = 200;   // N
  // Step size eta; defaults to 2 * eps / N when unset.
  std::optional<double> step_size;
  double lambda = 1e-6;      // coefficient-closeness weight, >= 0
  // Per-sub-band closeness weights, indexed by SubBand order
  // (LLL, LLH, LHL, LHH, HLL, HLH, HHL, HHH).
  std::array<double, 8> omega = default_omega();
  bool freeze_lll = true;    // exclude the LLL band from optimization
  // false: one Adam state per sub-band, step counter advanced once per
  // iteration.  true: a single state over the concatenated coefficients,
  // threaded through the band loop with the counter advancing per band
  // update.
  bool adam_global = false;
  std::uint64_t seed = 0;

  double step_size_or_default() const;
  static std::array<double, 8> default_omega();
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kAdamEps = 1e-8;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam step; advances state.t and returns the updated
// parameters.  Throws LengthMismatch.
std::vector<double> adam_update(AdamState& state,
                                const std::vector<double>& params,
                                const std::vector<double>& grad, double lr);

struct AttackResult {
  Tensor3 x_adv;
  // Loss evaluated at each iterate before its update (candidate losses for
  // the noise attack).
  std::vector<double> loss_trace;
  std::size_t steps_run = 0;
};

// Wavelet-space attack: decompose x, run budget.steps Adam updates on the
// sub-band coefficients against loss
//   L = ||y_target - g(clip(idwt3(C')))||_2 / sqrt(beta*r*c)
//     + lambda * coeff_distance(C, C', omega),
// and return the clipped reconstruction.  Throws DimMismatch, OddDim.
AttackResult fable(const model::ForecastModel& g, const Tensor3& x,
                   const Tensor3& y_target, const AttackBudget& budget,
                   const wavelet::WaveletBasis& basis);
AttackResult fable(const model::ForecastModel& g, const Tensor3& x,
                   const Tensor3& y_target, const AttackBudget& budget);

// The FABLE objective at a given coefficient state (L_C uses the unclipped
// coefficients; the forecast term uses the clipped reconstruction).
double fable_loss(const wavelet::WaveletCoeffs& c_orig,
                  const wavelet::WaveletCoeffs& c_pert,
                  const Tensor3& x_clipped, const model::ForecastModel& g,
                  const Tensor3& y_target, double lambda,
                  const std::array<double, 8>& omega);

// Gradient of fable_loss with respect to the perturbed coefficients: the
// forecast term backpropagated through the model, the eps-ball clip
// (pass-through inside the ball, zero on clipped cells), and the inverse
// transform via its adjoint; the closeness term contributes its per-band l2
// subgradient (zero for a band exactly at its original value).  This is the
// gradient the fable loop steps on, exposed so it can be checked against
// finite differences of the composed loss.
wavelet::WaveletCoeffs fable_coeff_grad(const wavelet::WaveletCoeffs& c_orig,
                                        const wavelet::WaveletCoeffs& c_pert,
                                        const Tensor3& x, double eps,
                                        const model::ForecastModel& g,
                                        const Tensor3& y_target, double lambda,
                                        const std::array<double, 8>& omega,
                                        const wavelet::WaveletBasis& basis);

// One signed-gradient step on ||g(X) - y_target||_2 with step size
// budget.step_size (sign(0) = 0), clipped to the eps-ball.
AttackResult fgsm(const model::ForecastModel& g, const Tensor3& x,
                  const Tensor3& y_target, const AttackBudget& budget);

// budget.steps iterations of the FGSM step from the current iterate.
AttackResult pgd_taaowpf(const model::ForecastModel& g, const Tensor3& x,
                         const Tensor3& y_target, const AttackBudget& budget);

// budget.steps Adam updates directly in input space, clipped every step.
AttackResult ala(const model::ForecastModel& g, const Tensor3& x,
                 const Tensor3& y_target, const AttackBudget& budget);

// Saliency of each grid location: the l2 norm over input frames of the
// positive part of the loss gradient at the clean input.
std::vector<double> saliency_scores(const model::ForecastModel& g,
                                    const Tensor3& x, const Tensor3& y_target);

// PGD restricted to the top-k saliency locations (ties broken by ascending
// row-major location index); off-mask cells never change.  Throws BadK.
AttackResult stpgd(const model::ForecastModel& g, const Tensor3& x,
                   const Tensor3& y_target, const AttackBudget& budget,
                   std::size_t k);

// Draws `candidates` Gaussian perturbations (scaled by sigma), clips each to
// the eps-ball, and returns the candidate with the smallest loss (first
// wins ties).
AttackResult noise_attack(const model::ForecastModel& g, const Tensor3& x,
                          const Tensor3& y_target, const AttackBudget& budget,
                          std::size_t candidates, double sigma);

}  // namespace fable::attack
