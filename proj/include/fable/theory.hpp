// Executable verification of the two theorems: the effect of
// approximation-only versus detail-only Haar coefficient perturbations on
// the raw (unnormalized) autocorrelation of a standardized 1D signal, the
// closed-form upper bounds on the total autocorrelation change, and the
// displacement-isometry comparison.
//
// Everything here works with 1-based dyad indexing k = 1..T/2 translated to
// 0-based storage, and with the raw autocorrelation rho(l) = sum_t
// x[l+t]*x[t] — deliberately distinct from the metrics module's normalized
// lag_autocorr.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fable::theory {

struct Signal1D {
  std::vector<double> values;  // even length T
  bool standardized = false;
};

// Centers to zero mean and scales to unit population standard deviation
// (divide by T).  Throws OddLength for odd/empty input, ZeroStd for a
// constant signal.
Signal1D standardize_signal(const std::vector<double>& raw);

// Raw lag-l autocorrelation sum_{t=1}^{T-l} x_{l+t} x_t (1-based), defined
// for 0 <= l <= T-1 (LagOutOfRange).  For an exactly standardized signal
// rho(0) == T.
double autocorr_raw(const Signal1D& x, std::size_t lag);

// Time-domain forms of a one-level Haar coefficient perturbation:
// approximation deltas add delta[k]/sqrt(2) to both samples of dyad k;
// detail deltas add +delta[k]/sqrt(2) to the first sample and
// -delta[k]/sqrt(2) to the second.  delta must have length T/2
// (LengthMismatch).  The result keeps standardized == false.
Signal1D perturb_approx(const Signal1D& x, const std::vector<double>& delta_a);
Signal1D perturb_detail(const Signal1D& x, const std::vector<double>& delta_d);

// The common term C(m) shared by both closed-form bounds: a full tail sum
// of coefficient magnitudes, a halved magnitude at index m+1, and halved
// shifted-index tail sums.  cl/ch are the T/2 approximation and detail
// coefficient magnitudes' sources (signed values; magnitudes taken here).
// Requires 0 <= m <= T/2 - 1 (IndexOutOfRange).
double c_of_m(const std::vector<double>& cl, const std::vector<double>& ch,
              std::size_t m, std::size_t T);

// Closed-form bounds on sum_{l=0}^{T-1} |rho_pert(l) - rho(l)| for
// approximation-only and detail-only perturbations with ||delta||_inf <=
// eps_star.  They differ only in the first term (sum |C^L| versus
// sum |C^H|), so bound_A - bound_D == eps_star*(T/2+1)*(sum|C^L|-sum|C^H|).
double bound_sum_A(const std::vector<double>& cl,
                   const std::vector<double>& ch, double eps_star,
                   std::size_t T);
double bound_sum_D(const std::vector<double>& cl,
                   const std::vector<double>& ch, double eps_star,
                   std::size_t T);

enum class PerturbBranch { approx, detail };

// Empirical sup of the total autocorrelation change over perturbations in
// the eps_star box: both all-(+eps*) and all-(-eps*) vectors, 64 random
// sign vertices, and n_samples uniform draws, all from one seeded stream
// (so the result is monotone nondecreasing in n_samples).
double empirical_sup_diff(const Signal1D& x, PerturbBranch which,
                          double eps_star, std::size_t n_samples,
                          std::uint64_t seed);

struct Theorem1Report {
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::size_t excluded = 0;  // signals failing sum|C^H| <= sum|C^L|
  std::size_t violations = 0;
  // max over accepted trials of (empirical sup) / (analytic bound)
  double max_margin_ratio = 0.0;
};

// Random standardized signals of length T; for each one satisfying the
// coefficient condition, checks empirical sup <= analytic bound on both
// branches and bound_D <= bound_A.
Theorem1Report verify_theorem1(std::size_t trials, std::size_t T,
                               double eps_star, std::uint64_t seed,
                               std::size_t n_samples = 128);

struct Theorem2Report {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_isometry_error = 0.0;
};

// Random signals and deltas with ||delta_D||_2 <= ||delta_A||_2: checks the
// displacement ordering ||X'_D - X||_2 <= ||X'_A - X||_2 and the isometry
// ||X'_* - X||_2 == ||delta_*||_2 (within 1e-12).
Theorem2Report verify_theorem2(std::size_t trials, std::size_t T,
                               std::uint64_t seed);

}  // namespace fable::theory
