#include "fable/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fable/error.hpp"
#include "fable/rng.hpp"
#include "fable/wavelet.hpp"

namespace fable::theory {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

double abs_sum(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

double l2_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void check_delta(const Signal1D& x, const std::vector<double>& delta,
                 const char* op) {
  if (delta.size() * 2 != x.values.size()) {
    raise("LengthMismatch",
          std::string(op) + ": delta length must be half the signal length");
  }
}

// First + third terms of both bounds share this magnitude-tail shape; the
// two bounds differ only in which coefficient family feeds the first term.
double bound_common(const std::vector<double>& cl,
                    const std::vector<double>& ch, double eps_star,
                    std::size_t T) {
  const std::size_t half = T / 2;
  double c_total = 0.0;
  for (std::size_t m = 0; m < half; ++m) c_total += c_of_m(cl, ch, m, T);
  const double first_pair = std::abs(cl[0]) + std::abs(ch[0]);
  const double quad =
      (static_cast<double>(T) * static_cast<double>(T) +
       static_cast<double>(T)) /
      4.0;
  return eps_star * c_total +
         (static_cast<double>(T) / 4.0) * first_pair * eps_star +
         quad * eps_star * eps_star;
}

}  // namespace

Signal1D standardize_signal(const std::vector<double>& raw) {
  const std::size_t T = raw.size();
  if (T == 0 || T % 2 != 0) {
    raise("OddLength", "signal length must be even and positive");
  }
  double mean = 0.0;
  for (double v : raw) mean += v;
  mean /= static_cast<double>(T);
  double var = 0.0;
  for (double v : raw) var += (v - mean) * (v - mean);
  var /= static_cast<double>(T);
  if (var == 0.0) raise("ZeroStd", "constant signal cannot be standardized");
  const double inv_std = 1.0 / std::sqrt(var);

  Signal1D out;
  out.values.resize(T);
  for (std::size_t t = 0; t < T; ++t) out.values[t] = (raw[t] - mean) * inv_std;
  out.standardized = true;
  return out;
}

double autocorr_raw(const Signal1D& x, std::size_t lag) {
  const std::size_t T = x.values.size();
  if (lag >= T) {
    raise("LagOutOfRange",
          "lag " + std::to_string(lag) + " outside 0.." + std::to_string(T - 1));
  }
  double acc = 0.0;
  for (std::size_t t = 0; t + lag < T; ++t) {
    acc += x.values[t + lag] * x.values[t];
  }
  return acc;
}

Signal1D perturb_approx(const Signal1D& x, const std::vector<double>& delta_a) {
  check_delta(x, delta_a, "perturb_approx");
  Signal1D out;
  out.values = x.values;
  for (std::size_t k = 0; k < delta_a.size(); ++k) {
    const double bump = delta_a[k] * kInvSqrt2;
    out.values[2 * k] += bump;
    out.values[2 * k + 1] += bump;
  }
  return out;
}

Signal1D perturb_detail(const Signal1D& x, const std::vector<double>& delta_d) {
  check_delta(x, delta_d, "perturb_detail");
  Signal1D out;
  out.values = x.values;
  for (std::size_t k = 0; k < delta_d.size(); ++k) {
    const double bump = delta_d[k] * kInvSqrt2;
    out.values[2 * k] += bump;
    out.values[2 * k + 1] -= bump;
  }
  return out;
}

double c_of_m(const std::vector<double>& cl, const std::vector<double>& ch,
              std::size_t m, std::size_t T) {
  const std::size_t half = T / 2;
  if (T == 0 || T % 2 != 0 || cl.size() != half || ch.size() != half) {
    raise("LengthMismatch", "c_of_m: coefficient arrays must have length T/2");
  }
  if (m >= half) {
    raise("IndexOutOfRange",
          "c_of_m: m must satisfy 0 <= m <= T/2 - 1, got " + std::to_string(m));
  }
  // 1-based coefficient index k maps to storage k-1.  Three parts:
  //   sum_{k=m+2}^{T/2} (|C^L_k| + |C^H_k|)
  // + (|C^L_{m+1}| + |C^H_{m+1}|) / 2
  // + sum_{k=m+2}^{T/2} (|C^L_{k-m}| + |C^H_{k-m}|
  //                      + |C^L_{k-m-1}| + |C^H_{k-m-1}|) / 2
  double tail = 0.0;
  double shifted = 0.0;
  for (std::size_t k = m + 2; k <= half; ++k) {
    tail += std::abs(cl[k - 1]) + std::abs(ch[k - 1]);
    shifted += std::abs(cl[k - m - 1]) + std::abs(ch[k - m - 1]) +
               std::abs(cl[k - m - 2]) + std::abs(ch[k - m - 2]);
  }
  const double middle = (std::abs(cl[m]) + std::abs(ch[m])) / 2.0;
  return tail + middle + shifted / 2.0;
}

double bound_sum_A(const std::vector<double>& cl,
                   const std::vector<double>& ch, double eps_star,
                   std::size_t T) {
  if (!(eps_star >= 0.0)) raise("NegativeEps", "eps_star must be >= 0");
  return eps_star * (static_cast<double>(T) / 2.0 + 1.0) * abs_sum(cl) +
         bound_common(cl, ch, eps_star, T);
}

double bound_sum_D(const std::vector<double>& cl,
                   const std::vector<double>& ch, double eps_star,
                   std::size_t T) {
  if (!(eps_star >= 0.0)) raise("NegativeEps", "eps_star must be >= 0");
  return eps_star * (static_cast<double>(T) / 2.0 + 1.0) * abs_sum(ch) +
         bound_common(cl, ch, eps_star, T);
}

double empirical_sup_diff(const Signal1D& x, PerturbBranch which,
                          double eps_star, std::size_t n_samples,
                          std::uint64_t seed) {
  const std::size_t T = x.values.size();
  const std::size_t half = T / 2;
  std::vector<double> rho_base(T);
  for (std::size_t l = 0; l < T; ++l) rho_base[l] = autocorr_raw(x, l);

  const auto objective = [&](const std::vector<double>& delta) {
    const Signal1D pert = which == PerturbBranch::approx
                              ? perturb_approx(x, delta)
                              : perturb_detail(x, delta);
    double acc = 0.0;
    for (std::size_t l = 0; l < T; ++l) {
      acc += std::abs(autocorr_raw(pert, l) - rho_base[l]);
    }
    return acc;
  };

  double sup = 0.0;
  std::vector<double> delta(half);

  // Mandatory box vertices: the objective is piecewise multilinear in
  // delta, so vertices carry most of the sup.
  std::fill(delta.begin(), delta.end(), eps_star);
  sup = std::max(sup, objective(delta));
  std::fill(delta.begin(), delta.end(), -eps_star);
  sup = std::max(sup, objective(delta));

  Rng rng(seed);
  for (int vertex = 0; vertex < 64; ++vertex) {
    for (double& d : delta) d = rng.uniform() < 0.5 ? eps_star : -eps_star;
    sup = std::max(sup, objective(delta));
  }
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (double& d : delta) d = rng.uniform(-eps_star, eps_star);
    sup = std::max(sup, objective(delta));
  }
  return sup;
}

Theorem1Report verify_theorem1(std::size_t trials, std::size_t T,
                               double eps_star, std::uint64_t seed,
                               std::size_t n_samples) {
  Theorem1Report report;
  report.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = mix_seed(seed, trial);
    Rng rng(trial_seed);
    std::vector<double> raw(T);
    for (double& v : raw) v = rng.gaussian();
    const Signal1D x = standardize_signal(raw);

    const auto [cl, ch] = wavelet::dwt1_haar(x.values);
    if (abs_sum(ch) > abs_sum(cl)) {
      ++report.excluded;
      continue;
    }
    ++report.accepted;

    const double bound_a = bound_sum_A(cl, ch, eps_star, T);
    const double bound_d = bound_sum_D(cl, ch, eps_star, T);
    const double sup_a = empirical_sup_diff(x, PerturbBranch::approx, eps_star,
                                            n_samples, mix_seed(trial_seed, 1));
    const double sup_d = empirical_sup_diff(x, PerturbBranch::detail, eps_star,
                                            n_samples, mix_seed(trial_seed, 2));

    const double slack = 1e-9;
    bool violated = bound_d > bound_a * (1.0 + slack) + slack;
    violated = violated || sup_a > bound_a * (1.0 + slack) + slack;
    violated = violated || sup_d > bound_d * (1.0 + slack) + slack;
    if (violated) ++report.violations;

    if (bound_a > 0.0) {
      report.max_margin_ratio = std::max(report.max_margin_ratio,
                                         sup_a / bound_a);
    }
    if (bound_d > 0.0) {
      report.max_margin_ratio = std::max(report.max_margin_ratio,
                                         sup_d / bound_d);
    }
  }
  return report;
}

Theorem2Report verify_theorem2(std::size_t trials, std::size_t T,
                               std::uint64_t seed) {
  Theorem2Report report;
  report.trials = trials;
  const std::size_t half = T / 2;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(seed, trial));
    std::vector<double> raw(T);
    for (double& v : raw) v = rng.gaussian();
    const Signal1D x = standardize_signal(raw);

    std::vector<double> delta_a(half), delta_d(half);
    for (double& d : delta_a) d = rng.gaussian();
    for (double& d : delta_d) d = rng.gaussian();
    const double na = l2_norm(delta_a);
    const double nd = l2_norm(delta_d);
    if (nd > na && nd > 0.0) {
      for (double& d : delta_d) d *= na / nd;
    }

    const Signal1D xa = perturb_approx(x, delta_a);
    const Signal1D xd = perturb_detail(x, delta_d);
    double disp_a_sq = 0.0, disp_d_sq = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double da = xa.values[t] - x.values[t];
      const double dd = xd.values[t] - x.values[t];
      disp_a_sq += da * da;
      disp_d_sq += dd * dd;
    }
    const double disp_a = std::sqrt(disp_a_sq);
    const double disp_d = std::sqrt(disp_d_sq);

    if (disp_d > disp_a + 1e-12) ++report.violations;
    report.max_isometry_error =
        std::max({report.max_isometry_error, std::abs(disp_a - na),
                  std::abs(disp_d - l2_norm(delta_d))});
  }
  return report;
}

}  // namespace fable::theory
