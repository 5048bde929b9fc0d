// Synthetic data generation, sliding-window extraction, and the experiment
// grid: (run x sample x target x method) with per-cell metrics, run-level
// aggregation, and deterministic CSV/JSON rendering.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fable/attack.hpp"
#include "fable/tensor.hpp"

namespace fable::harness {

// AR(1)-in-time Gaussian field: Z_t = phi * Z_{t-1} + smooth^passes(noise),
// where smooth is a 3x3 box filter with edge replication.  phi > 0.5 with a
// couple of smoothing passes yields positive temporal and spatial
// autocorrelation.
struct SyntheticSpec {
  std::size_t t_total = 16;
  std::size_t r = 8;
  std::size_t c = 8;
  double phi = 0.8;         // |phi| < 1
  std::size_t passes = 2;   // spatial smoothing passes
  double noise_std = 1.0;
  std::uint64_t seed = 0;
};

// Deterministic given spec.seed.  Throws BadPhi, DimMismatch.
Tensor3 gen_synthetic(const SyntheticSpec& spec);

// Sliding predictor/forecast windows: pair i has X = frames [i, i+a) and
// Y = frames [i+a, i+a+b).  Stride 1, or a+b when non_overlapping (no
// shared frames between pairs).  Throws TooShort.
std::vector<std::pair<Tensor3, Tensor3>> make_windows(const Tensor3& z,
                                                      std::size_t alpha_plus_1,
                                                      std::size_t beta,
                                                      bool non_overlapping =
                                                          false);

// Target construction template; the grid instantiates one concrete
// TargetSpec per (run, sample, target) cell, sampling the center when it is
// not pinned here.
struct TargetTemplate {
  double sigma_tau = 1.0;
  double sigma_d = 1.0;
  std::optional<std::size_t> radius;  // nullopt = center cell only
  double extreme_threshold = 0.0;
  double offset_low = 0.0;
  double offset_high = 0.0;
  double clip_low = 0.0;
  double clip_high = 0.0;
  double truncation = 1e-3;
  std::optional<std::array<std::size_t, 3>> center;
};

struct ExperimentConfig {
  // Exactly one data source: an ST3D file or a synthetic spec.
  std::optional<std::string> data_path;
  std::optional<SyntheticSpec> synthetic;
  std::string model_path;
  std::size_t alpha_plus_1 = 4;
  std::size_t beta = 4;
  bool non_overlapping = false;
  std::optional<std::size_t> max_samples;
  // Recognized: none, noise, fgsm, pgd, ala, stpgd, fable, fable_uniform
  // (fable with all omega = 1 and the LLL band unfrozen).
  std::vector<std::string> methods;
  attack::AttackBudget budget;
  TargetTemplate target;
  std::size_t stpgd_k = 8;
  std::size_t noise_candidates = 8;
  double noise_sigma = 1.0;
  std::size_t n_runs = 5;
  std::size_t n_targets_per_sample = 2;
  std::uint64_t seed = 0;
  std::string wavelet_name = "haar";
  // When nonempty, run_experiment writes <prefix>.csv and <prefix>.json.
  std::string output_prefix;
};

// Parses the JSON experiment config (field names match the struct members;
// see configs/reference.json).  Throws ConfigError.
ExperimentConfig parse_config_text(const std::string& text);

struct ReportRow {
  std::size_t run = 0;
  std::string sample_id;  // "r<run>_s<sample>_t<target>"
  std::string method;
  double in_ae = 0.0;
  double out_ae = 0.0;
  double closeness = 0.0;
  double r_s = 0.0;
  double r_t = 0.0;
  // Total |forecast - target| over all cells; in_ae and out_ae partition
  // this sum.  Kept on the row (not in the CSV) so the identity stays
  // checkable after the fact.
  double total_ae = 0.0;
};

struct CellError {
  std::string sample_id;
  std::string method;
  std::string message;
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population std across run-level means
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<CellError> errors;
  // method -> metric name -> stats; metrics keyed in_ae, out_ae, closeness,
  // r_s, r_t.
  std::map<std::string, std::map<std::string, MetricStats>> summary;
  std::string csv_text;
  std::string json_text;
};

// Runs the full grid.  Per-cell failures are recorded in errors (and the
// JSON summary) without aborting the other cells.  Deterministic: identical
// configs produce byte-identical csv_text and json_text.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace fable::harness
