#include "fable/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fable/error.hpp"
#include "fable/io.hpp"
#include "fable/metrics.hpp"
#include "fable/model.hpp"
#include "fable/rng.hpp"
#include "fable/target.hpp"
#include "fable/wavelet.hpp"

namespace fable::harness {

namespace {

using nlohmann::json;

// 3x3 box filter with edge replication (out-of-grid taps read the nearest
// cell; the divisor stays 9 everywhere).
std::vector<double> box_smooth(const std::vector<double>& frame, std::size_t r,
                               std::size_t c) {
  std::vector<double> out(frame.size(), 0.0);
  const auto ri = static_cast<std::ptrdiff_t>(r);
  const auto ci = static_cast<std::ptrdiff_t>(c);
  for (std::ptrdiff_t i = 0; i < ri; ++i) {
    for (std::ptrdiff_t j = 0; j < ci; ++j) {
      double sum = 0.0;
      for (std::ptrdiff_t di = -1; di <= 1; ++di) {
        for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
          const auto ii = std::clamp<std::ptrdiff_t>(i + di, 0, ri - 1);
          const auto jj = std::clamp<std::ptrdiff_t>(j + dj, 0, ci - 1);
          sum += frame[static_cast<std::size_t>(ii * ci + jj)];
        }
      }
      out[static_cast<std::size_t>(i * ci + j)] = sum / 9.0;
    }
  }
  return out;
}

Tensor3 slice_frames(const Tensor3& z, std::size_t from, std::size_t count) {
  const Dims3& d = z.dims();
  const std::size_t plane = d.r * d.c;
  const auto first = z.values().begin() +
                     static_cast<std::ptrdiff_t>(from * plane);
  std::vector<double> values(first,
                             first + static_cast<std::ptrdiff_t>(count * plane));
  return Tensor3({count, d.r, d.c}, std::move(values));
}

constexpr const char* kKnownMethods[] = {"none", "noise", "fgsm", "pgd",
                                         "ala",  "stpgd", "fable",
                                         "fable_uniform"};

bool known_method(const std::string& name) {
  for (const char* m : kKnownMethods) {
    if (name == m) return true;
  }
  return false;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

SyntheticSpec parse_synthetic(const json& j) {
  SyntheticSpec spec;
  read_field(j, "t_total", spec.t_total);
  read_field(j, "r", spec.r);
  read_field(j, "c", spec.c);
  read_field(j, "phi", spec.phi);
  read_field(j, "passes", spec.passes);
  read_field(j, "noise_std", spec.noise_std);
  read_field(j, "seed", spec.seed);
  return spec;
}

void parse_budget(const json& j, attack::AttackBudget& budget) {
  read_field(j, "eps", budget.eps);
  read_field(j, "steps", budget.steps);
  if (j.contains("step_size") && !j.at("step_size").is_null()) {
    budget.step_size = j.at("step_size").get<double>();
  }
  read_field(j, "lambda", budget.lambda);
  read_field(j, "freeze_lll", budget.freeze_lll);
  read_field(j, "adam_global", budget.adam_global);
  if (j.contains("omega")) {
    for (const auto& [name, value] : j.at("omega").items()) {
      const auto band = wavelet::band_from_name(name);
      budget.omega[static_cast<std::size_t>(band)] = value.get<double>();
    }
  }
}

void parse_target(const json& j, TargetTemplate& t) {
  read_field(j, "sigma_tau", t.sigma_tau);
  read_field(j, "sigma_d", t.sigma_d);
  if (j.contains("radius") && !j.at("radius").is_null()) {
    t.radius = j.at("radius").get<std::size_t>();
  }
  read_field(j, "extreme_threshold", t.extreme_threshold);
  read_field(j, "offset_low", t.offset_low);
  read_field(j, "offset_high", t.offset_high);
  read_field(j, "clip_low", t.clip_low);
  read_field(j, "clip_high", t.clip_high);
  read_field(j, "truncation", t.truncation);
  if (j.contains("center") && !j.at("center").is_null()) {
    const auto arr = j.at("center").get<std::vector<std::size_t>>();
    if (arr.size() != 3) {
      raise("ConfigError", "target.center must hold exactly [tau, i, j]");
    }
    t.center = std::array<std::size_t, 3>{arr[0], arr[1], arr[2]};
  }
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.data_path.has_value() == cfg.synthetic.has_value()) {
    raise("ConfigError",
          "config must set exactly one of data.path and data.synthetic");
  }
  if (cfg.model_path.empty()) raise("ConfigError", "model_path is empty");
  if (cfg.n_runs == 0) raise("ConfigError", "n_runs must be >= 1");
  if (cfg.n_targets_per_sample == 0) {
    raise("ConfigError", "n_targets_per_sample must be >= 1");
  }
  for (const std::string& m : cfg.methods) {
    if (!known_method(m)) raise("ConfigError", "unknown method \"" + m + "\"");
  }
}

target::TargetSpec instantiate_target(const TargetTemplate& t,
                                      const model::ModelDims& dims,
                                      std::uint64_t cell_seed) {
  target::TargetSpec spec;
  spec.sigma_tau = t.sigma_tau;
  spec.sigma_d = t.sigma_d;
  spec.radius = t.radius;
  spec.extreme_threshold = t.extreme_threshold;
  spec.offset_low = t.offset_low;
  spec.offset_high = t.offset_high;
  spec.clip_low = t.clip_low;
  spec.clip_high = t.clip_high;
  spec.truncation = t.truncation;
  spec.seed = mix_seed(cell_seed, 1);
  if (t.center) {
    spec.center = *t.center;
  } else {
    Rng rng(cell_seed);
    spec.center = {target::sample_center_frame(dims.beta, rng),
                   rng.index(dims.r), rng.index(dims.c)};
  }
  return spec;
}

Tensor3 run_method(const std::string& method, const model::ForecastModel& g,
                   const Tensor3& x, const target::BuiltTarget& built,
                   attack::AttackBudget budget,
                   const wavelet::WaveletBasis& basis,
                   const ExperimentConfig& cfg) {
  if (method == "none") return x;
  if (method == "noise") {
    return attack::noise_attack(g, x, built.y_target, budget,
                                cfg.noise_candidates, cfg.noise_sigma)
        .x_adv;
  }
  if (method == "fgsm") return attack::fgsm(g, x, built.y_target, budget).x_adv;
  if (method == "pgd") {
    return attack::pgd_taaowpf(g, x, built.y_target, budget).x_adv;
  }
  if (method == "ala") return attack::ala(g, x, built.y_target, budget).x_adv;
  if (method == "stpgd") {
    return attack::stpgd(g, x, built.y_target, budget, cfg.stpgd_k).x_adv;
  }
  if (method == "fable_uniform") {
    budget.omega.fill(1.0);
    budget.freeze_lll = false;
  }
  return attack::fable(g, x, built.y_target, budget, basis).x_adv;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise("IoError", "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) raise("IoError", "short write to " + path.string());
}

constexpr const char* kMetricNames[] = {"in_ae", "out_ae", "closeness", "r_s",
                                        "r_t"};

double row_metric(const ReportRow& row, std::size_t idx) {
  switch (idx) {
    case 0: return row.in_ae;
    case 1: return row.out_ae;
    case 2: return row.closeness;
    case 3: return row.r_s;
    default: return row.r_t;
  }
}

}  // namespace

Tensor3 gen_synthetic(const SyntheticSpec& spec) {
  if (!std::isfinite(spec.phi) || !(std::fabs(spec.phi) < 1.0)) {
    raise("BadPhi", "phi must lie in (-1, 1)");
  }
  if (spec.t_total == 0 || spec.r == 0 || spec.c == 0) {
    raise("DimMismatch", "synthetic dims must be positive");
  }
  if (!(spec.noise_std >= 0.0)) {
    raise("NegativeInput", "noise_std must be >= 0");
  }

  Rng rng(spec.seed);
  const std::size_t plane = spec.r * spec.c;
  std::vector<double> state(plane, 0.0);
  std::vector<double> noise(plane, 0.0);
  std::vector<double> values;
  values.reserve(spec.t_total * plane);
  for (std::size_t t = 0; t < spec.t_total; ++t) {
    for (std::size_t p = 0; p < plane; ++p) {
      noise[p] = spec.noise_std * rng.gaussian();
    }
    for (std::size_t pass = 0; pass < spec.passes; ++pass) {
      noise = box_smooth(noise, spec.r, spec.c);
    }
    for (std::size_t p = 0; p < plane; ++p) {
      state[p] = spec.phi * state[p] + noise[p];
    }
    values.insert(values.end(), state.begin(), state.end());
  }
  return Tensor3({spec.t_total, spec.r, spec.c}, std::move(values));
}

std::vector<std::pair<Tensor3, Tensor3>> make_windows(const Tensor3& z,
                                                      std::size_t alpha_plus_1,
                                                      std::size_t beta,
                                                      bool non_overlapping) {
  if (alpha_plus_1 == 0 || beta == 0) {
    raise("DimMismatch", "window lengths must be positive");
  }
  const Dims3& d = z.dims();
  const std::size_t len = alpha_plus_1 + beta;
  if (d.t < len) {
    raise("TooShort", "series has " + std::to_string(d.t) +
                          " frames; a window needs " + std::to_string(len));
  }
  const std::size_t stride = non_overlapping ? len : 1;
  std::vector<std::pair<Tensor3, Tensor3>> out;
  for (std::size_t w = 0; w + len <= d.t; w += stride) {
    out.emplace_back(slice_frames(z, w, alpha_plus_1),
                     slice_frames(z, w + alpha_plus_1, beta));
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise("ConfigError", std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("data")) {
      const json& data = j.at("data");
      if (data.contains("path") && !data.at("path").is_null()) {
        cfg.data_path = data.at("path").get<std::string>();
      }
      if (data.contains("synthetic") && !data.at("synthetic").is_null()) {
        cfg.synthetic = parse_synthetic(data.at("synthetic"));
      }
    }
    read_field(j, "model_path", cfg.model_path);
    read_field(j, "alpha_plus_1", cfg.alpha_plus_1);
    read_field(j, "beta", cfg.beta);
    read_field(j, "non_overlapping", cfg.non_overlapping);
    if (j.contains("max_samples") && !j.at("max_samples").is_null()) {
      cfg.max_samples = j.at("max_samples").get<std::size_t>();
    }
    read_field(j, "methods", cfg.methods);
    if (j.contains("budget")) parse_budget(j.at("budget"), cfg.budget);
    if (j.contains("target")) parse_target(j.at("target"), cfg.target);
    read_field(j, "stpgd_k", cfg.stpgd_k);
    read_field(j, "noise_candidates", cfg.noise_candidates);
    read_field(j, "noise_sigma", cfg.noise_sigma);
    read_field(j, "n_runs", cfg.n_runs);
    read_field(j, "n_targets_per_sample", cfg.n_targets_per_sample);
    read_field(j, "seed", cfg.seed);
    read_field(j, "wavelet", cfg.wavelet_name);
    read_field(j, "output_prefix", cfg.output_prefix);
  } catch (const json::exception& e) {
    raise("ConfigError", std::string("bad config field: ") + e.what());
  }

  validate_config(cfg);
  return cfg;
}

Report run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);

  const Tensor3 z = cfg.synthetic ? gen_synthetic(*cfg.synthetic)
                                  : io::read_st3d_file(*cfg.data_path);
  const auto model = model::load(cfg.model_path);
  const model::ModelDims& md = model->dims();
  if (md.alpha_plus_1 != cfg.alpha_plus_1 || md.beta != cfg.beta ||
      md.r != z.dims().r || md.c != z.dims().c) {
    raise("ConfigError", "model checkpoint dims disagree with config/data");
  }

  auto windows = make_windows(z, cfg.alpha_plus_1, cfg.beta,
                              cfg.non_overlapping);
  if (cfg.max_samples && windows.size() > *cfg.max_samples) {
    windows.resize(*cfg.max_samples);
  }
  const std::size_t n_samples = windows.size();

  const wavelet::WaveletBasis basis =
      wavelet::WaveletBasis::by_name(cfg.wavelet_name);
  const metrics::SpatialWeights weights = metrics::spatial_weights(md.r, md.c);

  Report report;
  for (std::size_t run = 0; run < cfg.n_runs; ++run) {
    for (std::size_t s = 0; s < n_samples; ++s) {
      const Tensor3& x = windows[s].first;
      const Tensor3 y_hat = model->forward(x);
      for (std::size_t tg = 0; tg < cfg.n_targets_per_sample; ++tg) {
        const std::uint64_t cell_index =
            (run * n_samples + s) * cfg.n_targets_per_sample + tg;
        const std::uint64_t cell_seed = mix_seed(cfg.seed, cell_index);
        const std::string sample_id = "r" + std::to_string(run) + "_s" +
                                      std::to_string(s) + "_t" +
                                      std::to_string(tg);

        std::optional<target::BuiltTarget> built;
        try {
          const target::TargetSpec tspec =
              instantiate_target(cfg.target, md, cell_seed);
          built = target::build_target(y_hat, tspec);
        } catch (const Error& e) {
          report.errors.push_back({sample_id, "(target)", e.what()});
          continue;
        }

        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
          const std::string& method = cfg.methods[mi];
          try {
            attack::AttackBudget budget = cfg.budget;
            budget.seed = mix_seed(cell_seed, 100 + mi);
            const Tensor3 x_adv =
                run_method(method, *model, x, *built, budget, basis, cfg);
            const Tensor3 forecast_adv = model->forward(x_adv);
            ReportRow row;
            row.run = run;
            row.sample_id = sample_id;
            row.method = method;
            row.in_ae =
                metrics::in_ae(forecast_adv, built->y_target, built->domain);
            row.out_ae =
                metrics::out_ae(forecast_adv, built->y_target, built->domain);
            row.closeness = metrics::closeness(x, x_adv);
            row.r_s = metrics::r_s(x_adv, x, weights);
            row.r_t = metrics::r_t(x_adv, x);
            row.total_ae =
                norm(sub(forecast_adv, built->y_target), Norm::L1);
            report.rows.push_back(std::move(row));
          } catch (const Error& e) {
            report.errors.push_back({sample_id, method, e.what()});
          }
        }
      }
    }
  }

  // Aggregation: mean within each run, then mean and population standard
  // deviation across the run-level means.
  for (const std::string& method : cfg.methods) {
    bool seen = false;
    std::map<std::string, MetricStats> per_metric;
    for (std::size_t k = 0; k < 5; ++k) {
      std::vector<double> sums(cfg.n_runs, 0.0);
      std::vector<std::size_t> counts(cfg.n_runs, 0);
      for (const ReportRow& row : report.rows) {
        if (row.method != method) continue;
        sums[row.run] += row_metric(row, k);
        counts[row.run] += 1;
      }
      std::vector<double> run_means;
      for (std::size_t run = 0; run < cfg.n_runs; ++run) {
        if (counts[run] > 0) {
          run_means.push_back(sums[run] / static_cast<double>(counts[run]));
        }
      }
      if (run_means.empty()) continue;
      seen = true;
      const double n = static_cast<double>(run_means.size());
      double mean = 0.0;
      for (double v : run_means) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : run_means) var += (v - mean) * (v - mean);
      per_metric[kMetricNames[k]] = {mean, std::sqrt(var / n)};
    }
    if (seen) report.summary[method] = std::move(per_metric);
  }

  std::string csv = "sample_id,method,in_ae,out_ae,closeness,r_s,r_t\n";
  for (const ReportRow& row : report.rows) {
    csv += row.sample_id;
    csv += ',';
    csv += row.method;
    for (std::size_t k = 0; k < 5; ++k) {
      csv += ',';
      csv += io::format_double(row_metric(row, k));
    }
    csv += '\n';
  }
  report.csv_text = std::move(csv);

  json summary;
  summary["seed"] = cfg.seed;
  summary["n_samples"] = n_samples;
  summary["n_rows"] = report.rows.size();
  summary["n_errors"] = report.errors.size();
  summary["methods"] = json::object();
  for (const auto& [method, per_metric] : report.summary) {
    json m = json::object();
    for (const auto& [metric, stats] : per_metric) {
      m[metric] = {{"mean", stats.mean}, {"std", stats.stddev}};
    }
    summary["methods"][method] = std::move(m);
  }
  summary["errors"] = json::array();
  for (const CellError& e : report.errors) {
    summary["errors"].push_back({{"sample_id", e.sample_id},
                                 {"method", e.method},
                                 {"message", e.message}});
  }
  report.json_text = summary.dump(2) + "\n";

  if (!cfg.output_prefix.empty()) {
    const std::filesystem::path prefix(cfg.output_prefix);
    if (prefix.has_parent_path()) {
      std::filesystem::create_directories(prefix.parent_path());
    }
    write_text_file(cfg.output_prefix + ".csv", report.csv_text);
    write_text_file(cfg.output_prefix + ".json", report.json_text);
  }

  return report;
}

}  // namespace fable::harness
