// fable: command-line driver.
//
//   gen            synthesize an AR(1) Gaussian field and write it out
//   train          fit a surrogate forecaster on sliding windows
//   attack         run one attack on one window and print its metrics
//   verify-theory  numerically check the two coefficient-perturbation
//                  theorems and emit a five-field JSON report
//   report         run the full (run x sample x target x method) grid from a
//                  JSON config, with per-field override flags

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fable/attack.hpp"
#include "fable/error.hpp"
#include "fable/harness.hpp"
#include "fable/io.hpp"
#include "fable/metrics.hpp"
#include "fable/model.hpp"
#include "fable/rng.hpp"
#include "fable/target.hpp"
#include "fable/theory.hpp"
#include "fable/wavelet.hpp"

namespace {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fable::raise("IoError", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fable::raise("IoError", "cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fable::raise("IoError", "short write to " + path);
}

// ---------------------------------------------------------------- gen ----

struct GenOpts {
  fable::harness::SyntheticSpec spec;
  std::string out;
  std::string format = "st3d";  // st3d | csv
};

void run_gen(const GenOpts& o) {
  const fable::Tensor3 z = fable::harness::gen_synthetic(o.spec);
  if (o.format == "csv") {
    fable::io::write_csv_file(o.out, z);
  } else if (o.format == "st3d") {
    fable::io::write_st3d_file(o.out, z);
  } else {
    fable::raise("ConfigError", "unknown format \"" + o.format + "\"");
  }
  json j;
  j["path"] = o.out;
  j["t"] = z.dims().t;
  j["r"] = z.dims().r;
  j["c"] = z.dims().c;
  std::cout << j.dump(2) << "\n";
}

// -------------------------------------------------------------- train ----

struct TrainOpts {
  std::string data;
  std::string arch = "conv_ar";
  std::size_t alpha_plus_1 = 4;
  std::size_t beta = 4;
  bool non_overlapping = false;
  std::size_t epochs = 300;
  double lr = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

void run_train(const TrainOpts& o) {
  const fable::Tensor3 z = fable::io::read_st3d_file(o.data);
  const auto windows = fable::harness::make_windows(z, o.alpha_plus_1, o.beta,
                                                    o.non_overlapping);
  auto fit = fable::model::fit(fable::model::arch_from_name(o.arch), windows,
                               o.epochs, o.lr, o.seed);
  fable::model::save(*fit.model, o.out);
  json j;
  j["arch"] = o.arch;
  j["samples"] = windows.size();
  j["parameters"] = fit.model->parameter_count();
  j["final_loss"] = fit.final_loss;
  j["path"] = o.out;
  std::cout << j.dump(2) << "\n";
}

// ------------------------------------------------------------- attack ----

struct AttackOpts {
  std::string model_path;
  std::string data_path;
  std::size_t sample = 0;
  std::string method = "fable";
  std::string wavelet = "haar";
  std::uint64_t seed = 0;

  fable::attack::AttackBudget budget;
  double step_size = 0.0;
  CLI::Option* step_size_opt = nullptr;

  fable::harness::TargetTemplate target;
  std::size_t radius = 0;
  CLI::Option* radius_opt = nullptr;
  std::vector<std::size_t> center;

  std::size_t stpgd_k = 8;
  std::size_t noise_candidates = 8;
  double noise_sigma = 1.0;

  std::string adv_out;
  std::string target_out;
  std::string coeffs_out;
};

fable::attack::AttackResult dispatch_attack(
    const std::string& method, const fable::model::ForecastModel& g,
    const fable::Tensor3& x, const fable::Tensor3& y_target,
    fable::attack::AttackBudget budget, const fable::wavelet::WaveletBasis& basis,
    std::size_t stpgd_k, std::size_t noise_candidates, double noise_sigma) {
  using namespace fable::attack;
  if (method == "none") return AttackResult{x, {}, 0};
  if (method == "noise") {
    return noise_attack(g, x, y_target, budget, noise_candidates, noise_sigma);
  }
  if (method == "fgsm") return fgsm(g, x, y_target, budget);
  if (method == "pgd") return pgd_taaowpf(g, x, y_target, budget);
  if (method == "ala") return ala(g, x, y_target, budget);
  if (method == "stpgd") return stpgd(g, x, y_target, budget, stpgd_k);
  if (method == "fable_uniform") {
    budget.omega.fill(1.0);
    budget.freeze_lll = false;
    return fable::attack::fable(g, x, y_target, budget, basis);
  }
  if (method == "fable") {
    return fable::attack::fable(g, x, y_target, budget, basis);
  }
  fable::raise("ConfigError", "unknown method \"" + method + "\"");
}

void run_attack(AttackOpts& o) {
  const auto model = fable::model::load(o.model_path);
  const auto& md = model->dims();
  const fable::Tensor3 z = fable::io::read_st3d_file(o.data_path);
  const auto windows =
      fable::harness::make_windows(z, md.alpha_plus_1, md.beta, false);
  if (o.sample >= windows.size()) {
    fable::raise("IndexOutOfRange",
                 "sample " + std::to_string(o.sample) + " of " +
                     std::to_string(windows.size()) + " windows");
  }
  const fable::Tensor3& x = windows[o.sample].first;
  const fable::Tensor3 y_hat = model->forward(x);

  fable::target::TargetSpec tspec;
  tspec.sigma_tau = o.target.sigma_tau;
  tspec.sigma_d = o.target.sigma_d;
  if (o.radius_opt != nullptr && o.radius_opt->count() > 0) {
    tspec.radius = o.radius;
  }
  tspec.extreme_threshold = o.target.extreme_threshold;
  tspec.offset_low = o.target.offset_low;
  tspec.offset_high = o.target.offset_high;
  tspec.clip_low = o.target.clip_low;
  tspec.clip_high = o.target.clip_high;
  tspec.truncation = o.target.truncation;
  tspec.seed = fable::mix_seed(o.seed, 2);
  if (!o.center.empty()) {
    if (o.center.size() != 3) {
      fable::raise("ConfigError", "--center needs exactly tau i j");
    }
    tspec.center = {o.center[0], o.center[1], o.center[2]};
  } else {
    fable::Rng rng(fable::mix_seed(o.seed, 1));
    tspec.center = {fable::target::sample_center_frame(md.beta, rng),
                    rng.index(md.r), rng.index(md.c)};
  }
  const auto built = fable::target::build_target(y_hat, tspec);

  fable::attack::AttackBudget budget = o.budget;
  if (o.step_size_opt != nullptr && o.step_size_opt->count() > 0) {
    budget.step_size = o.step_size;
  }
  budget.seed = fable::mix_seed(o.seed, 3);
  const auto basis = fable::wavelet::WaveletBasis::by_name(o.wavelet);

  const auto result =
      dispatch_attack(o.method, *model, x, built.y_target, budget, basis,
                      o.stpgd_k, o.noise_candidates, o.noise_sigma);
  const fable::Tensor3 forecast_adv = model->forward(result.x_adv);
  const auto weights = fable::metrics::spatial_weights(md.r, md.c);

  json j;
  j["method"] = o.method;
  j["sample"] = o.sample;
  j["center"] = {tspec.center[0], tspec.center[1], tspec.center[2]};
  j["delta_center"] = built.delta_center;
  j["domain_size"] = built.domain.size();
  j["in_ae"] = fable::metrics::in_ae(forecast_adv, built.y_target,
                                     built.domain);
  j["out_ae"] = fable::metrics::out_ae(forecast_adv, built.y_target,
                                       built.domain);
  j["closeness"] = fable::metrics::closeness(x, result.x_adv);
  j["r_s"] = fable::metrics::r_s(result.x_adv, x, weights);
  j["r_t"] = fable::metrics::r_t(result.x_adv, x);
  j["steps_run"] = result.steps_run;
  if (!result.loss_trace.empty()) j["first_loss"] = result.loss_trace.front();
  if (!result.loss_trace.empty()) j["last_loss"] = result.loss_trace.back();
  std::cout << j.dump(2) << "\n";

  if (!o.adv_out.empty()) fable::io::write_st3d_file(o.adv_out, result.x_adv);
  if (!o.target_out.empty()) {
    fable::io::write_st3d_file(o.target_out, built.y_target);
  }
  if (!o.coeffs_out.empty()) {
    fable::wavelet::write_coeffs_file(o.coeffs_out,
                                      fable::wavelet::dwt3(result.x_adv,
                                                           basis));
  }
}

// ------------------------------------------------------ verify-theory ----

struct VerifyOpts {
  std::size_t t1_trials = 200;
  std::size_t t1_length = 16;
  double eps_star = 0.1;
  std::size_t t1_samples = 128;
  std::size_t t2_trials = 10000;
  std::size_t t2_length = 32;
  std::uint64_t seed = 1;
  std::string out;
};

void run_verify(const VerifyOpts& o) {
  const auto r1 = fable::theory::verify_theorem1(o.t1_trials, o.t1_length,
                                                 o.eps_star, o.seed,
                                                 o.t1_samples);
  const auto r2 = fable::theory::verify_theorem2(o.t2_trials, o.t2_length,
                                                 fable::mix_seed(o.seed, 2));
  json j;
  j["trials"] = r1.trials + r2.trials;
  j["excluded"] = r1.excluded;
  j["violations_t1"] = r1.violations;
  j["violations_t2"] = r2.violations;
  j["max_margin_ratio"] = r1.max_margin_ratio;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) write_text_file(o.out, text);
}

// ------------------------------------------------------------- report ----

struct ReportOpts {
  std::string config_path;

  // Override storage; each entry is applied only when its flag was seen.
  std::uint64_t seed = 0;
  std::size_t n_runs = 0;
  std::size_t n_targets = 0;
  std::size_t max_samples = 0;
  std::string model_path;
  std::string out_prefix;
  std::string wavelet;
  std::string data_path;
  std::size_t alpha_plus_1 = 0;
  std::size_t beta = 0;
  bool non_overlapping = false;
  std::vector<std::string> methods;

  double eps = 0.0;
  std::size_t steps = 0;
  double step_size = 0.0;
  double lambda = 0.0;
  bool freeze_lll = true;
  bool adam_global = false;

  double sigma_tau = 0.0;
  double sigma_d = 0.0;
  std::size_t radius = 0;
  double extreme_threshold = 0.0;
  double offset_low = 0.0;
  double offset_high = 0.0;
  double clip_low = 0.0;
  double clip_high = 0.0;
  double truncation = 0.0;
  std::vector<std::size_t> center;

  std::size_t stpgd_k = 0;
  std::size_t noise_candidates = 0;
  double noise_sigma = 0.0;

  fable::harness::SyntheticSpec syn;

  std::map<std::string, CLI::Option*> opts;
};

void run_report(ReportOpts& o) {
  auto cfg = fable::harness::parse_config_text(read_text_file(o.config_path));

  const auto seen = [&](const char* name) {
    auto it = o.opts.find(name);
    return it != o.opts.end() && it->second->count() > 0;
  };

  if (seen("seed")) cfg.seed = o.seed;
  if (seen("n-runs")) cfg.n_runs = o.n_runs;
  if (seen("n-targets")) cfg.n_targets_per_sample = o.n_targets;
  if (seen("max-samples")) cfg.max_samples = o.max_samples;
  if (seen("model")) cfg.model_path = o.model_path;
  if (seen("out-prefix")) cfg.output_prefix = o.out_prefix;
  if (seen("wavelet")) cfg.wavelet_name = o.wavelet;
  if (seen("alpha-plus-1")) cfg.alpha_plus_1 = o.alpha_plus_1;
  if (seen("beta")) cfg.beta = o.beta;
  if (seen("non-overlapping")) cfg.non_overlapping = o.non_overlapping;
  if (seen("method")) cfg.methods = o.methods;
  if (seen("data-path")) {
    cfg.data_path = o.data_path;
    cfg.synthetic.reset();
  }

  if (seen("eps")) cfg.budget.eps = o.eps;
  if (seen("steps")) cfg.budget.steps = o.steps;
  if (seen("step-size")) cfg.budget.step_size = o.step_size;
  if (seen("lambda")) cfg.budget.lambda = o.lambda;
  if (seen("freeze-lll")) cfg.budget.freeze_lll = o.freeze_lll;
  if (seen("adam-global")) cfg.budget.adam_global = o.adam_global;

  if (seen("sigma-tau")) cfg.target.sigma_tau = o.sigma_tau;
  if (seen("sigma-d")) cfg.target.sigma_d = o.sigma_d;
  if (seen("radius")) cfg.target.radius = o.radius;
  if (seen("center-only")) cfg.target.radius.reset();
  if (seen("extreme-threshold")) cfg.target.extreme_threshold =
      o.extreme_threshold;
  if (seen("offset-low")) cfg.target.offset_low = o.offset_low;
  if (seen("offset-high")) cfg.target.offset_high = o.offset_high;
  if (seen("clip-low")) cfg.target.clip_low = o.clip_low;
  if (seen("clip-high")) cfg.target.clip_high = o.clip_high;
  if (seen("truncation")) cfg.target.truncation = o.truncation;
  if (seen("center")) {
    if (o.center.size() != 3) {
      fable::raise("ConfigError", "--center needs exactly tau i j");
    }
    cfg.target.center = std::array<std::size_t, 3>{o.center[0], o.center[1],
                                                   o.center[2]};
  }

  if (seen("stpgd-k")) cfg.stpgd_k = o.stpgd_k;
  if (seen("noise-candidates")) cfg.noise_candidates = o.noise_candidates;
  if (seen("noise-sigma")) cfg.noise_sigma = o.noise_sigma;

  const bool syn_touched = seen("syn-t-total") || seen("syn-r") ||
                           seen("syn-c") || seen("syn-phi") ||
                           seen("syn-passes") || seen("syn-noise-std") ||
                           seen("syn-seed");
  if (syn_touched) {
    fable::harness::SyntheticSpec spec =
        cfg.synthetic ? *cfg.synthetic : fable::harness::SyntheticSpec{};
    if (seen("syn-t-total")) spec.t_total = o.syn.t_total;
    if (seen("syn-r")) spec.r = o.syn.r;
    if (seen("syn-c")) spec.c = o.syn.c;
    if (seen("syn-phi")) spec.phi = o.syn.phi;
    if (seen("syn-passes")) spec.passes = o.syn.passes;
    if (seen("syn-noise-std")) spec.noise_std = o.syn.noise_std;
    if (seen("syn-seed")) spec.seed = o.syn.seed;
    cfg.synthetic = spec;
    cfg.data_path.reset();
  }

  const auto report = fable::harness::run_experiment(cfg);
  std::cout << report.json_text;
  if (!cfg.output_prefix.empty()) {
    std::cerr << "wrote " << cfg.output_prefix << ".csv and "
              << cfg.output_prefix << ".json\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Localized wavelet-space adversarial attacks on spatiotemporal "
      "forecast models"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic series");
  gen_cmd->add_option("--t-total", gen.spec.t_total, "Number of frames");
  gen_cmd->add_option("--rows", gen.spec.r, "Grid rows");
  gen_cmd->add_option("--cols", gen.spec.c, "Grid columns");
  gen_cmd->add_option("--phi", gen.spec.phi, "AR(1) coefficient, |phi| < 1");
  gen_cmd->add_option("--passes", gen.spec.passes, "3x3 smoothing passes");
  gen_cmd->add_option("--noise-std", gen.spec.noise_std, "Innovation std");
  gen_cmd->add_option("--seed", gen.spec.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "Output path")->required();
  gen_cmd->add_option("--format", gen.format, "st3d (default) or csv");
  gen_cmd->callback([&]() { run_gen(gen); });

  TrainOpts train;
  auto* train_cmd = app.add_subcommand("train", "Fit a surrogate forecaster");
  train_cmd->add_option("--data", train.data, "Input ST3D series")->required();
  train_cmd->add_option("--arch", train.arch,
                        "copy_last | linear_lag | conv_ar");
  train_cmd->add_option("--alpha-plus-1", train.alpha_plus_1, "Input frames");
  train_cmd->add_option("--beta", train.beta, "Forecast frames");
  train_cmd->add_flag("--non-overlapping", train.non_overlapping,
                      "Stride windows by alpha+1+beta");
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--lr", train.lr, "Learning rate");
  train_cmd->add_option("--seed", train.seed, "Init seed");
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
  train_cmd->callback([&]() { run_train(train); });

  AttackOpts atk;
  auto* atk_cmd =
      app.add_subcommand("attack", "Attack one window and print metrics");
  atk_cmd->add_option("--model", atk.model_path, "Checkpoint")->required();
  atk_cmd->add_option("--data", atk.data_path, "ST3D series")->required();
  atk_cmd->add_option("--sample", atk.sample, "Window index");
  atk_cmd->add_option("--method", atk.method,
                      "none | noise | fgsm | pgd | ala | stpgd | fable | "
                      "fable_uniform");
  atk_cmd->add_option("--wavelet", atk.wavelet, "haar | db2 | db4 | db6");
  atk_cmd->add_option("--seed", atk.seed, "Seed for target and attack draws");
  atk_cmd->add_option("--eps", atk.budget.eps, "l-infinity budget");
  atk_cmd->add_option("--steps", atk.budget.steps, "Iterations N");
  atk.step_size_opt =
      atk_cmd->add_option("--step-size", atk.step_size, "Step size eta");
  atk_cmd->add_option("--lambda", atk.budget.lambda, "Closeness weight");
  atk_cmd->add_flag("--freeze-lll,!--no-freeze-lll", atk.budget.freeze_lll,
                    "Keep the LLL band fixed (default on)");
  atk_cmd->add_flag("--adam-global", atk.budget.adam_global,
                    "Single Adam state threaded across bands");
  atk_cmd->add_option("--sigma-tau", atk.target.sigma_tau, "Temporal decay");
  atk_cmd->add_option("--sigma-d", atk.target.sigma_d, "Spatial decay");
  atk.radius_opt = atk_cmd->add_option("--radius", atk.radius,
                                       "Chebyshev neighborhood radius");
  atk_cmd->add_option("--extreme-threshold", atk.target.extreme_threshold,
                      "Y*");
  atk_cmd->add_option("--offset-low", atk.target.offset_low, "|delta| lower");
  atk_cmd->add_option("--offset-high", atk.target.offset_high,
                      "|delta| upper");
  atk_cmd->add_option("--clip-low", atk.target.clip_low, "Target floor");
  atk_cmd->add_option("--clip-high", atk.target.clip_high, "Target ceiling");
  atk_cmd->add_option("--truncation", atk.target.truncation,
                      "Temporal decay cutoff");
  atk_cmd->add_option("--center", atk.center, "Fixed center: tau i j")
      ->expected(3);
  atk_cmd->add_option("--stpgd-k", atk.stpgd_k, "Saliency mask size");
  atk_cmd->add_option("--noise-candidates", atk.noise_candidates,
                      "Noise attack candidates");
  atk_cmd->add_option("--noise-sigma", atk.noise_sigma, "Noise attack sigma");
  atk_cmd->add_option("--adv-out", atk.adv_out, "Write x_adv (ST3D)");
  atk_cmd->add_option("--target-out", atk.target_out, "Write y_target (ST3D)");
  atk_cmd->add_option("--coeffs-out", atk.coeffs_out,
                      "Write dwt3(x_adv) container");
  atk_cmd->callback([&]() { run_attack(atk); });

  VerifyOpts ver;
  auto* ver_cmd = app.add_subcommand(
      "verify-theory", "Numerically verify the perturbation theorems");
  ver_cmd->add_option("--t1-trials", ver.t1_trials, "Theorem 1 signals");
  ver_cmd->add_option("--t1-length", ver.t1_length, "Theorem 1 length T");
  ver_cmd->add_option("--eps-star", ver.eps_star, "Coefficient budget");
  ver_cmd->add_option("--t1-samples", ver.t1_samples,
                      "Random perturbations per signal");
  ver_cmd->add_option("--t2-trials", ver.t2_trials, "Theorem 2 trials");
  ver_cmd->add_option("--t2-length", ver.t2_length, "Theorem 2 length T");
  ver_cmd->add_option("--seed", ver.seed, "RNG seed");
  ver_cmd->add_option("--out", ver.out, "Also write the JSON here");
  ver_cmd->callback([&]() { run_verify(ver); });

  ReportOpts rep;
  auto* rep_cmd =
      app.add_subcommand("report", "Run the experiment grid from a config");
  rep_cmd->add_option("--config", rep.config_path, "JSON config")->required();
  auto& ro = rep.opts;
  ro["seed"] = rep_cmd->add_option("--seed", rep.seed, "Grid seed");
  ro["n-runs"] = rep_cmd->add_option("--n-runs", rep.n_runs, "Repetitions");
  ro["n-targets"] = rep_cmd->add_option("--n-targets", rep.n_targets,
                                        "Targets per sample");
  ro["max-samples"] = rep_cmd->add_option("--max-samples", rep.max_samples,
                                          "Cap on windows");
  ro["model"] = rep_cmd->add_option("--model", rep.model_path, "Checkpoint");
  ro["out-prefix"] = rep_cmd->add_option("--out-prefix", rep.out_prefix,
                                         "Output file prefix");
  ro["wavelet"] = rep_cmd->add_option("--wavelet", rep.wavelet, "Basis name");
  ro["alpha-plus-1"] = rep_cmd->add_option("--alpha-plus-1", rep.alpha_plus_1,
                                           "Input frames");
  ro["beta"] = rep_cmd->add_option("--beta", rep.beta, "Forecast frames");
  ro["non-overlapping"] = rep_cmd->add_flag("--non-overlapping",
                                            rep.non_overlapping,
                                            "Disjoint windows");
  ro["method"] = rep_cmd->add_option("--method", rep.methods,
                                     "Replace the method list (repeatable)");
  ro["data-path"] = rep_cmd->add_option("--data-path", rep.data_path,
                                        "Use this ST3D file as data");
  ro["eps"] = rep_cmd->add_option("--eps", rep.eps, "l-infinity budget");
  ro["steps"] = rep_cmd->add_option("--steps", rep.steps, "Iterations N");
  ro["step-size"] = rep_cmd->add_option("--step-size", rep.step_size,
                                        "Step size eta");
  ro["lambda"] = rep_cmd->add_option("--lambda", rep.lambda,
                                     "Closeness weight");
  ro["freeze-lll"] = rep_cmd->add_flag("--freeze-lll,!--no-freeze-lll",
                                       rep.freeze_lll, "LLL band frozen");
  ro["adam-global"] = rep_cmd->add_flag("--adam-global,!--no-adam-global",
                                        rep.adam_global,
                                        "Single Adam state across bands");
  ro["sigma-tau"] = rep_cmd->add_option("--sigma-tau", rep.sigma_tau,
                                        "Temporal decay");
  ro["sigma-d"] = rep_cmd->add_option("--sigma-d", rep.sigma_d,
                                      "Spatial decay");
  ro["radius"] = rep_cmd->add_option("--radius", rep.radius,
                                     "Neighborhood radius");
  ro["center-only"] = rep_cmd->add_flag("--center-only",
                                        "Perturb only the center cell");
  ro["extreme-threshold"] = rep_cmd->add_option("--extreme-threshold",
                                                rep.extreme_threshold, "Y*");
  ro["offset-low"] = rep_cmd->add_option("--offset-low", rep.offset_low,
                                         "|delta| lower");
  ro["offset-high"] = rep_cmd->add_option("--offset-high", rep.offset_high,
                                          "|delta| upper");
  ro["clip-low"] = rep_cmd->add_option("--clip-low", rep.clip_low,
                                       "Target floor");
  ro["clip-high"] = rep_cmd->add_option("--clip-high", rep.clip_high,
                                        "Target ceiling");
  ro["truncation"] = rep_cmd->add_option("--truncation", rep.truncation,
                                         "Temporal decay cutoff");
  ro["center"] = rep_cmd->add_option("--center", rep.center,
                                     "Fixed center: tau i j")->expected(3);
  ro["stpgd-k"] = rep_cmd->add_option("--stpgd-k", rep.stpgd_k,
                                      "Saliency mask size");
  ro["noise-candidates"] = rep_cmd->add_option("--noise-candidates",
                                               rep.noise_candidates,
                                               "Noise candidates");
  ro["noise-sigma"] = rep_cmd->add_option("--noise-sigma", rep.noise_sigma,
                                          "Noise sigma");
  ro["syn-t-total"] = rep_cmd->add_option("--syn-t-total", rep.syn.t_total,
                                          "Synthetic frames");
  ro["syn-r"] = rep_cmd->add_option("--syn-r", rep.syn.r, "Synthetic rows");
  ro["syn-c"] = rep_cmd->add_option("--syn-c", rep.syn.c, "Synthetic cols");
  ro["syn-phi"] = rep_cmd->add_option("--syn-phi", rep.syn.phi,
                                      "Synthetic AR coefficient");
  ro["syn-passes"] = rep_cmd->add_option("--syn-passes", rep.syn.passes,
                                         "Synthetic smoothing passes");
  ro["syn-noise-std"] = rep_cmd->add_option("--syn-noise-std",
                                            rep.syn.noise_std,
                                            "Synthetic innovation std");
  ro["syn-seed"] = rep_cmd->add_option("--syn-seed", rep.syn.seed,
                                       "Synthetic seed");
  rep_cmd->callback([&]() { run_report(rep); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const fable::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
