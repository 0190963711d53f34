// Copyright 2026 The Misinfo Dropout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: simulations, sweeps, estimation, controlled runs,
// the dataset pipeline, corpus generation and the extinction bound check.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "misinfo/io.hpp"
#include "misinfo/misinfo.hpp"

namespace fs = std::filesystem;
using misinfo::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
  std::uint64_t seed = 1;
  std::optional<std::size_t> trials;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--trials", o.trials, "Number of trials / runs / cascades");
  cmd->add_option("--alpha", o.alpha, "Safety parameter alpha (>= 0)");
  cmd->add_option("--lambda", o.lambda, "Soft-program weight lambda (>= 0)");
  cmd->add_option("--out-dir", o.out_dir, "Directory for output files")->capture_default_str();
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "jsonl", "svg"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

void require_format(const CommonOptions& o, std::initializer_list<const char*> allowed, const char* cmd) {
  for (const char* f : allowed)
    if (o.format == f) return;
  std::string list;
  for (const char* f : allowed) list += (list.empty() ? "" : "|") + std::string(f);
  throw misinfo::InvalidArgument(misinfo::detail::concat(cmd, " supports --format ", list));
}

fs::path output_path(const CommonOptions& o, const std::string& stem, const std::string& ext) {
  return fs::path(o.out_dir) / (stem + "." + ext);
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

void emit(const fs::path& p, const std::string& content) {
  misinfo::io::write_file(p, content);
  announce(p);
}

misinfo::ControlConfig control_from(const CommonOptions& o, const std::string& solver) {
  misinfo::ControlConfig c;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.lambda) c.lambda = *o.lambda;
  c.solver = solver == "convex" ? misinfo::SolverKind::kConvex : misinfo::SolverKind::kLpWithSoftFallback;
  c.seed = o.seed;
  c.validate();
  return c;
}

// Synthetic model flags shared by simulate, control, generate-dataset and
// bound-check.
struct SyntheticModel {
  std::vector<std::size_t> sizes{500, 500};
  double x = 0.005;
  double y = 0.0005;
  std::string model_file;

  void add(CLI::App* cmd, bool allow_file) {
    cmd->add_option("--sizes", sizes, "Class sizes, e.g. --sizes 800 200")->expected(1, -1);
    cmd->add_option("--x", x, "Same-class shift x of the synthetic matrices")->capture_default_str();
    cmd->add_option("--y", y, "Cross-class shift y of the synthetic matrices")->capture_default_str();
    if (allow_file)
      cmd->add_option("--models", model_file,
                      "JSON/TOML file with partition, b_plus and b_minus (e.g. the output of fit)");
  }

  misinfo::ContentModelPair build() const {
    if (!model_file.empty()) {
      const json j = misinfo::io::load_document(model_file);
      if (!j.contains("partition")) throw misinfo::io::SchemaError("model file needs 'partition'");
      auto part = misinfo::share(misinfo::io::partition_from_json(j.at("partition")));
      if (!j.contains("b_plus") || !j.contains("b_minus"))
        throw misinfo::io::SchemaError("model file needs 'b_plus' and 'b_minus'");
      try {
        return {misinfo::SbmModel(part, misinfo::io::matrix_from_json(j.at("b_plus"))),
                misinfo::SbmModel(part, misinfo::io::matrix_from_json(j.at("b_minus")))};
      } catch (const misinfo::InvalidArgument& e) {
        throw misinfo::io::SchemaError(misinfo::detail::concat(model_file, ": ", e.what()));
      }
    }
    auto part = misinfo::share(misinfo::Partition::from_sizes(sizes));
    auto [bp, bm] = misinfo::synthetic_matrices(misinfo::default_base_matrix(sizes.size()), x, y);
    return {misinfo::SbmModel(part, std::move(bp)), misinfo::SbmModel(part, std::move(bm))};
  }
};

misinfo::ContentLabel parse_label(const std::string& s) {
  return s == "true" ? misinfo::ContentLabel::kTrue : misinfo::ContentLabel::kFalse;
}

std::string summary_line(const char* what, const misinfo::CascadeSummary& s) {
  return misinfo::detail::concat(what, ": mean ", misinfo::io::num(s.mean_size), " (se ",
                                 misinfo::io::num(s.mean_size_se), "), low ",
                                 misinfo::io::num(s.low_fraction));
}

// --- simulate -------------------------------------------------------------------

struct SimulateOptions {
  CommonOptions common;
  SyntheticModel model;
  std::string content = "false";
  std::size_t num_seeds = 10;
  int period = 1;
  bool traced = false;
};

int run_simulate(const SimulateOptions& o) {
  require_format(o.common, {"csv", "jsonl"}, "simulate");
  const auto models = o.model.build();
  const auto& real = models.for_label(parse_label(o.content));
  const std::size_t trials = o.common.trials.value_or(1);
  std::vector<misinfo::CascadeRecord> records(trials);
  misinfo::parallel_for(
      trials,
      [&](std::size_t t) {
        misinfo::Rng rng(misinfo::derive_seed(o.common.seed, t));
        const auto seeds = misinfo::draw_seeds(real.num_nodes(), o.num_seeds, rng);
        records[t] = o.traced ? misinfo::run_cascade_traced(real, seeds, o.period, rng)
                              : misinfo::run_cascade(real, seeds, o.period, rng);
      },
      o.common.threads);
  if (o.common.format == "jsonl") {
    emit(output_path(o.common, "cascades", "jsonl"), misinfo::io::to_jsonl(records));
  } else {
    std::string csv = "trial,r_inf,terminated_at,seeds\n";
    for (std::size_t t = 0; t < trials; ++t)
      csv += misinfo::detail::concat(t, ',', records[t].r_infinity, ',', records[t].terminated_at, ',',
                                     records[t].seeds.size(), '\n');
    emit(output_path(o.common, "cascades", "csv"), csv);
  }
  std::cout << summary_line(o.content.c_str(), misinfo::cascade_statistics(records, real.num_nodes()))
            << "\n";
  return kExitOk;
}

// --- sweep ------------------------------------------------------------------------

struct SweepOptions {
  CommonOptions common;
  std::string config;
  bool no_control = false;
  std::string solver = "lp";
  std::optional<std::size_t> grid;
  std::optional<std::size_t> num_seeds;
};

int run_sweep_cmd(const SweepOptions& o) {
  misinfo::SyntheticConfig cfg;
  if (!o.config.empty()) cfg = misinfo::io::synthetic_config_from_json(misinfo::io::load_document(o.config));
  cfg.master_seed = o.common.seed;
  if (o.common.trials) cfg.trials_per_cell = *o.common.trials;
  if (o.grid) cfg.x.points = cfg.y.points = *o.grid;
  if (o.num_seeds) cfg.seeds_per_cascade = *o.num_seeds;
  cfg.threads = o.common.threads;
  if (o.no_control) {
    cfg.control.reset();
  } else if (o.common.alpha || o.common.lambda || o.solver != "lp") {
    misinfo::ControlConfig c = cfg.control.value_or(misinfo::ControlConfig{});
    if (o.common.alpha) c.alpha = *o.common.alpha;
    if (o.common.lambda) c.lambda = *o.common.lambda;
    c.solver = o.solver == "convex" ? misinfo::SolverKind::kConvex : misinfo::SolverKind::kLpWithSoftFallback;
    cfg.control = c;
  }
  const auto result = misinfo::run_sweep(cfg);
  const std::string stem = "sweep_" + cfg.name;
  if (o.common.format == "csv") {
    emit(output_path(o.common, stem, "csv"), misinfo::io::sweep_csv(result));
  } else if (o.common.format == "jsonl") {
    std::string out = json{{"config", misinfo::io::to_json(cfg)}}.dump() + "\n";
    for (const auto& c : result.cells) {
      json j{{"x", c.x}, {"y", c.y}, {"valid", c.valid}, {"feasible_t0", c.feasible_t0},
             {"lp_first_step_fraction", c.lp_first_step_fraction},
             {"true_mean", c.true_stats.mean_size}, {"true_low", c.true_stats.low_fraction},
             {"false_mean", c.false_stats.mean_size}, {"false_low", c.false_stats.low_fraction}};
      if (!c.note.empty()) j["note"] = c.note;
      out += j.dump() + "\n";
    }
    emit(output_path(o.common, stem, "jsonl"), out);
  } else {
    emit(output_path(o.common, stem + "_true", "svg"),
         misinfo::io::sweep_svg(result, misinfo::ContentLabel::kTrue));
    emit(output_path(o.common, stem + "_false", "svg"),
         misinfo::io::sweep_svg(result, misinfo::ContentLabel::kFalse));
  }
  std::cout << misinfo::io::summary_csv({result});
  if (misinfo::infeasible_everywhere(result)) {
    std::cerr << "sweep is infeasible in every cell\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

// --- fit ----------------------------------------------------------------------------

struct DatasetOptions {
  std::string dataset;
  std::string partition;
  double merge_threshold = 0.01;
  double pseudo_count = 0.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "Labeled cascades, one JSON object per line")->required();
    cmd->add_option("--partition", partition, "Partition file ({\"sizes\":[...]} or {\"class_of\":[...]})")
        ->required();
    cmd->add_option("--merge-threshold", merge_threshold,
                    "Merge classes smaller than this fraction of N")->capture_default_str();
    cmd->add_option("--pseudo-count", pseudo_count, "Additive smoothing for the estimates")
        ->capture_default_str();
  }

  misinfo::Partition load_partition() const {
    return misinfo::io::partition_from_json(misinfo::io::load_document(partition));
  }
};

void check_dataset(const std::vector<misinfo::LabeledCascade>& data, const misinfo::Partition& p,
                   const std::string& origin) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i].record;
    auto bad = [&](const std::string& why) {
      throw misinfo::io::SchemaError(misinfo::detail::concat(origin, ": cascade ", i + 1, ": ", why));
    };
    for (const auto& step : r.steps)
      if (step.size() != p.num_classes()) bad("step counts do not match the partition");
    for (auto s : r.seeds)
      if (s >= p.num_nodes()) bad("seed outside the partition");
    for (const auto& t : r.transfers)
      if (t.from >= p.num_nodes() || t.to >= p.num_nodes()) bad("transfer outside the partition");
  }
}

int run_fit(const CommonOptions& common, const DatasetOptions& d) {
  require_format(common, {"csv", "jsonl"}, "fit");
  const auto partition = d.load_partition();
  const auto data = misinfo::io::read_dataset(d.dataset);
  check_dataset(data, partition, d.dataset);
  const auto merged = misinfo::merge_small_partitions(partition, d.merge_threshold);
  const auto merged_ptr = misinfo::share(merged.partition);
  std::vector<misinfo::LabeledCascade> remapped;
  for (const auto& c : data)
    remapped.push_back({misinfo::remap_classes(c.record, merged.remap, merged_ptr->num_classes()), c.label});
  const auto est = misinfo::estimate_block_matrices(remapped, merged_ptr, {d.pseudo_count});
  if (common.format == "jsonl") {
    json j = misinfo::io::fit_to_json(est, merged.partition);
    j["remap"] = merged.remap;
    emit(output_path(common, "fit", "json"), j.dump(2) + "\n");
  } else {
    std::string csv = "u,v,b_plus,b_minus,opportunities_plus,opportunities_minus\n";
    const std::size_t k = merged_ptr->num_classes();
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t v = 0; v < k; ++v)
        csv += misinfo::detail::concat(u, ',', v, ',', misinfo::io::num(est.models.g_plus.block()(u, v)), ',',
                                       misinfo::io::num(est.models.g_minus.block()(u, v)), ',',
                                       misinfo::io::num(est.plus.opportunities(u, v)), ',',
                                       misinfo::io::num(est.minus.opportunities(u, v)), '\n');
    emit(output_path(common, "fit", "csv"), csv);
  }
  std::cout << "classes after merge: " << merged_ptr->num_classes() << ", cascades: " << est.plus.cascades
            << " true / " << est.minus.cascades << " false\n";
  return kExitOk;
}

// --- control ------------------------------------------------------------------------

struct ControlOptions {
  CommonOptions common;
  SyntheticModel model;
  std::string content = "false";
  std::string solver = "lp";
  int algorithm = 2;
  std::size_t num_seeds = 10;
};

int run_control(const ControlOptions& o) {
  require_format(o.common, {"csv", "jsonl"}, "control");
  const auto models = o.model.build();
  const auto& real = models.for_label(parse_label(o.content));
  const auto cfg = control_from(o.common, o.solver);
  const std::size_t trials = o.common.trials.value_or(1);
  std::vector<misinfo::ControlledRunRecord> runs(trials);
  misinfo::parallel_for(
      trials,
      [&](std::size_t t) {
        misinfo::Rng rng(misinfo::derive_seed(o.common.seed, t));
        const auto seeds = misinfo::draw_seeds(real.num_nodes(), o.num_seeds, rng);
        runs[t] = o.algorithm == 1 ? misinfo::run_algorithm1(models, real, seeds, cfg, rng)
                                   : misinfo::run_algorithm2(models, real, seeds, cfg, rng);
      },
      o.common.threads);
  if (o.common.format == "jsonl") {
    emit(output_path(o.common, "control_runs", "jsonl"), misinfo::io::to_jsonl(runs));
  } else {
    std::string csv = "trial,r_inf,terminated_at,branches\n";
    for (std::size_t t = 0; t < trials; ++t) {
      std::string branches;
      for (auto b : runs[t].branches()) branches += (branches.empty() ? "" : ";") + std::string(to_string(b));
      csv += misinfo::detail::concat(t, ',', runs[t].cascade.r_infinity, ',', runs[t].cascade.terminated_at,
                                     ',', branches, '\n');
    }
    emit(output_path(o.common, "control_runs", "csv"), csv);
  }
  std::vector<misinfo::CascadeRecord> recs;
  for (const auto& r : runs) recs.push_back(r.cascade);
  std::cout << summary_line(o.content.c_str(), misinfo::cascade_statistics(recs, real.num_nodes())) << "\n";
  return kExitOk;
}

// --- pipeline -------------------------------------------------------------------------

struct PipelineCliOptions {
  CommonOptions common;
  DatasetOptions data;
  std::size_t samples = 500;
  std::string solver = "lp";
  std::vector<double> alphas;
  std::vector<double> lambdas;
};

int run_pipeline(const PipelineCliOptions& o) {
  require_format(o.common, {"csv", "jsonl"}, "pipeline");
  const auto partition = o.data.load_partition();
  const auto data = misinfo::io::read_dataset(o.data.dataset);
  check_dataset(data, partition, o.data.dataset);
  std::vector<double> alphas = o.alphas, lambdas = o.lambdas;
  if (o.common.alpha) alphas.insert(alphas.begin(), *o.common.alpha);
  if (o.common.lambda) lambdas.insert(lambdas.begin(), *o.common.lambda);
  if (alphas.empty()) alphas.push_back(1.5);
  if (lambdas.empty()) lambdas.push_back(1.0);
  std::vector<std::optional<misinfo::ControlConfig>> configs{std::nullopt};
  for (double a : alphas)
    for (double l : lambdas) {
      CommonOptions c = o.common;
      c.alpha = a;
      c.lambda = l;
      configs.push_back(control_from(c, o.solver));
    }
  misinfo::PipelineOptions opts;
  opts.merge_threshold = o.data.merge_threshold;
  opts.samples = o.common.trials.value_or(o.samples);
  opts.seed = o.common.seed;
  opts.estimate.pseudo_count = o.data.pseudo_count;
  opts.threads = o.common.threads;
  const auto result = misinfo::run_dataset_pipeline(partition, data, configs, opts);
  if (o.common.format == "jsonl") {
    std::string out;
    for (const auto& row : result.rows) {
      json j{{"control", row.control ? misinfo::io::to_json(*row.control) : json("control")},
             {"true_mean", row.true_stats.mean_size}, {"false_mean", row.false_stats.mean_size},
             {"true_low", row.true_stats.low_fraction}, {"false_low", row.false_stats.low_fraction},
             {"true_recorded_mean", row.true_recorded_mean},
             {"false_recorded_mean", row.false_recorded_mean}};
      out += j.dump() + "\n";
    }
    emit(output_path(o.common, "pipeline", "jsonl"), out);
  } else {
    emit(output_path(o.common, "pipeline", "csv"), misinfo::io::pipeline_csv(result));
  }
  std::cout << misinfo::io::pipeline_csv(result);
  return kExitOk;
}

// --- generate-dataset ------------------------------------------------------------------

struct GenerateOptions {
  CommonOptions common;
  SyntheticModel model{{800, 200}, 0.005, 0.0005, {}};
  std::size_t num_seeds = 10;
};

int run_generate(const GenerateOptions& o) {
  require_format(o.common, {"jsonl"}, "generate-dataset");
  misinfo::GeneratorConfig g;
  g.partition_sizes = o.model.sizes;
  g.base = misinfo::default_base_matrix(o.model.sizes.size());
  g.x = o.model.x;
  g.y = o.model.y;
  g.cascades = o.common.trials.value_or(g.cascades);
  g.seeds_per_cascade = o.num_seeds;
  g.seed = o.common.seed;
  const auto d = misinfo::generate_dataset(g);
  emit(output_path(o.common, "dataset", "jsonl"), misinfo::io::to_jsonl(d.cascades));
  emit(output_path(o.common, "partition", "json"), misinfo::io::partition_to_json(*d.partition).dump() + "\n");
  const json truth{{"partition", misinfo::io::partition_to_json(*d.partition)},
                   {"b_plus", d.truth.g_plus.block().rows()},
                   {"b_minus", d.truth.g_minus.block().rows()}};
  emit(output_path(o.common, "truth", "json"), truth.dump(2) + "\n");
  return kExitOk;
}

// --- bound-check ---------------------------------------------------------------------

struct BoundOptions {
  CommonOptions common;
  SyntheticModel model;
  std::vector<double> lambdas;
  int horizon = 5;
  std::size_t num_seeds = 1;
};

int run_bound(const BoundOptions& o) {
  require_format(o.common, {"csv", "jsonl"}, "bound-check");
  misinfo::BoundCheckConfig cfg;
  cfg.partition_sizes = o.model.sizes;
  cfg.base = misinfo::default_base_matrix(o.model.sizes.size());
  cfg.x = o.model.x;
  cfg.y = o.model.y;
  if (o.common.alpha) cfg.alpha = *o.common.alpha;
  std::vector<double> lambdas = o.lambdas;
  if (o.common.lambda) lambdas.insert(lambdas.begin(), *o.common.lambda);
  if (!lambdas.empty()) cfg.lambdas = lambdas;
  cfg.horizon = o.horizon;
  cfg.runs = o.common.trials.value_or(cfg.runs);
  cfg.seeds_per_cascade = o.num_seeds;
  cfg.seed = o.common.seed;
  const auto r = misinfo::run_bound_check(cfg);
  std::string csv = misinfo::detail::concat("# runs=", r.runs, " qualifying=", r.qualifying,
                                            " horizon=", cfg.horizon, " alpha=", misinfo::io::num(cfg.alpha),
                                            "\nlambda,bound,bound_se,extinction,extinction_se,holds\n");
  std::string jsonl;
  for (const auto& row : r.rows) {
    csv += misinfo::detail::concat(misinfo::io::num(row.lambda), ',', misinfo::io::num(row.bound.bound), ',',
                                   misinfo::io::num(row.bound.std_error), ',',
                                   misinfo::io::num(row.extinction), ',', misinfo::io::num(row.extinction_se),
                                   ',', row.holds ? 1 : 0, '\n');
    jsonl += json{{"lambda", row.lambda}, {"bound", row.bound.bound}, {"bound_se", row.bound.std_error},
                  {"extinction", row.extinction}, {"extinction_se", row.extinction_se},
                  {"holds", row.holds}, {"runs", r.runs}, {"qualifying", r.qualifying}}
                 .dump() +
             "\n";
  }
  if (o.common.format == "jsonl") emit(output_path(o.common, "bound_check", "jsonl"), jsonl);
  else emit(output_path(o.common, "bound_check", "csv"), csv);
  std::cout << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and control true/false content cascades on stochastic block models"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run uncontrolled cascades on one content network");
  add_common(sim_cmd, sim.common);
  sim.model.add(sim_cmd, true);
  sim_cmd->add_option("--content", sim.content, "Content network to run on")
      ->check(CLI::IsMember({"true", "false"}))->capture_default_str();
  sim_cmd->add_option("--num-seeds", sim.num_seeds, "Seed nodes per cascade")->capture_default_str();
  sim_cmd->add_option("--period", sim.period, "Infectious period m")->capture_default_str();
  sim_cmd->add_flag("--traced", sim.traced, "Record individual transfers");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the synthetic (x, y) grid");
  add_common(sweep_cmd, sweep.common);
  sweep_cmd->add_option("--config", sweep.config, "Sweep config (.json or .toml)");
  sweep_cmd->add_flag("--no-control", sweep.no_control, "Run without any alteration");
  sweep_cmd->add_option("--solver", sweep.solver, "Per-step solver")
      ->check(CLI::IsMember({"lp", "convex"}))->capture_default_str();
  sweep_cmd->add_option("--grid", sweep.grid, "Points per axis");
  sweep_cmd->add_option("--num-seeds", sweep.num_seeds, "Seed nodes per cascade");

  CommonOptions fit_common;
  DatasetOptions fit_data;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the true/false block matrices from a dataset");
  add_common(fit_cmd, fit_common);
  fit_data.add(fit_cmd);

  ControlOptions ctl;
  auto* ctl_cmd = app.add_subcommand("control", "Run controlled cascades");
  add_common(ctl_cmd, ctl.common);
  ctl.model.add(ctl_cmd, true);
  ctl_cmd->add_option("--content", ctl.content, "Content network used as the real network")
      ->check(CLI::IsMember({"true", "false"}))->capture_default_str();
  ctl_cmd->add_option("--solver", ctl.solver, "Per-step solver used with --algorithm 1")
      ->check(CLI::IsMember({"lp", "convex"}))->capture_default_str();
  ctl_cmd->add_option("--algorithm", ctl.algorithm, "1 = pluggable solver, 2 = LP with soft fallback")
      ->check(CLI::IsMember({1, 2}))->capture_default_str();
  ctl_cmd->add_option("--num-seeds", ctl.num_seeds, "Seed nodes per cascade")->capture_default_str();

  PipelineCliOptions pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Merge, estimate and replay a dataset under control");
  add_common(pipe_cmd, pipe.common);
  pipe.data.add(pipe_cmd);
  pipe_cmd->add_option("--samples", pipe.samples, "Cascades drawn per label (0 = all once)")
      ->capture_default_str();
  pipe_cmd->add_option("--solver", pipe.solver, "Per-step solver")
      ->check(CLI::IsMember({"lp", "convex"}))->capture_default_str();
  pipe_cmd->add_option("--alphas", pipe.alphas, "Additional alpha values")->expected(1, -1);
  pipe_cmd->add_option("--lambdas", pipe.lambdas, "Additional lambda values")->expected(1, -1);

  GenerateOptions gen;
  gen.common.format = "jsonl";
  auto* gen_cmd = app.add_subcommand("generate-dataset", "Generate a labeled cascade corpus");
  add_common(gen_cmd, gen.common);
  gen.model.add(gen_cmd, false);
  gen_cmd->add_option("--num-seeds", gen.num_seeds, "Seed nodes per cascade")->capture_default_str();

  BoundOptions bound;
  auto* bound_cmd = app.add_subcommand("bound-check", "Compare extinction frequency with its MGF bound");
  add_common(bound_cmd, bound.common);
  bound.model.add(bound_cmd, false);
  bound_cmd->add_option("--lambdas", bound.lambdas, "Lambda values (default 0.1 1 10)")->expected(1, -1);
  bound_cmd->add_option("--horizon", bound.horizon, "Horizon T")->capture_default_str();
  bound_cmd->add_option("--num-seeds", bound.num_seeds, "Seed nodes per run")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim_cmd) return run_simulate(sim);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*fit_cmd) return run_fit(fit_common, fit_data);
    if (*ctl_cmd) return run_control(ctl);
    if (*pipe_cmd) return run_pipeline(pipe);
    if (*gen_cmd) return run_generate(gen);
    if (*bound_cmd) return run_bound(bound);
  } catch (const misinfo::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const misinfo::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const misinfo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
