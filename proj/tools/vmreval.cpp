#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vmreval/axioms.hpp"
#include "vmreval/dataset.hpp"
#include "vmreval/errors.hpp"
#include "vmreval/experiments.hpp"
#include "vmreval/io.hpp"
#include "vmreval/measures.hpp"
#include "vmreval/rank_stats.hpp"
#include "vmreval/synth.hpp"
#include "vmreval/theory.hpp"

namespace {

using namespace vmreval;

// Input validation fails with 2, runtime failures with 1.
int exit_code_for(const Error& e) {
  const bool validation = dynamic_cast<const InvalidInterval*>(&e) ||
                          dynamic_cast<const InvalidParameter*>(&e) ||
                          dynamic_cast<const InvalidInput*>(&e) ||
                          dynamic_cast<const DuplicateKey*>(&e) ||
                          dynamic_cast<const MissingAnnotation*>(&e) ||
                          dynamic_cast<const MissingPrediction*>(&e) ||
                          dynamic_cast<const EmptyQuerySet*>(&e) ||
                          dynamic_cast<const ParseError*>(&e) ||
                          dynamic_cast<const InsufficientQueries*>(&e) ||
                          dynamic_cast<const DegenerateAnnotation*>(&e);
  return validation ? 2 : 1;
}

// The default measure grid: R@K at three thresholds and AxIoU@K for
// K in {1,5,10}, plus AP and DCG at the two deeper cutoffs.
std::vector<MeasureSpec> default_grid() {
  std::vector<MeasureSpec> specs;
  for (int k : {1, 5, 10}) {
    for (double theta : {0.3, 0.5, 0.7}) {
      specs.push_back(MeasureSpec::recall(k, theta));
    }
    specs.push_back(MeasureSpec::axiou(k));
  }
  for (int k : {5, 10}) {
    specs.push_back(MeasureSpec::ap(k, 0.5));
    specs.push_back(MeasureSpec::dcg(k));
  }
  return specs;
}

// Selection mirrors the twelve-measure grid rankings are reported on.
std::vector<MeasureSpec> selection_grid() {
  std::vector<MeasureSpec> specs;
  for (int k : {1, 5, 10}) {
    for (double theta : {0.3, 0.5, 0.7}) {
      specs.push_back(MeasureSpec::recall(k, theta));
    }
  }
  for (int k : {1, 5, 10}) {
    specs.push_back(MeasureSpec::axiou(k));
  }
  return specs;
}

std::vector<MeasureSpec> parse_specs(const std::vector<std::string>& tokens,
                                     std::vector<MeasureSpec> fallback) {
  if (tokens.empty()) {
    return fallback;
  }
  std::vector<MeasureSpec> specs;
  specs.reserve(tokens.size());
  for (const std::string& token : tokens) {
    specs.push_back(MeasureSpec::parse(token));
  }
  return specs;
}

std::vector<MeasureSpec> parse_specs(const std::vector<std::string>& tokens) {
  return parse_specs(tokens, default_grid());
}

DatasetBundle load_bundle(bool bundled, const std::string& gt_path,
                          const std::vector<std::string>& run_paths) {
  if (bundled) {
    return bundled_scenario();
  }
  if (gt_path.empty() || run_paths.empty()) {
    throw InvalidParameter("provide --bundled or both --gt and --run");
  }
  DatasetBundle bundle;
  bundle.gt = load_ground_truth(gt_path);
  bundle.runs.reserve(run_paths.size());
  for (const std::string& path : run_paths) {
    bundle.runs.push_back(load_run(path));
  }
  return bundle;
}

struct CommonInputs {
  bool bundled = false;
  std::string gt_path;
  std::vector<std::string> run_paths;
  std::vector<std::string> measure_tokens;
  std::string output;
  ReportFormat format = ReportFormat::kJson;
};

void add_common_options(CLI::App* cmd, CommonInputs& in) {
  auto* bundled = cmd->add_flag("--bundled", in.bundled,
                                "Use the bundled six-system scenario");
  auto* gt = cmd->add_option("--gt", in.gt_path, "Ground-truth JSONL file");
  auto* run = cmd->add_option("--run", in.run_paths,
                              "Run JSONL file; repeat per system");
  bundled->excludes(gt);
  bundled->excludes(run);
  cmd->add_option("-m,--measure", in.measure_tokens,
                  "Measure spec family@K[:theta], e.g. axiou@10 or "
                  "recall@5:0.5; default covers K in {1,5,10}");
  cmd->add_option("-o,--output", in.output, "Report file to write")
      ->required();
  cmd->add_option("--format", in.format, "Report format (default json)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ReportFormat>{{"json", ReportFormat::kJson},
                                              {"csv", ReportFormat::kCsv}},
          CLI::ignore_case));
}

CLI::Option* add_seed_option(CLI::App* cmd, std::uint64_t& seed) {
  return cmd->add_option("--seed", seed, "Random seed (default 0)")
      ->envname("VMREVAL_SEED");
}

void run_eval(const CommonInputs& in, bool per_query, bool lenient) {
  if (per_query && in.format != ReportFormat::kJson) {
    throw InvalidParameter("--per-query requires --format json");
  }
  const DatasetBundle bundle =
      load_bundle(in.bundled, in.gt_path, in.run_paths);
  const std::vector<MeasureSpec> specs = parse_specs(in.measure_tokens);
  const std::vector<RunCoverage> coverage = validate_bundle(bundle, !lenient);

  EvalTable table;
  table.specs = specs;
  if (lenient) {
    table.coverage = coverage;
  }
  for (const Run& run : bundle.runs) {
    const GroundTruth* scope = &bundle.gt;
    GroundTruth covered;
    if (lenient && run.lists.size() != bundle.gt.size()) {
      for (const auto& [query_id, list] : run.lists) {
        (void)list;
        const Annotation& a = bundle.gt.at(query_id);
        covered.add(query_id, a.segment, a.duration);
      }
      scope = &covered;
    }
    table.systems.push_back(run.system_id);
    std::vector<double> row;
    std::vector<std::vector<std::pair<std::string, double>>> scores;
    row.reserve(specs.size());
    for (const MeasureSpec& spec : specs) {
      RunEvaluation ev = mean_measure(run, *scope, spec);
      row.push_back(ev.mean);
      if (per_query) {
        scores.push_back(std::move(ev.per_query));
      }
    }
    table.means.push_back(std::move(row));
    if (per_query) {
      table.per_query.push_back(std::move(scores));
    }
  }
  write_report(table, in.output, in.format);
}

int run_axioms(int k, double theta, int trials, std::uint64_t seed,
               const std::string& output, ReportFormat format) {
  const std::vector<AxiomVerdict> verdicts =
      satisfaction_matrix(k, theta, trials, seed);
  write_report(verdicts, output, format);
  int status = 0;
  for (const AxiomVerdict& verdict : verdicts) {
    if (axiom_expected_satisfied(verdict.spec.family(), verdict.axiom) &&
        !verdict.satisfied()) {
      std::cerr << "unexpected violation: " << verdict.spec.name() << " under "
                << axiom_name(verdict.axiom) << " (" << verdict.violations
                << " of " << verdict.trials << " trials)\n";
      status = 1;
    }
  }
  return status;
}

void run_agreement(const CommonInputs& in) {
  const DatasetBundle bundle =
      load_bundle(in.bundled, in.gt_path, in.run_paths);
  const std::vector<MeasureSpec> specs = parse_specs(in.measure_tokens);
  const AgreementMatrix matrix = agreement_matrix(bundle.runs, bundle.gt, specs);
  write_report(matrix, in.output, in.format);
}

void run_stability(const CommonInputs& in, const std::vector<int>& sizes,
                   int trials, std::uint64_t seed) {
  const DatasetBundle bundle =
      load_bundle(in.bundled, in.gt_path, in.run_paths);
  const std::vector<MeasureSpec> specs = parse_specs(in.measure_tokens);
  const std::vector<StabilityReport> reports = stability_experiment(
      bundle.runs, bundle.gt, specs, sizes, trials, seed);
  write_report(reports, in.output, in.format);
}

void run_noise(const CommonInputs& in, const std::vector<double>& beta2,
               int replicas, int raters, std::uint64_t seed) {
  const DatasetBundle bundle =
      load_bundle(in.bundled, in.gt_path, in.run_paths);
  const std::vector<MeasureSpec> specs = parse_specs(in.measure_tokens);
  std::vector<NoiseConfig> series;
  series.reserve(beta2.size());
  for (double b : beta2) {
    NoiseConfig cfg;
    cfg.beta2 = b;
    cfg.raters = raters;
    cfg.replicas = replicas;
    cfg.seed = seed;
    series.push_back(cfg);
  }
  const std::vector<NoiseReport> reports =
      noise_experiment(bundle.runs, bundle.gt, specs, series);
  write_report(reports, in.output, in.format);
}

struct SelectInputs {
  bool bundled_sweep = false;
  std::string val_gt;
  std::string test_gt;
  std::vector<std::string> val_runs;
  std::vector<std::string> test_runs;
  std::vector<std::string> val_tokens;
  std::vector<std::string> test_tokens;
  std::string output;
  ReportFormat format = ReportFormat::kJson;
};

void run_select(const SelectInputs& in) {
  SelectionSweep sweep;
  if (in.bundled_sweep) {
    sweep = bundled_selection_sweep();
  } else {
    if (in.val_gt.empty() || in.test_gt.empty() || in.val_runs.empty() ||
        in.test_runs.empty()) {
      throw InvalidParameter(
          "provide --bundled-sweep or all of --val-gt, --val-run, --test-gt, "
          "--test-run");
    }
    sweep.validation_gt = load_ground_truth(in.val_gt);
    sweep.test_gt = load_ground_truth(in.test_gt);
    for (const std::string& path : in.val_runs) {
      sweep.validation_runs.push_back(load_run(path));
    }
    for (const std::string& path : in.test_runs) {
      sweep.test_runs.push_back(load_run(path));
    }
  }
  const SelectionReport report = model_selection(
      sweep.validation_runs, sweep.test_runs, sweep.validation_gt,
      sweep.test_gt, parse_specs(in.val_tokens, selection_grid()),
      parse_specs(in.test_tokens, selection_grid()));
  write_report(report, in.output, in.format);
}

void run_theory(double r, const std::vector<double>& thetas,
                const std::vector<double>& gammas, const std::string& output,
                ReportFormat format) {
  const std::vector<TheoryRow> rows = theory_sweep(r, thetas, gammas);
  write_report(rows, output, format);
}

void run_synth(const std::string& out_dir, int queries, std::uint64_t seed,
               bool queries_set, bool seed_set) {
  DatasetBundle bundle;
  if (queries_set || seed_set) {
    ScenarioConfig cfg = bundled_scenario_config();
    if (queries_set) {
      cfg.num_queries = queries;
    }
    if (seed_set) {
      cfg.seed = seed;
    }
    bundle = generate_scenario(cfg);
    bundle.metadata["scenario"] = "custom";
    bundle.metadata["seed"] = std::to_string(cfg.seed);
    bundle.metadata["queries"] = std::to_string(cfg.num_queries);
  } else {
    bundle = bundled_scenario();
  }

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  save_ground_truth(bundle.gt, dir / "gt.jsonl");
  for (const Run& run : bundle.runs) {
    save_run(run, dir / (run.system_id + ".jsonl"));
  }
  nlohmann::ordered_json meta;
  for (const auto& [key, value] : bundle.metadata) {
    meta[key] = value;
  }
  std::ofstream out(dir / "metadata.json", std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + (dir / "metadata.json").string() +
                  "' for writing");
  }
  out << meta.dump(2) << '\n';
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + (dir / "metadata.json").string() + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Evaluation toolkit for video moment retrieval: ranking measures, "
      "axiom audits, and measurement experiments on synthetic scenarios"};
  app.require_subcommand(1);

  int exit_status = 0;

  CommonInputs eval_in;
  bool eval_per_query = false;
  bool eval_lenient = false;
  auto* eval_cmd =
      app.add_subcommand("eval", "Mean measures per system over a query set");
  add_common_options(eval_cmd, eval_in);
  eval_cmd->add_flag("--per-query", eval_per_query,
                     "Include per-query scores (json only)");
  eval_cmd->add_flag("--lenient", eval_lenient,
                     "Allow runs that skip annotated queries; means cover the "
                     "predicted subset");
  eval_cmd->callback(
      [&] { run_eval(eval_in, eval_per_query, eval_lenient); });

  int ax_k = 5;
  double ax_theta = 0.5;
  int ax_trials = 2000;
  std::uint64_t ax_seed = 0;
  std::string ax_output;
  ReportFormat ax_format = ReportFormat::kJson;
  auto* ax_cmd = app.add_subcommand(
      "axioms", "Randomised audit of the two ranking axioms per measure");
  ax_cmd->add_option("--k", ax_k, "Cutoff K (default 5)");
  ax_cmd->add_option("--theta", ax_theta, "Recall/AP threshold (default 0.5)");
  ax_cmd->add_option("--trials", ax_trials, "Trials per cell (default 2000)");
  add_seed_option(ax_cmd, ax_seed);
  ax_cmd->add_option("-o,--output", ax_output, "Report file to write")
      ->required();
  ax_cmd->add_option("--format", ax_format, "Report format (default json)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ReportFormat>{{"json", ReportFormat::kJson},
                                              {"csv", ReportFormat::kCsv}},
          CLI::ignore_case));
  ax_cmd->callback([&] {
    exit_status =
        run_axioms(ax_k, ax_theta, ax_trials, ax_seed, ax_output, ax_format);
  });

  CommonInputs agree_in;
  auto* agree_cmd = app.add_subcommand(
      "agreement", "Kendall tau-b between the system rankings of measures");
  add_common_options(agree_cmd, agree_in);
  agree_cmd->callback([&] { run_agreement(agree_in); });

  CommonInputs stab_in;
  std::vector<int> stab_sizes;
  int stab_trials = 5000;
  std::uint64_t stab_seed = 0;
  auto* stab_cmd = app.add_subcommand(
      "stability", "Ranking stability under disjoint query subsampling");
  add_common_options(stab_cmd, stab_in);
  stab_cmd->add_option("--sizes", stab_sizes,
                       "Subset sizes (default 25 50 100 200)");
  stab_cmd->add_option("--trials", stab_trials,
                       "Subsampling trials (default 5000)");
  add_seed_option(stab_cmd, stab_seed);
  stab_cmd->callback([&] {
    run_stability(stab_in,
                  stab_sizes.empty() ? std::vector<int>{25, 50, 100, 200}
                                     : stab_sizes,
                  stab_trials, stab_seed);
  });

  CommonInputs noise_in;
  std::vector<double> noise_beta2;
  int noise_replicas = 100;
  int noise_raters = 5;
  std::uint64_t noise_seed = 0;
  auto* noise_cmd = app.add_subcommand(
      "noise", "Measure sensitivity to simulated annotation noise");
  add_common_options(noise_cmd, noise_in);
  noise_cmd->add_option("--beta2", noise_beta2,
                        "Start-noise variances (default 1 2 3 4)");
  noise_cmd->add_option("--replicas", noise_replicas,
                        "Noisy ground truths per variance (default 100)");
  noise_cmd->add_option("--raters", noise_raters,
                        "Raters per replica, odd (default 5)");
  add_seed_option(noise_cmd, noise_seed);
  noise_cmd->callback([&] {
    run_noise(noise_in,
              noise_beta2.empty() ? std::vector<double>{1.0, 2.0, 3.0, 4.0}
                                  : noise_beta2,
              noise_replicas, noise_raters, noise_seed);
  });

  SelectInputs sel_in;
  auto* sel_cmd = app.add_subcommand(
      "select", "Pick models on a validation split, compare on test");
  auto* sweep_flag = sel_cmd->add_flag("--bundled-sweep", sel_in.bundled_sweep,
                                       "Use the bundled 640-model sweep");
  auto* vg = sel_cmd->add_option("--val-gt", sel_in.val_gt,
                                 "Validation ground-truth JSONL");
  auto* vr = sel_cmd->add_option("--val-run", sel_in.val_runs,
                                 "Validation run JSONL; repeat per model");
  auto* tg =
      sel_cmd->add_option("--test-gt", sel_in.test_gt, "Test ground-truth JSONL");
  auto* tr = sel_cmd->add_option("--test-run", sel_in.test_runs,
                                 "Test run JSONL; repeat per model");
  sweep_flag->excludes(vg);
  sweep_flag->excludes(vr);
  sweep_flag->excludes(tg);
  sweep_flag->excludes(tr);
  sel_cmd->add_option("--val-measure", sel_in.val_tokens,
                      "Validation measure specs (default grid)");
  sel_cmd->add_option("--test-measure", sel_in.test_tokens,
                      "Test measure specs (default grid)");
  sel_cmd->add_option("-o,--output", sel_in.output, "Report file to write")
      ->required();
  sel_cmd->add_option("--format", sel_in.format, "Report format (default json)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ReportFormat>{{"json", ReportFormat::kJson},
                                              {"csv", ReportFormat::kCsv}},
          CLI::ignore_case));
  sel_cmd->callback([&] { run_select(sel_in); });

  double th_r = 0.5;
  std::vector<double> th_thetas;
  std::vector<double> th_gammas;
  std::string th_output;
  ReportFormat th_format = ReportFormat::kJson;
  auto* th_cmd = app.add_subcommand(
      "theory", "Closed-form bias/variance of top-1 measures under IoU noise");
  th_cmd->add_option("--r", th_r, "True top-1 IoU (default 0.5)");
  th_cmd->add_option("--theta", th_thetas,
                     "Thresholds (default 0.3 0.5 0.7)");
  th_cmd->add_option("--gamma", th_gammas,
                     "IoU noise std devs (default 0.05 0.1 0.2)");
  th_cmd->add_option("-o,--output", th_output, "Report file to write")
      ->required();
  th_cmd->add_option("--format", th_format, "Report format (default json)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ReportFormat>{{"json", ReportFormat::kJson},
                                              {"csv", ReportFormat::kCsv}},
          CLI::ignore_case));
  th_cmd->callback([&] {
    run_theory(th_r,
               th_thetas.empty() ? std::vector<double>{0.3, 0.5, 0.7}
                                 : th_thetas,
               th_gammas.empty() ? std::vector<double>{0.05, 0.1, 0.2}
                                 : th_gammas,
               th_output, th_format);
  });

  std::string synth_dir;
  int synth_queries = 0;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Write the bundled synthetic scenario as JSONL files");
  synth_cmd->add_option("--out-dir", synth_dir, "Directory to write into")
      ->required();
  auto* sq = synth_cmd->add_option("--queries", synth_queries,
                                   "Override query count (default 500)");
  auto* ss = add_seed_option(synth_cmd, synth_seed);
  synth_cmd->callback([&] {
    run_synth(synth_dir, synth_queries, synth_seed, sq->count() > 0,
              ss->count() > 0);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_status;
}
