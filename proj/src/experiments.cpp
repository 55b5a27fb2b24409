#include "vmreval/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vmreval/errors.hpp"
#include "vmreval/rank_stats.hpp"

namespace vmreval {

namespace {

// Stream tags keep unrelated experiments off each other's random sequences.
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;      // "nois"
constexpr std::uint64_t kStabilityStream = 0x73746162;  // "stab"

double median_inplace(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    return values[n / 2];
  }
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void validate_noise_config(const NoiseConfig& cfg) {
  if (cfg.raters < 1 || cfg.raters % 2 == 0) {
    throw InvalidParameter("raters must be odd and >= 1, got " +
                           std::to_string(cfg.raters));
  }
  if (!cfg.deterministic_limit && !(cfg.beta2 > 0.0)) {
    throw InvalidParameter("beta2 must be positive");
  }
  if (cfg.replicas < 1) {
    throw InvalidParameter("replicas must be >= 1");
  }
}

// Per-query scores for every (spec, run), aligned with the sorted query ids.
std::vector<std::vector<std::vector<double>>> score_matrix(
    const std::vector<Run>& runs, const GroundTruth& gt,
    const std::vector<MeasureSpec>& specs) {
  std::vector<std::vector<std::vector<double>>> scores(
      specs.size(), std::vector<std::vector<double>>(runs.size()));
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const RelevanceTable table = build_relevance_table(runs[r], gt);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const RunEvaluation eval = mean_measure(table, specs[s]);
      std::vector<double>& column = scores[s][r];
      column.reserve(eval.per_query.size());
      for (const auto& [query_id, value] : eval.per_query) {
        (void)query_id;
        column.push_back(value);
      }
    }
  }
  return scores;
}

}  // namespace

Interval noisy_annotation(const Interval& gt, std::optional<double> duration,
                          const NoiseConfig& cfg, Rng& rng) {
  validate_noise_config(cfg);
  if (!(gt.length() > 0.0)) {
    throw DegenerateAnnotation("cannot re-annotate a zero-length segment");
  }
  const double beta = std::sqrt(cfg.beta2);
  const double mean_length = gt.length();

  std::vector<double> starts(static_cast<std::size_t>(cfg.raters));
  std::vector<double> ends(static_cast<std::size_t>(cfg.raters));
  for (int i = 0; i < cfg.raters; ++i) {
    double s = gt.start();
    double l = mean_length;
    if (!cfg.deterministic_limit) {
      s = rng.normal(gt.start(), beta);
      l = rng.exponential(mean_length);
    }
    starts[static_cast<std::size_t>(i)] = s;
    ends[static_cast<std::size_t>(i)] = s + l;
  }

  double start = median_inplace(starts);
  double end = median_inplace(ends);
  start = std::max(start, 0.0);
  if (duration) {
    start = std::min(start, *duration);
    end = std::min(end, *duration);
  }
  end = std::max(end, start);
  return Interval(start, end);
}

std::vector<NoiseReport> noise_experiment(
    const std::vector<Run>& runs, const GroundTruth& gt,
    const std::vector<MeasureSpec>& specs,
    const std::vector<NoiseConfig>& series) {
  if (runs.empty()) {
    throw InvalidInput("noise experiment needs at least one run");
  }
  if (specs.empty()) {
    throw InvalidParameter("noise experiment needs at least one measure");
  }
  if (series.empty()) {
    throw InvalidParameter("noise experiment needs at least one config");
  }
  for (const NoiseConfig& cfg : series) {
    validate_noise_config(cfg);
  }

  // Means under the original annotations, reused by every config.
  std::vector<std::vector<double>> original(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const RelevanceTable table = build_relevance_table(runs[r], gt);
    for (const MeasureSpec& spec : specs) {
      original[r].push_back(mean_measure(table, spec).mean);
    }
  }

  std::vector<NoiseReport> reports;
  reports.reserve(series.size() * specs.size());
  for (std::size_t c = 0; c < series.size(); ++c) {
    const NoiseConfig& cfg = series[c];
    std::vector<std::vector<double>> sq_err(
        runs.size(), std::vector<double>(specs.size(), 0.0));
    double median_iou_acc = 0.0;

    for (int rep = 0; rep < cfg.replicas; ++rep) {
      GroundTruth noisy;
      std::vector<double> ious;
      ious.reserve(gt.size());
      std::uint64_t q = 0;
      for (const auto& [query_id, annotation] : gt.entries()) {
        Rng rng(derive_seed(cfg.seed, {kNoiseStream, c,
                                       static_cast<std::uint64_t>(rep), q}));
        const Interval drawn =
            noisy_annotation(annotation.segment, annotation.duration, cfg, rng);
        noisy.add(query_id, drawn, annotation.duration);
        ious.push_back(temporal_iou(annotation.segment, drawn));
        ++q;
      }
      median_iou_acc += median_inplace(ious);

      for (std::size_t r = 0; r < runs.size(); ++r) {
        const RelevanceTable table = build_relevance_table(runs[r], noisy);
        for (std::size_t s = 0; s < specs.size(); ++s) {
          const double diff =
              original[r][s] - mean_measure(table, specs[s]).mean;
          sq_err[r][s] += diff * diff;
        }
      }
    }

    for (std::size_t s = 0; s < specs.size(); ++s) {
      NoiseReport report{specs[s], cfg.beta2, {}, 0.0, 0.0};
      report.mean_median_iou = median_iou_acc / cfg.replicas;
      double rmse_acc = 0.0;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const double rmse = std::sqrt(sq_err[r][s] / cfg.replicas);
        report.rmse_per_system.emplace(runs[r].system_id, rmse);
        rmse_acc += rmse;
      }
      report.mean_rmse = rmse_acc / static_cast<double>(runs.size());
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

std::vector<StabilityReport> stability_experiment(
    const std::vector<Run>& runs, const GroundTruth& gt,
    const std::vector<MeasureSpec>& specs, const std::vector<int>& subset_sizes,
    int trials, std::uint64_t seed) {
  if (runs.size() < 2) {
    throw InvalidInput("stability needs at least two runs");
  }
  if (specs.empty() || subset_sizes.empty()) {
    throw InvalidParameter("stability needs measures and subset sizes");
  }
  if (trials < 1) {
    throw InvalidParameter("stability needs at least one trial");
  }
  const std::size_t num_queries = gt.size();
  for (int size : subset_sizes) {
    if (size < 1) {
      throw InvalidParameter("subset sizes must be >= 1");
    }
    if (2 * static_cast<std::size_t>(size) > num_queries) {
      throw InsufficientQueries(
          "two disjoint subsets of size " + std::to_string(size) +
          " need " + std::to_string(2 * size) + " queries, have " +
          std::to_string(num_queries));
    }
  }

  const auto scores = score_matrix(runs, gt, specs);

  std::vector<StabilityReport> reports;
  reports.reserve(specs.size() * subset_sizes.size());
  std::vector<std::size_t> perm(num_queries);
  std::vector<double> x(runs.size());
  std::vector<double> y(runs.size());

  for (std::size_t z = 0; z < subset_sizes.size(); ++z) {
    const int size = subset_sizes[z];
    std::vector<double> sum(specs.size(), 0.0);
    std::vector<double> sum_sq(specs.size(), 0.0);
    std::vector<int> kept(specs.size(), 0);
    std::vector<int> dropped(specs.size(), 0);

    for (int trial = 0; trial < trials; ++trial) {
      Rng rng(derive_seed(seed, {kStabilityStream, z,
                                 static_cast<std::uint64_t>(trial)}));
      for (std::size_t i = 0; i < num_queries; ++i) {
        perm[i] = i;
      }
      // Partial Fisher-Yates: only the first 2 * size slots are needed.
      const std::size_t wanted = 2 * static_cast<std::size_t>(size);
      for (std::size_t i = 0; i < wanted; ++i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(
            static_cast<std::int64_t>(i),
            static_cast<std::int64_t>(num_queries) - 1));
        std::swap(perm[i], perm[j]);
      }

      for (std::size_t s = 0; s < specs.size(); ++s) {
        for (std::size_t r = 0; r < runs.size(); ++r) {
          double acc_a = 0.0;
          double acc_b = 0.0;
          for (int i = 0; i < size; ++i) {
            acc_a += scores[s][r][perm[static_cast<std::size_t>(i)]];
            acc_b += scores[s][r][perm[static_cast<std::size_t>(size + i)]];
          }
          x[r] = acc_a / size;
          y[r] = acc_b / size;
        }
        try {
          const double tau = kendall_tau_b(x, y);
          sum[s] += tau;
          sum_sq[s] += tau * tau;
          ++kept[s];
        } catch (const UndefinedCorrelation&) {
          ++dropped[s];
        }
      }
    }

    for (std::size_t s = 0; s < specs.size(); ++s) {
      StabilityReport report{specs[s]};
      report.subset_size = size;
      report.trials = kept[s];
      report.dropped = dropped[s];
      if (kept[s] > 0) {
        report.tau_mean = sum[s] / kept[s];
        report.tau_variance =
            std::max(0.0, sum_sq[s] / kept[s] - report.tau_mean * report.tau_mean);
      } else {
        report.tau_mean = std::numeric_limits<double>::quiet_NaN();
        report.tau_variance = std::numeric_limits<double>::quiet_NaN();
      }
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

SelectionReport model_selection(const std::vector<Run>& validation_runs,
                                const std::vector<Run>& test_runs,
                                const GroundTruth& validation_gt,
                                const GroundTruth& test_gt,
                                const std::vector<MeasureSpec>& validation_specs,
                                const std::vector<MeasureSpec>& test_specs) {
  if (validation_runs.empty() || test_runs.empty()) {
    throw InvalidInput("model selection needs runs on both splits");
  }
  if (validation_specs.empty() || test_specs.empty()) {
    throw InvalidParameter("model selection needs measures on both splits");
  }

  std::map<std::string, const Run*> val_by_id;
  for (const Run& run : validation_runs) {
    if (!val_by_id.emplace(run.system_id, &run).second) {
      throw DuplicateKey("validation run '" + run.system_id + "' repeated");
    }
  }
  std::map<std::string, const Run*> test_by_id;
  for (const Run& run : test_runs) {
    if (!test_by_id.emplace(run.system_id, &run).second) {
      throw DuplicateKey("test run '" + run.system_id + "' repeated");
    }
  }
  if (val_by_id.size() != test_by_id.size() ||
      !std::equal(val_by_id.begin(), val_by_id.end(), test_by_id.begin(),
                  [](const auto& a, const auto& b) {
                    return a.first == b.first;
                  })) {
    throw InvalidInput("validation and test runs must cover the same models");
  }

  // Validation means per model, in sorted-id order so exact argmax ties pick
  // the lexicographically smallest id.
  std::vector<std::string> ids;
  ids.reserve(val_by_id.size());
  std::vector<std::vector<double>> val_means;  // [model][validation spec]
  for (const auto& [id, run] : val_by_id) {
    ids.push_back(id);
    const RelevanceTable table = build_relevance_table(*run, validation_gt);
    std::vector<double> means;
    means.reserve(validation_specs.size());
    for (const MeasureSpec& spec : validation_specs) {
      means.push_back(mean_measure(table, spec).mean);
    }
    val_means.push_back(std::move(means));
  }

  SelectionReport report;
  report.validation_specs = validation_specs;
  report.test_specs = test_specs;
  report.chosen_models.reserve(validation_specs.size());
  for (std::size_t v = 0; v < validation_specs.size(); ++v) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < ids.size(); ++m) {
      if (val_means[m][v] > val_means[best][v]) {
        best = m;
      }
    }
    report.chosen_models.push_back(ids[best]);
  }

  // Test means for the chosen models only.
  std::map<std::string, std::vector<double>> test_means;
  for (const std::string& id : report.chosen_models) {
    if (test_means.count(id)) {
      continue;
    }
    const RelevanceTable table =
        build_relevance_table(*test_by_id.at(id), test_gt);
    std::vector<double> means;
    means.reserve(test_specs.size());
    for (const MeasureSpec& spec : test_specs) {
      means.push_back(mean_measure(table, spec).mean);
    }
    test_means.emplace(id, std::move(means));
  }

  const std::size_t chosen_count = report.chosen_models.size();
  report.z_scores.assign(chosen_count,
                         std::vector<double>(test_specs.size(), 0.0));
  report.degenerate.assign(test_specs.size(), false);
  for (std::size_t t = 0; t < test_specs.size(); ++t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double mean = 0.0;
    for (const std::string& id : report.chosen_models) {
      const double v = test_means.at(id)[t];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    mean /= static_cast<double>(chosen_count);
    if (hi == lo) {
      report.degenerate[t] = true;
      continue;  // the z column stays all zeros
    }
    double var = 0.0;
    for (const std::string& id : report.chosen_models) {
      const double d = test_means.at(id)[t] - mean;
      var += d * d;
    }
    var /= static_cast<double>(chosen_count);
    const double std_dev = std::sqrt(var);
    for (std::size_t v = 0; v < chosen_count; ++v) {
      report.z_scores[v][t] =
          (test_means.at(report.chosen_models[v])[t] - mean) / std_dev;
    }
  }
  return report;
}

}  // namespace vmreval
