#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmreval/dataset.hpp"
#include "vmreval/measures.hpp"
#include "vmreval/rng.hpp"

namespace vmreval {

// Annotation-noise model: each of `raters` raters reports a start drawn from
// Normal(start, beta2) and an end start_i + Exponential(mean = length); the
// synthetic annotation takes the per-coordinate medians.
struct NoiseConfig {
  double beta2 = 1.0;  // variance of the start-point noise, seconds squared
  int raters = 5;      // odd, >= 1
  int replicas = 100;
  std::uint64_t seed = 0;
  // Test hook: no start noise and the exponential replaced by its mean, which
  // reproduces the original annotation exactly.
  bool deterministic_limit = false;
};

// One noisy re-annotation of a single segment. The result is clamped into
// [0, duration] when the duration is known, start is clamped to >= 0, and the
// end never falls below the (clamped) start. Throws DegenerateAnnotation for
// zero-length segments and InvalidParameter for bad rater/beta settings.
Interval noisy_annotation(const Interval& gt, std::optional<double> duration,
                          const NoiseConfig& cfg, Rng& rng);

struct NoiseReport {
  MeasureSpec spec;
  double beta2 = 0.0;
  std::map<std::string, double> rmse_per_system;
  double mean_rmse = 0.0;        // across systems
  double mean_median_iou = 0.0;  // across replicas, of the per-replica median
                                 // IoU between original and noisy annotations
};

// For every config in the series: draw `replicas` noisy ground truths, score
// every run under every spec on each of them, and report the per-system RMSE
// between original-annotation and noisy-annotation means. One replica's noisy
// ground truth is shared by all runs and specs. Deterministic in the seeds;
// the replica / query position fixes each draw.
std::vector<NoiseReport> noise_experiment(const std::vector<Run>& runs,
                                          const GroundTruth& gt,
                                          const std::vector<MeasureSpec>& specs,
                                          const std::vector<NoiseConfig>& series);

struct StabilityReport {
  MeasureSpec spec;
  int subset_size = 0;
  int trials = 0;   // trials with a defined tau
  int dropped = 0;  // trials where tau-b was undefined
  double tau_mean = 0.0;
  double tau_variance = 0.0;  // population variance over kept trials
};

// How stable is the system ranking each measure induces when the query set is
// subsampled? Each trial draws two disjoint subsets of the given size, ranks
// all runs on both by their mean, and records Kendall's tau-b between the two
// rankings. Requires 2 * max(subset_sizes) <= number of queries.
std::vector<StabilityReport> stability_experiment(
    const std::vector<Run>& runs, const GroundTruth& gt,
    const std::vector<MeasureSpec>& specs, const std::vector<int>& subset_sizes,
    int trials, std::uint64_t seed);

struct SelectionReport {
  std::vector<MeasureSpec> validation_specs;
  std::vector<MeasureSpec> test_specs;
  // chosen_models[v] maximises validation_specs[v] on the validation split;
  // exact ties go to the lexicographically smallest model id.
  std::vector<std::string> chosen_models;
  // z_scores[v][t]: test_specs[t] score of chosen_models[v] on the test
  // split, standardised across the chosen-model set (population std).
  std::vector<std::vector<double>> z_scores;
  // Per test spec: true when every chosen model scored identically, in which
  // case the z column is all zeros.
  std::vector<bool> degenerate;
};

// Pick one model per validation measure, then compare the picks on the test
// split. Validation and test runs are matched by system id and must cover the
// same model set.
SelectionReport model_selection(const std::vector<Run>& validation_runs,
                                const std::vector<Run>& test_runs,
                                const GroundTruth& validation_gt,
                                const GroundTruth& test_gt,
                                const std::vector<MeasureSpec>& validation_specs,
                                const std::vector<MeasureSpec>& test_specs);

}  // namespace vmreval
