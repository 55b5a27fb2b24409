#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vmreval/dataset.hpp"

namespace vmreval {

enum class Family { kRecall, kAxiou, kNcxiou, kAp, kDcg };

std::string family_name(Family family);

// A named, parameterised measure. Every experiment takes these, so one run of
// an experiment can mix cutoff/threshold settings freely.
class MeasureSpec {
 public:
  static MeasureSpec recall(int k, double theta);
  static MeasureSpec axiou(int k);
  static MeasureSpec ap(int k, double theta);
  static MeasureSpec dcg(int k);
  // abandonment[k-1] is the probability the user stops at rank k; entries must
  // be nonnegative and sum to 1 within 1e-12. K is the vector length.
  static MeasureSpec ncxiou(std::vector<double> abandonment);
  static MeasureSpec ncxiou_uniform(int k);

  // Parses tokens of the form "family@K[:theta]": "axiou@10", "recall@5:0.5",
  // "ap@5:0.5", "dcg@10", "ncxiou@10" (uniform abandonment). Throws
  // InvalidParameter naming the offending token.
  static MeasureSpec parse(const std::string& token);

  Family family() const { return family_; }
  int k() const { return k_; }
  double theta() const { return theta_; }  // meaningful for recall / ap only
  std::span<const double> abandonment() const { return abandonment_; }

  // Display name used in reports: "R@5,0.5", "AxIoU@10", "AP@5,0.5", "DCG@10",
  // "NCxIoU@10".
  std::string name() const;

  bool operator==(const MeasureSpec&) const = default;

 private:
  MeasureSpec(Family family, int k, double theta,
              std::vector<double> abandonment)
      : family_(family),
        k_(k),
        theta_(theta),
        abandonment_(std::move(abandonment)) {}

  Family family_;
  int k_;
  double theta_;
  std::vector<double> abandonment_;
};

// All per-query measures below take per-rank relevance scores in [0, 1],
// rank 1 first. Lists may be shorter than the cutoff (missing ranks carry no
// relevance) or empty (every measure scores 0).

// 1 if any of the first k scores strictly exceeds theta, else 0.
double recall_at(std::span<const double> scores, int k, double theta);

// Mean over the first k ranks of the running maximum of the scores; the
// running maximum stays constant past the end of a short list.
double axiou_at(std::span<const double> scores, int k);

// Expected running-maximum relevance at abandonment time. With uniform
// abandonment weights 1/K this reproduces axiou_at exactly.
double ncxiou(std::span<const double> scores,
              std::span<const double> abandonment);

// Mean over the first k ranks of precision at that rank, where a rank counts
// as a hit when its score strictly exceeds theta.
double ap_at(std::span<const double> scores, int k, double theta);

// Discounted cumulative gain with identity gain and log2(rank + 1) discount.
double dcg_at(std::span<const double> scores, int k);

// dcg_at with custom gain/discount; gain must be nonnegative and strictly
// increasing, discount positive and strictly increasing in the rank.
double dcg_at(std::span<const double> scores, int k,
              const std::function<double(double)>& gain,
              const std::function<double(int)>& discount);

// Dispatches on spec.family().
double per_query_measure(std::span<const double> scores,
                         const MeasureSpec& spec);
double per_query_measure(const RelevanceList& rel, const MeasureSpec& spec);

// Relevance lists for every query in the ground truth, computed once so
// several measures can share them. Throws MissingPrediction for queries the
// run does not cover and InvalidInput for predictions without annotation.
using RelevanceTable = std::map<std::string, RelevanceList>;
RelevanceTable build_relevance_table(const Run& run, const GroundTruth& gt);

struct RunEvaluation {
  double mean = 0.0;
  // Sorted by query id; kept so experiments can subsample without re-scoring.
  std::vector<std::pair<std::string, double>> per_query;
};

// Mean of the per-query measure over every query in the table / ground truth.
RunEvaluation mean_measure(const RelevanceTable& table, const MeasureSpec& spec);
RunEvaluation mean_measure(const Run& run, const GroundTruth& gt,
                           const MeasureSpec& spec);

}  // namespace vmreval
