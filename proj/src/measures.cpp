#include "vmreval/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "vmreval/errors.hpp"

namespace vmreval {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

void require_cutoff(int k) {
  if (k < 1) {
    throw InvalidParameter("cutoff K must be >= 1, got " + std::to_string(k));
  }
}

void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidParameter("theta must lie in [0, 1], got " +
                           std::to_string(theta));
  }
}

std::string format_theta(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", theta);
  return buf;
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::kRecall:
      return "recall";
    case Family::kAxiou:
      return "axiou";
    case Family::kNcxiou:
      return "ncxiou";
    case Family::kAp:
      return "ap";
    case Family::kDcg:
      return "dcg";
  }
  throw InvalidParameter("unknown measure family");
}

MeasureSpec MeasureSpec::recall(int k, double theta) {
  require_cutoff(k);
  require_theta(theta);
  return MeasureSpec(Family::kRecall, k, theta, {});
}

MeasureSpec MeasureSpec::axiou(int k) {
  require_cutoff(k);
  return MeasureSpec(Family::kAxiou, k, 0.0, {});
}

MeasureSpec MeasureSpec::ap(int k, double theta) {
  require_cutoff(k);
  require_theta(theta);
  return MeasureSpec(Family::kAp, k, theta, {});
}

MeasureSpec MeasureSpec::dcg(int k) {
  require_cutoff(k);
  return MeasureSpec(Family::kDcg, k, 0.0, {});
}

MeasureSpec MeasureSpec::ncxiou(std::vector<double> abandonment) {
  if (abandonment.empty()) {
    throw InvalidParameter("abandonment distribution must not be empty");
  }
  double sum = 0.0;
  for (double w : abandonment) {
    if (!(w >= 0.0)) {
      throw InvalidParameter("abandonment weights must be nonnegative");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kWeightSumTolerance) {
    throw InvalidParameter("abandonment weights must sum to 1, got " +
                           std::to_string(sum));
  }
  const int k = static_cast<int>(abandonment.size());
  return MeasureSpec(Family::kNcxiou, k, 0.0, std::move(abandonment));
}

MeasureSpec MeasureSpec::ncxiou_uniform(int k) {
  require_cutoff(k);
  return ncxiou(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

MeasureSpec MeasureSpec::parse(const std::string& token) {
  const auto fail = [&token](const std::string& why) -> MeasureSpec {
    throw InvalidParameter("bad measure spec '" + token + "': " + why);
  };

  const std::size_t at = token.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= token.size()) {
    return fail("expected family@K[:theta]");
  }
  const std::string family = token.substr(0, at);
  const std::string rest = token.substr(at + 1);
  const std::size_t colon = rest.find(':');
  const std::string k_text = rest.substr(0, colon);
  std::string theta_text;
  if (colon != std::string::npos) {
    theta_text = rest.substr(colon + 1);
    if (theta_text.empty()) {
      return fail("empty theta");
    }
  }

  int k = 0;
  const auto [kp, kerr] =
      std::from_chars(k_text.data(), k_text.data() + k_text.size(), k);
  if (kerr != std::errc() || kp != k_text.data() + k_text.size() || k < 1) {
    return fail("cutoff '" + k_text + "' is not a positive integer");
  }

  double theta = 0.0;
  bool has_theta = !theta_text.empty();
  if (has_theta) {
    try {
      std::size_t used = 0;
      theta = std::stod(theta_text, &used);
      if (used != theta_text.size()) {
        return fail("trailing characters after theta");
      }
    } catch (const std::exception&) {
      return fail("theta '" + theta_text + "' is not a number");
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
      return fail("theta must lie in [0, 1]");
    }
  }

  if (family == "recall" || family == "ap") {
    if (!has_theta) {
      return fail("family '" + family + "' needs a threshold, e.g. " + family +
                  "@" + k_text + ":0.5");
    }
    return family == "recall" ? recall(k, theta) : ap(k, theta);
  }
  if (family == "axiou" || family == "dcg" || family == "ncxiou") {
    if (has_theta) {
      return fail("family '" + family + "' takes no threshold");
    }
    if (family == "axiou") {
      return axiou(k);
    }
    if (family == "dcg") {
      return dcg(k);
    }
    return ncxiou_uniform(k);
  }
  return fail("unknown family '" + family + "'");
}

std::string MeasureSpec::name() const {
  switch (family_) {
    case Family::kRecall:
      return "R@" + std::to_string(k_) + "," + format_theta(theta_);
    case Family::kAxiou:
      return "AxIoU@" + std::to_string(k_);
    case Family::kNcxiou:
      return "NCxIoU@" + std::to_string(k_);
    case Family::kAp:
      return "AP@" + std::to_string(k_) + "," + format_theta(theta_);
    case Family::kDcg:
      return "DCG@" + std::to_string(k_);
  }
  throw InvalidParameter("unknown measure family");
}

double recall_at(std::span<const double> scores, int k, double theta) {
  require_cutoff(k);
  require_theta(theta);
  const std::size_t limit = std::min<std::size_t>(scores.size(), k);
  for (std::size_t i = 0; i < limit; ++i) {
    if (scores[i] > theta) {
      return 1.0;
    }
  }
  return 0.0;
}

double axiou_at(std::span<const double> scores, int k) {
  require_cutoff(k);
  // Same accumulation as ncxiou with uniform weights, so the two agree
  // bit for bit.
  const double weight = 1.0 / k;
  double running_max = 0.0;
  double acc = 0.0;
  for (int rank = 1; rank <= k; ++rank) {
    if (static_cast<std::size_t>(rank) <= scores.size()) {
      running_max = std::max(running_max, scores[rank - 1]);
    }
    acc += weight * running_max;
  }
  return acc;
}

double ncxiou(std::span<const double> scores,
              std::span<const double> abandonment) {
  if (abandonment.empty()) {
    throw InvalidParameter("abandonment distribution must not be empty");
  }
  double sum = 0.0;
  for (double w : abandonment) {
    if (!(w >= 0.0)) {
      throw InvalidParameter("abandonment weights must be nonnegative");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kWeightSumTolerance) {
    throw InvalidParameter("abandonment weights must sum to 1");
  }
  double running_max = 0.0;
  double acc = 0.0;
  for (std::size_t rank = 1; rank <= abandonment.size(); ++rank) {
    if (rank <= scores.size()) {
      running_max = std::max(running_max, scores[rank - 1]);
    }
    acc += abandonment[rank - 1] * running_max;
  }
  return acc;
}

double ap_at(std::span<const double> scores, int k, double theta) {
  require_cutoff(k);
  require_theta(theta);
  double hits = 0.0;
  double acc = 0.0;
  for (int rank = 1; rank <= k; ++rank) {
    if (static_cast<std::size_t>(rank) <= scores.size() &&
        scores[rank - 1] > theta) {
      hits += 1.0;
    }
    acc += hits / rank;
  }
  return acc / k;
}

double dcg_at(std::span<const double> scores, int k) {
  static const std::function<double(double)> kIdentity =
      [](double r) { return r; };
  static const std::function<double(int)> kLogDiscount =
      [](int rank) { return std::log2(static_cast<double>(rank) + 1.0); };
  return dcg_at(scores, k, kIdentity, kLogDiscount);
}

double dcg_at(std::span<const double> scores, int k,
              const std::function<double(double)>& gain,
              const std::function<double(int)>& discount) {
  require_cutoff(k);
  const std::size_t limit = std::min<std::size_t>(scores.size(), k);
  double acc = 0.0;
  for (std::size_t rank = 1; rank <= limit; ++rank) {
    acc += gain(scores[rank - 1]) / discount(static_cast<int>(rank));
  }
  return acc;
}

double per_query_measure(std::span<const double> scores,
                         const MeasureSpec& spec) {
  switch (spec.family()) {
    case Family::kRecall:
      return recall_at(scores, spec.k(), spec.theta());
    case Family::kAxiou:
      return axiou_at(scores, spec.k());
    case Family::kNcxiou:
      return ncxiou(scores, spec.abandonment());
    case Family::kAp:
      return ap_at(scores, spec.k(), spec.theta());
    case Family::kDcg:
      return dcg_at(scores, spec.k());
  }
  throw InvalidParameter("unknown measure family");
}

double per_query_measure(const RelevanceList& rel, const MeasureSpec& spec) {
  return per_query_measure(std::span<const double>(rel.scores), spec);
}

RelevanceTable build_relevance_table(const Run& run, const GroundTruth& gt) {
  for (const auto& [query_id, list] : run.lists) {
    (void)list;
    if (!gt.contains(query_id)) {
      throw InvalidInput("run '" + run.system_id +
                         "' predicts unannotated query '" + query_id + "'");
    }
  }
  RelevanceTable table;
  for (const auto& [query_id, annotation] : gt.entries()) {
    (void)annotation;
    const auto it = run.lists.find(query_id);
    if (it == run.lists.end()) {
      throw MissingPrediction("run '" + run.system_id +
                              "' has no list for query '" + query_id + "'");
    }
    table.emplace(query_id, relevance_list(it->second, gt));
  }
  return table;
}

RunEvaluation mean_measure(const RelevanceTable& table,
                           const MeasureSpec& spec) {
  if (table.empty()) {
    throw EmptyQuerySet("mean measure over zero queries");
  }
  RunEvaluation eval;
  eval.per_query.reserve(table.size());
  double acc = 0.0;
  for (const auto& [query_id, rel] : table) {
    const double value = per_query_measure(rel, spec);
    acc += value;
    eval.per_query.emplace_back(query_id, value);
  }
  eval.mean = acc / static_cast<double>(table.size());
  return eval;
}

RunEvaluation mean_measure(const Run& run, const GroundTruth& gt,
                           const MeasureSpec& spec) {
  if (gt.size() == 0) {
    throw EmptyQuerySet("ground truth annotates zero queries");
  }
  return mean_measure(build_relevance_table(run, gt), spec);
}

}  // namespace vmreval
