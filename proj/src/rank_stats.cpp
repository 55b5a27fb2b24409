#include "vmreval/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "vmreval/errors.hpp"

namespace vmreval {

SystemRanking rank_systems(const std::vector<Run>& runs, const GroundTruth& gt,
                           const MeasureSpec& spec) {
  if (runs.empty()) {
    throw InvalidInput("cannot rank an empty system set");
  }
  SystemRanking ranking{spec, {}};
  ranking.entries.reserve(runs.size());
  for (const Run& run : runs) {
    ranking.entries.emplace_back(run.system_id,
                                 mean_measure(run, gt, spec).mean);
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) {
                return a.second > b.second;
              }
              return a.first < b.first;
            });
  return ranking;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidInput("tau-b needs paired vectors, got sizes " +
                       std::to_string(x.size()) + " and " +
                       std::to_string(y.size()));
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw InvalidInput("tau-b needs at least two entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InvalidInput("tau-b scores must be finite");
    }
  }

  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;  // pairs tied in x, including both-tied
  std::int64_t tied_y = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) {
        ++tied_x;
      }
      if (dy == 0.0) {
        ++tied_y;
      }
      if (dx == 0.0 || dy == 0.0) {
        continue;
      }
      if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }

  const std::int64_t total = static_cast<std::int64_t>(n) *
                             static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t denom_x = total - tied_x;
  const std::int64_t denom_y = total - tied_y;
  if (denom_x == 0 || denom_y == 0) {
    throw UndefinedCorrelation("tau-b undefined: a vector is entirely tied");
  }
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(denom_x) *
                   static_cast<double>(denom_y));
}

AgreementMatrix agreement_matrix(const std::vector<Run>& runs,
                                 const GroundTruth& gt,
                                 const std::vector<MeasureSpec>& specs) {
  if (runs.size() < 2) {
    throw InvalidInput("agreement needs at least two runs");
  }
  if (specs.empty()) {
    throw InvalidParameter("agreement needs at least one measure");
  }

  std::vector<std::vector<double>> scores(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    scores[s].reserve(runs.size());
    for (const Run& run : runs) {
      scores[s].push_back(mean_measure(run, gt, specs[s]).mean);
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  AgreementMatrix matrix{specs, std::vector<std::vector<double>>(
                                    specs.size(),
                                    std::vector<double>(specs.size(), nan))};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i; j < specs.size(); ++j) {
      double tau = nan;
      try {
        tau = kendall_tau_b(scores[i], scores[j]);
      } catch (const UndefinedCorrelation&) {
        // Recorded as missing rather than a fabricated value.
      }
      matrix.values[i][j] = tau;
      matrix.values[j][i] = tau;
    }
  }
  return matrix;
}

double all_tied_ratio(const std::vector<Run>& runs, const GroundTruth& gt,
                      const MeasureSpec& spec) {
  if (runs.size() < 2) {
    throw InvalidInput("all-tied ratio needs at least two runs");
  }
  constexpr double kTieTolerance = 1e-12;

  std::vector<RunEvaluation> evals;
  evals.reserve(runs.size());
  for (const Run& run : runs) {
    evals.push_back(mean_measure(run, gt, spec));
  }

  const std::size_t num_queries = evals.front().per_query.size();
  std::size_t tied = 0;
  for (std::size_t q = 0; q < num_queries; ++q) {
    double lo = evals.front().per_query[q].second;
    double hi = lo;
    for (const RunEvaluation& eval : evals) {
      const double v = eval.per_query[q].second;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo <= kTieTolerance) {
      ++tied;
    }
  }
  return static_cast<double>(tied) / static_cast<double>(num_queries);
}

}  // namespace vmreval
