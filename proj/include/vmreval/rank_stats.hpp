#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vmreval/dataset.hpp"
#include "vmreval/measures.hpp"

namespace vmreval {

// Systems ordered by score, best first; exact ties keep system-id order so the
// ranking is deterministic.
struct SystemRanking {
  MeasureSpec spec;
  std::vector<std::pair<std::string, double>> entries;
};

SystemRanking rank_systems(const std::vector<Run>& runs, const GroundTruth& gt,
                           const MeasureSpec& spec);

// Kendall's tau-b between two paired score vectors:
//   (C - D) / sqrt((n0 - n1) (n0 - n2))
// with C/D the concordant/discordant pair counts, n0 = n(n-1)/2 and n1/n2 the
// pair counts tied in x / in y. Throws UndefinedCorrelation when either
// denominator factor vanishes (a vector is one big tie) and InvalidInput for
// mismatched lengths, fewer than two entries, or non-finite scores.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

// Pairwise rank agreement of measures over a fixed system set; values[i][j]
// is tau-b between the system scores under specs[i] and specs[j], NaN when
// undefined. Symmetric with unit diagonal wherever defined.
struct AgreementMatrix {
  std::vector<MeasureSpec> specs;
  std::vector<std::vector<double>> values;
};

AgreementMatrix agreement_matrix(const std::vector<Run>& runs,
                                 const GroundTruth& gt,
                                 const std::vector<MeasureSpec>& specs);

// Fraction of queries on which every run receives exactly the same per-query
// score (within 1e-12). High ratios mean the measure cannot separate systems
// on most queries.
double all_tied_ratio(const std::vector<Run>& runs, const GroundTruth& gt,
                      const MeasureSpec& spec);

}  // namespace vmreval
