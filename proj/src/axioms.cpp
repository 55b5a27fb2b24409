#include "vmreval/axioms.hpp"

#include <algorithm>
#include <cmath>

#include "vmreval/errors.hpp"
#include "vmreval/rng.hpp"

namespace vmreval {

namespace {

constexpr int kQueriesPerTrial = 8;
constexpr int kAttemptBudget = 20;
constexpr double kInvarianceTolerance = 1e-12;

double prefix_max(const std::vector<double>& scores, int count) {
  double m = 0.0;
  for (int i = 0; i < count; ++i) {
    m = std::max(m, scores[static_cast<std::size_t>(i)]);
  }
  return m;
}

// Draws uniformly from (lo, hi]; u < 1 keeps lo itself out of range.
double draw_open_closed(Rng& rng, double lo, double hi) {
  return hi - rng.uniform() * (hi - lo);
}

Perturbation generate_with_cap(const std::vector<double>& scores,
                               PerturbationKind kind, Rng& rng, int max_rank,
                               double ceiling) {
  if (scores.empty()) {
    throw Infeasible("cannot perturb an empty list");
  }
  const int limit = max_rank > 0
                        ? std::min<int>(max_rank, static_cast<int>(scores.size()))
                        : static_cast<int>(scores.size());

  std::vector<int> feasible;
  feasible.reserve(static_cast<std::size_t>(limit));
  for (int rank = 1; rank <= limit; ++rank) {
    const double current = scores[static_cast<std::size_t>(rank - 1)];
    if (kind == PerturbationKind::kNonBest) {
      if (rank == 1) {
        continue;  // there is nothing before rank 1 to stay below
      }
      if (current < prefix_max(scores, rank - 1)) {
        feasible.push_back(rank);
      }
    } else {
      const double floor =
          rank == 1 ? current : std::max(current, prefix_max(scores, rank - 1));
      if (floor < ceiling) {
        feasible.push_back(rank);
      }
    }
  }
  if (feasible.empty()) {
    throw Infeasible("no feasible rank for a " + perturbation_name(kind) +
                     " perturbation");
  }

  const int rank = feasible[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(feasible.size()) - 1))];
  const double current = scores[static_cast<std::size_t>(rank - 1)];
  double lo = current;
  double hi = ceiling;
  if (kind == PerturbationKind::kNonBest) {
    hi = prefix_max(scores, rank - 1);
  } else if (rank > 1) {
    lo = std::max(lo, prefix_max(scores, rank - 1));
  }
  const double replacement = draw_open_closed(rng, lo, hi);
  if (!(replacement > lo && replacement <= hi)) {
    // Only reachable when (lo, hi] collapses under rounding.
    throw Infeasible("degenerate perturbation range");
  }

  Perturbation p;
  p.rank = rank;
  p.original = current;
  p.replacement = replacement;
  p.kind = kind;
  return p;
}

double mean_over_run(const ScoreRun& run, const MeasureSpec& spec) {
  double acc = 0.0;
  for (const std::vector<double>& scores : run) {
    acc += per_query_measure(std::span<const double>(scores), spec);
  }
  return acc / static_cast<double>(run.size());
}

bool uses_threshold(Family family) {
  return family == Family::kRecall || family == Family::kAp;
}

}  // namespace

std::string axiom_name(AxiomId axiom) {
  return axiom == AxiomId::kInvK ? "INV-K" : "MON-K";
}

std::string perturbation_name(PerturbationKind kind) {
  return kind == PerturbationKind::kNonBest ? "non-best" : "best";
}

Perturbation generate_perturbation(const std::vector<double>& scores,
                                   PerturbationKind kind, std::uint64_t seed,
                                   int max_rank) {
  Rng rng(seed);
  Perturbation p = generate_with_cap(scores, kind, rng, max_rank, 1.0);
  validate_perturbation(scores, p);
  return p;
}

void validate_perturbation(const std::vector<double>& scores,
                           const Perturbation& p) {
  if (p.rank < 1 || static_cast<std::size_t>(p.rank) > scores.size()) {
    throw InvalidInput("perturbation rank out of range");
  }
  const double current = scores[static_cast<std::size_t>(p.rank - 1)];
  if (current != p.original) {
    throw InvalidInput("perturbation does not match the list");
  }
  if (!(p.replacement > p.original)) {
    throw InvalidInput("perturbation must strictly raise the score");
  }
  const double before = prefix_max(scores, p.rank - 1);
  if (p.kind == PerturbationKind::kNonBest) {
    if (p.rank == 1 || !(p.replacement <= before)) {
      throw InvalidInput("non-best replacement must stay at or below the "
                         "prefix maximum");
    }
  } else if (p.rank > 1 && !(p.replacement > before)) {
    throw InvalidInput("best replacement must exceed the prefix maximum");
  }
}

AxiomVerdict check_axiom(const MeasureSpec& spec, AxiomId axiom, int trials,
                         std::uint64_t seed) {
  if (trials < 1) {
    throw InvalidParameter("axiom check needs at least one trial");
  }
  const int list_length = spec.k() + 2;
  const PerturbationKind kind = axiom == AxiomId::kInvK
                                    ? PerturbationKind::kNonBest
                                    : PerturbationKind::kBest;

  AxiomVerdict verdict{spec, axiom, 0, 0, 0, std::nullopt};
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));

    ScoreRun run(kQueriesPerTrial);
    for (std::vector<double>& scores : run) {
      scores.resize(static_cast<std::size_t>(list_length));
      for (double& s : scores) {
        s = rng.uniform();
      }
    }

    std::size_t query = static_cast<std::size_t>(
        rng.uniform_int(0, kQueriesPerTrial - 1));

    // Constructive witness hunt: for thresholded measures, half the
    // monotonicity trials confine the perturbed list (and the replacement)
    // strictly below theta, where a new best cannot move the measure.
    double ceiling = 1.0;
    const bool biased = axiom == AxiomId::kMonK &&
                        uses_threshold(spec.family()) && trial % 2 == 0 &&
                        spec.theta() > 1e-6;
    if (biased) {
      for (double& s : run[query]) {
        s = rng.uniform() * 0.8 * spec.theta();
      }
      ceiling = 0.9 * spec.theta();
    }

    bool generated = false;
    Perturbation p;
    for (int attempt = 0; attempt < kAttemptBudget && !generated; ++attempt) {
      if (attempt > 0 && !biased) {
        query = static_cast<std::size_t>(
            rng.uniform_int(0, kQueriesPerTrial - 1));
      }
      try {
        p = generate_with_cap(run[query], kind, rng, spec.k(), ceiling);
        generated = true;
      } catch (const Infeasible&) {
      }
    }
    if (!generated) {
      ++verdict.skipped;
      continue;
    }
    p.query_index = query;
    validate_perturbation(run[query], p);

    const double before = mean_over_run(run, spec);
    ScoreRun perturbed = run;
    perturbed[query][static_cast<std::size_t>(p.rank - 1)] = p.replacement;
    const double after = mean_over_run(perturbed, spec);

    ++verdict.trials;
    const bool violated = axiom == AxiomId::kInvK
                              ? std::fabs(after - before) > kInvarianceTolerance
                              : !(after > before);
    if (violated) {
      ++verdict.violations;
      if (!verdict.witness) {
        verdict.witness = AxiomWitness{run, p, before, after};
      }
    }
  }
  return verdict;
}

std::vector<AxiomVerdict> satisfaction_matrix(int k, double theta, int trials,
                                              std::uint64_t seed) {
  const std::vector<MeasureSpec> specs = {
      MeasureSpec::recall(k, theta),
      MeasureSpec::ap(k, theta),
      MeasureSpec::dcg(k),
      MeasureSpec::axiou(k),
  };
  std::vector<AxiomVerdict> verdicts;
  verdicts.reserve(specs.size() * 2);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (AxiomId axiom : {AxiomId::kInvK, AxiomId::kMonK}) {
      const std::uint64_t cell_seed = derive_seed(
          seed, {static_cast<std::uint64_t>(s),
                 static_cast<std::uint64_t>(axiom == AxiomId::kMonK)});
      verdicts.push_back(check_axiom(specs[s], axiom, trials, cell_seed));
    }
  }
  return verdicts;
}

bool axiom_expected_satisfied(Family family, AxiomId axiom) {
  switch (family) {
    case Family::kRecall:
      return axiom == AxiomId::kInvK;
    case Family::kAp:
      return false;
    case Family::kDcg:
      return axiom == AxiomId::kMonK;
    case Family::kAxiou:
    case Family::kNcxiou:
      return true;
  }
  throw InvalidParameter("unknown measure family");
}

}  // namespace vmreval
