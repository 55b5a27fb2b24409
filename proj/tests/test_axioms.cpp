#include <doctest.h>

#include <cmath>
#include <vector>

#include "vmreval/axioms.hpp"
#include "vmreval/errors.hpp"
#include "vmreval/measures.hpp"
#include "vmreval/rng.hpp"

using namespace vmreval;

namespace {

double prefix_max(const std::vector<double>& scores, int count) {
  double m = 0.0;
  for (int i = 0; i < count; ++i) {
    m = std::max(m, scores[static_cast<std::size_t>(i)]);
  }
  return m;
}

}  // namespace

TEST_CASE("non-best perturbations raise a score without a new leader") {
  Rng seeds(0xabc1);
  const std::vector<double> scores{0.9, 0.2, 0.5, 0.7, 0.1};
  for (int trial = 0; trial < 200; ++trial) {
    const Perturbation p =
        generate_perturbation(scores, PerturbationKind::kNonBest,
                              seeds.uniform_int(0, 1 << 30));
    CHECK(p.rank > 1);
    CHECK(p.replacement > p.original);
    CHECK(p.replacement <= prefix_max(scores, p.rank - 1));
    CHECK_NOTHROW(validate_perturbation(scores, p));
  }
}

TEST_CASE("best perturbations install a strict new running maximum") {
  Rng seeds(0xabc2);
  const std::vector<double> scores{0.3, 0.6, 0.2};
  for (int trial = 0; trial < 200; ++trial) {
    const Perturbation p = generate_perturbation(
        scores, PerturbationKind::kBest, seeds.uniform_int(0, 1 << 30));
    CHECK(p.replacement > p.original);
    CHECK(p.replacement > prefix_max(scores, p.rank - 1));
    CHECK(p.replacement <= 1.0);
    CHECK_NOTHROW(validate_perturbation(scores, p));
  }
}

TEST_CASE("a rank cap confines perturbations to the list head") {
  Rng seeds(0xabc3);
  const std::vector<double> scores{0.5, 0.1, 0.2, 0.3, 0.4, 0.45};
  for (int trial = 0; trial < 100; ++trial) {
    const Perturbation p =
        generate_perturbation(scores, PerturbationKind::kNonBest,
                              seeds.uniform_int(0, 1 << 30), 3);
    CHECK(p.rank >= 2);
    CHECK(p.rank <= 3);
  }
}

TEST_CASE("infeasible lists are reported rather than forced") {
  CHECK_THROWS_AS(
      generate_perturbation({}, PerturbationKind::kNonBest, 1),
      Infeasible);
  // Strictly increasing: no rank sits below its prefix maximum.
  CHECK_THROWS_AS(generate_perturbation({0.1, 0.2, 0.3},
                                        PerturbationKind::kNonBest, 1),
                  Infeasible);
  // All scores equal: same.
  CHECK_THROWS_AS(generate_perturbation({0.4, 0.4, 0.4},
                                        PerturbationKind::kNonBest, 1),
                  Infeasible);
  // Everything is already at the ceiling: no room above.
  CHECK_THROWS_AS(generate_perturbation({1.0, 1.0},
                                        PerturbationKind::kBest, 1),
                  Infeasible);
}

TEST_CASE("perturbation validation rejects inconsistent records") {
  const std::vector<double> scores{0.8, 0.3, 0.5};

  Perturbation p;
  p.rank = 2;
  p.original = 0.3;
  p.replacement = 0.6;
  p.kind = PerturbationKind::kNonBest;
  CHECK_NOTHROW(validate_perturbation(scores, p));

  Perturbation wrong_rank = p;
  wrong_rank.rank = 7;
  CHECK_THROWS_AS(validate_perturbation(scores, wrong_rank), InvalidInput);

  Perturbation wrong_original = p;
  wrong_original.original = 0.4;
  CHECK_THROWS_AS(validate_perturbation(scores, wrong_original), InvalidInput);

  Perturbation lowered = p;
  lowered.replacement = 0.2;
  CHECK_THROWS_AS(validate_perturbation(scores, lowered), InvalidInput);

  Perturbation overshoot = p;
  overshoot.replacement = 0.9;  // above the rank-1 score of 0.8
  CHECK_THROWS_AS(validate_perturbation(scores, overshoot), InvalidInput);

  Perturbation weak_best = p;
  weak_best.kind = PerturbationKind::kBest;
  weak_best.replacement = 0.6;  // not above the prefix maximum 0.8
  CHECK_THROWS_AS(validate_perturbation(scores, weak_best), InvalidInput);
}

TEST_CASE("axiom checks land on the proven satisfaction pattern") {
  const int trials = 400;
  const std::uint64_t seed = 17;

  const MeasureSpec recall = MeasureSpec::recall(5, 0.5);
  const MeasureSpec ap = MeasureSpec::ap(5, 0.5);
  const MeasureSpec dcg = MeasureSpec::dcg(5);
  const MeasureSpec axiou = MeasureSpec::axiou(5);

  CHECK(check_axiom(recall, AxiomId::kInvK, trials, seed).violations == 0);
  CHECK(check_axiom(recall, AxiomId::kMonK, trials, seed).violations > 0);
  CHECK(check_axiom(ap, AxiomId::kInvK, trials, seed).violations > 0);
  CHECK(check_axiom(ap, AxiomId::kMonK, trials, seed).violations > 0);
  CHECK(check_axiom(dcg, AxiomId::kInvK, trials, seed).violations > 0);
  CHECK(check_axiom(dcg, AxiomId::kMonK, trials, seed).violations == 0);
  CHECK(check_axiom(axiou, AxiomId::kInvK, trials, seed).violations == 0);
  CHECK(check_axiom(axiou, AxiomId::kMonK, trials, seed).violations == 0);
}

TEST_CASE("witnesses replay to the recorded means") {
  const AxiomVerdict verdict =
      check_axiom(MeasureSpec::ap(5, 0.5), AxiomId::kInvK, 400, 3);
  REQUIRE(verdict.witness.has_value());
  const AxiomWitness& w = *verdict.witness;
  CHECK_NOTHROW(
      validate_perturbation(w.run[w.perturbation.query_index], w.perturbation));

  double before = 0.0;
  double after = 0.0;
  const MeasureSpec spec = MeasureSpec::ap(5, 0.5);
  for (std::size_t q = 0; q < w.run.size(); ++q) {
    std::vector<double> scores = w.run[q];
    before += per_query_measure(std::span<const double>(scores), spec);
    if (q == w.perturbation.query_index) {
      scores[static_cast<std::size_t>(w.perturbation.rank - 1)] =
          w.perturbation.replacement;
    }
    after += per_query_measure(std::span<const double>(scores), spec);
  }
  before /= static_cast<double>(w.run.size());
  after /= static_cast<double>(w.run.size());
  CHECK(before == w.mean_before);
  CHECK(after == w.mean_after);
  CHECK(std::fabs(after - before) > 1e-12);
}

TEST_CASE("axiom checks are deterministic in the seed") {
  const MeasureSpec spec = MeasureSpec::recall(5, 0.5);
  const AxiomVerdict a = check_axiom(spec, AxiomId::kMonK, 200, 11);
  const AxiomVerdict b = check_axiom(spec, AxiomId::kMonK, 200, 11);
  CHECK(a.trials == b.trials);
  CHECK(a.skipped == b.skipped);
  CHECK(a.violations == b.violations);
  const AxiomVerdict c = check_axiom(spec, AxiomId::kMonK, 200, 12);
  CHECK((a.violations != c.violations || a.skipped != c.skipped ||
         a.witness->perturbation.rank != c.witness->perturbation.rank));
}

TEST_CASE("the satisfaction matrix covers four measures and both axioms") {
  const std::vector<AxiomVerdict> verdicts = satisfaction_matrix(5, 0.5, 50, 2);
  REQUIRE(verdicts.size() == 8);
  for (const AxiomVerdict& v : verdicts) {
    CHECK(v.trials + v.skipped == 50);
  }
  CHECK_THROWS_AS(satisfaction_matrix(5, 0.5, 0, 2), InvalidParameter);
  CHECK_THROWS_AS(satisfaction_matrix(0, 0.5, 10, 2), InvalidParameter);
  CHECK_THROWS_AS(satisfaction_matrix(5, 1.5, 10, 2), InvalidParameter);
}

TEST_CASE("expected satisfaction table") {
  CHECK(axiom_expected_satisfied(Family::kRecall, AxiomId::kInvK));
  CHECK_FALSE(axiom_expected_satisfied(Family::kRecall, AxiomId::kMonK));
  CHECK_FALSE(axiom_expected_satisfied(Family::kAp, AxiomId::kInvK));
  CHECK_FALSE(axiom_expected_satisfied(Family::kAp, AxiomId::kMonK));
  CHECK_FALSE(axiom_expected_satisfied(Family::kDcg, AxiomId::kInvK));
  CHECK(axiom_expected_satisfied(Family::kDcg, AxiomId::kMonK));
  CHECK(axiom_expected_satisfied(Family::kAxiou, AxiomId::kInvK));
  CHECK(axiom_expected_satisfied(Family::kAxiou, AxiomId::kMonK));
  CHECK(axiom_expected_satisfied(Family::kNcxiou, AxiomId::kMonK));
}
