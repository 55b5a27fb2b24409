#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vmreval/axioms.hpp"
#include "vmreval/dataset.hpp"
#include "vmreval/errors.hpp"
#include "vmreval/experiments.hpp"
#include "vmreval/measures.hpp"
#include "vmreval/rank_stats.hpp"
#include "vmreval/rng.hpp"
#include "vmreval/synth.hpp"
#include "vmreval/theory.hpp"

using namespace vmreval;

namespace {

namespace fs = std::filesystem;

std::chrono::steady_clock::time_point tic() {
  return std::chrono::steady_clock::now();
}

double toc(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void report(const char* id, const char* label, bool ok, double elapsed = -1.0) {
  if (elapsed >= 0.0) {
    std::printf("[%s] %s %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, label,
                elapsed);
  } else {
    std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, label);
  }
  std::fflush(stdout);
  CHECK(ok);
}

}  // namespace

TEST_CASE("criterion 1: axiom satisfaction pattern") {
  const auto start = tic();
  const std::vector<AxiomVerdict> verdicts =
      satisfaction_matrix(5, 0.5, 2000, 2026);
  const double elapsed = toc(start);

  bool ok = verdicts.size() == 8;
  for (const AxiomVerdict& verdict : verdicts) {
    bool expected = true;
    switch (verdict.spec.family()) {
      case Family::kRecall:
        expected = verdict.axiom == AxiomId::kInvK;
        break;
      case Family::kAp:
        expected = false;
        break;
      case Family::kDcg:
        expected = verdict.axiom == AxiomId::kMonK;
        break;
      default:
        break;
    }
    CHECK(verdict.satisfied() == expected);
    ok = ok && verdict.satisfied() == expected;
  }
  ok = ok && elapsed < 10.0;
  report("C1", "satisfaction pattern over 2000 trials at K=5, theta=0.5", ok,
         elapsed);
}

TEST_CASE("criterion 2: rank averaging equals the threshold integral") {
  Rng rng(0xa11ce);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GroundTruth gt;
    Run run;
    run.system_id = "probe";
    const int queries = 12;
    for (int q = 0; q < queries; ++q) {
      char name[8];
      std::snprintf(name, sizeof(name), "q%02d", q);
      const double gt_start = rng.uniform(0.0, 80.0);
      gt.add(name, Interval(gt_start, gt_start + rng.uniform(1.0, 20.0)));

      RankedList list;
      list.query_id = name;
      const int length = static_cast<int>(rng.uniform_int(3, 12));
      for (int i = 0; i < length; ++i) {
        const double s = rng.uniform(0.0, 95.0);
        list.moments.emplace_back(s, s + rng.uniform(0.5, 25.0));
      }
      run.lists.emplace(name, std::move(list));
    }

    const RelevanceTable table = build_relevance_table(run, gt);
    for (int cap : {1, 5, 10}) {
      // Integrating mean recall at rank k over theta in [0, 1] leaves the
      // mean prefix maximum, so averaging those integrals over the first
      // `cap` ranks must reproduce the averaged running maximum.
      double integral_sum = 0.0;
      for (int k = 1; k <= cap; ++k) {
        double mean_at_k = 0.0;
        for (const auto& [query_id, rel] : table) {
          (void)query_id;
          double peak = 0.0;
          const std::size_t limit =
              std::min(rel.scores.size(), static_cast<std::size_t>(k));
          for (std::size_t i = 0; i < limit; ++i) {
            peak = std::max(peak, rel.scores[i]);
          }
          mean_at_k += peak;
        }
        integral_sum += mean_at_k / queries;
      }
      const double lhs = integral_sum / cap;
      const double rhs = mean_measure(run, gt, MeasureSpec::axiou(cap)).mean;
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  CHECK(worst <= 1e-12);
  report("C2", "identity holds to 1e-12 over 100 random runs, K in {1,5,10}",
         worst <= 1e-12);
}

TEST_CASE("criterion 3: strict thresholds split near-boundary overlaps") {
  GroundTruth gt;
  gt.add("q", Interval(0.0, 100.0));
  Run run;
  run.system_id = "boundary";
  RankedList list;
  list.query_id = "q";
  list.moments.emplace_back(0.0, 69.0);  // IoU 0.69
  list.moments.emplace_back(0.0, 71.0);  // IoU 0.71
  run.lists.emplace("q", std::move(list));

  const double r1 = mean_measure(run, gt, MeasureSpec::recall(1, 0.7)).mean;
  const double r2 = mean_measure(run, gt, MeasureSpec::recall(2, 0.7)).mean;
  CHECK(r1 == 0.0);
  CHECK(r2 == 1.0);
  report("C3", "IoU 0.69 misses and 0.71 clears a 0.7 threshold exactly",
         r1 == 0.0 && r2 == 1.0);
}

TEST_CASE("criterion 4: closed-form noise behaviour matches Monte Carlo") {
  const auto start = tic();
  const std::vector<double> rs = {0.3, 0.5, 0.7};
  const std::vector<double> thetas = {0.3, 0.5, 0.7};
  const std::vector<double> gammas = {0.05, 0.1, 0.2};
  const int n = 1'000'000;

  bool ok = true;
  std::uint64_t cell = 0;
  for (const double r : rs) {
    for (const double gamma : gammas) {
      Rng rng(derive_seed(0xc4, {cell++}));
      std::vector<int> hits(thetas.size(), 0);
      double sum = 0.0;
      double sum_sq = 0.0;  // squared deviation from the known mean r
      for (int i = 0; i < n; ++i) {
        const double r_hat = rng.normal(r, gamma);
        sum += r_hat;
        sum_sq += (r_hat - r) * (r_hat - r);
        for (std::size_t t = 0; t < thetas.size(); ++t) {
          if (r_hat >= thetas[t]) {
            ++hits[t];
          }
        }
      }

      for (std::size_t t = 0; t < thetas.size(); ++t) {
        const NoiseTheoryPoint point = recall1_theory(r, thetas[t], gamma);
        const double truth = r >= thetas[t] ? 1.0 : 0.0;
        const double p = point.bias + truth;
        const double v = point.variance;
        const double p_hat = static_cast<double>(hits[t]) / n;
        const double v_hat = p_hat * (1.0 - p_hat) * n / (n - 1.0);

        const double se_mean = std::sqrt(v / n);
        // Exact variance of the unbiased sample variance of a Bernoulli:
        // mu4 = v (1 - 3v), Var(S^2) = mu4/n - v^2 (n-3) / (n (n-1)).
        const double mu4 = v * (1.0 - 3.0 * v);
        const double var_s2 =
            mu4 / n - v * v * (n - 3.0) / (static_cast<double>(n) * (n - 1.0));
        const double se_var = std::sqrt(std::max(var_s2, 0.0));

        const bool mean_ok = std::fabs(p_hat - p) <= 3.0 * se_mean;
        const bool var_ok = std::fabs(v_hat - v) <= 3.0 * se_var;
        CHECK(mean_ok);
        CHECK(var_ok);
        ok = ok && mean_ok && var_ok;
      }

      const NoiseTheoryPoint point = axiou1_theory(r, gamma);
      const double mean_hat = sum / n;
      const double var_hat = sum_sq / n;  // unbiased around the known mean
      const bool mean_ok =
          std::fabs(mean_hat - (r + point.bias)) <= 3.0 * gamma / std::sqrt(n);
      const bool var_ok = std::fabs(var_hat - point.variance) <=
                          3.0 * std::sqrt(2.0 / n) * gamma * gamma;
      CHECK(mean_ok);
      CHECK(var_ok);
      ok = ok && mean_ok && var_ok;
    }
  }

  // With the true relevance pinned at the threshold, the indicator flips on
  // half the draws: the closed-form error peaks at theta = r.
  for (const double gamma : gammas) {
    const double peak = recall1_theory(0.5, 0.5, gamma).mse;
    const bool peak_ok = peak > recall1_theory(0.5, 0.3, gamma).mse &&
                         peak > recall1_theory(0.5, 0.7, gamma).mse;
    CHECK(peak_ok);
    ok = ok && peak_ok;
  }

  const double elapsed = toc(start);
  ok = ok && elapsed < 30.0;
  report("C4", "bias and variance within 3 SE of 1e6-sample Monte Carlo", ok,
         elapsed);
}

TEST_CASE("criterion 5: annotation noise hurts recall more than averaging") {
  const auto start = tic();
  const DatasetBundle bundle = bundled_scenario();
  const std::vector<MeasureSpec> specs = {
      MeasureSpec::recall(5, 0.7),
      MeasureSpec::axiou(5),
      MeasureSpec::recall(10, 0.7),
      MeasureSpec::axiou(10),
  };
  std::vector<NoiseConfig> series;
  for (const double beta2 : {1.0, 2.0, 3.0, 4.0}) {
    NoiseConfig cfg;
    cfg.beta2 = beta2;
    cfg.raters = 5;
    cfg.replicas = 100;
    cfg.seed = 0xc5;  // shared: couples the draws across noise levels
    series.push_back(cfg);
  }

  const std::vector<NoiseReport> reports =
      noise_experiment(bundle.runs, bundle.gt, specs, series);
  const double elapsed = toc(start);
  REQUIRE(reports.size() == series.size() * specs.size());

  const auto rmse = [&](std::size_t config, std::size_t spec) {
    return reports[config * specs.size() + spec].mean_rmse;
  };

  bool ok = true;
  for (std::size_t c = 0; c < series.size(); ++c) {
    const bool at5 = rmse(c, 0) > rmse(c, 1);
    const bool at10 = rmse(c, 2) > rmse(c, 3);
    CHECK(at5);
    CHECK(at10);
    ok = ok && at5 && at10;
  }
  for (std::size_t s = 0; s < specs.size(); ++s) {
    int inversions = 0;
    for (std::size_t c = 0; c + 1 < series.size(); ++c) {
      if (rmse(c + 1, s) < rmse(c, s)) {
        ++inversions;
      }
    }
    CHECK(inversions <= 1);
    ok = ok && inversions <= 1;
  }
  ok = ok && elapsed < 120.0;
  report("C5", "recall RMSE exceeds averaged RMSE at every noise level", ok,
         elapsed);
}

TEST_CASE("criterion 6: rankings under averaging are more stable") {
  const auto start = tic();
  const DatasetBundle bundle = bundled_scenario();
  const std::vector<MeasureSpec> specs = {
      MeasureSpec::axiou(10),
      MeasureSpec::recall(10, 0.5),
  };
  const std::vector<int> sizes = {25, 50, 100, 200};
  const std::vector<StabilityReport> reports =
      stability_experiment(bundle.runs, bundle.gt, specs, sizes, 1000, 0xc6);
  const double elapsed = toc(start);
  REQUIRE(reports.size() == sizes.size() * specs.size());

  // Layout: size-major, spec-minor.
  const auto variance = [&](std::size_t size, std::size_t spec) {
    return reports[size * specs.size() + spec].tau_variance;
  };

  bool ok = true;
  for (std::size_t z = 0; z < sizes.size(); ++z) {
    const bool tighter = variance(z, 0) <= variance(z, 1);
    CHECK(tighter);
    ok = ok && tighter;
  }
  for (std::size_t s = 0; s < specs.size(); ++s) {
    int inversions = 0;
    for (std::size_t z = 0; z + 1 < sizes.size(); ++z) {
      if (variance(z + 1, s) > variance(z, s)) {
        ++inversions;
      }
    }
    CHECK(inversions <= 1);
    ok = ok && inversions <= 1;
  }
  ok = ok && elapsed < 120.0;
  report("C6", "tau variance of AxIoU@10 stays at or below R@10,0.5", ok,
         elapsed);
}

TEST_CASE("criterion 7: duplicated shots fool set measures but not AP") {
  const DatasetBundle bundle = bundled_scenario();
  REQUIRE(bundle.runs[0].system_id == "strong");
  REQUIRE(bundle.runs[1].system_id == "strong-dup");
  const Run& plain = bundle.runs[0];
  const Run& padded = bundle.runs[1];

  bool ok = true;
  for (const int k : {1, 5, 10}) {
    for (const double theta : {0.3, 0.5, 0.7}) {
      const MeasureSpec spec = MeasureSpec::recall(k, theta);
      const double diff = std::fabs(mean_measure(plain, bundle.gt, spec).mean -
                                    mean_measure(padded, bundle.gt, spec).mean);
      CHECK(diff <= 1e-12);
      ok = ok && diff <= 1e-12;
    }
    const MeasureSpec spec = MeasureSpec::axiou(k);
    const double diff = std::fabs(mean_measure(plain, bundle.gt, spec).mean -
                                  mean_measure(padded, bundle.gt, spec).mean);
    CHECK(diff <= 1e-12);
    ok = ok && diff <= 1e-12;
  }
  for (const int k : {5, 10}) {
    const MeasureSpec spec = MeasureSpec::ap(k, 0.5);
    const double diff = std::fabs(mean_measure(plain, bundle.gt, spec).mean -
                                  mean_measure(padded, bundle.gt, spec).mean);
    CHECK(diff > 0.0);
    ok = ok && diff > 0.0;
  }
  report("C7", "twins tie on R@K,theta and AxIoU@K yet differ on AP@K,theta",
         ok);
}

TEST_CASE("criterion 8: tau-b equals exhaustive pair counting") {
  Rng rng(0xc8);
  bool ok = true;
  int undefined_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 8));
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] =
          static_cast<double>(rng.uniform_int(0, 3));
      y[static_cast<std::size_t>(i)] =
          static_cast<double>(rng.uniform_int(0, 3));
    }

    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t tied_x = 0;
    std::int64_t tied_y = 0;
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        ++total;
        const double dx = x[static_cast<std::size_t>(i)] -
                          x[static_cast<std::size_t>(j)];
        const double dy = y[static_cast<std::size_t>(i)] -
                          y[static_cast<std::size_t>(j)];
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

    if (total == tied_x || total == tied_y) {
      bool threw = false;
      try {
        kendall_tau_b(x, y);
      } catch (const UndefinedCorrelation&) {
        threw = true;
      }
      CHECK(threw);
      ok = ok && threw;
      ++undefined_cases;
      continue;
    }
    const double expected =
        static_cast<double>(concordant - discordant) /
        std::sqrt(static_cast<double>(total - tied_x) *
                  static_cast<double>(total - tied_y));
    const double got = kendall_tau_b(x, y);
    CHECK(got == expected);
    ok = ok && got == expected;
  }
  // The small alphabet guarantees both branches actually ran.
  CHECK(undefined_cases > 0);
  ok = ok && undefined_cases > 0;
  report("C8", "tau-b matches brute force exactly on 1000 tied pairs", ok);
}

TEST_CASE("criterion 9: every command rewrites its outputs byte for byte") {
  const fs::path dir = fs::temp_directory_path() / "vmreval-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string bin = VMREVAL_CLI_PATH;

  const auto run_cli = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
  };
  const auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  struct Command {
    std::string args;
    std::vector<fs::path> outputs;
  };
  std::vector<Command> commands;
  const auto file_command = [&](const std::string& prefix,
                                const std::string& name,
                                const std::string& suffix = "") {
    const fs::path out = dir / name;
    commands.push_back({prefix + " -o " + out.string() + suffix, {out}});
  };
  file_command("eval --bundled -m axiou@5 -m recall@5:0.5", "eval.json");
  file_command("axioms --trials 100", "axioms.json");
  file_command("agreement --bundled --format csv", "agreement.csv");
  file_command("stability --bundled --sizes 25 --sizes 50 --trials 100",
               "stability.json");
  file_command("noise --bundled --beta2 1 --beta2 2 --replicas 3",
               "noise.json");
  file_command("select --bundled-sweep", "select.json");
  file_command("theory", "theory.json");

  const fs::path synth_dir = dir / "synth";
  Command synth;
  synth.args = "synth --out-dir " + synth_dir.string() + " --queries 25";
  for (const char* name : {"gt.jsonl", "strong.jsonl", "strong-dup.jsonl",
                           "balanced.jsonl", "loose.jsonl", "shuffled.jsonl",
                           "weak.jsonl", "metadata.json"}) {
    synth.outputs.push_back(synth_dir / name);
  }
  commands.push_back(std::move(synth));

  bool ok = true;
  for (const Command& command : commands) {
    const int first_exit = run_cli(command.args);
    CHECK(first_exit == 0);
    std::vector<std::string> first;
    first.reserve(command.outputs.size());
    for (const fs::path& out : command.outputs) {
      first.push_back(slurp(out));
    }
    const int second_exit = run_cli(command.args);
    CHECK(second_exit == 0);
    bool same = first_exit == 0 && second_exit == 0;
    for (std::size_t i = 0; i < command.outputs.size(); ++i) {
      const std::string again = slurp(command.outputs[i]);
      same = same && !again.empty() && again == first[i];
    }
    CHECK(same);
    ok = ok && same;
  }
  report("C9", "re-running each command reproduces identical bytes", ok);
}
