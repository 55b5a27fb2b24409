#include "vmreval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vmreval/errors.hpp"
#include "vmreval/rng.hpp"

namespace vmreval {

namespace {

// First path element of derived seeds; keeps annotation draws and list draws
// on separate streams even when a seed_tag collides with a query index.
constexpr std::uint64_t kAnnotationStream = 0;
constexpr std::uint64_t kListStream = 1;

constexpr std::uint64_t kBundledScenarioSeed = 0x0a51ab5eedull;
constexpr std::uint64_t kSelectionSweepSeed = 0x5e1ec7ull;

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.num_queries < 1) {
    throw InvalidParameter("scenario needs at least one query");
  }
  if (!(cfg.gt_length_min > 0.0) || cfg.gt_length_max < cfg.gt_length_min) {
    throw InvalidParameter("ground-truth length range is empty or negative");
  }
  if (!(cfg.video_duration > cfg.gt_length_max)) {
    throw InvalidParameter("video duration must exceed the longest moment");
  }
  if (cfg.systems.empty()) {
    throw InvalidParameter("scenario needs at least one system profile");
  }
  for (const SystemProfile& profile : cfg.systems) {
    if (profile.name.empty()) {
      throw InvalidParameter("system profiles need names");
    }
    if (profile.list_length < 1) {
      throw InvalidParameter("list length must be >= 1 for '" + profile.name +
                             "'");
    }
    if (profile.redundancy < 0 || profile.redundancy >= profile.list_length) {
      throw InvalidParameter("redundancy must lie in [0, list length) for '" +
                             profile.name + "'");
    }
    if (!(profile.rank_quality >= 0.0 && profile.rank_quality <= 1.0)) {
      throw InvalidParameter("rank quality must lie in [0, 1] for '" +
                             profile.name + "'");
    }
    if (!(profile.localisation_noise >= 0.0)) {
      throw InvalidParameter("localisation noise must be >= 0 for '" +
                             profile.name + "'");
    }
    if (profile.rank_cap < 0 || profile.rank_cap > profile.list_length) {
      throw InvalidParameter("rank cap must lie in [0, list length] for '" +
                             profile.name + "'");
    }
  }
}

std::string query_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "q%04d", index);
  return buf;
}

// A decoy window on the same timeline that never overlaps the annotation, so
// its IoU is exactly zero and it can only pad the list, not improve it.
Interval draw_decoy(Rng& rng, const Interval& gt, const ScenarioConfig& cfg) {
  double length = rng.uniform(cfg.gt_length_min, cfg.gt_length_max);
  const double left_room = gt.start();
  const double right_room = cfg.video_duration - gt.end();
  length = std::min(length, std::max(left_room, right_room));

  const double left_slack = std::max(left_room - length, 0.0);
  const double right_slack = std::max(right_room - length, 0.0);
  const double side = rng.uniform();
  const double offset = rng.uniform();
  bool left;
  if (left_slack + right_slack > 0.0) {
    left = side * (left_slack + right_slack) < left_slack;
  } else {
    left = left_room >= right_room;
  }
  const double start = left ? offset * left_slack : gt.end() + offset * right_slack;
  return Interval(start, start + length);
}

RankedList draw_list(Rng& rng, const std::string& query_id, const Interval& gt,
                     const SystemProfile& profile, const ScenarioConfig& cfg) {
  const int length = profile.list_length;
  const double sigma = profile.localisation_noise;

  // Draw order is fixed (best shot, decoys, placement) and independent of
  // redundancy, so profiles sharing a seed_tag stay in lockstep.
  const double jitter_start = rng.normal(0.0, sigma);
  const double jitter_end = rng.normal(0.0, sigma);
  double best_start =
      std::clamp(gt.start() + jitter_start, 0.0, cfg.video_duration);
  double best_end = std::clamp(gt.end() + jitter_end, 0.0, cfg.video_duration);
  best_end = std::max(best_end, best_start);
  const Interval best(best_start, best_end);

  std::vector<Interval> decoys;
  decoys.reserve(static_cast<std::size_t>(length - 1));
  for (int i = 0; i < length - 1; ++i) {
    decoys.push_back(draw_decoy(rng, gt, cfg));
  }

  const double place = rng.uniform();
  const double depth = rng.uniform();
  const int cap_limit = length - profile.redundancy;
  const int cap = profile.rank_cap > 0 ? std::min(profile.rank_cap, cap_limit)
                                       : cap_limit;
  int best_rank = 1;
  if (place >= profile.rank_quality && cap >= 2) {
    best_rank = 2 + static_cast<int>(depth * (cap - 1));
  }

  RankedList list;
  list.query_id = query_id;
  list.moments.reserve(static_cast<std::size_t>(length));
  std::size_t next_decoy = 0;
  for (int rank = 1; rank <= length; ++rank) {
    if (rank == best_rank) {
      list.moments.push_back(best);
    } else {
      list.moments.push_back(decoys[next_decoy++]);
    }
  }
  for (int j = 1; j <= profile.redundancy; ++j) {
    list.moments[static_cast<std::size_t>(best_rank - 1 + j)] = best;
  }
  return list;
}

}  // namespace

DatasetBundle generate_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);

  DatasetBundle bundle;
  bundle.runs.reserve(cfg.systems.size());
  for (const SystemProfile& profile : cfg.systems) {
    bundle.runs.push_back(Run{profile.name, {}});
  }

  for (int q = 0; q < cfg.num_queries; ++q) {
    const std::string query_id = query_name(q);
    Rng gt_rng(derive_seed(cfg.seed,
                           {kAnnotationStream, static_cast<std::uint64_t>(q)}));
    const double length =
        gt_rng.uniform(cfg.gt_length_min, cfg.gt_length_max);
    const double start = gt_rng.uniform(0.0, cfg.video_duration - length);
    const Interval moment(start, start + length);
    bundle.gt.add(query_id, moment, cfg.video_duration);

    for (std::size_t s = 0; s < cfg.systems.size(); ++s) {
      const SystemProfile& profile = cfg.systems[s];
      Rng rng(derive_seed(cfg.seed, {kListStream,
                                     static_cast<std::uint64_t>(q),
                                     profile.seed_tag}));
      bundle.runs[s].lists.emplace(
          query_id, draw_list(rng, query_id, moment, profile, cfg));
    }
  }
  return bundle;
}

ScenarioConfig bundled_scenario_config() {
  ScenarioConfig cfg;
  cfg.num_queries = 500;
  cfg.video_duration = 90.0;
  cfg.gt_length_min = 6.0;
  cfg.gt_length_max = 18.0;
  cfg.seed = kBundledScenarioSeed;
  cfg.systems = {
      {"strong", 0.8, 0.85, 0, 10, 7, 1},
      {"strong-dup", 0.8, 0.85, 3, 10, 7, 1},
      {"balanced", 1.6, 0.60, 0, 10, 0, 2},
      {"loose", 3.0, 0.45, 0, 10, 0, 3},
      {"shuffled", 1.2, 0.30, 0, 10, 0, 4},
      {"weak", 6.0, 0.20, 0, 10, 0, 5},
  };
  return cfg;
}

DatasetBundle bundled_scenario() {
  const ScenarioConfig cfg = bundled_scenario_config();
  DatasetBundle bundle = generate_scenario(cfg);
  bundle.metadata["scenario"] = "bundled-v1";
  bundle.metadata["seed"] = std::to_string(cfg.seed);
  bundle.metadata["queries"] = std::to_string(cfg.num_queries);
  return bundle;
}

SelectionSweep bundled_selection_sweep() {
  std::vector<SystemProfile> systems;
  systems.reserve(640);
  for (int noise_step = 0; noise_step < 8; ++noise_step) {
    for (int quality_step = 0; quality_step < 8; ++quality_step) {
      for (int replicate = 0; replicate < 10; ++replicate) {
        const int index = noise_step * 80 + quality_step * 10 + replicate;
        char name[8];
        std::snprintf(name, sizeof(name), "m%03d", index);
        SystemProfile profile;
        profile.name = name;
        profile.localisation_noise = 0.5 + 0.4 * noise_step;
        profile.rank_quality = 0.30 + 0.09 * quality_step;
        profile.redundancy = 0;
        // Longer than any rank cut in the selection grid, so depth-10 recall
        // can miss the best shot and stays informative across the grid.
        profile.list_length = 15;
        profile.seed_tag = static_cast<std::uint64_t>(index) + 1;
        systems.push_back(std::move(profile));
      }
    }
  }

  ScenarioConfig validation;
  validation.num_queries = 120;
  validation.video_duration = 90.0;
  validation.gt_length_min = 6.0;
  validation.gt_length_max = 18.0;
  validation.systems = systems;
  validation.seed = derive_seed(kSelectionSweepSeed, {1});

  ScenarioConfig test = validation;
  test.num_queries = 400;
  test.seed = derive_seed(kSelectionSweepSeed, {2});

  DatasetBundle validation_bundle = generate_scenario(validation);
  DatasetBundle test_bundle = generate_scenario(test);

  SelectionSweep sweep;
  sweep.validation_gt = std::move(validation_bundle.gt);
  sweep.validation_runs = std::move(validation_bundle.runs);
  sweep.test_gt = std::move(test_bundle.gt);
  sweep.test_runs = std::move(test_bundle.runs);
  return sweep;
}

}  // namespace vmreval
