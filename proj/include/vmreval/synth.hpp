#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vmreval/io.hpp"

namespace vmreval {

// Behavioural knobs for one synthetic retrieval system. Each query gets one
// "best shot" (the annotated moment with Gaussian boundary jitter) buried in
// decoy windows that never overlap the annotation; redundancy replaces the
// decoys right after the best shot with exact copies of it, mimicking a
// system that returns the same peak repeatedly.
struct SystemProfile {
  std::string name;
  double localisation_noise = 0.0;  // boundary jitter std dev, seconds
  double rank_quality = 1.0;  // probability the best shot lands at rank 1
  int redundancy = 0;         // copies of the best shot inserted behind it
  int list_length = 10;
  // Highest rank the best shot may take; 0 means as deep as redundancy
  // allows. Two profiles that should differ only in redundancy need the same
  // explicit cap.
  int rank_cap = 0;
  // Profiles sharing a tag draw identical randomness, so a pair differing
  // only in redundancy produces identical lists outside the inserted copies.
  std::uint64_t seed_tag = 0;
};

struct ScenarioConfig {
  int num_queries = 100;
  double video_duration = 90.0;
  double gt_length_min = 6.0;
  double gt_length_max = 18.0;
  std::vector<SystemProfile> systems;
  std::uint64_t seed = 0;
};

// Draws one annotated moment per query and one ranked list per (query,
// system). Deterministic in cfg.seed; each (query, seed_tag) pair has its own
// derived stream, so regeneration is byte-identical and independent of
// evaluation order.
DatasetBundle generate_scenario(const ScenarioConfig& cfg);

// The six-system, 500-query scenario every bundled experiment runs on:
// systems span strong/weak ranking, tight/loose localisation, and one
// redundant twin of the strongest profile.
DatasetBundle bundled_scenario();

// Its configuration, exposed so callers can rescale the query count or
// reseed without redefining the profiles.
ScenarioConfig bundled_scenario_config();

// A model-zoo sweep for selection experiments: 640 variants spanning a
// localisation-noise x rank-quality grid (ten seeds each), run on disjoint
// validation and test query sets.
struct SelectionSweep {
  GroundTruth validation_gt;
  GroundTruth test_gt;
  std::vector<Run> validation_runs;
  std::vector<Run> test_runs;
};

SelectionSweep bundled_selection_sweep();

}  // namespace vmreval
