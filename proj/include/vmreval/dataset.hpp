#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmreval/interval.hpp"

namespace vmreval {

struct Annotation {
  Interval segment;
  // Video length in seconds when known; used to clamp synthetic re-annotation.
  std::optional<double> duration;
};

// The annotated moment for every query, keyed by query id.
class GroundTruth {
 public:
  void add(const std::string& query_id, const Interval& segment,
           std::optional<double> duration = std::nullopt);

  bool contains(const std::string& query_id) const;

  // Throws MissingAnnotation for unknown ids.
  const Annotation& at(const std::string& query_id) const;

  const std::map<std::string, Annotation>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Annotation> entries_;
};

// One system's predictions for one query, best rank first. May be empty or
// shorter than any cutoff; duplicate moments are allowed.
struct RankedList {
  std::string query_id;
  std::vector<Interval> moments;
};

// A full system output over a query set.
struct Run {
  std::string system_id;
  std::map<std::string, RankedList> lists;
};

// Per-rank IoU against the annotated moment, mirroring a RankedList.
struct RelevanceList {
  std::string query_id;
  std::vector<double> scores;
};

// Scores list.moments against the annotation for list.query_id.
RelevanceList relevance_list(const RankedList& list, const GroundTruth& gt);

}  // namespace vmreval
