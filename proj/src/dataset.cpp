#include "vmreval/dataset.hpp"

#include "vmreval/errors.hpp"

namespace vmreval {

void GroundTruth::add(const std::string& query_id, const Interval& segment,
                      std::optional<double> duration) {
  if (duration && !(*duration > 0.0)) {
    throw InvalidParameter("duration for query '" + query_id +
                           "' must be positive");
  }
  const auto [it, inserted] =
      entries_.emplace(query_id, Annotation{segment, duration});
  (void)it;
  if (!inserted) {
    throw DuplicateKey("query '" + query_id + "' annotated twice");
  }
}

bool GroundTruth::contains(const std::string& query_id) const {
  return entries_.count(query_id) != 0;
}

const Annotation& GroundTruth::at(const std::string& query_id) const {
  const auto it = entries_.find(query_id);
  if (it == entries_.end()) {
    throw MissingAnnotation("no annotation for query '" + query_id + "'");
  }
  return it->second;
}

RelevanceList relevance_list(const RankedList& list, const GroundTruth& gt) {
  const Annotation& ann = gt.at(list.query_id);
  RelevanceList rel;
  rel.query_id = list.query_id;
  rel.scores.reserve(list.moments.size());
  for (const Interval& moment : list.moments) {
    rel.scores.push_back(temporal_iou(moment, ann.segment));
  }
  return rel;
}

}  // namespace vmreval
