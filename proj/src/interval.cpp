#include "vmreval/interval.hpp"

#include <algorithm>
#include <string>

#include "vmreval/errors.hpp"

namespace vmreval {

Interval::Interval(double start, double end) : start_(start), end_(end) {
  // The negated comparison also rejects NaN endpoints.
  if (!(end >= start)) {
    throw InvalidInterval("interval end " + std::to_string(end) +
                          " lies before start " + std::to_string(start));
  }
}

double temporal_iou(const Interval& a, const Interval& b) {
  const double lo = std::max(a.start(), b.start());
  const double hi = std::min(a.end(), b.end());
  const double intersection = std::max(0.0, hi - lo);
  const double union_len = a.length() + b.length() - intersection;
  if (union_len <= 0.0) {
    return 0.0;
  }
  return intersection / union_len;
}

}  // namespace vmreval
