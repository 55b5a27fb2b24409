#pragma once

namespace vmreval {

// A closed temporal segment [start, end] in seconds. end >= start is enforced
// at construction; zero-length intervals are legal.
class Interval {
 public:
  Interval(double start, double end);

  double start() const { return start_; }
  double end() const { return end_; }
  double length() const { return end_ - start_; }

  bool operator==(const Interval&) const = default;

 private:
  double start_;
  double end_;
};

// Intersection length over union length, both measured on the real line.
// Symmetric, in [0, 1], and 0 whenever the union has zero length, so two
// identical zero-length segments do not score 1.
double temporal_iou(const Interval& a, const Interval& b);

}  // namespace vmreval
