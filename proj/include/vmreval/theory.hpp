#pragma once

#include <span>
#include <string>
#include <vector>

namespace vmreval {

// Standard normal CDF via a rational erfc approximation (Cody's method),
// accurate to under 1e-14 absolute error on [-8, 8] and 1e-12 relative error
// on [-6, 6].
double normal_cdf(double x);

// Closed-form behaviour of a rank-1 measure when the true relevance r is
// reported as r-hat ~ Normal(r, gamma^2), unclipped. theta is NaN for
// measures that take no threshold.
struct NoiseTheoryPoint {
  double r = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;  // always bias^2 + variance
};

// Recall at rank 1 under annotation noise. The noisy indicator fires when
// r-hat >= theta, so
//   p        = 1 - Phi((theta - r) / gamma)
//   bias     = p - [r >= theta]
//   variance = p (1 - p)
NoiseTheoryPoint recall1_theory(double r, double theta, double gamma);

// The rank-1 running-max average is the reported relevance itself: unbiased,
// variance gamma^2.
NoiseTheoryPoint axiou1_theory(double r, double gamma);

struct TheoryRow {
  std::string measure;  // "R@1" or "AxIoU@1"; theta sits in its own column
  NoiseTheoryPoint point;
};

// Full grid of recall1_theory over theta_grid x gamma_grid plus one
// theta-independent AxIoU@1 row per gamma.
std::vector<TheoryRow> theory_sweep(double r,
                                    std::span<const double> theta_grid,
                                    std::span<const double> gamma_grid);

}  // namespace vmreval
