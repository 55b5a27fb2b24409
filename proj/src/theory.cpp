#include "vmreval/theory.hpp"

#include <cmath>
#include <limits>

#include "vmreval/errors.hpp"

namespace vmreval {

namespace {

// Rational approximations of erf/erfc after W. J. Cody, "Rational Chebyshev
// approximation for the error function" (1969); coefficients from the netlib
// SPECFUN reference implementation.
const double kErfA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                         3.77485237685302021e+02, 3.20937758913846947e+03,
                         1.85777706184603153e-01};
const double kErfB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                         1.28261652607737228e+03, 2.84423683343917062e+03};
const double kErfC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                         6.61191906371416295e+01, 2.98635138197400131e+02,
                         8.81952221241769090e+02, 1.71204761263407058e+03,
                         2.05107837782607147e+03, 1.23033935479799725e+03,
                         2.15311535474403846e-08};
const double kErfD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                         5.37181101862009858e+02, 1.62138957456669019e+03,
                         3.29079923573345963e+03, 4.36261909014324716e+03,
                         3.43936767414372164e+03, 1.23033935480374942e+03};
const double kErfP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                         1.25781726111229246e-01, 1.60837851487422766e-02,
                         6.58749161529837803e-04, 1.63153871373020978e-02};
const double kErfQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                         5.27905102951428412e-01, 6.05183413124413191e-02,
                         2.33520497626869185e-03};

constexpr double kInvSqrtPi = 5.6418958354775628695e-01;  // 1 / sqrt(pi)

// exp(-x^2) split so the large-argument branches keep full precision.
double exp_neg_square(double x) {
  const double xs = std::trunc(x * 16.0) / 16.0;
  const double del = (x - xs) * (x + xs);
  return std::exp(-xs * xs) * std::exp(-del);
}

// erfc(x) for x >= 0.46875.
double erfc_positive(double x) {
  if (x <= 4.0) {
    double num = kErfC[8] * x;
    double den = x;
    for (int i = 0; i < 7; ++i) {
      num = (num + kErfC[i]) * x;
      den = (den + kErfD[i]) * x;
    }
    return exp_neg_square(x) * (num + kErfC[7]) / (den + kErfD[7]);
  }
  if (x >= 26.5) {
    return 0.0;
  }
  const double z = 1.0 / (x * x);
  double num = kErfP[5] * z;
  double den = z;
  for (int i = 0; i < 4; ++i) {
    num = (num + kErfP[i]) * z;
    den = (den + kErfQ[i]) * z;
  }
  const double tail = z * (num + kErfP[4]) / (den + kErfQ[4]);
  return exp_neg_square(x) * (kInvSqrtPi - tail) / x;
}

// erf(x) for |x| < 0.46875.
double erf_small(double x) {
  const double y = x * x;
  double num = kErfA[4] * y;
  double den = y;
  for (int i = 0; i < 3; ++i) {
    num = (num + kErfA[i]) * y;
    den = (den + kErfB[i]) * y;
  }
  return x * (num + kErfA[3]) / (den + kErfB[3]);
}

double erfc_impl(double x) {
  const double ax = std::fabs(x);
  if (ax < 0.46875) {
    return 1.0 - erf_small(x);
  }
  const double tail = erfc_positive(ax);
  return x > 0.0 ? tail : 2.0 - tail;
}

constexpr double kSqrt2 = 1.4142135623730950488;

}  // namespace

double normal_cdf(double x) {
  if (std::isnan(x)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return 0.5 * erfc_impl(-x / kSqrt2);
}

NoiseTheoryPoint recall1_theory(double r, double theta, double gamma) {
  if (!(gamma > 0.0)) {
    throw InvalidParameter("gamma must be positive");
  }
  NoiseTheoryPoint point;
  point.r = r;
  point.theta = theta;
  point.gamma = gamma;
  const double p = 1.0 - normal_cdf((theta - r) / gamma);
  const double truth = r >= theta ? 1.0 : 0.0;
  point.bias = p - truth;
  point.variance = p * (1.0 - p);
  point.mse = point.bias * point.bias + point.variance;
  return point;
}

NoiseTheoryPoint axiou1_theory(double r, double gamma) {
  if (!(gamma > 0.0)) {
    throw InvalidParameter("gamma must be positive");
  }
  NoiseTheoryPoint point;
  point.r = r;
  point.theta = std::numeric_limits<double>::quiet_NaN();
  point.gamma = gamma;
  point.bias = 0.0;
  point.variance = gamma * gamma;
  point.mse = point.variance;
  return point;
}

std::vector<TheoryRow> theory_sweep(double r,
                                    std::span<const double> theta_grid,
                                    std::span<const double> gamma_grid) {
  if (theta_grid.empty() || gamma_grid.empty()) {
    throw InvalidParameter("theory sweep needs nonempty grids");
  }
  std::vector<TheoryRow> rows;
  rows.reserve(gamma_grid.size() * (theta_grid.size() + 1));
  for (double gamma : gamma_grid) {
    for (double theta : theta_grid) {
      rows.push_back({"R@1", recall1_theory(r, theta, gamma)});
    }
    rows.push_back({"AxIoU@1", axiou1_theory(r, gamma)});
  }
  return rows;
}

}  // namespace vmreval
