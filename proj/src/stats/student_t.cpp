#include <cmath>
#include <limits>
#include <string>

#include "coco/errors.hpp"
#include "coco/stats.hpp"

namespace coco {

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation. Converges
// quickly for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    // even step
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    // odd step
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw InputDomainError("incomplete beta continued fraction did not converge");
}

// y = 1 - x, passed separately so callers can supply it without
// cancellation.
double incomplete_beta(double a, double b, double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InputDomainError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InputDomainError("incomplete beta needs x in [0, 1]");
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw InputDomainError("Student-t needs df > 0");
  if (std::isnan(t)) throw InputDomainError("Student-t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double t2 = t * t;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

double student_t_cdf(double t, double df) {
  const double tail = student_t_two_sided_p(t, df) / 2.0;
  return t < 0.0 ? tail : 1.0 - tail;
}

}  // namespace coco
