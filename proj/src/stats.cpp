#include "allee/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "allee/errors.hpp"

namespace allee {

namespace {
constexpr double kZ95 = 1.959963984540054;  // Phi^-1(0.975)
}

ConfidenceInterval wilson_interval(std::size_t k, std::size_t n) {
  if (n == 0) throw InputError("Wilson interval needs at least one trial");
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      kZ95 * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  ConfidenceInterval ci{std::max(0.0, center - half),
                        std::min(1.0, center + half)};
  // At the boundaries the interval closes exactly; rounding must not pull
  // the endpoint off 0 or 1.
  if (k == 0) ci.lo = 0.0;
  if (k == n) ci.hi = 1.0;
  return ci;
}

ConfidenceInterval t_interval(double mean, double sample_sd, std::size_t n) {
  if (n == 0) throw InputError("t interval needs at least one observation");
  if (n == 1) return {mean, mean};
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double tq = boost::math::quantile(dist, 0.975);
  const double half = tq * sample_sd / std::sqrt(static_cast<double>(n));
  return {mean - half, mean + half};
}

}  // namespace allee
