#pragma once

#include <cstddef>

namespace allee {

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% Wilson score interval for k successes out of n Bernoulli trials.
/// Exact at the boundaries: k = n gives hi = 1, k = 0 gives lo = 0.
/// Throws InputError for n = 0.
ConfidenceInterval wilson_interval(std::size_t k, std::size_t n);

/// 95% Student-t interval for a sample mean. n = 1 returns the degenerate
/// interval [mean, mean].
ConfidenceInterval t_interval(double mean, double sample_sd, std::size_t n);

}  // namespace allee
