#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace pathlaw {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), pivoting on the larger term; -inf is the additive identity.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) {
    return b;
  }
  if (b == kNegInf) {
    return a;
  }
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log((e^x - 1) / x), with the x -> 0 limit 0.
inline double log_expm1_over_x(double x) {
  if (x == 0.0) {
    return 0.0;
  }
  if (x > 30.0) {
    return x + std::log1p(-std::exp(-x)) - std::log(x);
  }
  if (x < -30.0) {
    return std::log1p(-std::exp(x)) - std::log(-x);
  }
  return std::log(std::expm1(x) / x);
}

// Slopes below this magnitude are treated as flat segments.
inline constexpr double kFlatSlope = 1e-12;

// log of int_0^len exp(2 c (start + slope u)) du.
inline double log_segment_integral(double c, double start, double slope, double len) {
  if (len <= 0.0) {
    return kNegInf;
  }
  const double base = 2.0 * c * start + std::log(len);
  if (std::abs(slope) < kFlatSlope) {
    return base;
  }
  return base + log_expm1_over_x(2.0 * c * slope * len);
}

}  // namespace pathlaw
