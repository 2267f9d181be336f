#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace pathlaw {

struct QuadratureResult {
  double value;
  std::size_t panels;
  bool converged;
};

// Composite Simpson on [a, b] with panel doubling and one Richardson step;
// stops once successive extrapolated values agree to rel_tol.
inline QuadratureResult simpson_richardson(const std::function<double(double)> &f, double a,
                                           double b, double rel_tol = 1e-9,
                                           std::size_t max_panels = std::size_t{1} << 20) {
  if (!(b > a)) {
    return {0.0, 0, true};
  }
  // Panels are pairs of subintervals; keep function values across doublings.
  std::size_t n = 2;
  double h = (b - a) / static_cast<double>(n);
  const double fa = f(a);
  const double fb = f(b);
  double sum_even = 0.0;  // interior points at even indices
  double sum_odd = f(a + h);
  auto simpson = [&]() { return h / 3.0 * (fa + fb + 4.0 * sum_odd + 2.0 * sum_even); };
  double prev = simpson();
  double prev_rich = prev;
  bool have_rich = false;
  while (n < 2 * max_panels) {
    sum_even += sum_odd;
    sum_odd = 0.0;
    n *= 2;
    h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 1; i < n; i += 2) {
      sum_odd += f(a + h * static_cast<double>(i));
    }
    const double cur = simpson();
    const double rich = cur + (cur - prev) / 15.0;
    if (have_rich && std::abs(rich - prev_rich) <= rel_tol * std::abs(rich)) {
      return {rich, n / 2, true};
    }
    prev = cur;
    prev_rich = rich;
    have_rich = true;
  }
  return {prev_rich, n / 2, false};
}

}  // namespace pathlaw
