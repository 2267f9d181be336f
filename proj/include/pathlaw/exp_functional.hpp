#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pathlaw/errors.hpp"
#include "pathlaw/log_math.hpp"
#include "pathlaw/pl_path.hpp"
#include "pathlaw/quadrature.hpp"

namespace pathlaw {

// Exponential functional A_s(c phi) = int_0^s exp(2 c phi_u) du of a PL path,
// held in the log domain. Each linear segment integrates in closed form;
// segments are accumulated by log-sum-exp, forwards (prefix) and backwards
// (tail, log int_s^t) so that neither A_s nor A_t - A_s suffers cancellation.
class LogFunctional {
 public:
  LogFunctional(PlPath path, double c) : path_(std::move(path)), scale_(c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw DomainError("scale c must be positive and finite");
    }
    const std::size_t n = path_.size();
    std::vector<double> seg(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double len = path_.time(k + 1) - path_.time(k);
      const double slope = (path_.value(k + 1) - path_.value(k)) / len;
      seg[k] = log_segment_integral(scale_, path_.value(k), slope, len);
    }
    prefix_logs_.assign(n, kNegInf);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      prefix_logs_[k + 1] = log_add_exp(prefix_logs_[k], seg[k]);
    }
    tail_logs_.assign(n, kNegInf);
    for (std::size_t k = n - 1; k > 0; --k) {
      tail_logs_[k - 1] = log_add_exp(tail_logs_[k], seg[k - 1]);
    }
  }

  const PlPath &path() const { return path_; }
  double scale() const { return scale_; }

  // log A at each knot; the first entry is -inf (A_0 = 0).
  std::span<const double> prefix_logs() const { return prefix_logs_; }

  double log_A_total() const { return prefix_logs_.back(); }

  // log A_s(c phi); -inf at s = 0.
  double log_A(double s) const {
    check_time(s);
    const std::size_t k = path_.segment_index(s);
    return log_add_exp(prefix_logs_[k], partial_head(k, s));
  }

  // log int_s^t exp(2 c phi_u) du; -inf at s = t.
  double log_tail(double s) const {
    check_time(s);
    const std::size_t k = path_.segment_index(s);
    return log_add_exp(partial_tail(k, s), tail_logs_[k + 1]);
  }

  // log Z_s(c phi) = -c phi_s + log A_s(c phi), for s > 0.
  double log_Z(double s) const {
    if (!(s > 0.0)) {
      throw DomainError("log Z is undefined at s = 0");
    }
    return -scale_ * path_(s) + log_A(s);
  }

  // log of int_s^t du / Z_u(c phi)^2 = log(1/A_s - 1/A_t), for 0 < s <= t.
  double log_integral_inv_z_squared(double s) const {
    if (!(s > 0.0)) {
      throw DomainError("integral of 1/Z^2 needs s > 0");
    }
    return log_tail(s) - log_A(s) - log_A_total();
  }

 private:
  void check_time(double s) const {
    if (!(s >= 0.0 && s <= path_.horizon())) {
      throw DomainError("time outside [0, t]");
    }
  }

  double slope(std::size_t k) const {
    return (path_.value(k + 1) - path_.value(k)) / (path_.time(k + 1) - path_.time(k));
  }

  // log int_{t_k}^s on segment k.
  double partial_head(std::size_t k, double s) const {
    return log_segment_integral(scale_, path_.value(k), slope(k), s - path_.time(k));
  }

  // log int_s^{t_{k+1}} on segment k.
  double partial_tail(std::size_t k, double s) const {
    return log_segment_integral(scale_, path_.at_unchecked(s), slope(k), path_.time(k + 1) - s);
  }

  PlPath path_;
  double scale_;
  std::vector<double> prefix_logs_;
  std::vector<double> tail_logs_;
};

inline double log_A(const PlPath &phi, double c, double s) {
  return LogFunctional(phi, c).log_A(s);
}

inline double log_Z(const PlPath &phi, double c, double s) {
  return LogFunctional(phi, c).log_Z(s);
}

enum class IntegralMode { closed_form, quadrature };

// Composite-quadrature value of int_s^t exp(-2 log Z_u) du, integrated
// segment by segment of the path so the integrand is smooth on each piece.
inline QuadratureResult integral_inv_z_squared_quadrature(const LogFunctional &f, double s,
                                                          double rel_tol = 1e-9) {
  const PlPath &phi = f.path();
  const double t = phi.horizon();
  std::vector<double> cuts{s};
  for (double u : phi.times()) {
    if (u > s && u < t) {
      cuts.push_back(u);
    }
  }
  cuts.push_back(t);
  double log_total = kNegInf;
  std::size_t panels = 0;
  bool converged = true;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) {
      continue;
    }
    const double shift = std::max(-2.0 * f.log_Z(a), -2.0 * f.log_Z(b));
    auto integrand = [&](double u) { return std::exp(-2.0 * f.log_Z(u) - shift); };
    const auto piece = simpson_richardson(integrand, a, b, rel_tol);
    panels += piece.panels;
    converged = converged && piece.converged;
    if (piece.value > 0.0) {
      log_total = log_add_exp(log_total, shift + std::log(piece.value));
    }
  }
  return {std::exp(log_total), panels, converged};
}

// int_s^t du / Z_u(c phi)^2. The closed form uses d/ds (1/A_s) = -1/Z_s^2.
inline double integral_inv_z_squared(const PlPath &phi, double c, double s,
                                     IntegralMode mode = IntegralMode::closed_form) {
  if (!(s > 0.0) || !(s <= phi.horizon())) {
    throw DomainError("integral of 1/Z^2 needs 0 < s <= t");
  }
  const LogFunctional f(phi, c);
  if (s == phi.horizon()) {
    return 0.0;
  }
  if (mode == IntegralMode::quadrature) {
    return integral_inv_z_squared_quadrature(f, s).value;
  }
  return std::exp(f.log_integral_inv_z_squared(s));
}

}  // namespace pathlaw
