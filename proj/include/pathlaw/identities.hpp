#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathlaw/errors.hpp"
#include "pathlaw/exp_functional.hpp"
#include "pathlaw/log_math.hpp"
#include "pathlaw/parallel.hpp"
#include "pathlaw/pl_path.hpp"
#include "pathlaw/random.hpp"
#include "pathlaw/transforms.hpp"

namespace pathlaw {

// Outcome of a deterministic identity check. For refinement-based checks the
// trace holds (grid_n or c, residual) and max_residual is the final entry.
struct IdentityReport {
  std::string identity_name;
  std::size_t n_paths = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::optional<std::vector<std::pair<double, double>>> refinement_trace;
  bool passed = false;
  std::uint64_t seed = 0;
};

// Seeded random PL paths: k knots (k uniform in [min_knots, max_knots]),
// interior times uniform on [0, t], values uniform on [-amplitude, amplitude].
struct RandomPathSpec {
  double horizon = 1.0;
  std::size_t min_knots = 8;
  std::size_t max_knots = 64;
  double amplitude = 3.0;
  bool pin_zero = true;
};

inline PlPath random_pl_path(std::uint64_t seed, std::uint64_t index,
                             const RandomPathSpec &spec = {}) {
  PhiloxStream rng(seed, index, Substream::knots);
  const std::size_t span = spec.max_knots - spec.min_knots + 1;
  const std::size_t k =
      spec.min_knots + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * span));
  std::vector<double> inner(k - 2);
  for (double &s : inner) {
    s = rng.uniform() * spec.horizon;
  }
  std::sort(inner.begin(), inner.end());
  auto draw = [&] { return spec.amplitude * (2.0 * rng.uniform() - 1.0); };
  detail::KnotBuilder builder(spec.horizon, k);
  const double start = draw();
  builder.push(0.0, spec.pin_zero ? 0.0 : start);
  for (double s : inner) {
    builder.push(s, draw());
  }
  builder.push(spec.horizon, draw());
  return std::move(builder).finish();
}

inline std::vector<PlPath> random_pl_paths(std::uint64_t seed, std::size_t count,
                                           const RandomPathSpec &spec = {}) {
  std::vector<PlPath> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_pl_path(seed, i, spec));
  }
  return out;
}

inline constexpr std::array<std::string_view, 14> kIdentityNames = {
    "m_involution",        "g_involution", "m_reversal",   "g_reversal",
    "pitman_preservation", "lrevp",        "bvs_endpoint", "tc_involution",
    "qa1",                 "s1_roundtrip", "s2_roundtrip", "zform_consistency",
    "mmin_mirror",         "prop31_zscale"};

inline bool is_refinement_identity(std::string_view name) {
  return name == "tc_involution" || name == "qa1" || name == "prop31_zscale";
}

inline double default_identity_tolerance(std::string_view name) {
  if (is_refinement_identity(name)) {
    return 1e-4;
  }
  if (name == "zform_consistency") {
    return 1e-8;
  }
  return 1e-9;
}

inline constexpr std::array<std::size_t, 3> kRefinementGrids = {64, 256, 1024};

// Applied to the computed side of an exact identity before comparison;
// lets tests inject faults.
using OutputHook = std::function<PlPath(const PlPath &)>;

namespace detail {

inline double mixed_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline PlPath hooked(const OutputHook &hook, PlPath p) { return hook ? hook(p) : std::move(p); }

// Residual of an exact (closed PL algebra) identity for one path.
inline double exact_residual(std::string_view name, const PlPath &phi, const OutputHook &hook) {
  const double end = phi.terminal();
  if (name == "m_involution") {
    return sup_distance(hooked(hook, transform_M(transform_M(phi))), phi);
  }
  if (name == "g_involution") {
    return sup_distance(hooked(hook, transform_G(transform_G(phi))), phi);
  }
  if (name == "m_reversal") {
    return sup_distance(hooked(hook, time_reverse(transform_M(phi))),
                        transform_M(time_reverse(phi)));
  }
  if (name == "g_reversal") {
    return sup_distance(hooked(hook, time_reverse(transform_G(phi))),
                        transform_G(time_reverse(phi)));
  }
  if (name == "pitman_preservation") {
    return sup_distance(hooked(hook, transform_P(transform_M(phi))), transform_P(phi));
  }
  if (name == "lrevp") {
    // 2 max_{[s,t]} M(phi) - M(phi)(s) = 2 max_{[s,t]} phi - phi_s - 2 phi_t
    const PlPath m = transform_M(phi);
    const PlPath lhs = affine_combine(2.0, suffix_extremum(m, Extremum::max), -1.0, m);
    const PlPath top = suffix_extremum(phi, Extremum::max);
    const PlPath rhs = linear_combination({Term{2.0, &top}, Term{-1.0, &phi}}, -2.0 * end);
    return sup_distance(hooked(hook, lhs), rhs);
  }
  if (name == "bvs_endpoint") {
    const PlPath m = hooked(hook, transform_M(phi));
    const double t = phi.horizon();
    double r = std::max(std::abs(m(0.0) - phi.initial()), std::abs(m(t) + end));
    // T^(c)(phi)(t) through the Z-form route, which does not pin endpoints.
    for (double c : {0.5, 1.0, 2.0}) {
      r = std::max(r, std::abs(z_form_value(phi, c, t, +1) + end));
    }
    return r;
  }
  if (name == "s1_roundtrip") {
    return sup_distance(hooked(hook, reconstruct_S1(transform_P(phi), end)), phi);
  }
  if (name == "s2_roundtrip") {
    return sup_distance(hooked(hook, reconstruct_S2(transform_P(phi), end)), transform_M(phi));
  }
  if (name == "mmin_mirror") {
    return sup_distance(hooked(hook, transform_M_min(phi)), negate(transform_M(negate(phi))));
  }
  throw ConfigError("unknown identity '" + std::string(name) + "'");
}

// Z-form values against phi_s and T^(c)(phi)(s) at 20 seeded random times.
inline double zform_residual(const PlPath &phi, std::uint64_t seed, std::uint64_t index) {
  PhiloxStream rng(seed, index, Substream::bridge);
  double worst = 0.0;
  for (double c : {0.25, 1.0, 4.0}) {
    const LogFunctional f(phi, c);
    for (int i = 0; i < 20; ++i) {
      const double s = rng.uniform() * phi.horizon();
      worst = std::max(worst, mixed_error(z_form_value(f, s, -1), phi(s)));
      worst = std::max(worst, mixed_error(z_form_value(f, s, +1), tc_value(f, s)));
    }
  }
  return worst;
}

// Refinement residual at adaptive resolution n for one path.
inline double refinement_residual(std::string_view name, const PlPath &phi, std::size_t n) {
  double worst = 0.0;
  if (name == "tc_involution") {
    const PlPath once = transform_Tc_adaptive(phi, 1.0, n);
    const LogFunctional again(once, 1.0);
    for (double s : once.times()) {
      worst = std::max(worst, std::abs(tc_value(again, s) - phi(s)));
    }
  } else if (name == "qa1") {
    // 1/A_s(T phi) = 1/A_s(phi) + (e^{2 phi_t} - 1)/A_t(phi), relative error.
    const PlPath once = transform_Tc_adaptive(phi, 1.0, n);
    const LogFunctional lhs(once, 1.0);
    const LogFunctional base(phi, 1.0);
    const double shift = std::expm1(2.0 * phi.terminal()) * std::exp(-base.log_A_total());
    for (double s : once.times()) {
      if (s == 0.0) {
        continue;
      }
      const double want = std::exp(-base.log_A(s)) + shift;
      const double got = std::exp(-lhs.log_A(s));
      worst = std::max(worst, std::abs(got / want - 1.0));
    }
  } else if (name == "prop31_zscale") {
    // Z(c T^(c)(phi)) = Z(c phi), compared in the log domain.
    for (double c : {0.5, 2.0}) {
      const PlPath once = transform_Tc_adaptive(phi, c, n);
      const LogFunctional lhs(once, c);
      const LogFunctional base(phi, c);
      for (double s : once.times()) {
        if (s == 0.0) {
          continue;
        }
        worst = std::max(worst, mixed_error(lhs.log_Z(s), base.log_Z(s)));
      }
    }
  } else {
    throw ConfigError("unknown refinement identity '" + std::string(name) + "'");
  }
  return worst;
}

inline double max_over_paths(std::span<const PlPath> paths, unsigned threads,
                             const std::function<double(std::size_t)> &residual) {
  std::vector<double> r(paths.size(), 0.0);
  parallel_for(paths.size(), resolve_threads(threads), [&](std::size_t i) { r[i] = residual(i); });
  double worst = 0.0;
  for (double x : r) {
    worst = std::max(worst, x);
  }
  return worst;
}

}  // namespace detail

// Runs one registered identity over all paths. Exact identities report the
// worst sup residual; refinement identities report a trace over the
// adaptive resolutions {64, 256, 1024} and pass when it strictly decreases
// and ends within tolerance.
inline IdentityReport check_identity(std::string_view name, std::span<const PlPath> paths,
                                     double tolerance, std::uint64_t seed = 0,
                                     const OutputHook &hook = {}, unsigned threads = 0) {
  if (std::find(kIdentityNames.begin(), kIdentityNames.end(), name) == kIdentityNames.end()) {
    throw ConfigError("unknown identity '" + std::string(name) + "'");
  }
  IdentityReport report;
  report.identity_name = std::string(name);
  report.n_paths = paths.size();
  report.tolerance = tolerance;
  report.seed = seed;

  if (is_refinement_identity(name)) {
    std::vector<std::pair<double, double>> trace;
    for (std::size_t n : kRefinementGrids) {
      const double r = detail::max_over_paths(paths, threads, [&](std::size_t i) {
        return detail::refinement_residual(name, paths[i], n);
      });
      trace.emplace_back(static_cast<double>(n), r);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      decreasing = decreasing && trace[i].second < trace[i - 1].second;
    }
    report.max_residual = trace.back().second;
    report.passed = decreasing && report.max_residual <= tolerance;
    report.refinement_trace = std::move(trace);
    return report;
  }

  if (name == "zform_consistency") {
    report.max_residual = detail::max_over_paths(
        paths, threads, [&](std::size_t i) { return detail::zform_residual(paths[i], seed, i); });
  } else {
    report.max_residual = detail::max_over_paths(paths, threads, [&](std::size_t i) {
      return detail::exact_residual(name, paths[i], hook);
    });
  }
  report.passed = report.max_residual <= tolerance;
  return report;
}

inline std::vector<IdentityReport> check_all_identities(std::span<const PlPath> paths,
                                                        std::uint64_t seed,
                                                        unsigned threads = 0) {
  std::vector<IdentityReport> out;
  for (auto name : kIdentityNames) {
    out.push_back(check_identity(name, paths, default_identity_tolerance(name), seed, {}, threads));
  }
  return out;
}

enum class SweepDirection { to_zero, to_infinity };

inline constexpr double kMonotoneSlack = 1e-10;
inline constexpr double kConvergenceFactor = 50.0;
// Below this a sweep distance is numerically zero.
inline constexpr double kSweepFloor = 1e-12;

// T^(c)(phi) against its limit (G as c -> 0, M as c -> infinity), measured at
// the grid times. Passes when the trace is nonincreasing within 1e-10 and the
// last distance is below the first over 50 (or already at the floor).
inline IdentityReport sweep_c(const PlPath &phi, SweepDirection direction,
                              std::span<const double> c_values, const Grid &grid) {
  if (c_values.empty()) {
    throw ConfigError("sweep needs at least one c value");
  }
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    if (!(c_values[i] > 0.0)) {
      throw ConfigError("c values must be positive");
    }
    if (i > 0) {
      const bool toward = direction == SweepDirection::to_zero ? c_values[i] < c_values[i - 1]
                                                               : c_values[i] > c_values[i - 1];
      if (!toward) {
        throw ConfigError("c values must be ordered toward the limit");
      }
    }
  }
  if (direction == SweepDirection::to_infinity && phi.initial() != 0.0) {
    throw PreconditionError("convergence to M needs phi_0 = 0");
  }
  const PlPath limit =
      direction == SweepDirection::to_zero ? transform_G(phi) : transform_M(phi);
  const auto times = grid.times();
  std::vector<std::pair<double, double>> trace;
  for (double c : c_values) {
    trace.emplace_back(c, max_distance_at(transform_Tc(phi, c, grid), limit, times));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    monotone = monotone && trace[i].second <= trace[i - 1].second + kMonotoneSlack;
  }
  IdentityReport report;
  report.identity_name =
      direction == SweepDirection::to_zero ? "sweep_c_to_zero" : "sweep_c_to_infinity";
  report.n_paths = 1;
  report.max_residual = trace.back().second;
  report.tolerance = std::max(trace.front().second / kConvergenceFactor, kSweepFloor);
  report.passed = monotone && report.max_residual <= report.tolerance;
  report.refinement_trace = std::move(trace);
  return report;
}

// (1/c_n) log(a_n + b_n) -> max{alpha, beta}, given log a_n and log b_n.
// Default tolerance log(2)/c_last + 1e-12 bounds the residual when
// (1/c) log a and (1/c) log b sit exactly at their limits.
inline IdentityReport lfund_check(std::span<const double> log_a, std::span<const double> log_b,
                                  std::span<const double> c, double alpha, double beta,
                                  std::optional<double> tolerance = std::nullopt) {
  if (log_a.size() != log_b.size() || log_a.size() != c.size() || c.empty()) {
    throw ConfigError("lfund_check needs three nonempty sequences of equal length");
  }
  const double target = std::max(alpha, beta);
  std::vector<std::pair<double, double>> trace;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) {
      throw ConfigError("c_n must be positive");
    }
    trace.emplace_back(c[i], std::abs(log_add_exp(log_a[i], log_b[i]) / c[i] - target));
  }
  IdentityReport report;
  report.identity_name = "lfund_check";
  report.n_paths = 0;
  report.max_residual = trace.back().second;
  report.tolerance = tolerance.value_or(std::log(2.0) / c.back() + 1e-12);
  report.passed = report.max_residual <= report.tolerance;
  report.refinement_trace = std::move(trace);
  return report;
}

struct IndexedPath {
  double index;
  PlPath path;
};

inline bool is_monotone(const PlPath &p, double slack = kMonotoneSlack) {
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < p.size(); ++i) {
    up = up && p.value(i) >= p.value(i - 1) - slack;
    down = down && p.value(i) <= p.value(i - 1) + slack;
  }
  return up || down;
}

// Uniform convergence of a monotone family: each member must be monotone in
// s; passes when sup residuals to the limit (at member knots) are
// nonincreasing in the index.
inline IdentityReport dini_uniform_check(std::span<const IndexedPath> family,
                                         const PlPath &limit) {
  if (family.empty()) {
    throw ConfigError("dini check needs a nonempty family");
  }
  std::vector<std::pair<double, double>> trace;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto &member = family[i];
    if (i > 0 && !(member.index > family[i - 1].index)) {
      throw ConfigError("family indices must increase");
    }
    if (!is_monotone(member.path)) {
      throw PreconditionError("family member at index " + std::to_string(member.index) +
                              " is not monotone in s");
    }
    trace.emplace_back(member.index, max_distance_at(member.path, limit, member.path.times()));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    monotone = monotone && trace[i].second <= trace[i - 1].second + kMonotoneSlack;
  }
  IdentityReport report;
  report.identity_name = "dini_uniform_check";
  report.n_paths = family.size();
  report.max_residual = trace.back().second;
  report.tolerance = trace.front().second + kMonotoneSlack;
  report.passed = monotone;
  report.refinement_trace = std::move(trace);
  return report;
}

// The family c -> T^(c)(phi) - phi on the grid, with limit M(phi) - phi.
inline std::vector<IndexedPath> tc_minus_identity_family(const PlPath &phi,
                                                         std::span<const double> c_values,
                                                         const Grid &grid) {
  const auto times = grid.times();
  const auto base = detail::sample_sorted(phi, times);
  std::vector<IndexedPath> family;
  for (double c : c_values) {
    const PlPath tc = transform_Tc(phi, c, grid);
    std::vector<double> v(tc.values().begin(), tc.values().end());
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] -= base[k];
    }
    family.push_back({c, PlPath::sampled(grid, std::move(v))});
  }
  return family;
}

}  // namespace pathlaw
