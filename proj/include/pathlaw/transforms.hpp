#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "pathlaw/errors.hpp"
#include "pathlaw/exp_functional.hpp"
#include "pathlaw/log_math.hpp"
#include "pathlaw/pl_path.hpp"

namespace pathlaw {

inline constexpr std::size_t kDefaultTransformGrid = 1024;

// T^(c)(phi)(s) at one time, from a prepared functional of (phi, c):
//   phi_s - (1/c) [ LSE(2c phi_t + log A_s, log(A_t - A_s)) - log A_t ].
// Endpoints are pinned to phi_0 and -phi_t.
inline double tc_value(const LogFunctional &f, double s) {
  const PlPath &phi = f.path();
  const double t = phi.horizon();
  if (!(s >= 0.0 && s <= t)) {
    throw DomainError("time outside [0, t]");
  }
  if (s == 0.0) {
    return phi.initial();
  }
  if (s == t) {
    return -phi.terminal();
  }
  const double c = f.scale();
  const double num = log_add_exp(2.0 * c * phi.terminal() + f.log_A(s), f.log_tail(s));
  return phi(s) - (num - f.log_A_total()) / c;
}

// T^(c) sampled exactly at the grid times and PL-interpolated between them.
inline PlPath transform_Tc(const PlPath &phi, double c, const Grid &out_grid) {
  if (out_grid.horizon() != phi.horizon()) {
    throw DomainError("output grid horizon differs from the path horizon");
  }
  const LogFunctional f(phi, c);
  std::vector<double> values(out_grid.n_steps() + 1);
  for (std::size_t k = 0; k <= out_grid.n_steps(); ++k) {
    values[k] = tc_value(f, out_grid.time(k));
  }
  return PlPath::sampled(out_grid, std::move(values));
}

inline PlPath transform_Tc(const PlPath &phi, double c) {
  return transform_Tc(phi, c, Grid(phi.horizon(), kDefaultTransformGrid));
}

// T^(c) sampled on the n-step grid joined with the knots of phi, then each
// cell bisected until the PL midpoint error is at most tol (default 1/n^2).
// Resolves the thin layers T^(c)(phi) forms where A_t - A_s becomes small,
// which a fixed grid misses; later functionals of the output (A, Z, a second
// T^(c)) then converge at the interpolation rate.
inline PlPath transform_Tc_adaptive(const PlPath &phi, double c, std::size_t n,
                                    std::optional<double> tol = std::nullopt) {
  const Grid grid(phi.horizon(), n);
  const double eps = tol.value_or(1.0 / (static_cast<double>(n) * static_cast<double>(n)));
  const LogFunctional f(phi, c);
  const PlPath grid_path = PlPath::sampled(grid, std::vector<double>(n + 1, 0.0));
  const auto seeds = detail::merged_times(phi, grid_path);
  const double min_width = 64.0 * detail::merge_tol(phi.horizon());

  std::vector<double> ts{seeds.front()};
  std::vector<double> vs{tc_value(f, seeds.front())};
  struct Cell {
    double a, fa, b, fb;
    int depth;
  };
  std::vector<Cell> stack;
  for (std::size_t i = 1; i < seeds.size(); ++i) {
    stack.push_back({seeds[i - 1], vs.back(), seeds[i], tc_value(f, seeds[i]), 0});
    // Depth-first, left cell first, so knots come out in increasing time.
    while (!stack.empty()) {
      const Cell cell = stack.back();
      stack.pop_back();
      const double mid = 0.5 * (cell.a + cell.b);
      const double fm = tc_value(f, mid);
      if (cell.depth < 40 && cell.b - cell.a > min_width &&
          std::abs(fm - 0.5 * (cell.fa + cell.fb)) > eps) {
        stack.push_back({mid, fm, cell.b, cell.fb, cell.depth + 1});
        stack.push_back({cell.a, cell.fa, mid, fm, cell.depth + 1});
        continue;
      }
      ts.push_back(cell.b);
      vs.push_back(cell.fb);
    }
  }
  return PlPath(std::move(ts), std::move(vs));
}

// G(phi)(s) = phi_s - (2s/t) phi_t.
inline PlPath transform_G(const PlPath &phi) {
  const PlPath ramp = PlPath::linear(phi.horizon(), 0.0, 1.0);
  return linear_combination({Term{1.0, &phi}, Term{-2.0 * phi.terminal(), &ramp}});
}

// M(phi)(s) = phi_s - phi_t - |phi_t + m(s) - mbar(s)| + |m(s) - mbar(s)|,
// m the running max and mbar the max over [s, t].
inline PlPath transform_M(const PlPath &phi) {
  const double end = phi.terminal();
  const PlPath gap = affine_combine(1.0, running_max(phi), -1.0,
                                    suffix_extremum(phi, Extremum::max));
  const PlPath shifted = abs_path(add_constant(gap, end));
  const PlPath plain = abs_path(gap);
  return linear_combination({Term{1.0, &phi}, Term{-1.0, &shifted}, Term{1.0, &plain}}, -end);
}

// -M(-phi), written with running and suffix minima.
inline PlPath transform_M_min(const PlPath &phi) {
  const double end = phi.terminal();
  const PlPath gap = affine_combine(1.0, running_min(phi), -1.0,
                                    suffix_extremum(phi, Extremum::min));
  const PlPath shifted = abs_path(add_constant(gap, end));
  const PlPath plain = abs_path(gap);
  return linear_combination({Term{1.0, &phi}, Term{1.0, &shifted}, Term{-1.0, &plain}}, -end);
}

// Pitman's 2M - X: P(phi)(s) = 2 max_{u<=s} phi_u - phi_s.
inline PlPath transform_P(const PlPath &phi) {
  const PlPath top = running_max(phi);
  return affine_combine(2.0, top, -1.0, phi);
}

namespace detail {

// -p(s) + min{2 min_{s<=u<=t} p(u), p(t) + offset}
inline PlPath pitman_inverse(const PlPath &p, double offset) {
  const PlPath floor2 = scale(2.0, suffix_extremum(p, Extremum::min));
  const PlPath cap = PlPath::constant(p.horizon(), p.terminal() + offset);
  return affine_combine(-1.0, p, 1.0, pointwise_min(floor2, cap));
}

}  // namespace detail

// Recovers phi from p = P(phi) and phi_t. Inputs are not checked to be Pitman images.
inline PlPath reconstruct_S1(const PlPath &p, double phi_t) {
  return detail::pitman_inverse(p, phi_t);
}

// Recovers M(phi) from p = P(phi) and phi_t.
inline PlPath reconstruct_S2(const PlPath &p, double phi_t) {
  return detail::pitman_inverse(p, -phi_t);
}

// -(1/c) log{ Z_s int_s^t du/Z_u^2 + (Z_s/Z_t) e^{sign c phi_t} } with Z = Z(c phi).
// sign = -1 gives phi_s back, sign = +1 gives T^(c)(phi)(s).
inline double z_form_value(const LogFunctional &f, double s, int sign) {
  if (sign != 1 && sign != -1) {
    throw DomainError("sign must be +1 or -1");
  }
  const PlPath &phi = f.path();
  const double t = phi.horizon();
  if (!(s > 0.0 && s <= t)) {
    throw DomainError("z-form needs 0 < s <= t");
  }
  const double c = f.scale();
  const double log_zs = f.log_Z(s);
  const double log_zt = f.log_Z(t);
  const double log_int = s == t ? kNegInf : f.log_integral_inv_z_squared(s);
  const double inner = log_add_exp(log_zs + log_int,
                                   log_zs - log_zt + static_cast<double>(sign) * c * phi.terminal());
  return -inner / c;
}

inline double z_form_value(const PlPath &phi, double c, double s, int sign) {
  return z_form_value(LogFunctional(phi, c), s, sign);
}

enum class TransformTag { T, Tc, G, M, P, R, MMin, S1, S2 };

// One of the path transformations plus its parameters. T is Tc with c = 1.
// S1/S2 take the terminal value phi_t of the original path as a parameter.
struct TransformKind {
  TransformTag tag = TransformTag::T;
  double c = 1.0;
  double phi_t = 0.0;
  std::optional<Grid> sampling;

  static TransformKind T() { return {TransformTag::T, 1.0, 0.0, std::nullopt}; }
  static TransformKind Tc(double c) {
    if (!(c > 0.0)) {
      throw DomainError("Tc requires c > 0");
    }
    return {TransformTag::Tc, c, 0.0, std::nullopt};
  }
  static TransformKind G() { return {TransformTag::G, 1.0, 0.0, std::nullopt}; }
  static TransformKind M() { return {TransformTag::M, 1.0, 0.0, std::nullopt}; }
  static TransformKind P() { return {TransformTag::P, 1.0, 0.0, std::nullopt}; }
  static TransformKind R() { return {TransformTag::R, 1.0, 0.0, std::nullopt}; }
  static TransformKind MMin() { return {TransformTag::MMin, 1.0, 0.0, std::nullopt}; }
  static TransformKind S1(double phi_t) { return {TransformTag::S1, 1.0, phi_t, std::nullopt}; }
  static TransformKind S2(double phi_t) { return {TransformTag::S2, 1.0, phi_t, std::nullopt}; }

  TransformKind sampled_on(const Grid &grid) const {
    TransformKind out = *this;
    out.sampling = grid;
    return out;
  }

  double effective_c() const { return tag == TransformTag::T ? 1.0 : c; }

  std::string name() const {
    switch (tag) {
      case TransformTag::T: return "T";
      case TransformTag::Tc: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "Tc(%g)", c);
        return buf;
      }
      case TransformTag::G: return "G";
      case TransformTag::M: return "M";
      case TransformTag::P: return "P";
      case TransformTag::R: return "R";
      case TransformTag::MMin: return "MMin";
      case TransformTag::S1: return "S1";
      case TransformTag::S2: return "S2";
    }
    return "?";
  }
};

inline std::optional<TransformTag> parse_transform_tag(std::string_view name) {
  if (name == "T") return TransformTag::T;
  if (name == "Tc") return TransformTag::Tc;
  if (name == "G") return TransformTag::G;
  if (name == "M") return TransformTag::M;
  if (name == "P") return TransformTag::P;
  if (name == "R") return TransformTag::R;
  if (name == "MMin") return TransformTag::MMin;
  if (name == "S1") return TransformTag::S1;
  if (name == "S2") return TransformTag::S2;
  return std::nullopt;
}

inline PlPath sample_on(const PlPath &path, const Grid &grid) {
  const auto ts = grid.times();
  return PlPath(ts, detail::sample_sorted(path, ts));
}

inline PlPath apply_transform(const TransformKind &kind, const PlPath &phi) {
  switch (kind.tag) {
    case TransformTag::T:
    case TransformTag::Tc:
      return transform_Tc(phi, kind.effective_c(),
                          kind.sampling.value_or(Grid(phi.horizon(), kDefaultTransformGrid)));
    default: break;
  }
  PlPath out = [&] {
    switch (kind.tag) {
      case TransformTag::G: return transform_G(phi);
      case TransformTag::M: return transform_M(phi);
      case TransformTag::P: return transform_P(phi);
      case TransformTag::R: return time_reverse(phi);
      case TransformTag::MMin: return transform_M_min(phi);
      case TransformTag::S1: return reconstruct_S1(phi, kind.phi_t);
      case TransformTag::S2: return reconstruct_S2(phi, kind.phi_t);
      default: throw DomainError("unhandled transform");
    }
  }();
  if (kind.sampling) {
    return sample_on(out, *kind.sampling);
  }
  return out;
}

}  // namespace pathlaw
