#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathlaw/errors.hpp"

namespace pathlaw {

// Knots closer than this fraction of the horizon are merged.
inline constexpr double kKnotMergeRelTol = 1e-14;
inline constexpr std::size_t kMaxKnots = 1'000'000;

// Uniform partition {k t / n : k = 0..n} of [0, t].
class Grid {
 public:
  Grid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw DomainError("grid horizon must be positive and finite");
    }
    if (n_steps == 0) {
      throw DomainError("grid needs at least one step");
    }
  }

  double horizon() const { return horizon_; }
  std::size_t n_steps() const { return n_steps_; }
  double step() const { return horizon_ / static_cast<double>(n_steps_); }

  double time(std::size_t k) const {
    if (k >= n_steps_) {
      return horizon_;
    }
    return horizon_ * static_cast<double>(k) / static_cast<double>(n_steps_);
  }

  std::vector<double> times() const {
    std::vector<double> out(n_steps_ + 1);
    for (std::size_t k = 0; k <= n_steps_; ++k) {
      out[k] = time(k);
    }
    return out;
  }

  // Index k with |time(k) - s| <= tol * horizon, if any.
  std::optional<std::size_t> index_of(double s, double tol = 1e-9) const {
    if (!(s >= -tol * horizon_ && s <= horizon_ * (1.0 + tol))) {
      return std::nullopt;
    }
    const double pos = s / step();
    const auto k = static_cast<std::size_t>(std::llround(std::max(pos, 0.0)));
    if (k > n_steps_ || std::abs(time(k) - s) > tol * horizon_) {
      return std::nullopt;
    }
    return k;
  }

 private:
  double horizon_;
  std::size_t n_steps_;
};

// Continuous piecewise-linear path on [0, t], stored as knots
// (times strictly increasing from 0 to t, finite values). Immutable.
class PlPath {
 public:
  PlPath(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {
    validate();
  }

  PlPath(std::initializer_list<std::pair<double, double>> knots) {
    times_.reserve(knots.size());
    values_.reserve(knots.size());
    for (const auto &[s, v] : knots) {
      times_.push_back(s);
      values_.push_back(v);
    }
    validate();
  }

  static PlPath zero(double horizon) { return constant(horizon, 0.0); }

  static PlPath constant(double horizon, double value) {
    return PlPath({0.0, horizon}, {value, value});
  }

  static PlPath linear(double horizon, double start, double end) {
    return PlPath({0.0, horizon}, {start, end});
  }

  // PL interpolant of values given at the grid times.
  static PlPath sampled(const Grid &grid, std::vector<double> values) {
    if (values.size() != grid.n_steps() + 1) {
      throw DomainError("sampled path needs one value per grid time");
    }
    return PlPath(grid.times(), std::move(values));
  }

  double horizon() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }
  double time(std::size_t i) const { return times_[i]; }
  double value(std::size_t i) const { return values_[i]; }
  double initial() const { return values_.front(); }
  double terminal() const { return values_.back(); }

  // Exact linear interpolation; exact knot value at knots.
  double operator()(double s) const {
    if (!(s >= 0.0 && s <= horizon())) {
      throw DomainError("evaluation time " + std::to_string(s) + " outside [0, " +
                        std::to_string(horizon()) + "]");
    }
    return at_unchecked(s);
  }

  // Index k of the segment [t_k, t_{k+1}] holding s (k = size()-2 at s = t).
  std::size_t segment_index(double s) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), s);
    auto idx = static_cast<std::size_t>(it - times_.begin());
    if (idx == 0) {
      return 0;
    }
    return std::min(idx - 1, times_.size() - 2);
  }

  double at_unchecked(double s) const {
    const std::size_t k = segment_index(s);
    if (times_[k] == s) {
      return values_[k];
    }
    if (times_[k + 1] == s) {
      return values_[k + 1];
    }
    const double w = (s - times_[k]) / (times_[k + 1] - times_[k]);
    return values_[k] + (values_[k + 1] - values_[k]) * w;
  }

 private:
  void validate() const {
    if (times_.size() != values_.size()) {
      throw DomainError("path needs as many values as times");
    }
    if (times_.size() < 2) {
      throw DomainError("path needs at least two knots");
    }
    if (times_.size() > kMaxKnots) {
      throw DomainError("path knot count " + std::to_string(times_.size()) +
                        " exceeds the cap of " + std::to_string(kMaxKnots));
    }
    if (times_.front() != 0.0) {
      throw DomainError("path must start at time 0");
    }
    if (!(times_.back() > 0.0) || !std::isfinite(times_.back())) {
      throw DomainError("path horizon must be positive and finite");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!(times_[i] > times_[i - 1])) {
        throw DomainError("knot times must be strictly increasing");
      }
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw DomainError("knot values must be finite");
      }
    }
  }

  std::vector<double> times_;
  std::vector<double> values_;
};

namespace detail {

inline double merge_tol(double horizon) { return kKnotMergeRelTol * horizon; }

// True when s lies in the open interval between a and b, away from both ends.
inline bool strictly_between(double s, double a, double b, double tol) {
  return std::abs(s - a) > tol && std::abs(b - s) > tol;
}

// Accumulates knots in increasing time, merging near-duplicates. The horizon
// knot always wins a merge so the final time is exactly t.
class KnotBuilder {
 public:
  explicit KnotBuilder(double horizon, std::size_t reserve = 0)
      : horizon_(horizon), tol_(merge_tol(horizon)) {
    times_.reserve(reserve);
    values_.reserve(reserve);
  }

  void push(double s, double v) {
    if (times_.empty()) {
      times_.push_back(s);
      values_.push_back(v);
      return;
    }
    if (s - times_.back() <= tol_) {
      if (s == horizon_ && times_.size() > 1) {
        times_.back() = s;
        values_.back() = v;
      }
      return;
    }
    times_.push_back(s);
    values_.push_back(v);
  }

  PlPath finish() && {
    if (times_.size() == 1) {
      // Degenerate: everything merged into the origin.
      times_.push_back(horizon_);
      values_.push_back(values_.front());
    }
    return PlPath(std::move(times_), std::move(values_));
  }

 private:
  double horizon_;
  double tol_;
  std::vector<double> times_;
  std::vector<double> values_;
};

inline void require_same_horizon(const PlPath &p, const PlPath &q) {
  if (p.horizon() != q.horizon()) {
    throw DomainError("paths have different horizons");
  }
}

// Sorted union of knot times with near-duplicates merged.
inline std::vector<double> merged_times(std::span<const PlPath *const> paths) {
  const double horizon = paths.front()->horizon();
  std::vector<double> all;
  std::size_t total = 0;
  for (const PlPath *p : paths) {
    require_same_horizon(*paths.front(), *p);
    total += p->size();
  }
  all.reserve(total);
  for (const PlPath *p : paths) {
    const auto ts = p->times();
    const auto mid = static_cast<std::ptrdiff_t>(all.size());
    all.insert(all.end(), ts.begin(), ts.end());
    std::inplace_merge(all.begin(), all.begin() + mid, all.end());
  }
  const double tol = merge_tol(horizon);
  std::vector<double> out;
  out.reserve(all.size());
  for (double s : all) {
    if (out.empty() || s - out.back() > tol) {
      out.push_back(s);
    } else if (s == horizon) {
      out.back() = s;
    }
  }
  if (out.size() == 1) {
    out.push_back(horizon);
  }
  return out;
}

inline std::vector<double> merged_times(const PlPath &p, const PlPath &q) {
  const PlPath *ps[] = {&p, &q};
  return merged_times(std::span<const PlPath *const>(ps));
}

// Values of p at ascending query times in [0, t], by a single forward walk.
inline std::vector<double> sample_sorted(const PlPath &p, std::span<const double> query) {
  std::vector<double> out(query.size());
  const auto ts = p.times();
  const auto vs = p.values();
  std::size_t k = 0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    const double s = query[i];
    while (k + 2 < ts.size() && ts[k + 1] <= s) {
      ++k;
    }
    if (s <= ts[k]) {
      out[i] = vs[k];
    } else if (s >= ts[k + 1]) {
      out[i] = vs[k + 1];
    } else {
      const double w = (s - ts[k]) / (ts[k + 1] - ts[k]);
      out[i] = vs[k] + (vs[k + 1] - vs[k]) * w;
    }
  }
  return out;
}

// Running (from_start) or suffix envelope; is_max selects max vs min.
inline PlPath envelope(const PlPath &p, bool from_start, bool is_max) {
  const std::size_t n = p.size();
  const double sign = is_max ? 1.0 : -1.0;
  std::vector<std::pair<double, double>> out;
  out.reserve(2 * n);
  auto idx = [&](std::size_t j) { return from_start ? j : n - 1 - j; };

  double env = sign * p.value(idx(0));
  out.emplace_back(p.time(idx(0)), env);
  for (std::size_t j = 1; j < n; ++j) {
    const double tp = p.time(idx(j - 1));
    const double wp = sign * p.value(idx(j - 1));
    const double tj = p.time(idx(j));
    const double wj = sign * p.value(idx(j));
    if (wj > env) {
      if (wp < env) {
        const double frac = (env - wp) / (wj - wp);
        const double s = tp + frac * (tj - tp);
        if (strictly_between(s, tp, tj, merge_tol(p.horizon()))) {
          out.emplace_back(s, env);
        }
      }
      env = wj;
    }
    out.emplace_back(tj, env);
  }
  if (!from_start) {
    std::reverse(out.begin(), out.end());
  }
  KnotBuilder builder(p.horizon(), out.size());
  for (const auto &[s, w] : out) {
    builder.push(s, sign * w);
  }
  return std::move(builder).finish();
}

// Pointwise max (is_max) or min of two paths with crossing knots inserted.
inline PlPath pointwise_extremum(const PlPath &p, const PlPath &q, bool is_max) {
  require_same_horizon(p, q);
  const auto ts = merged_times(p, q);
  const auto pv = sample_sorted(p, ts);
  const auto qv = sample_sorted(q, ts);
  const double sign = is_max ? 1.0 : -1.0;
  KnotBuilder builder(p.horizon(), 2 * ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double di = sign * (pv[i] - qv[i]);
    builder.push(ts[i], di >= 0.0 ? pv[i] : qv[i]);
    if (i + 1 < ts.size()) {
      const double dn = sign * (pv[i + 1] - qv[i + 1]);
      if ((di > 0.0 && dn < 0.0) || (di < 0.0 && dn > 0.0)) {
        const double frac = di / (di - dn);
        const double s = ts[i] + frac * (ts[i + 1] - ts[i]);
        if (strictly_between(s, ts[i], ts[i + 1], merge_tol(p.horizon()))) {
          builder.push(s, pv[i] + (pv[i + 1] - pv[i]) * frac);
        }
      }
    }
  }
  return std::move(builder).finish();
}

}  // namespace detail

// s -> max_{0<=u<=s} phi_u, with knots inserted where phi re-attains its running max.
inline PlPath running_max(const PlPath &path) { return detail::envelope(path, true, true); }

inline PlPath running_min(const PlPath &path) { return detail::envelope(path, true, false); }

enum class Extremum { max, min };

// s -> max (or min) of phi over [s, t].
inline PlPath suffix_extremum(const PlPath &path, Extremum kind) {
  return detail::envelope(path, false, kind == Extremum::max);
}

// R(phi)(s) = phi_{t-s} - phi_t.
inline PlPath time_reverse(const PlPath &path) {
  const std::size_t n = path.size();
  const double t = path.horizon();
  const double end = path.terminal();
  detail::KnotBuilder builder(t, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = n - 1 - j;
    const double s = (i == 0) ? t : (i == n - 1 ? 0.0 : t - path.time(i));
    builder.push(s, path.value(i) - end);
  }
  return std::move(builder).finish();
}

struct Term {
  double coeff;
  const PlPath *path;
};

// constant + sum_i coeff_i * path_i on the merged knot set.
inline PlPath linear_combination(std::span<const Term> terms, double constant = 0.0) {
  if (terms.empty()) {
    throw DomainError("linear combination needs at least one path");
  }
  std::vector<const PlPath *> ps;
  ps.reserve(terms.size());
  for (const auto &term : terms) {
    ps.push_back(term.path);
  }
  auto ts = detail::merged_times(std::span<const PlPath *const>(ps));
  std::vector<double> acc(ts.size(), constant);
  for (const auto &term : terms) {
    const auto v = detail::sample_sorted(*term.path, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      acc[i] += term.coeff * v[i];
    }
  }
  return PlPath(std::move(ts), std::move(acc));
}

inline PlPath linear_combination(std::initializer_list<Term> terms, double constant = 0.0) {
  return linear_combination(std::span<const Term>(terms.begin(), terms.size()), constant);
}

// a * p + b * q on the union of knot sets.
inline PlPath affine_combine(double a, const PlPath &p, double b, const PlPath &q) {
  detail::require_same_horizon(p, q);
  return linear_combination({Term{a, &p}, Term{b, &q}});
}

inline PlPath scale(double a, const PlPath &p) {
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double &x : v) {
    x *= a;
  }
  return PlPath(std::vector<double>(p.times().begin(), p.times().end()), std::move(v));
}

inline PlPath negate(const PlPath &p) { return scale(-1.0, p); }

inline PlPath add_constant(const PlPath &p, double c) {
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double &x : v) {
    x += c;
  }
  return PlPath(std::vector<double>(p.times().begin(), p.times().end()), std::move(v));
}

// |phi| with zero-crossing knots (value exactly 0) inserted.
inline PlPath abs_path(const PlPath &path) {
  detail::KnotBuilder builder(path.horizon(), 2 * path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double v = path.value(i);
    builder.push(path.time(i), std::abs(v));
    if (i + 1 < path.size()) {
      const double w = path.value(i + 1);
      if ((v > 0.0 && w < 0.0) || (v < 0.0 && w > 0.0)) {
        const double frac = v / (v - w);
        const double s = path.time(i) + frac * (path.time(i + 1) - path.time(i));
        if (detail::strictly_between(s, path.time(i), path.time(i + 1),
                                     detail::merge_tol(path.horizon()))) {
          builder.push(s, 0.0);
        }
      }
    }
  }
  return std::move(builder).finish();
}

inline PlPath pointwise_max(const PlPath &p, const PlPath &q) {
  return detail::pointwise_extremum(p, q, true);
}

inline PlPath pointwise_min(const PlPath &p, const PlPath &q) {
  return detail::pointwise_extremum(p, q, false);
}

// sup_{[0,t]} |p - q|; attained at a merged knot since p - q is PL.
inline double sup_distance(const PlPath &p, const PlPath &q) {
  detail::require_same_horizon(p, q);
  const auto ts = detail::merged_times(p, q);
  const auto pv = detail::sample_sorted(p, ts);
  const auto qv = detail::sample_sorted(q, ts);
  double best = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    best = std::max(best, std::abs(pv[i] - qv[i]));
  }
  return best;
}

// max_k |p(s_k) - q(s_k)| over the given ascending times.
inline double max_distance_at(const PlPath &p, const PlPath &q, std::span<const double> times) {
  const auto pv = detail::sample_sorted(p, times);
  const auto qv = detail::sample_sorted(q, times);
  double best = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    best = std::max(best, std::abs(pv[i] - qv[i]));
  }
  return best;
}

}  // namespace pathlaw
