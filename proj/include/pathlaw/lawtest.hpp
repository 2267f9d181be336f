#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathlaw/errors.hpp"
#include "pathlaw/exp_functional.hpp"
#include "pathlaw/parallel.hpp"
#include "pathlaw/pl_path.hpp"
#include "pathlaw/sampler.hpp"
#include "pathlaw/transforms.hpp"

namespace pathlaw {

inline constexpr double kDefaultAlpha = 0.001;
inline constexpr std::size_t kMinKsSample = 500;

struct KsResult {
  double statistic;
  double critical;
  bool reject;
};

// sup_x |F_x(x) - F_y(x)|; ties are stepped over together.
inline double ks_statistic(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) {
    throw DomainError("KS needs nonempty samples");
  }
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Asymptotic two-sample critical value c(alpha) sqrt((n + m) / (n m)).
inline double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0) {
    throw DomainError("KS needs nonempty samples");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1)");
  }
  const double ca = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return ca * std::sqrt((dn + dm) / (dn * dm));
}

inline KsResult ks_two_sample(std::span<const double> x, std::span<const double> y,
                              double alpha = kDefaultAlpha) {
  const double d = ks_statistic(x, y);
  const double crit = ks_critical_value(x.size(), y.size(), alpha);
  return {d, crit, d > crit};
}

struct LawTestReport {
  std::string test_name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::pair<std::size_t, std::size_t> n_samples{0, 0};
  std::size_t n_marginals = 0;
  std::uint64_t seed = 0;
  bool passed = false;
  std::vector<std::pair<double, double>> per_marginal;
};

// Values of a path functional at fixed times, one row per path.
using MarginalExtractor = std::function<std::vector<double>(const PlPath &)>;

namespace detail {

inline void require_min_sample(std::size_t n, const char *what) {
  if (n < kMinKsSample) {
    throw ConfigError(std::string(what) + " needs at least 500 samples per KS side, got " +
                      std::to_string(n));
  }
}

// Snaps each requested time onto the grid; off-grid times are rejected.
inline std::vector<double> grid_marginals(const Grid &grid, std::span<const double> times) {
  if (times.empty()) {
    throw ConfigError("at least one marginal time is required");
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (double s : times) {
    const auto k = grid.index_of(s);
    if (!k) {
      throw ConfigError("marginal time " + std::to_string(s) + " is not a grid time");
    }
    out.push_back(grid.time(*k));
  }
  return out;
}

// columns[j][i] = extract(path i)[j], paths drawn from `spec` with `seed`.
inline std::vector<std::vector<double>> marginal_columns(SampleSpec spec, std::uint64_t seed,
                                                         std::size_t width,
                                                         const MarginalExtractor &extract) {
  spec.seed = seed;
  spec.validate();
  std::vector<std::vector<double>> cols(width, std::vector<double>(spec.n_paths));
  parallel_for(spec.n_paths, resolve_threads(spec.threads), [&](std::size_t i) {
    const auto row = extract(sample_path(spec, i));
    for (std::size_t j = 0; j < width; ++j) {
      cols[j][i] = row[j];
    }
  });
  return cols;
}

inline MarginalExtractor values_at(std::vector<double> times) {
  return [times = std::move(times)](const PlPath &p) {
    return sample_sorted(p, times);
  };
}

inline MarginalExtractor mapped_values_at(std::function<PlPath(const PlPath &)> map,
                                          std::vector<double> times) {
  return [map = std::move(map), times = std::move(times)](const PlPath &p) {
    return sample_sorted(map(p), times);
  };
}

inline void finish_ks_report(LawTestReport &r) {
  r.statistic = 0.0;
  r.passed = true;
  for (const auto &[s, d] : r.per_marginal) {
    r.statistic = std::max(r.statistic, d);
    r.passed = r.passed && d <= r.threshold;
  }
  r.n_marginals = r.per_marginal.size();
}

inline BridgeExtrema extrema_for(TransformTag tag) {
  switch (tag) {
    case TransformTag::M:
    case TransformTag::P: return BridgeExtrema::max;
    case TransformTag::MMin: return BridgeExtrema::min;
    default: return BridgeExtrema::none;
  }
}

inline MarginalExtractor transform_marginals(const TransformKind &kind, std::vector<double> times) {
  if (kind.tag == TransformTag::T || kind.tag == TransformTag::Tc) {
    const double c = kind.effective_c();
    return [c, times = std::move(times)](const PlPath &p) {
      const LogFunctional f(p, c);
      std::vector<double> out;
      out.reserve(times.size());
      for (double s : times) {
        out.push_back(tc_value(f, s));
      }
      return out;
    };
  }
  TransformKind exact = kind;
  exact.sampling.reset();
  return mapped_values_at([exact](const PlPath &p) { return apply_transform(exact, p); },
                          std::move(times));
}

// Splits xs by quantile bins of keys (bin b holds ranks [b n/k, (b+1) n/k)).
inline std::vector<std::vector<std::size_t>> quantile_bins(std::span<const double> keys,
                                                           std::size_t n_bins) {
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<std::vector<std::size_t>> bins(n_bins);
  for (std::size_t r = 0; r < order.size(); ++r) {
    bins[r * n_bins / order.size()].push_back(order[r]);
  }
  for (auto &bin : bins) {
    std::sort(bin.begin(), bin.end());
  }
  return bins;
}

// Within each bin, values at even path indices against the negated values at
// odd indices: the two sides come from disjoint paths, hence independent.
// Every side is cut to the smallest side size, so all comparisons share one
// critical value. Returns one KS statistic per bin.
inline std::vector<double> symmetry_in_bins(std::span<const double> keys,
                                            std::span<const double> values, std::size_t n_bins,
                                            std::size_t &side) {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> halves;
  side = values.size();
  for (const auto &bin : quantile_bins(keys, n_bins)) {
    std::vector<double> plus;
    std::vector<double> minus;
    for (std::size_t i : bin) {
      if (i % 2 == 0) {
        plus.push_back(values[i]);
      } else {
        minus.push_back(-values[i]);
      }
    }
    side = std::min({side, plus.size(), minus.size()});
    halves.emplace_back(std::move(plus), std::move(minus));
  }
  require_min_sample(side, "binned symmetry test");
  std::vector<double> out;
  for (auto &[plus, minus] : halves) {
    plus.resize(side);
    minus.resize(side);
    out.push_back(ks_statistic(plus, minus));
  }
  return out;
}

inline double bonferroni_alpha(double alpha, std::size_t tests) {
  return alpha / static_cast<double>(tests);
}

}  // namespace detail

// Transformed batch (seed) against a raw batch (seed ^ 1), marginal by
// marginal, Bonferroni over marginals. `map` sees paths carrying
// bridge-extremum knots when `extrema` asks for them.
inline LawTestReport invariance_test(const std::string &name, const MarginalExtractor &transformed,
                                     BridgeExtrema extrema, const SampleSpec &spec,
                                     std::span<const double> marginal_times,
                                     double alpha = kDefaultAlpha) {
  spec.validate();
  if (spec.kind != SampleKind::brownian) {
    throw ConfigError("invariance tests sample Brownian paths");
  }
  detail::require_min_sample(spec.n_paths, "invariance_test");
  const auto times = detail::grid_marginals(spec.grid, marginal_times);
  SampleSpec one = spec;
  one.extrema = extrema;
  SampleSpec two = spec;
  two.extrema = BridgeExtrema::none;
  const auto x = detail::marginal_columns(one, spec.seed, times.size(), transformed);
  const auto y =
      detail::marginal_columns(two, spec.seed ^ 1u, times.size(), detail::values_at(times));

  LawTestReport r;
  r.test_name = "invariance_" + name;
  r.seed = spec.seed;
  r.n_samples = {spec.n_paths, spec.n_paths};
  r.threshold = ks_critical_value(spec.n_paths, spec.n_paths,
                                  detail::bonferroni_alpha(alpha, times.size()));
  for (std::size_t j = 0; j < times.size(); ++j) {
    r.per_marginal.emplace_back(times[j], ks_statistic(x[j], y[j]));
  }
  detail::finish_ks_report(r);
  return r;
}

inline LawTestReport invariance_test(const TransformKind &kind, const SampleSpec &spec,
                                     std::span<const double> marginal_times,
                                     double alpha = kDefaultAlpha) {
  switch (kind.tag) {
    case TransformTag::T:
    case TransformTag::Tc:
    case TransformTag::G:
    case TransformTag::M:
    case TransformTag::MMin: break;
    default: throw ConfigError("invariance_test supports T, Tc, G, M, MMin; got " + kind.name());
  }
  const auto times = detail::grid_marginals(spec.grid, marginal_times);
  return invariance_test(kind.name(), detail::transform_marginals(kind, times),
                         detail::extrema_for(kind.tag), spec, times, alpha);
}

// Generic-map overload, e.g. for negative controls.
inline LawTestReport invariance_test(const std::string &name,
                                     std::function<PlPath(const PlPath &)> map,
                                     const SampleSpec &spec,
                                     std::span<const double> marginal_times,
                                     double alpha = kDefaultAlpha) {
  const auto times = detail::grid_marginals(spec.grid, marginal_times);
  return invariance_test(name, detail::mapped_values_at(std::move(map), times),
                         BridgeExtrema::none, spec, times, alpha);
}

// Every s_i, s_j pair: |mean(X_i X_j) - min(s_i, s_j)| in standard errors, X = G(B).
// per_marginal holds, for each time, the worst z over pairs involving it.
inline LawTestReport covariance_test(const TransformKind &kind, const SampleSpec &spec,
                                     std::span<const double> times, double z_bound) {
  if (kind.tag != TransformTag::G) {
    throw ConfigError("covariance_test supports G only");
  }
  spec.validate();
  if (spec.n_paths < 2) {
    throw ConfigError("covariance_test needs at least two paths");
  }
  const auto ts = detail::grid_marginals(spec.grid, times);
  const auto cols = detail::marginal_columns(spec, spec.seed, ts.size(), detail::transform_marginals(kind, ts));
  const double n = static_cast<double>(spec.n_paths);
  std::vector<double> worst(ts.size(), 0.0);
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = a; b < ts.size(); ++b) {
      double mean = 0.0;
      for (std::size_t i = 0; i < spec.n_paths; ++i) mean += cols[a][i] * cols[b][i];
      mean /= n;
      double var = 0.0;
      for (std::size_t i = 0; i < spec.n_paths; ++i) {
        const double d = cols[a][i] * cols[b][i] - mean;
        var += d * d;
      }
      var /= n - 1.0;
      const double z = std::abs(mean - std::min(ts[a], ts[b])) / std::sqrt(var / n);
      worst[a] = std::max(worst[a], z);
      worst[b] = std::max(worst[b], z);
    }
  }
  LawTestReport r;
  r.test_name = "covariance_" + kind.name();
  r.seed = spec.seed;
  r.n_samples = {spec.n_paths, 0};
  r.threshold = z_bound;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    r.per_marginal.emplace_back(ts[j], worst[j]);
  }
  detail::finish_ks_report(r);
  return r;
}

enum class DriftPairing { flipped, unflipped };

// (B^mu, M(B^mu), P(B^mu)) from one batch against (M(B^-mu), B^-mu, P(B^-mu))
// from an independent batch: each component, their sum and their max, at
// every marginal; Bonferroni over all 5 m comparisons. The unflipped pairing
// uses +mu in the second batch and should fail.
inline LawTestReport drift_flip_test(double mu, const SampleSpec &spec,
                                     std::span<const double> marginal_times,
                                     double alpha = kDefaultAlpha,
                                     DriftPairing pairing = DriftPairing::flipped) {
  spec.validate();
  detail::require_min_sample(spec.n_paths, "drift_flip_test");
  const auto ts = detail::grid_marginals(spec.grid, marginal_times);
  const std::size_t m = ts.size();
  // Row layout: [first component | second | third | sum | max], m entries each.
  auto triple = [ts, m](bool swap) -> MarginalExtractor {
    return [ts, m, swap](const PlPath &p) {
      const auto b = detail::sample_sorted(p, ts);
      const auto mm = detail::sample_sorted(transform_M(p), ts);
      const auto pp = detail::sample_sorted(transform_P(p), ts);
      std::vector<double> row(5 * m);
      for (std::size_t j = 0; j < m; ++j) {
        const double u = swap ? mm[j] : b[j];
        const double v = swap ? b[j] : mm[j];
        row[j] = u;
        row[m + j] = v;
        row[2 * m + j] = pp[j];
        row[3 * m + j] = u + v + pp[j];
        row[4 * m + j] = std::max({u, v, pp[j]});
      }
      return row;
    };
  };
  SampleSpec one = spec;
  one.kind = SampleKind::brownian;
  one.drift = mu;
  one.extrema = BridgeExtrema::max;
  SampleSpec two = one;
  two.drift = pairing == DriftPairing::flipped ? -mu : mu;
  const auto x = detail::marginal_columns(one, spec.seed, 5 * m, triple(false));
  const auto y = detail::marginal_columns(two, spec.seed ^ 1u, 5 * m, triple(true));

  LawTestReport r;
  r.test_name = pairing == DriftPairing::flipped ? "drift_flip" : "drift_flip_unflipped";
  r.seed = spec.seed;
  r.n_samples = {spec.n_paths, spec.n_paths};
  r.threshold =
      ks_critical_value(spec.n_paths, spec.n_paths, detail::bonferroni_alpha(alpha, 5 * m));
  for (std::size_t j = 0; j < m; ++j) {
    double worst = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      worst = std::max(worst, ks_statistic(x[k * m + j], y[k * m + j]));
    }
    r.per_marginal.emplace_back(ts[j], worst);
  }
  detail::finish_ks_report(r);
  return r;
}

enum class PitmanReference { bessel3, reflected_brownian };

inline constexpr std::size_t kDefaultSymmetryBins = 8;

// (a) marginals of P(B) against an independent Bessel3 batch; (b) B_t
// against -B_t within quantile bins of P(B)(t). Bonferroni over both parts.
// The reflected_brownian reference replaces Bessel3 by |B| and should fail.
inline LawTestReport pitman_bessel_test(const SampleSpec &spec,
                                        std::span<const double> marginal_times,
                                        double alpha = kDefaultAlpha,
                                        PitmanReference reference = PitmanReference::bessel3,
                                        std::size_t n_bins = kDefaultSymmetryBins) {
  spec.validate();
  detail::require_min_sample(spec.n_paths, "pitman_bessel_test");
  if (n_bins < 1) {
    throw ConfigError("pitman_bessel_test needs at least one bin");
  }
  const auto ts = detail::grid_marginals(spec.grid, marginal_times);
  const std::size_t m = ts.size();
  const double t = spec.grid.horizon();
  SampleSpec one = spec;
  one.kind = SampleKind::brownian;
  one.drift = 0.0;
  one.extrema = BridgeExtrema::max;
  // Row: P(B) at the marginals, then P(B)(t), then B_t.
  const auto x = detail::marginal_columns(one, spec.seed, m + 2, [ts](const PlPath &p) {
    const PlPath pp = transform_P(p);
    auto row = detail::sample_sorted(pp, ts);
    row.push_back(pp.terminal());
    row.push_back(p.terminal());
    return row;
  });
  SampleSpec two = one;
  two.extrema = BridgeExtrema::none;
  std::vector<std::vector<double>> y;
  if (reference == PitmanReference::bessel3) {
    two.kind = SampleKind::bessel3;
    y = detail::marginal_columns(two, spec.seed ^ 1u, m, detail::values_at(ts));
  } else {
    y = detail::marginal_columns(two, spec.seed ^ 1u, m, detail::mapped_values_at(abs_path, ts));
  }
  std::size_t side = 0;
  const auto bins = detail::symmetry_in_bins(x[m], x[m + 1], n_bins, side);

  // The two parts have different sample sizes, so each statistic is stored
  // as a multiple of its own Bonferroni critical value.
  const double a = detail::bonferroni_alpha(alpha, m + n_bins);
  const double crit_marginal = ks_critical_value(spec.n_paths, spec.n_paths, a);
  const double crit_bins = ks_critical_value(side, side, a);
  LawTestReport r;
  r.test_name = reference == PitmanReference::bessel3 ? "pitman_bessel" : "pitman_reflected";
  r.seed = spec.seed;
  r.n_samples = {spec.n_paths, spec.n_paths};
  r.threshold = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    r.per_marginal.emplace_back(ts[j], ks_statistic(x[j], y[j]) / crit_marginal);
  }
  for (double d : bins) {
    r.per_marginal.emplace_back(t, d / crit_bins);
  }
  detail::finish_ks_report(r);
  return r;
}

enum class SymmetryBinning { z_t, b_t };

// B_t against -B_t within n_bins quantile bins of Z_t(B) (c = 1),
// Bonferroni across bins; one bin is the unconditional symmetry of B_t.
// Binning by B_t itself is the negative control.
inline LawTestReport conditional_symmetry_test(const SampleSpec &spec, std::size_t n_bins,
                                               double alpha = kDefaultAlpha,
                                               SymmetryBinning binning = SymmetryBinning::z_t) {
  spec.validate();
  if (n_bins < 1) {
    throw ConfigError("conditional_symmetry_test needs at least one bin");
  }
  SampleSpec one = spec;
  one.kind = SampleKind::brownian;
  one.drift = 0.0;
  one.extrema = BridgeExtrema::none;
  const double t = spec.grid.horizon();
  const auto x = detail::marginal_columns(one, spec.seed, 2, [t](const PlPath &p) {
    return std::vector<double>{LogFunctional(p, 1.0).log_Z(t), p.terminal()};
  });
  std::size_t side = 0;
  const auto &keys = binning == SymmetryBinning::z_t ? x[0] : x[1];
  const auto bins = detail::symmetry_in_bins(keys, x[1], n_bins, side);
  LawTestReport r;
  r.test_name =
      binning == SymmetryBinning::z_t ? "conditional_symmetry" : "conditional_symmetry_bt_bins";
  r.seed = spec.seed;
  r.n_samples = {side, side};
  r.threshold = ks_critical_value(side, side, detail::bonferroni_alpha(alpha, n_bins));
  for (double d : bins) {
    r.per_marginal.emplace_back(t, d);
  }
  detail::finish_ks_report(r);
  return r;
}

}  // namespace pathlaw
