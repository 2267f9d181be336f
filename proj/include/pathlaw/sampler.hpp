#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pathlaw/errors.hpp"
#include "pathlaw/parallel.hpp"
#include "pathlaw/pl_path.hpp"
#include "pathlaw/random.hpp"

namespace pathlaw {

enum class SampleKind { brownian, bessel3 };

// Optional extra knot per grid step carrying the exact Brownian-bridge
// maximum (or minimum) over that step. With it, running and suffix extrema of
// the PL path at grid times have the continuum law, not the grid-max law.
enum class BridgeExtrema { none, max, min };

inline constexpr std::size_t kDefaultLawGridSteps = 256;

struct SampleSpec {
  Grid grid{1.0, kDefaultLawGridSteps};
  double drift = 0.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  SampleKind kind = SampleKind::brownian;
  BridgeExtrema extrema = BridgeExtrema::none;
  unsigned threads = 0;  // 0: resolve_threads()

  void validate() const {
    if (n_paths < 1) {
      throw ConfigError("n_paths must be at least 1");
    }
    if (!std::isfinite(drift)) {
      throw ConfigError("drift must be finite");
    }
  }
};

namespace detail {

// Grid values of B^(mu) for one path; increments N(mu dt, dt).
inline std::vector<double> brownian_grid_values(const SampleSpec &spec, std::uint64_t index) {
  PhiloxStream rng(spec.seed, index, Substream::increments);
  const std::size_t n = spec.grid.n_steps();
  std::vector<double> v(n + 1, 0.0);
  double prev_t = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double tk = spec.grid.time(k);
    const double dt = tk - prev_t;
    v[k] = v[k - 1] + spec.drift * dt + std::sqrt(dt) * rng.normal();
    prev_t = tk;
  }
  return v;
}

inline PlPath with_bridge_extrema(const SampleSpec &spec, std::uint64_t index,
                                  const std::vector<double> &v) {
  PhiloxStream rng(spec.seed, index, Substream::bridge);
  const std::size_t n = spec.grid.n_steps();
  const double sign = spec.extrema == BridgeExtrema::max ? 1.0 : -1.0;
  KnotBuilder builder(spec.grid.horizon(), 2 * n + 1);
  builder.push(0.0, v[0]);
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = spec.grid.time(k);
    const double t1 = spec.grid.time(k + 1);
    const double dt = t1 - t0;
    const double a = sign * v[k];
    const double b = sign * v[k + 1];
    // P(max > m) = exp(-2 (m - a)(m - b) / dt) for a bridge from a to b.
    const double top = 0.5 * (a + b + std::sqrt((b - a) * (b - a) - 2.0 * dt * std::log(rng.uniform())));
    const double rise = top - a;
    const double fall = top - b;
    if (rise > 0.0 && fall > 0.0) {
      builder.push(t0 + dt * rise / (rise + fall), sign * top);
    }
    builder.push(t1, v[k + 1]);
  }
  return std::move(builder).finish();
}

}  // namespace detail

// Path `index` of a Brownian batch: starts at 0, independent N(mu dt, dt)
// increments, drawn from its own (seed, index) stream.
inline PlPath sample_brownian_path(const SampleSpec &spec, std::uint64_t index) {
  auto v = detail::brownian_grid_values(spec, index);
  if (spec.extrema != BridgeExtrema::none) {
    return detail::with_bridge_extrema(spec, index, v);
  }
  return PlPath::sampled(spec.grid, std::move(v));
}

// Path `index` of a three-dimensional Bessel batch: Euclidean norm of three
// independent driftless Brownian motions at the grid times.
inline PlPath sample_bessel3_path(const SampleSpec &spec, std::uint64_t index) {
  PhiloxStream rng(spec.seed, index, Substream::increments);
  const std::size_t n = spec.grid.n_steps();
  std::vector<double> r(n + 1, 0.0);
  double x = 0.0, y = 0.0, z = 0.0;
  double prev_t = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double tk = spec.grid.time(k);
    const double sd = std::sqrt(tk - prev_t);
    x += sd * rng.normal();
    y += sd * rng.normal();
    z += sd * rng.normal();
    r[k] = std::sqrt(x * x + y * y + z * z);
    prev_t = tk;
  }
  return PlPath::sampled(spec.grid, std::move(r));
}

inline PlPath sample_path(const SampleSpec &spec, std::uint64_t index) {
  return spec.kind == SampleKind::bessel3 ? sample_bessel3_path(spec, index)
                                          : sample_brownian_path(spec, index);
}

inline std::vector<PlPath> sample_batch(const SampleSpec &spec) {
  spec.validate();
  std::vector<std::optional<PlPath>> slots(spec.n_paths);
  parallel_for(spec.n_paths, resolve_threads(spec.threads),
               [&](std::size_t i) { slots[i] = sample_path(spec, i); });
  std::vector<PlPath> out;
  out.reserve(spec.n_paths);
  for (auto &slot : slots) {
    out.push_back(std::move(*slot));
  }
  return out;
}

inline std::vector<PlPath> sample_brownian(const SampleSpec &spec) {
  if (spec.kind != SampleKind::brownian) {
    throw ConfigError("sample_brownian needs kind = brownian");
  }
  return sample_batch(spec);
}

inline std::vector<PlPath> sample_bessel3(const SampleSpec &spec) {
  if (spec.kind != SampleKind::bessel3) {
    throw ConfigError("sample_bessel3 needs kind = bessel3");
  }
  return sample_batch(spec);
}

}  // namespace pathlaw
