// Acceptance runner: `acceptance [N ...]` runs the numbered criteria (all when
// none are given) and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pathlaw/pathlaw.hpp"

using namespace pathlaw;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Verdict {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      passed = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::vector<double> powers(int from, int to) {
  std::vector<double> out;
  const int step = to >= from ? 1 : -1;
  for (int k = from;; k += step) {
    out.push_back(std::ldexp(1.0, k));
    if (k == to) break;
  }
  return out;
}

std::vector<double> fractions(std::size_t m) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= m; ++k) out.push_back(static_cast<double>(k) / m);
  return out;
}

SampleSpec law_spec(std::size_t n, std::uint64_t seed) {
  SampleSpec s;
  s.n_paths = n;
  s.seed = seed;
  return s;
}

void law_line(Verdict &v, const LawTestReport &r, bool expect_pass) {
  v.detail << r.test_name << '=' << r.statistic << '/' << r.threshold << ' ';
  v.require(r.passed == expect_pass, r.test_name + (expect_pass ? " rejected" : " not rejected"));
}

void exact_suite(Verdict &v) {
  const auto paths = random_pl_paths(kSeed, 100);
  for (auto name : {"m_involution", "g_involution", "m_reversal", "g_reversal",
                    "pitman_preservation", "lrevp", "bvs_endpoint", "s1_roundtrip",
                    "s2_roundtrip", "mmin_mirror"}) {
    const auto r = check_identity(name, paths, 1e-9, kSeed);
    v.detail << name << '=' << r.max_residual << ' ';
    v.require(r.passed, name);
  }
}

void refinement_suite(Verdict &v) {
  const auto paths = random_pl_paths(kSeed, 100);
  for (auto name : {"tc_involution", "qa1"}) {
    const auto r = check_identity(name, paths, 1e-4, kSeed);
    v.detail << name << " trace";
    for (const auto &[n, res] : *r.refinement_trace) v.detail << ' ' << n << ':' << res;
    v.detail << "; ";
    v.require(r.passed, name);
  }
  const auto z = check_identity("zform_consistency", paths, 1e-8, kSeed);
  v.detail << "zform_consistency=" << z.max_residual;
  v.require(z.passed, "zform_consistency");
}

void convergence_suite(Verdict &v) {
  RandomPathSpec spec;
  spec.min_knots = spec.max_knots = kSweepKnots;
  const Grid grid(1.0, kDefaultTransformGrid);
  const std::vector<std::pair<SweepDirection, std::vector<double>>> sweeps{
      {SweepDirection::to_zero, powers(0, -8)}, {SweepDirection::to_infinity, powers(0, 8)}};
  for (const auto &[direction, cs] : sweeps) {
    std::size_t ok = 0;
    std::vector<std::uint64_t> failing;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto r = sweep_c(random_pl_path(kSeed, i, spec), direction, cs, grid);
      if (r.passed) {
        ++ok;
      } else {
        failing.push_back(i);
      }
    }
    const char *label = direction == SweepDirection::to_zero ? "to_G" : "to_M";
    v.detail << label << ' ' << ok << "/20 ";
    if (!failing.empty()) {
      v.detail << "(failing paths";
      for (auto i : failing) v.detail << ' ' << i;
      v.detail << ") ";
    }
    v.require(failing.empty(), label);
  }
}

void law_suite(Verdict &v) {
  const auto spec = law_spec(20000, kSeed);
  const auto times = fractions(16);
  for (const auto &kind : {TransformKind::T(), TransformKind::Tc(0.25), TransformKind::Tc(1.0),
                           TransformKind::Tc(4.0), TransformKind::G(), TransformKind::M(),
                           TransformKind::MMin()}) {
    law_line(v, invariance_test(kind, spec, times), true);
  }
  const auto cov = covariance_test(TransformKind::G(), law_spec(100000, kSeed), fractions(4), 4.0);
  v.detail << "covariance_G z=" << cov.statistic;
  v.require(cov.passed, "covariance_G");
}

void drift_suite(Verdict &v) {
  const auto times = fractions(8);
  for (double mu : {0.5, 1.0, 2.0}) {
    law_line(v, drift_flip_test(mu, law_spec(20000, kSeed), times), true);
  }
  law_line(v,
           drift_flip_test(1.0, law_spec(20000, kSeed), times, kDefaultAlpha,
                           DriftPairing::unflipped),
           false);
}

void pitman_suite(Verdict &v) {
  law_line(v, pitman_bessel_test(law_spec(20000, kSeed), fractions(8)), true);

  SampleSpec spec = law_spec(20000, kSeed ^ 0x5eedULL);
  spec.extrema = BridgeExtrema::max;
  std::vector<double> p1(spec.n_paths);
  parallel_for(spec.n_paths, resolve_threads(std::nullopt), [&](std::size_t i) {
    const PlPath b = sample_brownian_path(spec, i);
    p1[i] = transform_P(b).terminal();
  });
  double mean = 0.0;
  for (double x : p1) mean += x;
  mean /= static_cast<double>(p1.size());
  double var = 0.0;
  for (double x : p1) var += (x - mean) * (x - mean);
  var /= static_cast<double>(p1.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(p1.size()));
  const double chi3_mean = 2.0 * std::sqrt(2.0 / std::numbers::pi);
  const double z = std::abs(mean - chi3_mean) / se;
  v.detail << "mean P(B)(1)=" << mean << " z=" << z << ' ';
  v.require(z <= 3.0, "chi-3 mean");

  law_line(v, conditional_symmetry_test(law_spec(50000, kSeed), 8), true);
}

void appendix_suite(Verdict &v) {
  constexpr int kTerms = 50;
  std::vector<double> c, la, lb, zeros(kTerms, 0.0), lneg, l3;
  for (int n = 1; n <= kTerms; ++n) {
    c.push_back(n);
    la.push_back(2.0 * n);
    lb.push_back(n);
    lneg.push_back(-n);
    l3.push_back(3.0 * n);
  }
  const double bound = std::log(2.0) / kTerms + 1e-12;
  for (const auto &r : {lfund_check(la, lb, c, 2.0, 1.0), lfund_check(zeros, zeros, c, 0.0, 0.0),
                        lfund_check(lneg, l3, c, -1.0, 3.0)}) {
    v.detail << "lfund=" << r.max_residual << ' ';
    v.require(r.passed && r.max_residual <= bound, "lfund");
  }

  RandomPathSpec spec;
  spec.min_knots = spec.max_knots = kSweepKnots;
  const PlPath phi = random_pl_path(kSeed, 0, spec);
  const auto family = tc_minus_identity_family(phi, powers(0, 8), Grid(1.0, kDefaultTransformGrid));
  const auto dini = dini_uniform_check(family, affine_combine(1.0, transform_M(phi), -1.0, phi));
  v.detail << "dini=" << dini.max_residual << ' ';
  v.require(dini.passed, "dini on Tc - phi");

  const PlPath limit = PlPath::linear(1.0, 0.0, -1.0);
  std::vector<IndexedPath> faulty;
  for (double cn : {1.0, 2.0, 4.0, 8.0}) faulty.push_back({cn, PlPath::linear(1.0, 0.5 / cn, -1.0)});
  faulty.back().path = PlPath::linear(1.0, 0.5 / 8.0 + 0.1, -1.0);
  const auto fault = dini_uniform_check(faulty, limit);
  v.detail << "fault detected=" << !fault.passed;
  v.require(!fault.passed, "injected fault");
}

void calibration_suite(Verdict &v) {
  constexpr std::size_t kSeeds = 200;
  constexpr std::size_t kPerBatch = 10000;
  const auto times = fractions(16);
  std::size_t rejections = 0;
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    rejections += !invariance_test(TransformKind::M(), law_spec(kPerBatch, 1000 + s), times).passed;
  }
  const double rate = static_cast<double>(rejections) / kSeeds;
  v.detail << "null rejections " << rejections << '/' << kSeeds << " (n=" << kPerBatch << ") ";
  v.require(rate <= 0.01, "false-rejection rate");

  const auto spec = law_spec(20000, kSeed);
  law_line(v,
           invariance_test(
               "shift",
               [](const PlPath &p) {
                 return affine_combine(1.0, p, 0.2, PlPath::linear(p.horizon(), 0.0, p.horizon()));
               },
               spec, times),
           false);
  law_line(v, drift_flip_test(1.0, spec, fractions(8), kDefaultAlpha, DriftPairing::unflipped),
           false);
  law_line(v,
           pitman_bessel_test(spec, fractions(8), kDefaultAlpha,
                              PitmanReference::reflected_brownian),
           false);
  law_line(v, conditional_symmetry_test(spec, 8, kDefaultAlpha, SymmetryBinning::b_t), false);

  const auto paths = random_pl_paths(kSeed, 100);
  const auto corrupted = check_identity("m_involution", paths, 1e-9, kSeed, [](const PlPath &p) {
    std::vector<double> ts(p.times().begin(), p.times().end());
    std::vector<double> vs(p.values().begin(), p.values().end());
    vs[vs.size() / 2] += 0.1;
    return PlPath(ts, vs);
  });
  v.detail << "corrupted m_involution=" << corrupted.max_residual;
  v.require(!corrupted.passed, "corrupted output not detected");
}

struct Criterion {
  const char *name;
  double budget_seconds;
  std::function<void(Verdict &)> body;
};

}  // namespace

int main(int argc, char **argv) {
  const std::map<int, Criterion> criteria{
      {1, {"exact identities", 10, exact_suite}},
      {2, {"refinement identities", 30, refinement_suite}},
      {3, {"c sweeps", 30, convergence_suite}},
      {4, {"law invariance", 120, law_suite}},
      {5, {"drift flip", 60, drift_suite}},
      {6, {"pitman", 60, pitman_suite}},
      {7, {"appendix", 5, appendix_suite}},
      {8, {"calibration", 600, calibration_suite}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto &[k, c] : criteria) selected.push_back(k);
  }

  int failures = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::printf("criterion %d: unknown\n", k);
      return 2;
    }
    Verdict v;
    v.detail.precision(3);
    const auto start = std::chrono::steady_clock::now();
    try {
      it->second.body(v);
    } catch (const std::exception &e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs <= it->second.budget_seconds, "runtime budget");
    std::printf("criterion %d (%s): %s %s(%.1fs of %.0fs)\n", k, it->second.name,
                v.passed ? "PASS" : "FAIL", v.detail.str().c_str(), secs,
                it->second.budget_seconds);
    std::fflush(stdout);
    failures += !v.passed;
  }
  return failures == 0 ? 0 : 1;
}
