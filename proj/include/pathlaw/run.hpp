#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathlaw/errors.hpp"
#include "pathlaw/identities.hpp"
#include "pathlaw/lawtest.hpp"
#include "pathlaw/path_io.hpp"
#include "pathlaw/random.hpp"
#include "pathlaw/report.hpp"
#include "pathlaw/sampler.hpp"
#include "pathlaw/transforms.hpp"

namespace pathlaw {

enum class ExitCode : int { ok = 0, failed = 1, usage = 2, io = 3 };

enum class Subcommand { sample, transform, verify_identities, verify_law, sweep_c, verify_appendix };

inline const char *subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::sample: return "sample";
    case Subcommand::transform: return "transform";
    case Subcommand::verify_identities: return "verify-identities";
    case Subcommand::verify_law: return "verify-law";
    case Subcommand::sweep_c: return "sweep-c";
    case Subcommand::verify_appendix: return "verify-appendix";
  }
  return "?";
}

enum class OutputFormat { csv, json };

// Unset optionals take per-subcommand defaults (see effective_*).
struct RunConfig {
  Subcommand subcommand = Subcommand::verify_identities;
  double t = 1.0;
  std::optional<std::size_t> n_steps;
  std::optional<std::size_t> n_paths;
  std::uint64_t seed = 0;
  std::vector<double> c_values;
  std::optional<double> drift;
  std::string transform = "T";
  std::string in_path;
  std::string out_path;
  std::optional<OutputFormat> format;
  std::optional<unsigned> threads;
  SweepDirection direction = SweepDirection::to_infinity;
  std::optional<double> phi_t;
};

inline constexpr std::size_t kSweepKnots = 16;
inline constexpr std::size_t kDefaultLawPaths = 20000;
inline constexpr std::size_t kDefaultIdentityPaths = 100;

namespace detail {

inline std::size_t effective_steps(const RunConfig &cfg) {
  if (cfg.n_steps) {
    return *cfg.n_steps;
  }
  switch (cfg.subcommand) {
    case Subcommand::transform:
    case Subcommand::sweep_c:
    case Subcommand::verify_appendix: return kDefaultTransformGrid;
    default: return kDefaultLawGridSteps;
  }
}

inline std::size_t effective_paths(const RunConfig &cfg) {
  if (cfg.n_paths) {
    return *cfg.n_paths;
  }
  switch (cfg.subcommand) {
    case Subcommand::verify_identities: return kDefaultIdentityPaths;
    case Subcommand::verify_law: return kDefaultLawPaths;
    default: return 1;
  }
}

inline OutputFormat effective_format(const RunConfig &cfg) {
  if (cfg.format) {
    return *cfg.format;
  }
  switch (cfg.subcommand) {
    case Subcommand::sample:
    case Subcommand::transform: return OutputFormat::csv;
    default: return OutputFormat::json;
  }
}

inline std::vector<double> powers_of_two(int from, int to) {
  std::vector<double> out;
  const int step = to >= from ? 1 : -1;
  for (int k = from;; k += step) {
    out.push_back(std::ldexp(1.0, k));
    if (k == to) break;
  }
  return out;
}

inline std::vector<double> effective_c_values(const RunConfig &cfg) {
  if (!cfg.c_values.empty()) {
    return cfg.c_values;
  }
  switch (cfg.subcommand) {
    case Subcommand::sweep_c:
      return cfg.direction == SweepDirection::to_zero ? powers_of_two(0, -8) : powers_of_two(0, 8);
    case Subcommand::verify_appendix: return powers_of_two(0, 8);
    case Subcommand::verify_law: return {0.25, 1.0, 4.0};
    default: return {1.0};
  }
}

inline void validate(const RunConfig &cfg) {
  if (!(cfg.t > 0.0) || !std::isfinite(cfg.t)) {
    throw ConfigError("--t must be positive");
  }
  if (effective_steps(cfg) < 1) {
    throw ConfigError("--n-steps must be positive");
  }
  if (effective_paths(cfg) < 1) {
    throw ConfigError("--n-paths must be positive");
  }
  for (double c : cfg.c_values) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ConfigError("--c values must be positive");
    }
  }
  if (cfg.drift && !std::isfinite(*cfg.drift)) {
    throw ConfigError("--drift must be finite");
  }
  const auto fmt = effective_format(cfg);
  if ((cfg.subcommand == Subcommand::sample || cfg.subcommand == Subcommand::transform) &&
      fmt != OutputFormat::csv) {
    throw ConfigError("sample and transform write CSV only");
  }
}

inline nlohmann::json config_json(const RunConfig &cfg) {
  nlohmann::json j;
  j["subcommand"] = subcommand_name(cfg.subcommand);
  j["t"] = cfg.t;
  j["n_steps"] = effective_steps(cfg);
  j["n_paths"] = effective_paths(cfg);
  j["seed"] = cfg.seed;
  j["c_values"] = effective_c_values(cfg);
  j["drift"] = cfg.drift ? nlohmann::json(*cfg.drift) : nlohmann::json(nullptr);
  j["transform"] = cfg.subcommand == Subcommand::transform ? nlohmann::json(cfg.transform)
                                                           : nlohmann::json(nullptr);
  j["format"] = effective_format(cfg) == OutputFormat::csv ? "csv" : "json";
  j["threads"] = resolve_threads(cfg.threads);
  j["rng"] = kRngName;
  j["normal_method"] = kNormalMethod;
  return j;
}

inline SampleSpec sample_spec(const RunConfig &cfg) {
  SampleSpec spec;
  spec.grid = Grid(cfg.t, effective_steps(cfg));
  spec.drift = cfg.drift.value_or(0.0);
  spec.n_paths = effective_paths(cfg);
  spec.seed = cfg.seed;
  spec.threads = resolve_threads(cfg.threads);
  return spec;
}

inline PlPath input_or_random(const RunConfig &cfg, const RandomPathSpec &random) {
  return cfg.in_path.empty() ? random_pl_path(cfg.seed, 0, random) : read_path_csv(cfg.in_path);
}

inline RandomPathSpec sweep_path_spec(double horizon) {
  RandomPathSpec r;
  r.horizon = horizon;
  r.min_knots = kSweepKnots;
  r.max_knots = kSweepKnots;
  return r;
}

inline TransformKind transform_from(const RunConfig &cfg, double phi_t) {
  const auto tag = parse_transform_tag(cfg.transform);
  if (!tag) {
    throw ConfigError("unknown transform '" + cfg.transform + "'");
  }
  switch (*tag) {
    case TransformTag::T: return TransformKind::T();
    case TransformTag::Tc: return TransformKind::Tc(effective_c_values(cfg).front());
    case TransformTag::G: return TransformKind::G();
    case TransformTag::M: return TransformKind::M();
    case TransformTag::P: return TransformKind::P();
    case TransformTag::R: return TransformKind::R();
    case TransformTag::MMin: return TransformKind::MMin();
    case TransformTag::S1: return TransformKind::S1(phi_t);
    case TransformTag::S2: return TransformKind::S2(phi_t);
  }
  throw ConfigError("unknown transform");
}

inline std::vector<double> evenly_spaced(double t, std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= count; ++k) {
    out.push_back(t * static_cast<double>(k) / static_cast<double>(count));
  }
  return out;
}

inline std::vector<AnyReport> law_suite(const RunConfig &cfg) {
  const SampleSpec spec = sample_spec(cfg);
  const auto m16 = evenly_spaced(cfg.t, 16);
  const auto m8 = evenly_spaced(cfg.t, 8);
  std::vector<AnyReport> out;
  out.emplace_back(invariance_test(TransformKind::T(), spec, m16));
  for (double c : effective_c_values(cfg)) {
    out.emplace_back(invariance_test(TransformKind::Tc(c), spec, m16));
  }
  out.emplace_back(invariance_test(TransformKind::G(), spec, m16));
  out.emplace_back(invariance_test(TransformKind::M(), spec, m16));
  out.emplace_back(invariance_test(TransformKind::MMin(), spec, m16));
  out.emplace_back(covariance_test(TransformKind::G(), spec, evenly_spaced(cfg.t, 4), 4.0));
  const std::vector<double> mus = cfg.drift ? std::vector<double>{*cfg.drift}
                                            : std::vector<double>{0.5, 1.0, 2.0};
  for (double mu : mus) {
    out.emplace_back(drift_flip_test(mu, spec, m8));
  }
  out.emplace_back(pitman_bessel_test(spec, m8));
  out.emplace_back(conditional_symmetry_test(spec, kDefaultSymmetryBins));
  return out;
}

inline std::vector<AnyReport> appendix_suite(const RunConfig &cfg) {
  std::vector<AnyReport> out;
  constexpr int kTerms = 50;
  std::vector<double> c(kTerms), la(kTerms), lb(kTerms), zeros(kTerms, 0.0), lneg(kTerms),
      l3(kTerms);
  for (int n = 1; n <= kTerms; ++n) {
    const double cn = n;
    c[n - 1] = cn;
    la[n - 1] = 2.0 * cn;
    lb[n - 1] = cn;
    lneg[n - 1] = -cn;
    l3[n - 1] = 3.0 * cn;
  }
  out.emplace_back(lfund_check(la, lb, c, 2.0, 1.0));
  out.emplace_back(lfund_check(zeros, zeros, c, 0.0, 0.0));
  out.emplace_back(lfund_check(lneg, l3, c, -1.0, 3.0));
  const PlPath phi = random_pl_path(cfg.seed, 0, sweep_path_spec(cfg.t));
  const Grid grid(cfg.t, effective_steps(cfg));
  const auto cs = effective_c_values(cfg);
  const auto family = tc_minus_identity_family(phi, cs, grid);
  const PlPath limit = affine_combine(1.0, transform_M(phi), -1.0, phi);
  out.emplace_back(dini_uniform_check(family, limit));
  return out;
}

class OutputTarget {
 public:
  OutputTarget(const std::string &path, std::ostream &fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw IoError("cannot open '" + path + "' for writing");
      }
    }
    out_ = path.empty() ? &fallback : &file_;
  }
  std::ostream &stream() { return *out_; }
  void finish() {
    out_->flush();
    if (!*out_) {
      throw IoError("write failed");
    }
  }

 private:
  std::ofstream file_;
  std::ostream *out_;
};

inline void write_reports(const RunConfig &cfg, const std::vector<AnyReport> &reports,
                          std::ostream &out) {
  if (effective_format(cfg) == OutputFormat::json) {
    out << report_document(config_json(cfg), reports).dump(2) << '\n';
    return;
  }
  detail::set_precision(out);
  out << "name,passed,value,bound\n";
  for (const auto &r : reports) {
    std::visit(
        [&](const auto &x) {
          if constexpr (std::is_same_v<std::decay_t<decltype(x)>, IdentityReport>) {
            out << x.identity_name << ',' << x.passed << ',' << x.max_residual << ','
                << x.tolerance << '\n';
          } else {
            out << x.test_name << ',' << x.passed << ',' << x.statistic << ',' << x.threshold
                << '\n';
          }
        },
        r);
  }
}

inline ExitCode run_unchecked(const RunConfig &cfg, std::ostream &fallback) {
  validate(cfg);
  std::vector<AnyReport> reports;
  switch (cfg.subcommand) {
    case Subcommand::sample: {
      const auto paths = sample_batch(sample_spec(cfg));
      OutputTarget target(cfg.out_path, fallback);
      if (paths.size() == 1) {
        write_path_csv(target.stream(), paths.front());
      } else {
        write_batch_csv(target.stream(), paths);
      }
      target.finish();
      return ExitCode::ok;
    }
    case Subcommand::transform: {
      PlPath phi = cfg.in_path.empty() ? sample_brownian_path(sample_spec(cfg), 0)
                                       : read_path_csv(cfg.in_path);
      TransformKind kind = transform_from(cfg, cfg.phi_t.value_or(0.0));
      if ((kind.tag == TransformTag::S1 || kind.tag == TransformTag::S2) && !cfg.phi_t) {
        throw ConfigError("S1 and S2 need --phi-t");
      }
      if (kind.tag == TransformTag::T || kind.tag == TransformTag::Tc) {
        kind = kind.sampled_on(Grid(phi.horizon(), effective_steps(cfg)));
      }
      const PlPath out = apply_transform(kind, phi);
      OutputTarget target(cfg.out_path, fallback);
      write_path_csv(target.stream(), out);
      target.finish();
      return ExitCode::ok;
    }
    case Subcommand::verify_identities: {
      RandomPathSpec rs;
      rs.horizon = cfg.t;
      const auto paths = random_pl_paths(cfg.seed, effective_paths(cfg), rs);
      for (auto &r : check_all_identities(paths, cfg.seed, resolve_threads(cfg.threads))) {
        reports.emplace_back(std::move(r));
      }
      break;
    }
    case Subcommand::verify_law: reports = law_suite(cfg); break;
    case Subcommand::sweep_c: {
      const PlPath phi = input_or_random(cfg, sweep_path_spec(cfg.t));
      auto r = sweep_c(phi, cfg.direction, effective_c_values(cfg),
                       Grid(phi.horizon(), effective_steps(cfg)));
      r.seed = cfg.seed;
      if (effective_format(cfg) == OutputFormat::csv) {
        OutputTarget target(cfg.out_path, fallback);
        set_precision(target.stream());
        target.stream() << "c,distance\n";
        for (const auto &[c, d] : *r.refinement_trace) {
          target.stream() << c << ',' << d << '\n';
        }
        target.finish();
        return r.passed ? ExitCode::ok : ExitCode::failed;
      }
      reports.emplace_back(std::move(r));
      break;
    }
    case Subcommand::verify_appendix: reports = appendix_suite(cfg); break;
  }
  OutputTarget target(cfg.out_path, fallback);
  write_reports(cfg, reports, target.stream());
  target.finish();
  bool all = true;
  for (const auto &r : reports) {
    all = all && report_passed(r);
  }
  return all ? ExitCode::ok : ExitCode::failed;
}

}  // namespace detail

// Executes one subcommand; reports go to cfg.out_path, or `fallback` when empty.
// Configuration problems give usage (2), unreadable or unwritable files io (3),
// failed suites failed (1) with the report still written.
inline ExitCode run(const RunConfig &cfg, std::ostream &fallback = std::cout,
                    std::ostream &err = std::cerr) {
  try {
    return detail::run_unchecked(cfg, fallback);
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::io;
  } catch (const ConfigError &e) {
    err << "usage error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const PreconditionError &e) {
    err << "usage error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const DomainError &e) {
    err << "usage error: " << e.what() << '\n';
    return ExitCode::usage;
  }
}

}  // namespace pathlaw
