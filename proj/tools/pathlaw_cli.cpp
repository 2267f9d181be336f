#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pathlaw/run.hpp"

namespace {

using pathlaw::OutputFormat;
using pathlaw::RunConfig;
using pathlaw::Subcommand;
using pathlaw::SweepDirection;

struct Flags {
  double t = 1.0;
  std::size_t n_steps = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> c;
  double drift = 0.0;
  std::string transform = "T";
  std::string in;
  std::string out;
  std::string format;
  std::string threads = "auto";
  std::string direction = "to-infinity";
  double phi_t = 0.0;
};

void add_common(CLI::App *sub, Flags &f) {
  sub->add_option("--t", f.t, "horizon t")->check(CLI::PositiveNumber);
  sub->add_option("--n-steps", f.n_steps, "grid steps")->check(CLI::PositiveNumber);
  sub->add_option("--n-paths", f.n_paths, "number of paths")->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "64-bit seed");
  sub->add_option("--c", f.c, "comma-separated scales c")->delimiter(',');
  sub->add_option("--drift", f.drift, "drift mu");
  sub->add_option("--threads", f.threads, "thread count or 'auto'");
  sub->add_option("--out", f.out, "output file (default stdout)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Piecewise-linear path transforms and their identity and law checks"};
  app.require_subcommand(1);
  Flags f;
  const std::map<std::string, Subcommand> names = {
      {"sample", Subcommand::sample},
      {"transform", Subcommand::transform},
      {"verify-identities", Subcommand::verify_identities},
      {"verify-law", Subcommand::verify_law},
      {"sweep-c", Subcommand::sweep_c},
      {"verify-appendix", Subcommand::verify_appendix}};
  const std::map<std::string, std::string> help = {
      {"sample", "write seeded Brownian paths as CSV"},
      {"transform", "apply a transform to a path CSV (or a sampled path)"},
      {"verify-identities", "run the deterministic identity registry"},
      {"verify-law", "run the Monte Carlo law suite"},
      {"sweep-c", "trace the distance from T^(c) to its limit over c"},
      {"verify-appendix", "run the limit and uniform-convergence fixtures"}};
  std::map<std::string, CLI::App *> subs;
  for (const auto &[name, _] : names) {
    auto *sub = app.add_subcommand(name, help.at(name));
    add_common(sub, f);
    subs[name] = sub;
  }
  subs["transform"]->add_option("--transform", f.transform, "T, Tc, G, M, P, R, MMin, S1, S2");
  subs["transform"]->add_option("--in", f.in, "input path CSV");
  subs["transform"]->add_option("--phi-t", f.phi_t, "terminal value phi_t for S1/S2");
  subs["sweep-c"]->add_option("--in", f.in, "input path CSV");
  subs["sweep-c"]
      ->add_option("--direction", f.direction, "to-zero or to-infinity")
      ->check(CLI::IsMember({"to-zero", "to-infinity"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(pathlaw::ExitCode::usage);
  }

  RunConfig cfg;
  for (const auto &[name, sub] : subs) {
    if (sub->parsed()) {
      cfg.subcommand = names.at(name);
      if (sub->count("--n-steps")) cfg.n_steps = f.n_steps;
      if (sub->count("--n-paths")) cfg.n_paths = f.n_paths;
      if (sub->count("--drift")) cfg.drift = f.drift;
      if (sub->count("--format")) {
        cfg.format = f.format == "csv" ? OutputFormat::csv : OutputFormat::json;
      }
      if (name == "transform" && sub->count("--phi-t")) cfg.phi_t = f.phi_t;
    }
  }
  cfg.t = f.t;
  cfg.seed = f.seed;
  cfg.c_values = f.c;
  cfg.transform = f.transform;
  cfg.in_path = f.in;
  cfg.out_path = f.out;
  cfg.direction = f.direction == "to-zero" ? SweepDirection::to_zero : SweepDirection::to_infinity;
  if (f.threads != "auto") {
    try {
      const long n = std::stol(f.threads);
      if (n <= 0) throw std::invalid_argument("threads");
      cfg.threads = static_cast<unsigned>(n);
    } catch (const std::exception &) {
      std::cerr << "usage error: --threads must be a positive integer or 'auto'\n";
      return static_cast<int>(pathlaw::ExitCode::usage);
    }
  }
  return static_cast<int>(pathlaw::run(cfg));
}
