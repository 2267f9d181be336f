#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pathlaw/identities.hpp"
#include "pathlaw/lawtest.hpp"

namespace pathlaw {

inline constexpr const char *kReportVersion = "1.0";

using AnyReport = std::variant<IdentityReport, LawTestReport>;

namespace detail {

inline nlohmann::json pairs_json(const std::vector<std::pair<double, double>> &pairs) {
  auto out = nlohmann::json::array();
  for (const auto &[a, b] : pairs) {
    out.push_back({a, b});
  }
  return out;
}

}  // namespace detail

inline nlohmann::json to_json(const IdentityReport &r) {
  nlohmann::json j;
  j["identity_name"] = r.identity_name;
  j["n_paths"] = r.n_paths;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["refinement_trace"] =
      r.refinement_trace ? detail::pairs_json(*r.refinement_trace) : nlohmann::json(nullptr);
  j["passed"] = r.passed;
  j["seed"] = r.seed;
  return j;
}

inline nlohmann::json to_json(const LawTestReport &r) {
  nlohmann::json j;
  j["test_name"] = r.test_name;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["n_samples"] = {r.n_samples.first, r.n_samples.second};
  j["n_marginals"] = r.n_marginals;
  j["seed"] = r.seed;
  j["passed"] = r.passed;
  j["per_marginal"] = detail::pairs_json(r.per_marginal);
  return j;
}

inline nlohmann::json to_json(const AnyReport &r) {
  return std::visit([](const auto &x) { return to_json(x); }, r);
}

inline bool report_passed(const AnyReport &r) {
  return std::visit([](const auto &x) { return x.passed; }, r);
}

// {version, config, reports: [...]}; no timestamps, so equal inputs give
// byte-equal documents.
inline nlohmann::json report_document(nlohmann::json config, const std::vector<AnyReport> &reports) {
  nlohmann::json doc;
  doc["version"] = kReportVersion;
  doc["config"] = std::move(config);
  doc["reports"] = nlohmann::json::array();
  for (const auto &r : reports) {
    doc["reports"].push_back(to_json(r));
  }
  return doc;
}

}  // namespace pathlaw
