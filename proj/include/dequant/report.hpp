#pragma once

// JSON encodings. Doubles are written with round-trip precision by
// nlohmann::json, so every encoding here decodes to an equal value.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dequant/eigensolve.hpp"
#include "dequant/polyfilter.hpp"

namespace dequant {

inline void to_json(nlohmann::json& j, const TestRecord& r) {
  j = {{"t", r.t},
       {"tau", r.tau},
       {"theta", r.theta},
       {"xi", r.xi},
       {"degree", r.degree},
       {"coefficient_l1", r.coefficient_l1},
       {"estimate", {r.estimate.real(), r.estimate.imag()}},
       {"threshold", r.threshold},
       {"yes", r.yes},
       {"predicted_leaf_operations", r.predicted_leaf_operations}};
}

inline void from_json(const nlohmann::json& j, TestRecord& r) {
  r.t = j.at("t").get<std::size_t>();
  r.tau = j.at("tau").get<double>();
  r.theta = j.at("theta").get<double>();
  r.xi = j.at("xi").get<double>();
  r.degree = j.at("degree").get<std::size_t>();
  r.coefficient_l1 = j.at("coefficient_l1").get<double>();
  r.estimate = Complex(j.at("estimate").at(0).get<double>(), j.at("estimate").at(1).get<double>());
  r.threshold = j.at("threshold").get<double>();
  r.yes = j.at("yes").get<bool>();
  r.predicted_leaf_operations = j.at("predicted_leaf_operations").get<double>();
}

inline void to_json(nlohmann::json& j, const WorkUsage& w) {
  j = {{"state_samples", w.state_samples}, {"leaf_queries", w.leaf_queries}, {"chain_samples", w.chain_samples}};
}

inline void from_json(const nlohmann::json& j, WorkUsage& w) {
  w.state_samples = j.at("state_samples").get<std::uint64_t>();
  w.leaf_queries = j.at("leaf_queries").get<std::uint64_t>();
  w.chain_samples = j.at("chain_samples").get<std::uint64_t>();
}

inline void to_json(nlohmann::json& j, const EnergyEstimate& e) {
  j = {{"e_star", e.e_star},
       {"t_star", e.t_star},
       {"T", e.T},
       {"kappa", e.kappa},
       {"epsilon", e.epsilon},
       {"chi", e.chi},
       {"sigma", e.sigma},
       {"delta", e.delta},
       {"policy", to_string(e.policy)},
       {"seed", e.seed},
       {"no_yes_found", e.no_yes_found},
       {"trivial", e.trivial},
       {"predicted_leaf_operations", e.predicted_leaf_operations},
       {"samples_used", e.samples_used},
       {"transcript", e.transcript}};
}

inline void from_json(const nlohmann::json& j, EnergyEstimate& e) {
  e.e_star = j.at("e_star").get<double>();
  e.t_star = j.at("t_star").get<std::size_t>();
  e.T = j.at("T").get<std::size_t>();
  e.kappa = j.at("kappa").get<double>();
  e.epsilon = j.at("epsilon").get<double>();
  e.chi = j.at("chi").get<double>();
  e.sigma = j.at("sigma").get<double>();
  e.delta = j.at("delta").get<double>();
  e.policy = parse_policy(j.at("policy").get<std::string>());
  e.seed = j.at("seed").get<std::uint64_t>();
  e.no_yes_found = j.at("no_yes_found").get<bool>();
  e.trivial = j.at("trivial").get<bool>();
  e.predicted_leaf_operations = j.at("predicted_leaf_operations").get<double>();
  e.samples_used = j.at("samples_used").get<WorkUsage>();
  e.transcript = j.at("transcript").get<std::vector<TestRecord>>();
}

inline void to_json(nlohmann::json& j, const DecisionOutcome& d) {
  j = {{"decision", to_string(d.decision)}, {"a", d.a}, {"b", d.b}, {"midpoint", d.midpoint}, {"estimate", d.estimate}};
}

inline void from_json(const nlohmann::json& j, DecisionOutcome& d) {
  const auto s = j.at("decision").get<std::string>();
  if (s != "LOW" && s != "HIGH") throw ParseError("decision must be LOW or HIGH");
  d.decision = s == "LOW" ? Decision::low : Decision::high;
  d.a = j.at("a").get<double>();
  d.b = j.at("b").get<double>();
  d.midpoint = j.at("midpoint").get<double>();
  d.estimate = j.at("estimate").get<EnergyEstimate>();
}

inline void to_json(nlohmann::json& j, const BandCheck& b) {
  j = {{"grid_points", b.grid_points},     {"max_abs", b.max_abs},
       {"low_band_min", b.low_band_min},   {"low_band_max", b.low_band_max},
       {"high_band_min", b.high_band_min}, {"high_band_max", b.high_band_max},
       {"passed", b.passed}};
}

/// Coefficients as doubles plus exact decimal strings of the stored values.
inline void to_json(nlohmann::json& j, const RectanglePolynomial& p) {
  std::vector<std::string> exact;
  for (const auto& a : p.polynomial.coefficients()) exact.push_back(a.str(0, std::ios_base::scientific));
  j = {{"tau", p.tau},
       {"theta", p.theta},
       {"xi", p.xi},
       {"degree", p.degree()},
       {"coefficient_l1", coefficient_l1(p.polynomial)},
       {"steepness", p.steepness},
       {"truncation_error", p.truncation_error},
       {"coefficients", p.polynomial.coefficients_double()},
       {"coefficients_exact", exact},
       {"chebyshev", p.chebyshev},
       {"verification", p.verification}};
}

/// Dense-oracle comparison attached to a run.
struct OracleComparison {
  double lambda_min = 0.0;
  double abs_error = 0.0;       // |E* - lambda_min|
  double tolerance = 0.0;       // eps kappa
  bool within = false;
  double overlap = 0.0;         // generalized overlap of the guiding state
};

inline bool operator==(const OracleComparison& a, const OracleComparison& b) {
  return a.lambda_min == b.lambda_min && a.abs_error == b.abs_error && a.tolerance == b.tolerance &&
         a.within == b.within && a.overlap == b.overlap;
}

inline void to_json(nlohmann::json& j, const OracleComparison& o) {
  j = {{"lambda_min", o.lambda_min}, {"abs_error", o.abs_error}, {"tolerance", o.tolerance},
       {"within", o.within},         {"overlap", o.overlap}};
}

inline void from_json(const nlohmann::json& j, OracleComparison& o) {
  o.lambda_min = j.at("lambda_min").get<double>();
  o.abs_error = j.at("abs_error").get<double>();
  o.tolerance = j.at("tolerance").get<double>();
  o.within = j.at("within").get<bool>();
  o.overlap = j.at("overlap").get<double>();
}

inline OracleComparison compare_with_oracle(const DenseOperator& h, const Eigen::VectorXcd& psi,
                                            const EnergyEstimate& e) {
  OracleComparison o;
  o.lambda_min = exact_ground_energy(h);
  o.abs_error = std::abs(e.e_star - o.lambda_min);
  o.tolerance = e.epsilon * e.kappa;
  o.within = o.abs_error <= o.tolerance + 1e-12;
  o.overlap = exact_overlap(h, psi, e.sigma);
  return o;
}

/// One CLI run: what was asked, on which input, and what came out.
struct RunReport {
  std::string command;
  std::string input_digest;  // sha256 over the Hamiltonian file bytes and the state spec
  nlohmann::json config;
  std::optional<EnergyEstimate> estimate;
  std::optional<DecisionOutcome> decision;
  std::optional<OracleComparison> oracle;
  std::optional<double> wall_seconds;  // only when timing was requested
};

inline void to_json(nlohmann::json& j, const RunReport& r) {
  j = {{"command", r.command}, {"input_digest", r.input_digest}, {"config", r.config}};
  if (r.estimate) j["estimate"] = *r.estimate;
  if (r.decision) j["decision"] = *r.decision;
  const EnergyEstimate* e = r.estimate ? &*r.estimate : r.decision ? &r.decision->estimate : nullptr;
  if (e) j["counters"] = e->samples_used;
  if (r.oracle) j["oracle"] = *r.oracle;
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
}

inline void from_json(const nlohmann::json& j, RunReport& r) {
  r.command = j.at("command").get<std::string>();
  r.input_digest = j.at("input_digest").get<std::string>();
  r.config = j.at("config");
  r.estimate.reset();
  r.decision.reset();
  r.oracle.reset();
  r.wall_seconds.reset();
  if (j.contains("estimate")) r.estimate = j.at("estimate").get<EnergyEstimate>();
  if (j.contains("decision")) r.decision = j.at("decision").get<DecisionOutcome>();
  if (j.contains("oracle")) r.oracle = j.at("oracle").get<OracleComparison>();
  if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
}

}  // namespace dequant
