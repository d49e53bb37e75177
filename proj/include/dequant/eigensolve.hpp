#pragma once

// Ground-energy localization. A' = (I + A/kappa)/2 has spectrum in [0, 1];
// Test(t) filters it with a rectangle polynomial stepping down between
// t eps/4 and (t + 1) eps/4 and asks whether the guiding state keeps weight
// under the filter. The first t answering yes gives E* = t (eps/2) kappa - kappa.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/inner_product.hpp"
#include "dequant/oracle.hpp"
#include "dequant/parallel.hpp"
#include "dequant/polyfilter.hpp"
#include "dequant/rng.hpp"
#include "dequant/state.hpp"
#include "dequant/transform.hpp"

namespace dequant {

enum class Policy { strict, tight, oracle_exact };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::strict: return "strict";
    case Policy::tight: return "tight";
    default: return "oracle-exact";
  }
}

inline Policy parse_policy(std::string_view s) {
  if (s == "strict") return Policy::strict;
  if (s == "tight") return Policy::tight;
  if (s == "oracle-exact" || s == "oracle_exact") return Policy::oracle_exact;
  throw InvalidArgument("unknown policy '" + std::string(s) + "' (expected strict, tight or oracle-exact)");
}

inline constexpr double kDefaultCostCap = 1e11;

struct SolverConfig {
  double epsilon = 0.25;
  double chi = 1.0;
  std::optional<double> sigma;  // generalized-overlap width; (eps/2) kappa when unset
  Policy policy = Policy::tight;
  double delta = 0.05;
  std::uint64_t seed = 0;
  double cost_cap = kDefaultCostCap;  // leaf operations over the whole scan
  unsigned workers = 1;
  // Under strict/tight: evaluate sampled chains exactly instead of by nested
  // estimation. Test instrument; the default is the full estimator.
  ChainEvaluation chain_evaluation = ChainEvaluation::sampled;
  RectangleOptions polynomial{};
};

inline double effective_sigma(const SolverConfig& cfg, double kappa) {
  return cfg.sigma ? *cfg.sigma : 0.5 * cfg.epsilon * kappa;
}

inline void validate(const SolverConfig& cfg, double kappa) {
  check_unit_interval(cfg.epsilon, "epsilon");
  check_unit_interval(cfg.chi, "chi");
  check_unit_interval(cfg.delta, "delta");
  if (!(cfg.cost_cap > 0.0)) throw InvalidArgument("cost cap must be positive");
  const double sigma = effective_sigma(cfg, kappa);
  if (!(sigma >= 0.0) || (kappa > 0.0 && !(sigma < cfg.epsilon * kappa)))
    throw InvalidArgument("sigma must lie in [0, eps * kappa), got " + std::to_string(sigma));
}

/// T = ceil(4 / eps).
inline std::size_t interval_count(double epsilon) {
  check_unit_interval(epsilon, "epsilon");
  return static_cast<std::size_t>(ceil_tolerant(4.0 / epsilon));
}

/// Rectangle polynomial of Test(t). When tau + theta > 1 the upper band is
/// empty and the constant 1 satisfies every requirement.
inline std::shared_ptr<const RectanglePolynomial> test_polynomial(std::size_t t, double epsilon, double chi,
                                                                  const RectangleOptions& options = {}) {
  const double tau = static_cast<double>(t) * epsilon / 4.0;
  double theta = epsilon / 4.0;
  const double xi = chi * chi / 12.0;
  if (tau >= 1.0) throw InvalidArgument("test index " + std::to_string(t) + " outside [0, T)");
  if (tau + theta > 1.0 + 1e-12) {
    auto p = std::make_shared<RectanglePolynomial>();
    p->polynomial = Polynomial(std::vector<double>{1.0});
    p->chebyshev = {1.0};
    p->tau = tau;
    p->theta = theta;
    p->xi = xi;
    p->verification = check_band([](double) { return 1.0; }, tau, theta, xi, options.grid_points);
    return p;
  }
  theta = std::min(theta, 1.0 - tau);
  return RectangleCache::shared().get(tau, theta, xi, options);
}

struct TestRecord {
  std::size_t t = 0;
  double tau = 0.0;
  double theta = 0.0;
  double xi = 0.0;
  std::size_t degree = 0;
  double coefficient_l1 = 0.0;
  Complex estimate{};
  double threshold = 0.0;  // chi^2 / 2
  bool yes = false;
  double predicted_leaf_operations = 0.0;
};

struct WorkUsage {
  std::uint64_t state_samples = 0;
  std::uint64_t leaf_queries = 0;
  std::uint64_t chain_samples = 0;
};

struct EnergyEstimate {
  double e_star = 0.0;
  std::size_t t_star = 0;
  std::size_t T = 0;
  double kappa = 0.0;
  double epsilon = 0.0;
  double chi = 0.0;
  double sigma = 0.0;
  double delta = 0.0;
  Policy policy = Policy::tight;
  std::uint64_t seed = 0;
  bool no_yes_found = false;
  bool trivial = false;  // zero Hamiltonian: pipeline skipped
  double predicted_leaf_operations = 0.0;
  WorkUsage samples_used;
  std::vector<TestRecord> transcript;
};

/// E* = t* (eps/2) kappa - kappa.
inline double energy_from_index(std::size_t t_star, double epsilon, double kappa) {
  return static_cast<double>(t_star) * (epsilon / 2.0) * kappa - kappa;
}

/// Runs Test(t) on a fixed A' and guiding state.
class ThresholdTester {
 public:
  ThresholdTester(const Decomposition& a_prime, const StateAccessor& psi, const SolverConfig& cfg)
      : a_prime_(&a_prime), psi_(&psi), cfg_(cfg), T_(dequant::interval_count(cfg.epsilon)) {
    require_normalized(a_prime);
    if (psi.dimension() != a_prime.dimension()) throw InvalidArgument("guiding state dimension does not match");
    if (cfg.policy == Policy::oracle_exact) {
      op_ = std::make_unique<DenseOperator>(reconstruct(a_prime));
      psi_dense_ = materialize(psi);
    }
  }

  std::size_t interval_count() const noexcept { return T_; }
  double estimate_precision() const noexcept { return cfg_.chi * cfg_.chi / 4.0; }
  double per_test_delta() const noexcept { return cfg_.delta / static_cast<double>(T_); }

  TransformOptions transform_options(Execution exec = {}) const {
    TransformOptions o;
    o.policy = cfg_.policy == Policy::strict ? BudgetPolicy::strict : BudgetPolicy::tight;
    o.evaluation = cfg_.chain_evaluation;
    o.exec = exec;
    return o;
  }

  std::shared_ptr<const RectanglePolynomial> polynomial(std::size_t t) const {
    if (t >= T_) throw InvalidArgument("test index " + std::to_string(t) + " outside [0, " + std::to_string(T_) + ")");
    return test_polynomial(t, cfg_.epsilon, cfg_.chi, cfg_.polynomial);
  }

  /// Predicted leaf operations of Test(t); zero under the oracle-exact policy.
  double predicted_cost(std::size_t t) const {
    if (cfg_.policy == Policy::oracle_exact) return 0.0;
    const auto o = transform_options();
    return plan_transform(*a_prime_, polynomial(t)->polynomial, estimate_precision(), per_test_delta(), o.policy,
                          o.evaluation)
        .leaf_operations;
  }

  TestRecord run(std::size_t t, CounterRng& rng, Execution exec = {}) const {
    const auto p = polynomial(t);
    TestRecord rec;
    rec.t = t;
    rec.tau = p->tau;
    rec.theta = p->theta;
    rec.xi = p->xi;
    rec.degree = p->degree();
    rec.coefficient_l1 = coefficient_l1(p->polynomial);
    rec.threshold = cfg_.chi * cfg_.chi / 2.0;
    if (op_) {
      rec.estimate = exact_sandwich(psi_dense_, *op_, p->polynomial, psi_dense_);
    } else {
      const auto result = estimate_polynomial_transform(*psi_, *psi_, *a_prime_, p->polynomial, estimate_precision(),
                                                        per_test_delta(), rng, transform_options(exec));
      rec.estimate = result.value;
      rec.predicted_leaf_operations = result.plan.leaf_operations;
    }
    rec.yes = std::abs(rec.estimate) >= rec.threshold;
    return rec;
  }

 private:
  const Decomposition* a_prime_;
  const StateAccessor* psi_;
  SolverConfig cfg_;
  std::size_t T_;
  std::unique_ptr<DenseOperator> op_;
  Eigen::VectorXcd psi_dense_;
};

inline bool test_threshold(std::size_t t, const Decomposition& a_prime, const StateAccessor& psi,
                           const SolverConfig& cfg, CounterRng& rng) {
  return ThresholdTester(a_prime, psi, cfg).run(t, rng).yes;
}

/// Cost report for the whole scan (every test run, the worst case).
inline nlohmann::json preflight_report(const ThresholdTester& tester, const SolverConfig& cfg, double* total) {
  nlohmann::json tests = nlohmann::json::array();
  double sum = 0.0;
  for (std::size_t t = 0; t < tester.interval_count(); ++t) {
    const double c = tester.predicted_cost(t);
    sum += c;
    tests.push_back({{"t", t}, {"degree", tester.polynomial(t)->degree()}, {"leaf_operations", c}});
  }
  *total = sum;
  return {{"policy", to_string(cfg.policy)},
          {"epsilon", cfg.epsilon},
          {"chi", cfg.chi},
          {"delta", cfg.delta},
          {"T", tester.interval_count()},
          {"cost_cap", cfg.cost_cap},
          {"predicted_leaf_operations", sum},
          {"log10_predicted_leaf_operations", sum > 0 ? std::log10(sum) : 0.0},
          {"tests", tests}};
}

/// Smallest-eigenvalue estimate with |E* - lambda_min(A)| <= eps kappa with
/// probability >= 1 - delta, given overlap >= chi of psi with the
/// (eps/2) kappa low-energy subspace. Throws CostCapExceeded before any
/// sampling when the predicted cost of the full scan exceeds cfg.cost_cap.
inline EnergyEstimate estimate_smallest_eigenvalue(const Decomposition& a, const StateAccessor& psi,
                                                   const SolverConfig& cfg) {
  EnergyEstimate out;
  out.kappa = a.kappa();
  out.epsilon = cfg.epsilon;
  out.chi = cfg.chi;
  out.delta = cfg.delta;
  out.policy = cfg.policy;
  out.seed = cfg.seed;
  validate(cfg, out.kappa);
  out.sigma = effective_sigma(cfg, out.kappa);
  out.T = interval_count(cfg.epsilon);
  if (psi.dimension() != a.dimension()) throw InvalidArgument("guiding state dimension does not match the Hamiltonian");
  if (a.size() == 0 || out.kappa == 0.0) {
    out.trivial = true;
    out.e_star = 0.0;
    return out;
  }

  const Decomposition a_prime = shift_rescale(a);
  const ThresholdTester tester(a_prime, psi, cfg);
  if (cfg.policy != Policy::oracle_exact) {
    double total = 0.0;
    const auto report = preflight_report(tester, cfg, &total);
    out.predicted_leaf_operations = total;
    if (cfg.chain_evaluation == ChainEvaluation::sampled && total > cfg.cost_cap)
      throw CostCapExceeded(total, cfg.cost_cap, report.dump());
  }

  WorkCounters counters;
  const Execution exec{cfg.workers, &counters};
  const CounterRng master(cfg.seed);
  bool found = false;
  for (std::size_t t = 0; t < out.T && !found; ++t) {
    CounterRng stream = master.derive(t);
    out.transcript.push_back(tester.run(t, stream, exec));
    if (out.transcript.back().yes) {
      out.t_star = t;
      found = true;
    }
  }
  if (!found) {
    out.t_star = out.T - 1;
    out.no_yes_found = true;
  }
  out.e_star = energy_from_index(out.t_star, cfg.epsilon, out.kappa);
  out.samples_used = {counters.state_samples.load(), counters.leaf_queries.load(), counters.chain_samples.load()};
  return out;
}

/// Guided local Hamiltonian: |E - E_0(H)| <= eps sum ||H_i||.
inline EnergyEstimate solve_guided(const Hamiltonian& h, const StateAccessor& psi, const SolverConfig& cfg) {
  return estimate_smallest_eigenvalue(decompose(h), psi, cfg);
}

/// Unguided local Hamiltonian via H (x) I and the maximally entangled state,
/// whose overlap with the ground space is at least 2^{-n/2}.
inline EnergyEstimate solve_unguided(const Hamiltonian& h, const SolverConfig& cfg) {
  SolverConfig doubled = cfg;
  doubled.chi = std::pow(2.0, -0.5 * static_cast<double>(h.qubits));
  const StateAccessor phi = StateAccessor::max_entangled(h.qubits);
  return estimate_smallest_eigenvalue(decompose(with_ancilla_register(h)), phi, doubled);
}

enum class Decision { low, high };

inline const char* to_string(Decision d) { return d == Decision::low ? "LOW" : "HIGH"; }

struct DecisionOutcome {
  Decision decision = Decision::low;
  double a = 0.0;
  double b = 0.0;
  double midpoint = 0.0;  // (a + b) / 2, in units of kappa
  EnergyEstimate estimate;
};

inline constexpr double kDecisionSlack = 1e-9;

/// Decides E_0 <= a kappa (LOW) versus E_0 > b kappa (HIGH), b - a > eps.
/// Runs the estimator at accuracy (b - a)/2 - 1e-9 and thresholds at the
/// midpoint. Without a guiding state the unguided reduction is used.
inline DecisionOutcome decide(const Hamiltonian& h, const StateAccessor* psi, double a, double b,
                              const SolverConfig& cfg) {
  if (!(b - a > cfg.epsilon))
    throw InvalidArgument("invalid gap: b - a = " + std::to_string(b - a) + " must exceed epsilon = " +
                          std::to_string(cfg.epsilon));
  SolverConfig run = cfg;
  run.epsilon = std::min(1.0, 0.5 * (b - a) - kDecisionSlack);
  run.sigma.reset();
  DecisionOutcome out;
  out.a = a;
  out.b = b;
  out.midpoint = 0.5 * (a + b);
  out.estimate = psi ? solve_guided(h, *psi, run) : solve_unguided(h, run);
  out.decision = out.estimate.e_star <= out.midpoint * out.estimate.kappa ? Decision::low : Decision::high;
  return out;
}

}  // namespace dequant
