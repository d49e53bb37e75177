#pragma once

// <psi| A^r |phi> and <psi| P(A) |phi> for a normalized decomposition
// A = sum_i A_i, sum_i kappa_i = 1.
//
// Power estimator: draw chains x in [m]^r with probability
// q(x) = kappa_{x_1} ... kappa_{x_r}, estimate <psi| A_{x_r} ... A_{x_1} |phi>
// for each, and average alpha / q(x); medians of batches give confidence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dequant/alias_table.hpp"
#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/imm.hpp"
#include "dequant/inner_product.hpp"
#include "dequant/oracle.hpp"
#include "dequant/parallel.hpp"
#include "dequant/polyfilter.hpp"
#include "dequant/rng.hpp"
#include "dequant/state.hpp"

namespace dequant {

/// How the per-power error budget is derived from eta.
enum class BudgetPolicy {
  strict,  // eta / 4^d
  tight,   // eta / sum_r |a_r|
};

/// How a sampled chain's value <psi| A_x |phi> is obtained.
enum class ChainEvaluation {
  sampled,  // nested inner-product estimate over iterated matrix multiplication
  exact,    // dense evaluation; isolates the outer sampling layer
};

inline const char* to_string(BudgetPolicy p) { return p == BudgetPolicy::strict ? "strict" : "tight"; }
inline const char* to_string(ChainEvaluation e) { return e == ChainEvaluation::sampled ? "sampled" : "exact"; }

inline constexpr double kNormalizationSlack = 1e-9;
// Largest per-power sample count ever materialized, whatever the cost cap.
inline constexpr double kMaxExecutableSamples = 1e15;

inline void require_normalized(const Decomposition& d) {
  if (std::abs(d.kappa() - 1.0) > kNormalizationSlack)
    throw InvalidArgument("decomposition must be normalized (kappa = 1), got kappa = " + std::to_string(d.kappa()));
}

/// Product distribution over chains of length r.
class ChainSampler {
 public:
  ChainSampler(const Decomposition& d, std::size_t power) : decomposition_(&d), power_(power) {
    require_normalized(d);
    table_ = AliasTable(d.kappas());
  }

  const Decomposition& decomposition() const noexcept { return *decomposition_; }
  std::size_t power() const noexcept { return power_; }

  std::vector<std::size_t> sample(CounterRng& rng) const {
    std::vector<std::size_t> x(power_);
    for (auto& i : x) i = table_.sample(rng);
    return x;
  }

  /// q(x) = prod_j kappa_{x_j}.
  double probability(std::span<const std::size_t> x) const {
    double q = 1.0;
    for (std::size_t i : x) q *= decomposition_->kappas().at(i);
    return q;
  }

  /// A_{x_r} ... A_{x_1}, with x_1 applied first.
  MatrixChain chain(std::span<const std::size_t> x) const {
    std::vector<SparseTerm> factors;
    std::vector<double> bounds;
    factors.reserve(x.size());
    bounds.reserve(x.size());
    for (std::size_t i : x) {
      factors.push_back(decomposition_->term(i));
      bounds.push_back(decomposition_->kappas().at(i));
    }
    return MatrixChain(decomposition_->dimension(), std::move(factors), std::move(bounds));
  }

 private:
  const Decomposition* decomposition_;
  std::size_t power_;
  AliasTable table_;
};

inline std::vector<std::size_t> sample_chain(const ChainSampler& sampler, CounterRng& rng) {
  return sampler.sample(rng);
}

/// Exact <psi| A_x |phi> from dense vectors. All m^r values are tabulated up
/// front when there are at most 2^16 of them; otherwise they are memoized.
class ExactChainValues {
 public:
  ExactChainValues(const ChainSampler& sampler, Eigen::VectorXcd psi, Eigen::VectorXcd phi)
      : sampler_(&sampler), psi_(std::move(psi)), phi_(std::move(phi)) {
    check_oracle_dimension(sampler.decomposition().dimension());
    const double m = static_cast<double>(sampler.decomposition().size());
    if (std::pow(m, static_cast<double>(sampler.power())) <= kTableLimit) tabulate();
  }

  Complex operator()(const std::vector<std::size_t>& x) const {
    if (!table_.empty()) return table_[flat_index(x)];
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(x); it != memo_.end()) return it->second;
    }
    const Complex v = exact_sandwich(psi_, sampler_->chain(x), phi_);
    std::lock_guard lock(mutex_);
    if (memo_.size() < kMemoLimit) memo_.emplace(x, v);
    return v;
  }

 private:
  static constexpr double kTableLimit = 65536.0;
  static constexpr std::size_t kMemoLimit = std::size_t{1} << 20;

  std::size_t flat_index(const std::vector<std::size_t>& x) const {
    std::size_t k = 0;
    for (std::size_t j = x.size(); j-- > 0;) k = k * sampler_->decomposition().size() + x[j];
    return k;
  }

  // Depth-first over chains sharing prefixes: A_{x_j} ... A_{x_1} phi is
  // computed once per prefix.
  void tabulate() {
    const std::size_t m = sampler_->decomposition().size();
    std::size_t count = 1;
    for (std::size_t j = 0; j < sampler_->power(); ++j) count *= m;
    table_.assign(count, Complex{});
    std::vector<std::size_t> x;
    descend(phi_, x);
  }

  void descend(const Eigen::VectorXcd& v, std::vector<std::size_t>& x) {
    if (x.size() == sampler_->power()) {
      table_[flat_index(x)] = psi_.dot(v);
      return;
    }
    for (std::size_t i = 0; i < sampler_->decomposition().size(); ++i) {
      x.push_back(i);
      descend(apply_term(sampler_->decomposition().term(i), v), x);
      x.pop_back();
    }
  }

  const ChainSampler* sampler_;
  Eigen::VectorXcd psi_, phi_;
  std::vector<Complex> table_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<std::size_t>, Complex> memo_;
};

/// One draw of X = <psi| A_x |phi> / q(x) with exact chain values.
/// E[X] = <psi| A^r |phi> and E|X|^2 <= 1 for unit psi, phi.
inline Complex single_power_sample(const ChainSampler& sampler, const ExactChainValues& values, CounterRng& rng) {
  const auto x = sampler.sample(rng);
  return values(x) / sampler.probability(x);
}

// ---------------------------------------------------------------------------
// Planning

/// Sample counts for one power. Counts are doubles: strict budgets overflow
/// any integer type long before they are rejected by the cost cap.
struct PowerPlan {
  std::size_t power = 0;
  double error = 0.0;
  double delta = 0.0;
  double batch_samples = 0.0;      // ceil(64 / e^2) chains per batch
  double batches = 0.0;            // median repetitions
  double inner_eps = 0.0;          // e / (2 sqrt 2), relative to prod kappa_{x_j}
  double inner_delta = 0.0;        // 1 / (8 t)
  double inner_samples = 0.0;
  double inner_repetitions = 0.0;
  double leaves_per_entry = 0.0;   // s^r
  double chain_samples = 0.0;
  double leaf_operations = 0.0;    // zero under exact chain evaluation
};

inline PowerPlan plan_power(std::size_t sparsity, std::size_t power, double error, double delta,
                            ChainEvaluation evaluation = ChainEvaluation::sampled) {
  if (!(error > 0.0 && error <= 1.0)) throw InvalidArgument("power error must lie in (0, 1], got " + std::to_string(error));
  check_unit_interval(delta, "delta");
  PowerPlan p;
  p.power = power;
  p.error = error;
  p.delta = delta;
  p.batch_samples = ceil_tolerant(64.0 / (error * error));
  p.batches = std::max(1.0, ceil_tolerant(18.0 * std::log(1.0 / delta)));
  p.inner_eps = error / (2.0 * std::sqrt(2.0));
  p.inner_delta = 1.0 / (8.0 * p.batch_samples);
  p.inner_samples = ceil_tolerant(8.0 / (p.inner_eps * p.inner_eps));
  p.inner_repetitions = std::max(1.0, ceil_tolerant(18.0 * std::log(1.0 / p.inner_delta)));
  p.leaves_per_entry = std::pow(static_cast<double>(sparsity), static_cast<double>(power));
  p.chain_samples = p.batch_samples * p.batches;
  if (evaluation == ChainEvaluation::sampled)
    p.leaf_operations = p.chain_samples * p.inner_samples * p.inner_repetitions * p.leaves_per_entry;
  return p;
}

inline nlohmann::json to_json(const PowerPlan& p) {
  return {{"power", p.power},
          {"error", p.error},
          {"delta", p.delta},
          {"batch_samples", p.batch_samples},
          {"batches", p.batches},
          {"inner_samples", p.inner_samples},
          {"inner_repetitions", p.inner_repetitions},
          {"leaves_per_entry", p.leaves_per_entry},
          {"chain_samples", p.chain_samples},
          {"leaf_operations", p.leaf_operations}};
}

struct TransformPlan {
  BudgetPolicy policy = BudgetPolicy::tight;
  ChainEvaluation evaluation = ChainEvaluation::sampled;
  double eta = 0.0;
  double delta_total = 0.0;
  std::size_t degree = 0;
  double coefficient_l1 = 0.0;
  double power_error = 0.0;
  double power_delta = 0.0;
  std::vector<PowerPlan> powers;  // nonzero coefficients only
  double chain_samples = 0.0;
  double leaf_operations = 0.0;
};

inline TransformPlan plan_transform(const Decomposition& d, const Polynomial& p, double eta, double delta_total,
                                    BudgetPolicy policy, ChainEvaluation evaluation = ChainEvaluation::sampled) {
  check_unit_interval(eta, "eta");
  check_unit_interval(delta_total, "delta");
  TransformPlan plan;
  plan.policy = policy;
  plan.evaluation = evaluation;
  plan.eta = eta;
  plan.delta_total = delta_total;
  plan.degree = p.degree();
  plan.coefficient_l1 = coefficient_l1(p);
  const double budget = policy == BudgetPolicy::strict ? std::pow(4.0, static_cast<double>(p.degree())) : plan.coefficient_l1;
  plan.power_error = std::min(1.0, eta / budget);
  plan.power_delta = delta_total / static_cast<double>(p.degree() + 1);
  for (std::size_t r = 0; r <= p.degree(); ++r) {
    if (p.coefficient(r) == 0) continue;
    plan.powers.push_back(plan_power(d.sparsity(), r, plan.power_error, plan.power_delta, evaluation));
    plan.chain_samples += plan.powers.back().chain_samples;
    plan.leaf_operations += plan.powers.back().leaf_operations;
  }
  return plan;
}

inline nlohmann::json to_json(const TransformPlan& plan) {
  nlohmann::json powers = nlohmann::json::array();
  for (const auto& p : plan.powers) powers.push_back(to_json(p));
  return {{"policy", to_string(plan.policy)},
          {"chain_evaluation", to_string(plan.evaluation)},
          {"eta", plan.eta},
          {"delta", plan.delta_total},
          {"degree", plan.degree},
          {"coefficient_l1", plan.coefficient_l1},
          {"power_error", plan.power_error},
          {"power_delta", plan.power_delta},
          {"chain_samples", plan.chain_samples},
          {"leaf_operations", plan.leaf_operations},
          {"log10_leaf_operations", plan.leaf_operations > 0 ? std::log10(plan.leaf_operations) : 0.0},
          {"powers", powers}};
}

inline void check_executable(const PowerPlan& p) {
  if (p.chain_samples > kMaxExecutableSamples || p.inner_samples * p.inner_repetitions > kMaxExecutableSamples)
    throw CostCapExceeded(p.chain_samples, kMaxExecutableSamples, to_json(p).dump());
}

// ---------------------------------------------------------------------------
// Estimation

struct PowerOptions {
  ChainEvaluation evaluation = ChainEvaluation::sampled;
  Execution exec{};
};

/// Estimate of <psi| A^r |phi> within err with probability >= 1 - delta.
template <VectorAccess Phi>
Complex estimate_power(const StateAccessor& psi, const Phi& phi, const Decomposition& d, std::size_t r, double err,
                       double delta, CounterRng& rng, const PowerOptions& options = {}) {
  if (psi.dimension() != d.dimension() || phi.dimension() != d.dimension())
    throw InvalidArgument("state dimensions do not match the decomposition");
  const ChainSampler sampler(d, r);
  const PowerPlan plan = plan_power(d.sparsity(), r, err, delta, options.evaluation);
  check_executable(plan);
  const auto t = static_cast<std::size_t>(plan.batch_samples);
  WorkCounters* counters = options.exec.counters;

  std::unique_ptr<ExactChainValues> exact;
  if (options.evaluation == ChainEvaluation::exact)
    exact = std::make_unique<ExactChainValues>(sampler, materialize(psi), materialize(phi));
  const Execution inner_exec{1, counters};

  auto batch = [&](CounterRng& stream) {
    Complex z{};
    for (std::size_t k = 0; k < t; ++k) {
      const auto x = sampler.sample(stream);
      Complex alpha;
      if (exact) {
        alpha = (*exact)(x);
      } else {
        CounterRng inner = stream.split();
        alpha = estimate_chain_sandwich(psi, sampler.chain(x), phi, plan.inner_eps, plan.inner_delta, inner, inner_exec);
      }
      z += alpha / sampler.probability(x);
    }
    if (counters) counters->add_chain_samples(t);
    return z / static_cast<double>(t);
  };
  return median_of_runs(batch, static_cast<std::size_t>(plan.batches), rng, options.exec);
}

struct TransformOptions {
  BudgetPolicy policy = BudgetPolicy::tight;
  ChainEvaluation evaluation = ChainEvaluation::sampled;
  double cost_cap = std::numeric_limits<double>::infinity();  // leaf operations, sampled evaluation only
  Execution exec{};
};

struct TransformResult {
  Complex value;
  std::vector<Complex> powers;  // E_r per power; zero where a_r = 0
  TransformPlan plan;
};

/// Estimate of <psi| P(A) |phi> within eta with probability >= 1 - delta_total:
/// sum_r a_r E_r with each E_r within the per-power error of <psi| A^r |phi>.
/// Power r draws from stream derive(r) of one key taken from `rng`.
template <VectorAccess Phi>
TransformResult estimate_polynomial_transform(const StateAccessor& psi, const Phi& phi, const Decomposition& d,
                                              const Polynomial& p, double eta, double delta_total, CounterRng& rng,
                                              const TransformOptions& options = {}) {
  require_normalized(d);
  TransformResult out;
  out.plan = plan_transform(d, p, eta, delta_total, options.policy, options.evaluation);
  if (options.evaluation == ChainEvaluation::sampled && out.plan.leaf_operations > options.cost_cap)
    throw CostCapExceeded(out.plan.leaf_operations, options.cost_cap, to_json(out.plan).dump());
  for (const auto& pp : out.plan.powers) check_executable(pp);

  const CounterRng base = rng.split();
  const PowerOptions power_options{options.evaluation, options.exec};
  out.powers.assign(p.degree() + 1, Complex{});
  Extended re = 0, im = 0;
  for (const auto& pp : out.plan.powers) {
    CounterRng stream = base.derive(pp.power);
    const Complex e = estimate_power(psi, phi, d, pp.power, pp.error, pp.delta, stream, power_options);
    out.powers[pp.power] = e;
    re += p.coefficient(pp.power) * Extended(e.real());
    im += p.coefficient(pp.power) * Extended(e.imag());
  }
  out.value = Complex(static_cast<double>(re), static_cast<double>(im));
  return out;
}

}  // namespace dequant
