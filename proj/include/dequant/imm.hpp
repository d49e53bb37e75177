#pragma once

// Iterated matrix multiplication: entries of B_r ... B_1 |phi> by depth-first
// recursion over row nonzeros, and the sampled estimate of
// <psi| B_r ... B_1 |phi>.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/inner_product.hpp"
#include "dequant/parallel.hpp"
#include "dequant/state.hpp"

namespace dequant {

/// Ordered product B_r ... B_1; factor(0) is B_1, the first applied to |phi>.
class MatrixChain {
 public:
  explicit MatrixChain(Index dimension) : dimension_(dimension) {}

  MatrixChain(Index dimension, std::vector<SparseTerm> factors, std::vector<double> norm_bounds)
      : dimension_(dimension), factors_(std::move(factors)), norm_bounds_(std::move(norm_bounds)) {
    if (factors_.size() != norm_bounds_.size()) throw InvalidArgument("one norm bound per chain factor required");
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (factors_[i].dimension() != dimension_) throw InvalidArgument("chain factors must share one dimension");
      if (!(norm_bounds_[i] >= 0.0)) throw InvalidArgument("chain norm bounds must be nonnegative");
    }
  }

  Index dimension() const noexcept { return dimension_; }
  std::size_t length() const noexcept { return factors_.size(); }
  const SparseTerm& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<double>& norm_bounds() const noexcept { return norm_bounds_; }

  std::size_t sparsity() const noexcept {
    std::size_t s = 0;
    for (const auto& f : factors_) s = std::max(s, f.sparsity());
    return s;
  }

  /// Upper bound on ||B_r ... B_1||.
  double norm_product() const noexcept {
    double p = 1.0;
    for (double b : norm_bounds_) p *= b;
    return p;
  }

 private:
  Index dimension_;
  std::vector<SparseTerm> factors_;
  std::vector<double> norm_bounds_;
};

/// Instrumentation for chain_entry.
struct ChainProbe {
  std::uint64_t leaf_queries = 0;  // queries to |phi>
  std::uint64_t row_queries = 0;   // nonzero-count queries on chain rows
  std::size_t max_depth = 0;       // deepest recursion frame reached (top call is 0)
};

namespace detail {

template <VectorAccess Phi>
Complex chain_entry_at(std::size_t level, Index ell, const MatrixChain& chain, const Phi& phi, ChainProbe* probe,
                       std::size_t depth) {
  if (probe) probe->max_depth = std::max(probe->max_depth, depth);
  if (level == 0) {
    if (probe) ++probe->leaf_queries;
    return phi.query(ell);
  }
  const SparseTerm& b = chain.factor(level - 1);
  const std::size_t nnz = b.row_nnz(ell);
  if (probe) ++probe->row_queries;
  Complex z{};
  for (std::size_t t = 0; t < nnz; ++t) {
    const RowEntry e = b.row_entry(ell, t);
    z += e.value * chain_entry_at(level - 1, e.column, chain, phi, probe, depth + 1);
  }
  return z;
}

}  // namespace detail

/// <ell| B_r ... B_1 |phi>, exact up to rounding. Holds one frame per chain
/// factor and never a length-N vector; costs at most s^r queries to phi.
template <VectorAccess Phi>
Complex chain_entry(Index ell, const MatrixChain& chain, const Phi& phi, ChainProbe* probe = nullptr) {
  return detail::chain_entry_at(chain.length(), ell, chain, phi, probe, 0);
}

/// Query access to the vector B_r ... B_1 |phi>.
template <VectorAccess Phi>
class ChainVector {
 public:
  ChainVector(const MatrixChain& chain, const Phi& phi, WorkCounters* counters = nullptr)
      : chain_(&chain), phi_(&phi), counters_(counters) {}

  Index dimension() const noexcept { return chain_->dimension(); }

  Complex query(Index ell) const {
    if (!counters_) return chain_entry(ell, *chain_, *phi_);
    ChainProbe probe;
    const Complex v = chain_entry(ell, *chain_, *phi_, &probe);
    counters_->add_leaf_queries(probe.leaf_queries);
    return v;
  }

 private:
  const MatrixChain* chain_;
  const Phi* phi_;
  WorkCounters* counters_;
};

/// Estimate of <psi| B_r ... B_1 |phi> within eps * prod ||B_i|| with
/// probability >= 1 - delta: the inner-product estimator applied to
/// w = B_r ... B_1 |phi>.
template <VectorAccess Phi>
Complex estimate_chain_sandwich(const StateAccessor& psi, const MatrixChain& chain, const Phi& phi, double eps,
                                double delta, CounterRng& rng, const Execution& exec = {}) {
  if (phi.dimension() != chain.dimension()) throw InvalidArgument("phi dimension does not match the chain");
  const ChainVector<Phi> w(chain, phi, exec.counters);
  return estimate_inner_product(psi, w, chain.norm_product(), eps, delta, rng, exec);
}

}  // namespace dequant
