#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dequant/errors.hpp"
#include "dequant/rng.hpp"

namespace dequant {

/// Walker/Vose alias table: O(n) construction, O(1) sampling.
/// Zero-weight outcomes are never returned.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw InvalidArgument("alias table needs at least one outcome");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw InvalidArgument("alias table weights must be nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("alias table weights sum to zero");

    accept_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t i : large) accept_[i] = 1.0, alias_[i] = i;
    for (std::size_t i : small) {
      // A zero-weight leftover can only arise from rounding; point it at a
      // column that is kept with certainty.
      if (weights[i] == 0.0) {
        accept_[i] = 0.0;
        alias_[i] = large.empty() ? first_positive(weights) : large.front();
      } else {
        accept_[i] = 1.0;
        alias_[i] = i;
      }
    }
  }

  std::size_t size() const noexcept { return accept_.size(); }

  std::size_t sample(CounterRng& rng) const noexcept {
    const std::size_t column = static_cast<std::size_t>(rng.below(accept_.size()));
    return rng.uniform() < accept_[column] ? column : alias_[column];
  }

 private:
  static std::size_t first_positive(std::span<const double> weights) {
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) return i;
    return 0;
  }

  std::vector<double> accept_;
  std::vector<std::size_t> alias_;
};

}  // namespace dequant
