#pragma once

// Randomized estimation of <psi|w> from sample-and-query access to psi and
// query access to w, with confidence amplification by medians.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dequant/errors.hpp"
#include "dequant/parallel.hpp"
#include "dequant/rng.hpp"
#include "dequant/state.hpp"

namespace dequant {

/// ceil(x), ignoring relative rounding noise below 1e-12 (so 8/0.1^2 is 800, not 801).
inline double ceil_tolerant(double x) { return std::ceil(x * (1.0 - 1e-12)); }

inline void check_unit_interval(double value, const char* name) {
  if (!(value > 0.0 && value <= 1.0))
    throw InvalidArgument(std::string(name) + " must lie in (0, 1], got " + std::to_string(value));
}

/// Repetitions for median amplification: ceil(18 ln(1/delta)), at least 1.
inline std::size_t median_repetitions(double delta) {
  check_unit_interval(delta, "delta");
  return static_cast<std::size_t>(std::max(1.0, ceil_tolerant(18.0 * std::log(1.0 / delta))));
}

/// Samples per averaged batch of the inner-product estimator: ceil(8 / eps^2).
inline std::size_t inner_product_samples(double eps) {
  check_unit_interval(eps, "epsilon");
  return static_cast<std::size_t>(ceil_tolerant(8.0 / (eps * eps)));
}

/// Median of real parts and median of imaginary parts, taken separately.
inline Complex coordinatewise_median(std::vector<Complex> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  auto median_of = [](std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
  };
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) re[i] = values[i].real(), im[i] = values[i].imag();
  return {median_of(re), median_of(im)};
}

/// Runs `run(CounterRng&) -> Complex` `repetitions` times on independent
/// streams and returns the coordinatewise median. Repetition i always uses the
/// same stream, so the result does not depend on the worker count.
template <class Run>
Complex median_of_runs(Run&& run, std::size_t repetitions, CounterRng& rng, const Execution& exec = {}) {
  if (repetitions == 0) throw InvalidArgument("median amplification needs at least one repetition");
  const CounterRng base = rng.split();
  std::vector<Complex> results(repetitions);
  parallel_for(repetitions, exec, [&](std::size_t i) {
    CounterRng stream = base.derive(i);
    results[i] = run(stream);
  });
  return coordinatewise_median(std::move(results));
}

/// Amplifies an estimator that is within eps of mu with probability >= 3/4 to
/// one within sqrt(2) eps with probability >= 1 - delta.
template <class Run>
Complex median_amplify(Run&& run, double delta, CounterRng& rng, const Execution& exec = {}) {
  return median_of_runs(std::forward<Run>(run), median_repetitions(delta), rng, exec);
}

/// One draw of the ratio estimator: sample j ~ |psi_j|^2, return w_j / psi_j.
/// Unbiased for <psi|w> with E|X|^2 = ||w||^2.
template <VectorAccess W>
Complex single_ratio_sample(const StateAccessor& psi, const W& w, CounterRng& rng, WorkCounters* counters = nullptr) {
  const Index j = psi.sample(rng);
  const Complex amplitude = psi.query(j);
  const Complex target = w.query(j);
  if (counters) counters->add_state_samples(1);
  if (amplitude == Complex{}) {
    if (target != Complex{}) throw UndefinedRatioError(j);
    return {};
  }
  return target / amplitude;
}

/// Mean of `samples` ratio draws.
template <VectorAccess W>
Complex mean_ratio(const StateAccessor& psi, const W& w, std::size_t samples, CounterRng& rng,
                   WorkCounters* counters = nullptr) {
  Complex sum{};
  for (std::size_t i = 0; i < samples; ++i) sum += single_ratio_sample(psi, w, rng, counters);
  return sum / static_cast<double>(samples);
}

/// Estimate a of <psi|w> with |a - <psi|w>| <= eps ||w|| with probability >= 1 - delta.
///
/// Each repetition averages ceil(8/eps^2) ratio draws, which is within
/// eps/sqrt(2) ||w|| with probability >= 3/4 by Chebyshev; the coordinatewise
/// median of ceil(18 ln(1/delta)) repetitions is within eps ||w||.
/// `w_norm_bound` is an upper bound on ||w|| that the guarantee is stated against.
template <VectorAccess W>
Complex estimate_inner_product(const StateAccessor& psi, const W& w, double w_norm_bound, double eps, double delta,
                               CounterRng& rng, const Execution& exec = {}) {
  if (psi.dimension() != w.dimension())
    throw InvalidArgument("inner product of vectors with dimensions " + std::to_string(psi.dimension()) + " and " +
                          std::to_string(w.dimension()));
  if (!(w_norm_bound >= 0.0)) throw InvalidArgument("norm bound must be nonnegative");
  const std::size_t samples = inner_product_samples(eps);
  const std::size_t repetitions = median_repetitions(delta);
  return median_of_runs([&](CounterRng& stream) { return mean_ratio(psi, w, samples, stream, exec.counters); },
                        repetitions, rng, exec);
}

}  // namespace dequant
