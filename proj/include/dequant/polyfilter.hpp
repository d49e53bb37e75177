#pragma once

// Bounded polynomial approximations of the rectangle (step-down) function on
// [-1, 1]:  P(x) in [1 - xi, 1] on [0, tau],  P(x) in [0, xi] on [tau + theta, 1],
// |P(x)| <= 1 everywhere. Construction: a smoothed step 0.5 erfc(k (x - c))
// interpolated in the Chebyshev basis, shifted and rescaled into [0, 1], at the
// smallest degree whose grid check passes.
//
// The power-by-power estimators consume monomial coefficients, whose l1 norm
// grows like (1 + sqrt 2)^d. They are stored and evaluated with 100 significant
// digits; a double copy would lose the polynomial entirely beyond d ~ 30.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dequant/errors.hpp"

namespace dequant {

using Extended = boost::multiprecision::cpp_bin_float_100;

inline constexpr double kBandTolerance = 1e-9;

/// Real polynomial in the monomial basis, sum_i a_i x^i.
///
/// Evaluation at a double point uses the narrowest of double, double-double,
/// 50 and 100 digits whose worst-case Horner error, about (d + 1) u sum|a_i|, stays below 1e-15.
class Polynomial {
 public:
  Polynomial() : coeffs_{Extended(0)} { prepare(); }
  explicit Polynomial(const std::vector<double>& coeffs) : coeffs_(coeffs.begin(), coeffs.end()) { prepare(); }
  explicit Polynomial(std::vector<Extended> coeffs) : coeffs_(std::move(coeffs)) { prepare(); }

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  const std::vector<Extended>& coefficients() const noexcept { return coeffs_; }
  const Extended& coefficient(std::size_t i) const { return coeffs_.at(i); }
  const std::vector<double>& coefficients_double() const noexcept { return doubles_; }
  double l1() const noexcept { return l1_; }

  Extended evaluate(const Extended& x) const { return horner(coeffs_, x); }

  double operator()(double x) const {
    switch (tier_) {
      case Tier::binary64: return horner(doubles_, x);
      case Tier::double_double: return horner_dd(x);
      case Tier::digits50: return static_cast<double>(horner(mid_, Mid(x)));
      default: return static_cast<double>(horner(coeffs_, Extended(x)));
    }
  }

 private:
  using Mid = boost::multiprecision::cpp_bin_float_50;
  enum class Tier { binary64, double_double, digits50, digits100 };

  // Error-free transforms; hi + lo carries about 106 bits.
  struct DD {
    double hi = 0.0, lo = 0.0;
  };

  static DD two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
  }

  double horner_dd(double x) const {
    DD acc{};
    for (std::size_t i = hi_.size(); i-- > 0;) {
      // acc * x
      const double p = acc.hi * x;
      const double pe = std::fma(acc.hi, x, -p) + acc.lo * x;
      DD prod = two_sum(p, pe);
      // + a_i
      DD s = two_sum(prod.hi, hi_[i]);
      s.lo += prod.lo + lo_[i];
      acc = two_sum(s.hi, s.lo);
    }
    return acc.hi + acc.lo;
  }

  template <class T>
  static T horner(const std::vector<T>& a, const T& x) {
    T acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
  }

  void prepare() {
    if (coeffs_.empty()) coeffs_.push_back(Extended(0));
    Extended sum = 0;
    for (const auto& a : coeffs_) {
      sum += abs(a);
      doubles_.push_back(static_cast<double>(a));
    }
    l1_ = static_cast<double>(sum);
    const double scale = static_cast<double>(coeffs_.size()) * std::max(l1_, 1.0);
    if (scale * 2.3e-16 <= 1e-15 && all_exact_in_double()) {
      tier_ = Tier::binary64;
    } else if (scale * 1e-31 <= 1e-15) {
      tier_ = Tier::double_double;
      for (const auto& a : coeffs_) {
        const double hi = static_cast<double>(a);
        hi_.push_back(hi);
        lo_.push_back(static_cast<double>(a - Extended(hi)));
      }
    } else if (scale * 1e-49 <= 1e-15) {
      tier_ = Tier::digits50;
      for (const auto& a : coeffs_) mid_.push_back(static_cast<Mid>(a));
    } else {
      tier_ = Tier::digits100;
    }
  }

  bool all_exact_in_double() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (Extended(doubles_[i]) != coeffs_[i]) return false;
    return true;
  }

  std::vector<Extended> coeffs_;
  std::vector<double> doubles_;
  std::vector<Mid> mid_;
  std::vector<double> hi_, lo_;
  double l1_ = 0.0;
  Tier tier_ = Tier::digits100;
};

/// Horner evaluation of sum_i a_i x^i.
inline double eval_poly(const Polynomial& p, double x) { return p(x); }

/// sum_i |a_i|.
inline double coefficient_l1(const Polynomial& p) { return p.l1(); }

// ---------------------------------------------------------------------------
// Chebyshev machinery

/// Coefficients c_0..c_d of the degree-d interpolant of f at the Chebyshev
/// points of the first kind, f ~ sum_j c_j T_j.
inline std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f, std::size_t degree) {
  const std::size_t n = degree + 1;
  const double pi = 3.14159265358979323846;
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = f(std::cos(pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n)));
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      sum += values[k] * std::cos(pi * static_cast<double>(j) * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
    c[j] = (j == 0 ? 1.0 : 2.0) * sum / static_cast<double>(n);
  }
  return c;
}

/// Clenshaw evaluation of sum_j c_j T_j(x).
inline double chebyshev_evaluate(std::span<const double> c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

/// Exact-rational re-expansion of sum_j c_j T_j in monomials, accumulated in
/// extended precision.
inline std::vector<Extended> chebyshev_to_monomial(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<Extended> out(std::max<std::size_t>(n, 1), Extended(0));
  if (n == 0) return out;
  std::vector<Extended> prev(n, Extended(0)), curr(n, Extended(0)), next(n, Extended(0));
  prev[0] = 1;  // T_0
  out[0] += Extended(c[0]);
  if (n == 1) return out;
  curr[1] = 1;  // T_1
  out[1] += Extended(c[1]);
  for (std::size_t j = 2; j < n; ++j) {
    // T_j = 2 x T_{j-1} - T_{j-2}
    std::fill(next.begin(), next.end(), Extended(0));
    for (std::size_t i = 0; i + 1 < n; ++i) next[i + 1] += 2 * curr[i];
    for (std::size_t i = 0; i < n; ++i) next[i] -= prev[i];
    for (std::size_t i = 0; i <= j; ++i) out[i] += Extended(c[j]) * next[i];
    std::swap(prev, curr);
    std::swap(curr, next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Band verification

struct BandCheck {
  std::size_t grid_points = 0;
  double max_abs = 0.0;         // over [-1, 1]
  double low_band_min = 0.0;    // over [0, tau]
  double low_band_max = 0.0;
  double high_band_min = 0.0;   // over [tau + theta, 1]; 0 when that band is empty
  double high_band_max = 0.0;
  bool passed = false;
};

/// Grid of `points` equispaced nodes on [-1, 1] plus the band endpoints.
inline std::vector<double> band_grid(double tau, double theta, std::size_t points) {
  std::vector<double> grid;
  grid.reserve(points + 4);
  for (std::size_t i = 0; i < points; ++i)
    grid.push_back(points == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1));
  for (double x : {0.0, tau, tau + theta, 1.0})
    if (x <= 1.0) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

template <class Eval>
BandCheck check_band(Eval&& eval, double tau, double theta, double xi, std::size_t points,
                     double tolerance = kBandTolerance) {
  BandCheck out;
  out.low_band_min = std::numeric_limits<double>::infinity();
  out.low_band_max = -std::numeric_limits<double>::infinity();
  out.high_band_min = std::numeric_limits<double>::infinity();
  out.high_band_max = -std::numeric_limits<double>::infinity();
  const auto grid = band_grid(tau, theta, points);
  out.grid_points = grid.size();
  bool high_seen = false;
  for (double x : grid) {
    const double y = eval(x);
    out.max_abs = std::max(out.max_abs, std::abs(y));
    if (x >= 0.0 && x <= tau) {
      out.low_band_min = std::min(out.low_band_min, y);
      out.low_band_max = std::max(out.low_band_max, y);
    }
    if (x >= tau + theta) {
      high_seen = true;
      out.high_band_min = std::min(out.high_band_min, y);
      out.high_band_max = std::max(out.high_band_max, y);
    }
  }
  if (!high_seen) out.high_band_min = out.high_band_max = 0.0;
  out.passed = out.max_abs <= 1.0 + tolerance && out.low_band_min >= 1.0 - xi - tolerance &&
               out.low_band_max <= 1.0 + tolerance && out.high_band_min >= -tolerance &&
               out.high_band_max <= xi + tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Construction

struct RectangleOptions {
  std::size_t degree_cap = 200;
  std::size_t grid_points = 10001;
};

struct RectanglePolynomial {
  Polynomial polynomial;           // monomial form
  std::vector<double> chebyshev;   // same polynomial in the Chebyshev basis
  double tau = 0.0;
  double theta = 0.0;
  double xi = 0.0;
  double steepness = 0.0;          // k of the smoothed step
  double step_share = 0.0;         // fraction of xi spent on the step's own tails
  double truncation_error = 0.0;   // grid sup |interpolant - step|
  double basis_discrepancy = 0.0;  // grid sup |monomial form - Chebyshev form|
  BandCheck verification;          // on the monomial form

  std::size_t degree() const noexcept { return polynomial.degree(); }
};

inline void check_band_parameters(double tau, double theta, double xi) {
  if (!(xi > 0.0 && xi <= 1.0)) throw InvalidArgument("xi must lie in (0, 1], got " + std::to_string(xi));
  if (!(tau >= 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in [0, 1), got " + std::to_string(tau));
  if (!(theta > 0.0 && theta <= 1.0 - tau + 1e-12))
    throw InvalidArgument("theta must lie in (0, 1 - tau], got " + std::to_string(theta));
}

/// Smallest-degree grid-certified rectangle polynomial.
inline RectanglePolynomial build_rectangle_polynomial(double tau, double theta, double xi,
                                                      const RectangleOptions& options = {}) {
  check_band_parameters(tau, theta, xi);
  const auto grid = band_grid(tau, theta, options.grid_points);
  const auto coarse = band_grid(tau, theta, std::min<std::size_t>(options.grid_points, 501));
  const double center = tau + 0.5 * theta;
  static constexpr double kShares[] = {0.75, 0.5, 0.25};

  for (std::size_t degree = 0; degree <= options.degree_cap; ++degree) {
    for (double share : kShares) {
      // 0.5 erfc(k theta / 2) = share * xi: the step's tails at the band edges.
      const double steepness = 2.0 * boost::math::erfc_inv(2.0 * share * xi) / theta;
      auto step = [=](double x) { return 0.5 * std::erfc(steepness * (x - center)); };
      std::vector<double> cheb = chebyshev_interpolate(step, degree);

      // Coarse-grid error is a lower bound on the fine one, so this skip is safe.
      double eta = 0.0;
      for (double x : coarse) eta = std::max(eta, std::abs(chebyshev_evaluate(cheb, x) - step(x)));
      if (2.0 * eta * (1.0 - xi) > (1.0 - share) * xi) continue;
      for (double x : grid) eta = std::max(eta, std::abs(chebyshev_evaluate(cheb, x) - step(x)));
      eta = eta * 1.01 + 1e-15;
      // (g + eta) / (1 + 2 eta) maps [-eta, 1 + eta] into [0, 1].
      if (2.0 * eta * (1.0 - xi) > (1.0 - share) * xi) continue;
      cheb[0] += eta;
      for (double& c : cheb) c /= 1.0 + 2.0 * eta;

      const auto fast = check_band([&](double x) { return chebyshev_evaluate(cheb, x); }, tau, theta, xi,
                                   options.grid_points);
      if (!fast.passed) continue;

      RectanglePolynomial out;
      out.polynomial = Polynomial(chebyshev_to_monomial(cheb));
      out.chebyshev = std::move(cheb);
      out.tau = tau;
      out.theta = theta;
      out.xi = xi;
      out.steepness = steepness;
      out.step_share = share;
      out.truncation_error = eta;
      for (double x : grid)
        out.basis_discrepancy =
            std::max(out.basis_discrepancy, std::abs(out.polynomial(x) - chebyshev_evaluate(out.chebyshev, x)));
      if (out.basis_discrepancy > kBandTolerance)
        throw DegreeOverflowError("monomial form of the degree-" + std::to_string(degree) +
                                      " rectangle polynomial is ill-conditioned (discrepancy " +
                                      std::to_string(out.basis_discrepancy) + ")",
                                  options.degree_cap);
      out.verification = check_band([&](double x) { return out.polynomial(x); }, tau, theta, xi, options.grid_points);
      if (out.verification.passed) return out;
    }
  }
  throw DegreeOverflowError("no rectangle polynomial with tau=" + std::to_string(tau) + ", theta=" +
                                std::to_string(theta) + ", xi=" + std::to_string(xi) + " passed verification up to degree " +
                                std::to_string(options.degree_cap),
                            options.degree_cap);
}

/// Memoizes build_rectangle_polynomial. The construction is a pure function of
/// its arguments, so cached entries are shared freely.
class RectangleCache {
 public:
  std::shared_ptr<const RectanglePolynomial> get(double tau, double theta, double xi, const RectangleOptions& options = {}) {
    const Key key{tau, theta, xi, options.degree_cap, options.grid_points};
    {
      std::lock_guard lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto built = std::make_shared<const RectanglePolynomial>(build_rectangle_polynomial(tau, theta, xi, options));
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, std::move(built)).first->second;
  }

  static RectangleCache& shared() {
    static RectangleCache cache;
    return cache;
  }

 private:
  using Key = std::tuple<double, double, double, std::size_t, std::size_t>;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const RectanglePolynomial>> entries_;
};

}  // namespace dequant
