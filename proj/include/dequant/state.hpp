#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dequant/alias_table.hpp"
#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/rng.hpp"

namespace dequant {

inline constexpr double kNormalizationTolerance = 1e-8;
inline constexpr Index kMaxDenseStateDimension = Index{1} << 24;

/// Query access to a vector: dimension() and query(j) -> <j|w>.
template <class V>
concept VectorAccess = requires(const V& v, Index j) {
  { v.query(j) } -> std::convertible_to<Complex>;
  { v.dimension() } -> std::convertible_to<Index>;
};

/// Query-only view over an owned dense vector.
class DenseVectorAccessor {
 public:
  DenseVectorAccessor() = default;
  explicit DenseVectorAccessor(std::vector<Complex> values) : values_(std::move(values)) {}

  Index dimension() const noexcept { return values_.size(); }
  Complex query(Index j) const noexcept { return values_[j]; }
  const std::vector<Complex>& values() const noexcept { return values_; }

 private:
  std::vector<Complex> values_;
};

namespace detail {

struct BasisState {
  Index dimension = 0;
  Index index = 0;
};

struct ProductState {
  std::vector<std::pair<Complex, Complex>> qubits;  // amplitudes of |0>, |1>
  std::vector<double> one_probability;
};

struct DenseState {
  std::shared_ptr<const std::vector<Complex>> amplitudes;
  std::shared_ptr<const AliasTable> sampler;
};

struct MaxEntangledState {
  unsigned half_qubits = 0;  // index = i + (i << half_qubits)
};

}  // namespace detail

/// Sample-and-query access to a unit vector: exact amplitude queries and exact
/// Born-rule sampling. Immutable; sampling takes the caller's random stream.
class StateAccessor {
 public:
  static StateAccessor basis(Index dimension, Index index) {
    if (dimension == 0 || index >= dimension)
      throw InvalidArgument("basis index " + std::to_string(index) + " out of range for dimension " +
                            std::to_string(dimension));
    return StateAccessor(detail::BasisState{dimension, index});
  }

  static StateAccessor product(std::vector<std::pair<Complex, Complex>> qubits) {
    if (qubits.empty() || qubits.size() > kMaxQubits) throw InvalidArgument("product state needs 1..62 qubits");
    detail::ProductState s;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
      const double n2 = std::norm(qubits[q].first) + std::norm(qubits[q].second);
      if (std::abs(std::sqrt(n2) - 1.0) > kNormalizationTolerance)
        throw InvalidArgument("product state qubit " + std::to_string(q) + " is not normalized (norm " +
                              std::to_string(std::sqrt(n2)) + ")");
      s.one_probability.push_back(std::norm(qubits[q].second) / n2);
    }
    s.qubits = std::move(qubits);
    return StateAccessor(std::move(s));
  }

  static StateAccessor dense(std::vector<Complex> amplitudes) {
    if (amplitudes.empty() || amplitudes.size() > kMaxDenseStateDimension)
      throw InvalidArgument("dense state dimension must be in [1, 2^24]");
    std::vector<double> weights(amplitudes.size());
    double n2 = 0.0;
    for (std::size_t j = 0; j < amplitudes.size(); ++j) n2 += weights[j] = std::norm(amplitudes[j]);
    if (std::abs(std::sqrt(n2) - 1.0) > kNormalizationTolerance)
      throw InvalidArgument("dense state is not normalized (norm " + std::to_string(std::sqrt(n2)) + ")");
    detail::DenseState s;
    s.sampler = std::make_shared<const AliasTable>(weights);
    s.amplitudes = std::make_shared<const std::vector<Complex>>(std::move(amplitudes));
    return StateAccessor(std::move(s));
  }

  /// (1/sqrt(2^n)) sum_i |i>|i> on 2n qubits; system qubits are the low n bits.
  static StateAccessor max_entangled(unsigned half_qubits) {
    if (half_qubits == 0 || 2 * half_qubits > kMaxQubits) throw InvalidArgument("maximally entangled state needs 1..31 qubit pairs");
    return StateAccessor(detail::MaxEntangledState{half_qubits});
  }

  Index dimension() const noexcept {
    return std::visit(
        [](const auto& s) -> Index {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, detail::BasisState>) return s.dimension;
          else if constexpr (std::is_same_v<S, detail::ProductState>) return Index{1} << s.qubits.size();
          else if constexpr (std::is_same_v<S, detail::DenseState>) return s.amplitudes->size();
          else return Index{1} << (2 * s.half_qubits);
        },
        state_);
  }

  double norm() const noexcept { return 1.0; }

  Complex query(Index j) const noexcept {
    return std::visit(
        [j](const auto& s) -> Complex {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, detail::BasisState>) {
            return j == s.index ? Complex{1.0} : Complex{};
          } else if constexpr (std::is_same_v<S, detail::ProductState>) {
            Complex amp{1.0};
            for (std::size_t q = 0; q < s.qubits.size(); ++q)
              amp *= ((j >> q) & 1u) ? s.qubits[q].second : s.qubits[q].first;
            return amp;
          } else if constexpr (std::is_same_v<S, detail::DenseState>) {
            return (*s.amplitudes)[j];
          } else {
            const Index low = j & ((Index{1} << s.half_qubits) - 1);
            if ((j >> s.half_qubits) != low) return Complex{};
            return Complex{std::pow(2.0, -0.5 * s.half_qubits)};
          }
        },
        state_);
  }

  /// Draws j with probability |<j|psi>|^2.
  Index sample(CounterRng& rng) const noexcept {
    return std::visit(
        [&rng](const auto& s) -> Index {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, detail::BasisState>) {
            return s.index;
          } else if constexpr (std::is_same_v<S, detail::ProductState>) {
            Index j = 0;
            for (std::size_t q = 0; q < s.qubits.size(); ++q)
              if (rng.uniform() < s.one_probability[q]) j |= Index{1} << q;
            return j;
          } else if constexpr (std::is_same_v<S, detail::DenseState>) {
            return s.sampler->sample(rng);
          } else {
            const Index i = rng.below(Index{1} << s.half_qubits);
            return i | (i << s.half_qubits);
          }
        },
        state_);
  }

  /// "basis", "product", "dense" or "maxent".
  std::string kind() const {
    static constexpr const char* kNames[] = {"basis", "product", "dense", "maxent"};
    return kNames[state_.index()];
  }

  bool is_max_entangled() const noexcept { return std::holds_alternative<detail::MaxEntangledState>(state_); }

 private:
  using State = std::variant<detail::BasisState, detail::ProductState, detail::DenseState, detail::MaxEntangledState>;
  explicit StateAccessor(State s) : state_(std::move(s)) {}

  State state_;
};

static_assert(VectorAccess<StateAccessor>);
static_assert(VectorAccess<DenseVectorAccessor>);

// ---------------------------------------------------------------------------
// Dense state files: little-endian u64 N, then N pairs of f64 (re, im).

namespace detail {

template <class T>
T from_little_endian(const char* bytes) {
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, bytes, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

template <class T>
void to_little_endian(T value, char* bytes) {
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  std::memcpy(bytes, raw, sizeof(T));
}

}  // namespace detail

inline std::vector<Complex> read_dense_state_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dense state file '" + path.string() + "'");
  char header[8];
  if (!in.read(header, 8)) throw ParseError("dense state file '" + path.string() + "' is missing its length header");
  const auto n = detail::from_little_endian<std::uint64_t>(header);
  if (n == 0 || n > kMaxDenseStateDimension)
    throw ParseError("dense state file declares dimension " + std::to_string(n) + ", outside [1, 2^24]");
  std::vector<char> body(static_cast<std::size_t>(n) * 16);
  if (!in.read(body.data(), static_cast<std::streamsize>(body.size())))
    throw ParseError("dense state file '" + path.string() + "' is truncated");
  if (in.peek() != std::char_traits<char>::eof())
    throw ParseError("dense state file '" + path.string() + "' has trailing bytes");
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = {detail::from_little_endian<double>(&body[16 * j]), detail::from_little_endian<double>(&body[16 * j + 8])};
  return out;
}

inline void write_dense_state_file(const std::filesystem::path& path, const std::vector<Complex>& amplitudes) {
  std::vector<char> bytes(8 + 16 * amplitudes.size());
  detail::to_little_endian<std::uint64_t>(amplitudes.size(), bytes.data());
  for (std::size_t j = 0; j < amplitudes.size(); ++j) {
    detail::to_little_endian(amplitudes[j].real(), &bytes[8 + 16 * j]);
    detail::to_little_endian(amplitudes[j].imag(), &bytes[16 + 16 * j]);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw Error("cannot write dense state file '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// State specs: basis:<index> | product:<a0,b0;a1,b1;...> | dense:<path> | maxent

namespace detail {

inline Complex parse_complex_token(std::string_view text) {
  // Accepts "re" or "re+imj" / "re-imj" / "imj".
  std::string s(text);
  if (s.empty()) throw ParseError("empty amplitude in state spec");
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw ParseError("invalid amplitude '" + std::string(text) + "' in state spec");
    }
    if (used != t.size()) throw ParseError("invalid amplitude '" + std::string(text) + "' in state spec");
    return v;
  };
  if (s.back() != 'j' && s.back() != 'i') return {number(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  if (split == std::string::npos) return {0.0, s.empty() || s == "+" ? 1.0 : (s == "-" ? -1.0 : number(s))};
  const std::string im = s.substr(split);
  return {number(s.substr(0, split)), im == "+" ? 1.0 : (im == "-" ? -1.0 : number(im))};
}

}  // namespace detail

/// Builds a guiding state from its spec for an n-qubit Hamiltonian. `maxent`
/// yields the doubled 2n-qubit state.
inline StateAccessor parse_state_spec(std::string_view spec, unsigned qubits) {
  const Index dimension = Index{1} << qubits;
  if (spec == "maxent") return StateAccessor::max_entangled(qubits);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ParseError("state spec must be kind:value or 'maxent', got '" + std::string(spec) + "'");
  const auto kind = spec.substr(0, colon);
  const auto value = spec.substr(colon + 1);
  if (kind == "basis") {
    Index j = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), j);
    if (ec != std::errc{} || end != value.data() + value.size() || value.empty())
      throw ParseError("invalid basis index '" + std::string(value) + "'");
    return StateAccessor::basis(dimension, j);
  }
  if (kind == "product") {
    std::vector<std::pair<Complex, Complex>> amps;
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      const auto pair = rest.substr(0, semi);
      const auto comma = pair.find(',');
      if (comma == std::string_view::npos) throw ParseError("product qubit entry must be 'a,b', got '" + std::string(pair) + "'");
      amps.emplace_back(detail::parse_complex_token(pair.substr(0, comma)), detail::parse_complex_token(pair.substr(comma + 1)));
      if (semi == std::string_view::npos) break;
      rest.remove_prefix(semi + 1);
    }
    if (amps.size() != qubits)
      throw ParseError("product state has " + std::to_string(amps.size()) + " qubits, Hamiltonian has " + std::to_string(qubits));
    return StateAccessor::product(std::move(amps));
  }
  if (kind == "dense") {
    auto amps = read_dense_state_file(std::filesystem::path(std::string(value)));
    if (amps.size() != dimension)
      throw ParseError("dense state has dimension " + std::to_string(amps.size()) + ", expected " + std::to_string(dimension));
    return StateAccessor::dense(std::move(amps));
  }
  throw ParseError("unknown state kind '" + std::string(kind) + "'");
}

}  // namespace dequant
