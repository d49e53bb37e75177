#pragma once

// Hamiltonians as sums of row-sparse terms, with row-query access that never
// materializes the 2^n-dimensional embedding of a term.
//
// Qubit convention: qubit q is bit q of a basis index (little-endian). In a
// Pauli string the letter at position q acts on qubit q. In a block term the
// first support qubit is the least significant bit of the block's row and
// column index.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dequant/errors.hpp"

namespace dequant {

using Complex = std::complex<double>;
using Index = std::uint64_t;

inline constexpr unsigned kMaxQubits = 62;
inline constexpr unsigned kDefaultDenseTermQubits = 12;

struct RowEntry {
  Index column = 0;
  Complex value;
};

// ---------------------------------------------------------------------------
// Pauli strings

class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::string_view letters) : qubits_(static_cast<unsigned>(letters.size())) {
    if (letters.empty()) throw ParseError("empty Pauli string");
    if (letters.size() > kMaxQubits)
      throw ParseError("Pauli string longer than " + std::to_string(kMaxQubits) + " qubits");
    for (std::size_t q = 0; q < letters.size(); ++q) {
      const Index bit = Index{1} << q;
      switch (letters[q]) {
        case 'I': break;
        case 'X': x_ |= bit; break;
        case 'Y': x_ |= bit; z_ |= bit; break;
        case 'Z': z_ |= bit; break;
        default:
          throw ParseError(std::string("invalid Pauli character '") + letters[q] + "'", 0, q + 1);
      }
    }
  }

  static PauliString identity(unsigned qubits) { return PauliString(std::string(qubits, 'I')); }

  unsigned qubits() const noexcept { return qubits_; }
  Index x_mask() const noexcept { return x_; }
  Index z_mask() const noexcept { return z_; }
  unsigned y_count() const noexcept { return static_cast<unsigned>(std::popcount(x_ & z_)); }
  unsigned weight() const noexcept { return static_cast<unsigned>(std::popcount(x_ | z_)); }

  char letter(unsigned q) const noexcept {
    const Index bit = Index{1} << q;
    const bool x = x_ & bit, z = z_ & bit;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  std::string str() const {
    std::string out(qubits_, 'I');
    for (unsigned q = 0; q < qubits_; ++q) out[q] = letter(q);
    return out;
  }

  /// Same operator on more qubits, identity on the new ones.
  PauliString padded(unsigned qubits) const {
    if (qubits < qubits_) throw InvalidArgument("cannot pad a Pauli string to fewer qubits");
    PauliString out = *this;
    out.qubits_ = qubits;
    return out;
  }

  /// The single nonzero of row `row`: column row ^ x, value (-i)^{#Y} (-1)^{|row & z|}.
  RowEntry row_entry(Index row) const noexcept {
    static constexpr Complex kMinusIPowers[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    Complex value = kMinusIPowers[y_count() & 3u];
    if (std::popcount(row & z_) & 1) value = -value;
    return {row ^ x_, value};
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  unsigned qubits_ = 0;
  Index x_ = 0;  // X or Y on the qubit
  Index z_ = 0;  // Z or Y on the qubit
};

// ---------------------------------------------------------------------------
// Local terms

struct PauliTerm {
  double coefficient = 0.0;
  PauliString string;
};

struct BlockTerm {
  std::vector<unsigned> support;
  Eigen::MatrixXcd block;
  bool hermitian = true;
};

struct LocalTerm {
  std::variant<PauliTerm, BlockTerm> body;
  std::optional<double> kappa_override;

  bool is_pauli() const noexcept { return std::holds_alternative<PauliTerm>(body); }

  unsigned locality() const {
    if (const auto* p = std::get_if<PauliTerm>(&body)) return p->string.weight();
    return static_cast<unsigned>(std::get<BlockTerm>(body).support.size());
  }
};

inline LocalTerm pauli_term(double coefficient, std::string_view letters) {
  return LocalTerm{PauliTerm{coefficient, PauliString(letters)}, std::nullopt};
}

inline LocalTerm block_term(std::vector<unsigned> support, Eigen::MatrixXcd block, bool hermitian = true) {
  return LocalTerm{BlockTerm{std::move(support), std::move(block), hermitian}, std::nullopt};
}

struct Hamiltonian {
  unsigned qubits = 0;
  std::vector<LocalTerm> terms;

  Index dimension() const noexcept { return Index{1} << qubits; }
};

inline bool is_hermitian(const Eigen::MatrixXcd& m, double tolerance = 1e-12) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      const double scale = std::max(1.0, std::max(std::abs(m(i, j)), std::abs(m(j, i))));
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tolerance * scale) return false;
    }
  return true;
}

/// Checks term invariants against an n-qubit register; `label` names the term in errors.
inline void validate_term(const LocalTerm& term, unsigned qubits, const std::string& label) {
  if (const auto* p = std::get_if<PauliTerm>(&term.body)) {
    if (!std::isfinite(p->coefficient)) throw InvariantError(label + ": non-finite coefficient");
    if (p->string.qubits() != qubits)
      throw InvariantError(label + ": Pauli string has " + std::to_string(p->string.qubits()) +
                           " letters, register has " + std::to_string(qubits) + " qubits");
  } else {
    const auto& b = std::get<BlockTerm>(term.body);
    const std::size_t k = b.support.size();
    if (k == 0) throw InvariantError(label + ": empty support");
    if (k > qubits) throw InvariantError(label + ": support larger than register");
    for (std::size_t a = 0; a < k; ++a) {
      if (b.support[a] >= qubits)
        throw InvariantError(label + ": support qubit " + std::to_string(b.support[a]) + " out of range");
      for (std::size_t c = a + 1; c < k; ++c)
        if (b.support[a] == b.support[c])
          throw InvariantError(label + ": repeated support qubit " + std::to_string(b.support[a]));
    }
    if (k > 30) throw DimensionError(label + ": block on more than 30 qubits");
    const Eigen::Index dim = Eigen::Index{1} << k;
    if (b.block.rows() != dim || b.block.cols() != dim)
      throw InvariantError(label + ": block must be " + std::to_string(dim) + "x" + std::to_string(dim));
    if (!b.block.allFinite()) throw InvariantError(label + ": non-finite block entry");
    if (b.hermitian && !is_hermitian(b.block)) throw InvariantError(label + ": block is not Hermitian");
  }
  if (term.kappa_override && !(*term.kappa_override >= 0.0 && std::isfinite(*term.kappa_override)))
    throw InvariantError(label + ": KAPPA_I must be a finite nonnegative number");
}

inline void validate(const Hamiltonian& h) {
  if (h.qubits == 0 || h.qubits > kMaxQubits)
    throw InvariantError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  for (std::size_t i = 0; i < h.terms.size(); ++i) validate_term(h.terms[i], h.qubits, "term " + std::to_string(i + 1));
}

/// Spectral norm of a term from its local description.
inline double compute_term_norm(const LocalTerm& term, unsigned dense_limit = kDefaultDenseTermQubits) {
  if (const auto* p = std::get_if<PauliTerm>(&term.body)) return std::abs(p->coefficient);
  const auto& b = std::get<BlockTerm>(term.body);
  if (b.support.size() > dense_limit)
    throw DimensionError("block on " + std::to_string(b.support.size()) + " qubits exceeds dense limit of " +
                         std::to_string(dense_limit));
  if (b.block.size() == 0) return 0.0;
  if (b.hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(b.block, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b.block);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// Row-query access

/// Explicit row-compressed sparse matrix, for arbitrary (non-qubit) dimensions.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Exact zeros are dropped.
  CsrMatrix(Index dimension, const std::vector<std::vector<RowEntry>>& rows) : dimension_(dimension) {
    if (rows.size() != dimension) throw InvalidArgument("CsrMatrix: one row list per row required");
    offsets_.reserve(rows.size() + 1);
    offsets_.push_back(0);
    for (const auto& row : rows) {
      for (const auto& e : row) {
        if (e.column >= dimension) throw InvalidArgument("CsrMatrix: column out of range");
        if (e.value != Complex{}) entries_.push_back(e);
      }
      offsets_.push_back(entries_.size());
      sparsity_ = std::max<std::size_t>(sparsity_, offsets_.back() - offsets_[offsets_.size() - 2]);
    }
  }

  Index dimension() const noexcept { return dimension_; }
  std::size_t sparsity() const noexcept { return sparsity_; }
  std::size_t row_nnz(Index row) const noexcept { return offsets_[row + 1] - offsets_[row]; }
  const RowEntry& row_entry(Index row, std::size_t l) const noexcept { return entries_[offsets_[row] + l]; }

 private:
  Index dimension_ = 0;
  std::size_t sparsity_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<RowEntry> entries_;
};

namespace detail {

/// Nonzero pattern of a 2^k block embedded on chosen qubits of an n-qubit register.
struct EmbeddedBlock {
  unsigned qubits = 0;
  std::vector<unsigned> support;
  Index support_mask = 0;
  std::vector<std::vector<std::pair<Index, Complex>>> rows;  // per local row: (local column, value)
  std::size_t sparsity = 0;

  Index gather(Index row) const noexcept {
    Index local = 0;
    for (std::size_t a = 0; a < support.size(); ++a) local |= ((row >> support[a]) & 1u) << a;
    return local;
  }

  Index scatter(Index base, Index local) const noexcept {
    Index out = base & ~support_mask;
    for (std::size_t a = 0; a < support.size(); ++a) out |= ((local >> a) & 1u) << support[a];
    return out;
  }
};

struct IdentityOp {};
struct PauliOp {
  PauliString string;
};
struct BlockOp {
  std::shared_ptr<const EmbeddedBlock> block;
};
struct CsrOp {
  std::shared_ptr<const CsrMatrix> matrix;
};

}  // namespace detail

/// Query access to one s-sparse term: row nonzero counts and the l-th nonzero of
/// a row. Immutable; copies share the underlying data.
class SparseTerm {
 public:
  static SparseTerm identity(Index dimension, Complex scale = 1.0) {
    return SparseTerm(detail::IdentityOp{}, scale, dimension, 1);
  }

  static SparseTerm pauli(const PauliString& string, Complex scale = 1.0) {
    return SparseTerm(detail::PauliOp{string}, scale, Index{1} << string.qubits(), 1);
  }

  static SparseTerm block(std::span<const unsigned> support, const Eigen::MatrixXcd& block, unsigned qubits,
                          Complex scale = 1.0) {
    auto data = std::make_shared<detail::EmbeddedBlock>();
    data->qubits = qubits;
    data->support.assign(support.begin(), support.end());
    for (unsigned q : support) data->support_mask |= Index{1} << q;
    data->rows.resize(static_cast<std::size_t>(block.rows()));
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c)
        if (block(r, c) != Complex{}) data->rows[r].emplace_back(static_cast<Index>(c), block(r, c));
      data->sparsity = std::max(data->sparsity, data->rows[r].size());
    }
    const std::size_t s = data->sparsity;
    return SparseTerm(detail::BlockOp{std::move(data)}, scale, Index{1} << qubits, s);
  }

  static SparseTerm csr(CsrMatrix matrix, Complex scale = 1.0) {
    const Index n = matrix.dimension();
    const std::size_t s = matrix.sparsity();
    return SparseTerm(detail::CsrOp{std::make_shared<const CsrMatrix>(std::move(matrix))}, scale, n, s);
  }

  Index dimension() const noexcept { return dimension_; }
  /// Upper bound on row_nnz over all rows.
  std::size_t sparsity() const noexcept { return scale_ == Complex{} ? 0 : sparsity_; }
  Complex scale() const noexcept { return scale_; }

  SparseTerm scaled(Complex factor) const {
    SparseTerm out = *this;
    out.scale_ *= factor;
    return out;
  }

  std::size_t row_nnz(Index row) const noexcept {
    if (scale_ == Complex{}) return 0;
    return std::visit(
        [&](const auto& op) -> std::size_t {
          using Op = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<Op, detail::BlockOp>) return op.block->rows[op.block->gather(row)].size();
          else if constexpr (std::is_same_v<Op, detail::CsrOp>) return op.matrix->row_nnz(row);
          else return 1;
        },
        op_);
  }

  RowEntry row_entry(Index row, std::size_t l) const noexcept {
    return std::visit(
        [&](const auto& op) -> RowEntry {
          using Op = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<Op, detail::IdentityOp>) {
            return {row, scale_};
          } else if constexpr (std::is_same_v<Op, detail::PauliOp>) {
            RowEntry e = op.string.row_entry(row);
            e.value *= scale_;
            return e;
          } else if constexpr (std::is_same_v<Op, detail::BlockOp>) {
            const auto& [local, value] = op.block->rows[op.block->gather(row)][l];
            return {op.block->scatter(row, local), value * scale_};
          } else {
            const RowEntry& e = op.matrix->row_entry(row, l);
            return {e.column, e.value * scale_};
          }
        },
        op_);
  }

 private:
  using Op = std::variant<detail::IdentityOp, detail::PauliOp, detail::BlockOp, detail::CsrOp>;

  SparseTerm(Op op, Complex scale, Index dimension, std::size_t sparsity)
      : op_(std::move(op)), scale_(scale), dimension_(dimension), sparsity_(sparsity) {}

  Op op_;
  Complex scale_;
  Index dimension_;
  std::size_t sparsity_;
};

/// Row-query handle for the 2^n embedding of a term (identity on the other qubits).
inline SparseTerm term_to_sparse(const LocalTerm& term, unsigned qubits) {
  validate_term(term, qubits, "term");
  if (const auto* p = std::get_if<PauliTerm>(&term.body)) return SparseTerm::pauli(p->string, p->coefficient);
  const auto& b = std::get<BlockTerm>(term.body);
  return SparseTerm::block(b.support, b.block, qubits);
}

// ---------------------------------------------------------------------------
// (s, kappa)-decompositions

/// A = sum_i A_i with per-term norm bounds kappa_i >= ||A_i||.
class Decomposition {
 public:
  Decomposition() = default;

  Decomposition(Index dimension, std::vector<SparseTerm> terms, std::vector<double> kappas)
      : dimension_(dimension), terms_(std::move(terms)), kappas_(std::move(kappas)) {
    if (terms_.size() != kappas_.size()) throw InvalidArgument("one norm bound per term required");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i].dimension() != dimension_)
        throw InvalidArgument("term " + std::to_string(i + 1) + " has mismatched dimension");
      if (!(kappas_[i] >= 0.0) || !std::isfinite(kappas_[i]))
        throw InvalidArgument("norm bound of term " + std::to_string(i + 1) + " must be finite and nonnegative");
      kappa_ += kappas_[i];
      sparsity_ = std::max(sparsity_, terms_[i].sparsity());
    }
  }

  Index dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<SparseTerm>& terms() const noexcept { return terms_; }
  const SparseTerm& term(std::size_t i) const { return terms_.at(i); }
  const std::vector<double>& kappas() const noexcept { return kappas_; }
  double kappa() const noexcept { return kappa_; }
  std::size_t sparsity() const noexcept { return sparsity_; }

 private:
  Index dimension_ = 0;
  std::vector<SparseTerm> terms_;
  std::vector<double> kappas_;
  double kappa_ = 0.0;
  std::size_t sparsity_ = 0;
};

/// Decomposition of a local Hamiltonian: one term per H_i, kappa_i = ||H_i||
/// unless the term carries a (looser) override.
inline Decomposition decompose(const Hamiltonian& h, unsigned dense_limit = kDefaultDenseTermQubits) {
  validate(h);
  std::vector<SparseTerm> terms;
  std::vector<double> kappas;
  terms.reserve(h.terms.size());
  kappas.reserve(h.terms.size());
  for (std::size_t i = 0; i < h.terms.size(); ++i) {
    const LocalTerm& t = h.terms[i];
    const double norm = compute_term_norm(t, dense_limit);
    double kappa = norm;
    if (t.kappa_override) {
      if (*t.kappa_override < norm * (1.0 - 1e-12) - 1e-15)
        throw InvariantError("term " + std::to_string(i + 1) + ": KAPPA_I=" + std::to_string(*t.kappa_override) +
                             " is below the term norm " + std::to_string(norm));
      kappa = *t.kappa_override;
    }
    terms.push_back(term_to_sparse(t, h.qubits));
    kappas.push_back(kappa);
  }
  return Decomposition(h.dimension(), std::move(terms), std::move(kappas));
}

/// Decomposition of A' = (I + A/kappa)/2: the identity half as its own 1-sparse
/// term with bound 1/2, then each A_i/(2 kappa) with bound kappa_i/(2 kappa).
/// Total bound is 1 and the spectrum of A' lies in [0, 1].
inline Decomposition shift_rescale(const Decomposition& d) {
  const double kappa = d.kappa();
  if (!(kappa > 0.0)) throw ZeroKappaError();
  std::vector<SparseTerm> terms;
  std::vector<double> kappas;
  terms.reserve(d.size() + 1);
  kappas.reserve(d.size() + 1);
  terms.push_back(SparseTerm::identity(d.dimension(), 0.5));
  kappas.push_back(0.5);
  const double factor = 1.0 / (2.0 * kappa);
  for (std::size_t i = 0; i < d.size(); ++i) {
    terms.push_back(d.term(i).scaled(factor));
    kappas.push_back(d.kappas()[i] * factor);
  }
  return Decomposition(d.dimension(), std::move(terms), std::move(kappas));
}

/// H (x) I on 2n qubits: H acts on qubits [0, n), identity on [n, 2n).
inline Hamiltonian with_ancilla_register(const Hamiltonian& h) {
  if (2 * h.qubits > kMaxQubits) throw DimensionError("doubled register exceeds " + std::to_string(kMaxQubits) + " qubits");
  Hamiltonian out{2 * h.qubits, {}};
  out.terms.reserve(h.terms.size());
  for (const LocalTerm& t : h.terms) {
    LocalTerm copy = t;
    if (auto* p = std::get_if<PauliTerm>(&copy.body)) p->string = p->string.padded(out.qubits);
    out.terms.push_back(std::move(copy));
  }
  return out;
}

}  // namespace dequant
