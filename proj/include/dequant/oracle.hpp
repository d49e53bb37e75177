#pragma once

// Dense ground truth for small instances. Nothing here is used by the
// estimators except the exact policies, which substitute these values for
// sampled ones.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/imm.hpp"
#include "dequant/polyfilter.hpp"
#include "dequant/state.hpp"

namespace dequant {

inline constexpr Index kMaxOracleDimension = Index{1} << 12;
inline constexpr double kNormalityTolerance = 1e-8;
inline constexpr double kDegeneracyTolerance = 1e-9;

inline void check_oracle_dimension(Index n) {
  if (n > kMaxOracleDimension)
    throw DimensionError("dense oracle limited to dimension " + std::to_string(kMaxOracleDimension) + ", got " +
                         std::to_string(n));
}

/// Dense matrix of one term, assembled from row queries.
inline Eigen::MatrixXcd to_dense(const SparseTerm& term) {
  check_oracle_dimension(term.dimension());
  const auto n = static_cast<Eigen::Index>(term.dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Index row = 0; row < term.dimension(); ++row)
    for (std::size_t l = 0, nnz = term.row_nnz(row); l < nnz; ++l) {
      const RowEntry e = term.row_entry(row, l);
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(e.column)) += e.value;
    }
  return m;
}

inline Eigen::MatrixXcd to_dense(const Decomposition& d) {
  check_oracle_dimension(d.dimension());
  const auto n = static_cast<Eigen::Index>(d.dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& term : d.terms()) m += to_dense(term);
  return m;
}

/// Hermitian matrix with its ascending eigendecomposition.
///
/// Normal matrices with a non-real spectrum are rejected: every consumer here
/// orders eigenvalues, and a normal matrix with a real spectrum is Hermitian.
class DenseOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("dense operator must be square");
    check_oracle_dimension(static_cast<Index>(matrix_.rows()));
    const Eigen::MatrixXcd adjoint = matrix_.adjoint();
    const double commutator = (matrix_ * adjoint - adjoint * matrix_).cwiseAbs().maxCoeff();
    if (commutator > kNormalityTolerance)
      throw InvariantError("operator is not normal: max |A A^+ - A^+ A| = " + std::to_string(commutator));
    const double skew = (matrix_ - adjoint).cwiseAbs().maxCoeff();
    if (skew > kNormalityTolerance)
      throw InvariantError("normal operator has a non-real spectrum: max |A - A^+| = " + std::to_string(skew));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (matrix_ + adjoint));
    if (solver.info() != Eigen::Success) throw InvariantError("eigendecomposition failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    reconstruction_error_ =
        (eigenvectors_ * eigenvalues_.cast<Complex>().asDiagonal() * eigenvectors_.adjoint() - matrix_)
            .cwiseAbs()
            .maxCoeff();
    if (reconstruction_error_ > kNormalityTolerance)
      throw InvariantError("eigen-reconstruction error " + std::to_string(reconstruction_error_));
  }

  Index dimension() const noexcept { return static_cast<Index>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXcd& eigenvectors() const noexcept { return eigenvectors_; }
  double reconstruction_error() const noexcept { return reconstruction_error_; }

 private:
  Eigen::MatrixXcd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  double reconstruction_error_ = 0.0;
};

inline DenseOperator reconstruct(const Decomposition& d) { return DenseOperator(to_dense(d)); }
inline DenseOperator reconstruct(const Hamiltonian& h) { return reconstruct(decompose(h)); }

/// All entries of a query-access vector.
template <VectorAccess V>
Eigen::VectorXcd materialize(const V& v) {
  if (v.dimension() > kMaxDenseStateDimension)
    throw DimensionError("cannot materialize a vector of dimension " + std::to_string(v.dimension()));
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.dimension()));
  for (Index j = 0; j < v.dimension(); ++j) out(static_cast<Eigen::Index>(j)) = v.query(j);
  return out;
}

inline double exact_ground_energy(const DenseOperator& op) { return op.eigenvalues()(0); }

inline Eigen::VectorXcd ground_vector(const DenseOperator& op) { return op.eigenvectors().col(0); }

/// Indices of S(A, sigma) = {i : lambda_i <= lambda_1 + sigma}, degeneracies grouped.
inline std::vector<Eigen::Index> low_energy_indices(const DenseOperator& op, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("overlap width must be nonnegative");
  std::vector<Eigen::Index> out;
  const double cut = exact_ground_energy(op) + sigma + kDegeneracyTolerance;
  for (Eigen::Index i = 0; i < op.eigenvalues().size(); ++i)
    if (op.eigenvalues()(i) <= cut) out.push_back(i);
  return out;
}

/// Generalized overlap: norm of the projection of w onto S(A, sigma).
inline double exact_overlap(const DenseOperator& op, const Eigen::VectorXcd& w, double sigma) {
  if (w.size() != op.eigenvalues().size()) throw InvalidArgument("overlap vector has the wrong dimension");
  double sum = 0.0;
  for (Eigen::Index i : low_energy_indices(op, sigma)) sum += std::norm(op.eigenvectors().col(i).dot(w));
  return std::sqrt(sum);
}

/// Sparse matrix-vector product through row queries.
inline Eigen::VectorXcd apply_term(const SparseTerm& term, const Eigen::VectorXcd& v) {
  if (static_cast<Index>(v.size()) != term.dimension()) throw InvalidArgument("operand dimension mismatch");
  Eigen::VectorXcd out(v.size());
  for (Index row = 0; row < term.dimension(); ++row) {
    Complex z{};
    for (std::size_t l = 0, nnz = term.row_nnz(row); l < nnz; ++l) {
      const RowEntry e = term.row_entry(row, l);
      z += e.value * v(static_cast<Eigen::Index>(e.column));
    }
    out(static_cast<Eigen::Index>(row)) = z;
  }
  return out;
}

/// <psi| A |phi>.
inline Complex exact_sandwich(const Eigen::VectorXcd& psi, const DenseOperator& op, const Eigen::VectorXcd& phi) {
  return psi.dot(op.matrix() * phi);
}

/// <psi| B_r ... B_1 |phi>.
inline Complex exact_sandwich(const Eigen::VectorXcd& psi, const MatrixChain& chain, const Eigen::VectorXcd& phi) {
  Eigen::VectorXcd v = phi;
  for (std::size_t i = 0; i < chain.length(); ++i) v = apply_term(chain.factor(i), v);
  return psi.dot(v);
}

/// <psi| A^r |phi> by repeated multiplication.
inline Complex exact_power_sandwich(const Eigen::VectorXcd& psi, const DenseOperator& op, std::size_t r,
                                    const Eigen::VectorXcd& phi) {
  Eigen::VectorXcd v = phi;
  for (std::size_t i = 0; i < r; ++i) v = op.matrix() * v;
  return psi.dot(v);
}

/// <psi| P(A) |phi> = sum_i P(lambda_i) <psi|u_i><u_i|phi>, with P evaluated in
/// extended precision.
inline Complex exact_sandwich(const Eigen::VectorXcd& psi, const DenseOperator& op, const Polynomial& p,
                              const Eigen::VectorXcd& phi) {
  const Eigen::VectorXcd a = op.eigenvectors().adjoint() * psi;
  const Eigen::VectorXcd b = op.eigenvectors().adjoint() * phi;
  Complex sum{};
  for (Eigen::Index i = 0; i < a.size(); ++i) sum += p(op.eigenvalues()(i)) * std::conj(a(i)) * b(i);
  return sum;
}

/// P(A) in the eigenbasis.
inline Eigen::MatrixXcd polynomial_of(const DenseOperator& op, const Polynomial& p) {
  Eigen::VectorXcd values(op.eigenvalues().size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = p(op.eigenvalues()(i));
  return op.eigenvectors() * values.asDiagonal() * op.eigenvectors().adjoint();
}

}  // namespace dequant
