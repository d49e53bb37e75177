#pragma once

// Reference constructions used as oracles. None of them goes through the
// library's row-entry machinery.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dequant/dequant.hpp"

namespace testing_support {

using dequant::Complex;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli_matrix(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad Pauli letter");
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Letter q acts on bit q of the index, so the leftmost Kronecker factor is
/// the last letter.
inline Mat pauli_dense(const std::string& letters) {
  Mat m = Mat::Identity(1, 1);
  for (char c : letters) m = kron(pauli_matrix(c), m);
  return m;
}

/// Block on `support` (support[0] is the low bit of the block index), identity elsewhere.
inline Mat embed_block(const Mat& block, const std::vector<unsigned>& support, unsigned qubits) {
  const Eigen::Index n = Eigen::Index{1} << qubits;
  Mat out = Mat::Zero(n, n);
  unsigned long long mask = 0;
  for (unsigned q : support) mask |= 1ULL << q;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      if ((static_cast<unsigned long long>(r) & ~mask) != (static_cast<unsigned long long>(c) & ~mask)) continue;
      Eigen::Index lr = 0, lc = 0;
      for (std::size_t a = 0; a < support.size(); ++a) {
        lr |= ((r >> support[a]) & 1) << a;
        lc |= ((c >> support[a]) & 1) << a;
      }
      out(r, c) = block(lr, lc);
    }
  return out;
}

inline Mat dense_hamiltonian(const dequant::Hamiltonian& h) {
  const Eigen::Index n = Eigen::Index{1} << h.qubits;
  Mat out = Mat::Zero(n, n);
  for (const auto& t : h.terms) {
    if (const auto* p = std::get_if<dequant::PauliTerm>(&t.body)) out += p->coefficient * pauli_dense(p->string.str());
    else {
      const auto& b = std::get<dequant::BlockTerm>(t.body);
      out += embed_block(b.block, b.support, h.qubits);
    }
  }
  return out;
}

inline double smallest_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues()(0);
}

inline Vec to_vec(const std::vector<Complex>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

inline std::vector<Complex> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

/// P(M) by Horner on matrices with double coefficients.
inline Mat horner_matrix(const std::vector<double>& a, const Mat& m) {
  Mat acc = Mat::Zero(m.rows(), m.cols());
  const Mat id = Mat::Identity(m.rows(), m.cols());
  for (std::size_t i = a.size(); i-- > 0;) acc = acc * m + a[i] * id;
  return acc;
}

/// Random sparse matrix with exactly `s` distinct nonzero columns per row.
inline dequant::CsrMatrix random_csr(dequant::Index n, std::size_t s, dequant::CounterRng& rng) {
  std::vector<std::vector<dequant::RowEntry>> rows(n);
  for (dequant::Index r = 0; r < n; ++r) {
    std::vector<dequant::Index> cols;
    while (cols.size() < s) {
      const auto c = rng.below(n);
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    for (auto c : cols) rows[r].push_back({c, Complex(rng.normal(), rng.normal())});
  }
  return dequant::CsrMatrix(n, std::move(rows));
}

inline Mat csr_dense(const dequant::CsrMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dimension());
  Mat out = Mat::Zero(n, n);
  for (dequant::Index r = 0; r < m.dimension(); ++r)
    for (std::size_t l = 0; l < m.row_nnz(r); ++l) {
      const auto& e = m.row_entry(r, l);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e.column)) += e.value;
    }
  return out;
}

}  // namespace testing_support
