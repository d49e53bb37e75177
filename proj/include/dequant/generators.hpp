#pragma once

// Random instances for tests and benchmarks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"
#include "dequant/rng.hpp"

namespace dequant {

/// m Pauli terms on n qubits with coefficients uniform in [-1, -0.1] u [0.1, 1].
/// Each string acts on `weight` distinct random qubits (all n when 0) with
/// letters drawn from {X, Y, Z}.
inline Hamiltonian random_pauli_hamiltonian(unsigned qubits, std::size_t terms, CounterRng& rng, unsigned weight = 0) {
  if (qubits == 0 || qubits > kMaxQubits) throw InvalidArgument("qubit count out of range");
  if (weight == 0 || weight > qubits) weight = qubits;
  Hamiltonian h{qubits, {}};
  std::vector<unsigned> order(qubits);
  for (std::size_t i = 0; i < terms; ++i) {
    std::iota(order.begin(), order.end(), 0u);
    std::string letters(qubits, 'I');
    for (unsigned j = 0; j < weight; ++j) {
      const auto pick = j + static_cast<unsigned>(rng.below(qubits - j));
      std::swap(order[j], order[pick]);
      letters[order[j]] = "XYZ"[rng.below(3)];
    }
    const double magnitude = 0.1 + 0.9 * rng.uniform();
    h.terms.push_back(pauli_term(rng.below(2) ? magnitude : -magnitude, letters));
  }
  return h;
}

/// Random Hermitian 2^k x 2^k matrix with Gaussian entries.
inline Eigen::MatrixXcd random_hermitian(unsigned k, CounterRng& rng) {
  const auto dim = static_cast<Eigen::Index>(1) << k;
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = Complex(rng.normal(), rng.normal());
  return 0.5 * (g + g.adjoint());
}

/// m dense k-local Hermitian block terms on random supports.
inline Hamiltonian random_local_hamiltonian(unsigned qubits, std::size_t terms, unsigned k, CounterRng& rng) {
  if (qubits == 0 || qubits > kMaxQubits) throw InvalidArgument("qubit count out of range");
  if (k == 0 || k > qubits || k > 6) throw InvalidArgument("locality must lie in [1, min(n, 6)]");
  Hamiltonian h{qubits, {}};
  std::vector<unsigned> order(qubits);
  for (std::size_t i = 0; i < terms; ++i) {
    std::iota(order.begin(), order.end(), 0u);
    for (unsigned j = 0; j < k; ++j) std::swap(order[j], order[j + rng.below(qubits - j)]);
    std::vector<unsigned> support(order.begin(), order.begin() + k);
    h.terms.push_back(block_term(std::move(support), random_hermitian(k, rng)));
  }
  return h;
}

/// Every term scaled by a common factor so that sum_i ||H_i|| = 1.
inline Hamiltonian normalized(const Hamiltonian& h) {
  const double kappa = decompose(h).kappa();
  if (!(kappa > 0.0)) throw ZeroKappaError();
  Hamiltonian out = h;
  for (auto& t : out.terms) {
    if (auto* p = std::get_if<PauliTerm>(&t.body)) p->coefficient /= kappa;
    else std::get<BlockTerm>(t.body).block /= kappa;
    if (t.kappa_override) *t.kappa_override /= kappa;
  }
  return out;
}

/// Haar-like random unit vector (normalized complex Gaussian).
inline std::vector<Complex> random_state(Index dimension, CounterRng& rng) {
  std::vector<Complex> v(dimension);
  double norm = 0.0;
  for (auto& z : v) {
    z = Complex(rng.normal(), rng.normal());
    norm += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(norm);
  return v;
}

}  // namespace dequant
