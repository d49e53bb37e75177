#include <gtest/gtest.h>

#include "support.hpp"

using namespace dequant;
using namespace testing_support;

namespace {

const double kHalf = 1 / std::sqrt(2.0);

Vec plus() { return Vec::Constant(2, Complex(kHalf, 0)); }

Hamiltonian heisenberg() {
  return {2, {pauli_term(1, "XX"), pauli_term(1, "YY"), pauli_term(1, "ZZ")}};
}

}  // namespace

TEST(Reconstruct, SmallExamples) {
  const auto z = reconstruct(Hamiltonian{1, {pauli_term(1, "Z")}});
  EXPECT_EQ(z.matrix(), pauli_matrix('Z'));
  const auto xz = reconstruct(Hamiltonian{1, {pauli_term(1, "X"), pauli_term(1, "Z")}});
  Mat expected(2, 2);
  expected << 1, 1, 1, -1;
  EXPECT_EQ(xz.matrix(), expected);
  CounterRng rng(1);
  const auto h = random_pauli_hamiltonian(3, 3, rng);
  EXPECT_EQ(reconstruct(h).matrix(), reconstruct(h).matrix());
}

TEST(GroundEnergy, Examples) {
  EXPECT_NEAR(exact_ground_energy(reconstruct(Hamiltonian{1, {pauli_term(1, "Z")}})), -1.0, 1e-14);
  EXPECT_NEAR(exact_ground_energy(DenseOperator(Mat::Identity(4, 4))), 1.0, 1e-14);
  const auto op = reconstruct(heisenberg());
  EXPECT_NEAR(exact_ground_energy(op), -3.0, 1e-12);
  // Triplet at +1.
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(op.eigenvalues()(i), 1.0, 1e-12);
  // Singlet (|01> - |10>)/sqrt 2 spans the ground space.
  Vec singlet = Vec::Zero(4);
  singlet(1) = kHalf;
  singlet(2) = -kHalf;
  EXPECT_NEAR(exact_overlap(op, singlet, 0.0), 1.0, 1e-12);
}

TEST(Overlap, Examples) {
  const auto z = DenseOperator(pauli_matrix('Z'));
  EXPECT_NEAR(exact_overlap(z, Vec::Unit(2, 1), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(exact_overlap(z, plus(), 0.0), kHalf, 1e-15);
  EXPECT_NEAR(exact_overlap(z, plus(), 2.0), 1.0, 1e-15);
  EXPECT_THROW(exact_overlap(z, plus(), -1.0), InvalidArgument);
  EXPECT_THROW(exact_overlap(z, Vec::Unit(4, 0), 0.0), InvalidArgument);
}

TEST(Overlap, DegenerateEigenvaluesAreGrouped) {
  Mat m = Mat::Zero(3, 3);
  m(1, 1) = 1e-11;
  m(2, 2) = 1.0;
  const DenseOperator op(m);
  EXPECT_EQ(low_energy_indices(op, 0.0).size(), 2u);
  EXPECT_NEAR(exact_overlap(op, Vec::Unit(3, 1), 0.0), 1.0, 1e-15);
}

TEST(Overlap, MaxEntangledStateOnDoubledRegister) {
  CounterRng rng(12);
  for (unsigned n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 3; ++trial) {
      const auto h = random_local_hamiltonian(n, 3, std::min(2u, n), rng);
      const auto op = reconstruct(with_ancilla_register(h));
      const Vec phi = materialize(StateAccessor::max_entangled(n));
      EXPECT_GE(exact_overlap(op, phi, 0.0), std::pow(2.0, -0.5 * n) - 1e-12);
    }
}

TEST(Sandwich, Examples) {
  EXPECT_EQ(exact_sandwich(Vec::Unit(2, 1), DenseOperator(pauli_matrix('X')), Vec::Unit(2, 0)), Complex(1, 0));
  const DenseOperator z(pauli_matrix('Z'));
  EXPECT_NEAR(std::abs(exact_sandwich(plus(), z, plus())), 0.0, 1e-15);
  const Polynomial t2(std::vector<double>{-1, 0, 2});
  EXPECT_NEAR(std::abs(exact_sandwich(plus(), z, t2, plus()) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(exact_power_sandwich(plus(), DenseOperator(pauli_matrix('X')), 3, plus()) - 1.0), 0.0, 1e-15);
}

TEST(Sandwich, EigenbasisAgreesWithHorner) {
  CounterRng rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned n = 1 + trial % 4;
    Mat a = dense_hamiltonian(random_local_hamiltonian(n, 3, std::min(2u, n), rng));
    a /= std::max(1.0, std::abs(smallest_eigenvalue(-a)) + std::abs(smallest_eigenvalue(a)));
    const DenseOperator op(a);
    const std::size_t d = trial % 21;
    std::vector<double> c(d + 1);
    for (auto& x : c) x = rng.normal();
    const Polynomial p(c);
    const Mat eig = polynomial_of(op, p);
    EXPECT_LE((eig - horner_matrix(c, a)).cwiseAbs().maxCoeff(), 1e-7) << trial;
    const Vec psi = to_vec(random_state(a.rows(), rng));
    EXPECT_LE(std::abs(exact_sandwich(psi, op, p, psi) - psi.dot(horner_matrix(c, a) * psi)), 1e-7);
  }
}

TEST(Sandwich, ChainMatchesDenseProduct) {
  CounterRng rng(2);
  const auto m1 = random_csr(16, 3, rng), m2 = random_csr(16, 2, rng);
  const MatrixChain chain(16, {SparseTerm::csr(m1), SparseTerm::csr(m2)}, {1.0, 1.0});
  const Vec psi = to_vec(random_state(16, rng)), phi = to_vec(random_state(16, rng));
  const Complex expected = psi.dot(csr_dense(m2) * csr_dense(m1) * phi);
  EXPECT_NEAR(std::abs(exact_sandwich(psi, chain, phi) - expected), 0.0, 1e-12);
}

TEST(DenseOperator, RejectsNonNormalAndNonRealSpectrum) {
  Mat jordan(2, 2);
  jordan << 0, 1, 0, 0;
  EXPECT_THROW(DenseOperator{jordan}, InvariantError);
  Mat rotation(2, 2);
  rotation << 0, -1, 1, 0;
  EXPECT_THROW(DenseOperator{rotation}, InvariantError);
  EXPECT_THROW(DenseOperator{Mat::Zero(2, 3)}, DimensionError);
  EXPECT_THROW(check_oracle_dimension(kMaxOracleDimension + 1), DimensionError);
  EXPECT_NO_THROW(check_oracle_dimension(kMaxOracleDimension));
  EXPECT_THROW(reconstruct(Hamiltonian{13, {pauli_term(1, std::string(12, 'I') + "Z")}}), DimensionError);
}

TEST(DenseOperator, ShiftRescaleRelation) {
  CounterRng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = decompose(random_pauli_hamiltonian(3, 4, rng));
    EXPECT_NEAR(exact_ground_energy(reconstruct(shift_rescale(d))),
                0.5 * (1 + exact_ground_energy(reconstruct(d)) / d.kappa()), 1e-10);
  }
}
