#include <gtest/gtest.h>

#include "support.hpp"

using namespace dequant;
using namespace testing_support;

namespace {

MatrixChain csr_chain(const std::vector<CsrMatrix>& mats) {
  std::vector<SparseTerm> f;
  std::vector<double> bounds;
  for (const auto& m : mats) {
    f.push_back(SparseTerm::csr(m));
    bounds.push_back(1.0);
  }
  return MatrixChain(mats.front().dimension(), std::move(f), std::move(bounds));
}

MatrixChain pauli_chain(const std::vector<std::string>& letters) {
  std::vector<SparseTerm> f;
  for (const auto& s : letters) f.push_back(SparseTerm::pauli(PauliString(s)));
  const Index n = f.front().dimension();
  return MatrixChain(n, std::move(f), std::vector<double>(letters.size(), 1.0));
}

}  // namespace

TEST(ChainEntry, SingleFactorExamples) {
  const DenseVectorAccessor zero(std::vector<Complex>{{1, 0}, {0, 0}});
  EXPECT_EQ(chain_entry(1, pauli_chain({"X"}), zero), Complex(1, 0));
  const DenseVectorAccessor one(std::vector<Complex>{{0, 0}, {1, 0}});
  EXPECT_EQ(chain_entry(1, pauli_chain({"Z", "Z"}), one), Complex(1, 0));
}

TEST(ChainEntry, EmptyChainIsIdentity) {
  CounterRng rng(4);
  const auto v = random_state(8, rng);
  const DenseVectorAccessor phi(v);
  const MatrixChain empty(8);
  ChainProbe probe;
  for (Index l = 0; l < 8; ++l) EXPECT_EQ(chain_entry(l, empty, phi, &probe), v[l]);
  EXPECT_EQ(probe.max_depth, 0u);
}

TEST(ChainEntry, MatchesDenseProductOnRandomChains) {
  CounterRng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 8;
    const std::size_t r = 3;
    std::vector<CsrMatrix> mats;
    for (std::size_t i = 0; i < r; ++i) mats.push_back(random_csr(n, 2, rng));
    const auto v = random_state(n, rng);
    Vec expected = to_vec(v);
    for (const auto& m : mats) expected = csr_dense(m) * expected;
    const auto chain = csr_chain(mats);
    for (Index l = 0; l < n; ++l) {
      const Complex got = chain_entry(l, chain, DenseVectorAccessor(v));
      EXPECT_LE(std::abs(got - expected(static_cast<Eigen::Index>(l))), 1e-9 * std::max(1.0, std::abs(expected(l))));
    }
  }
}

TEST(ChainEntry, LeafCountAndDepthOnFullRows) {
  CounterRng rng(5);
  for (std::size_t s : {1u, 2u, 3u})
    for (std::size_t r = 0; r <= 5; ++r) {
      std::vector<CsrMatrix> mats;
      for (std::size_t i = 0; i < std::max<std::size_t>(r, 1); ++i) mats.push_back(random_csr(16, s, rng));
      const auto chain = r == 0 ? MatrixChain(16) : csr_chain(std::vector<CsrMatrix>(mats.begin(), mats.begin() + r));
      const DenseVectorAccessor phi(random_state(16, rng));
      ChainProbe probe;
      chain_entry(3, chain, phi, &probe);
      EXPECT_EQ(probe.leaf_queries, static_cast<std::uint64_t>(std::pow(s, r)));
      EXPECT_EQ(probe.max_depth, r);
    }
}

TEST(ChainEntry, EmptyRowsShortCircuit) {
  // Row 0 has no entries.
  std::vector<std::vector<RowEntry>> rows(2);
  rows[1].push_back({0, Complex(2, 0)});
  const MatrixChain chain(2, {SparseTerm::csr(CsrMatrix(2, rows))}, {2.0});
  const DenseVectorAccessor phi(std::vector<Complex>{{1, 0}, {0, 0}});
  ChainProbe probe;
  EXPECT_EQ(chain_entry(0, chain, phi, &probe), Complex(0, 0));
  EXPECT_EQ(probe.leaf_queries, 0u);
  EXPECT_EQ(chain_entry(1, chain, phi), Complex(2, 0));
}

TEST(MatrixChain, RejectsMismatchedFactors) {
  EXPECT_THROW(MatrixChain(2, {SparseTerm::pauli(PauliString("XX"))}, {1.0}), InvalidArgument);
  EXPECT_THROW(MatrixChain(2, {SparseTerm::pauli(PauliString("X"))}, {}), InvalidArgument);
  EXPECT_THROW(MatrixChain(2, {SparseTerm::pauli(PauliString("X"))}, {-1.0}), InvalidArgument);
  EXPECT_THROW(pauli_chain({"X", "ZZ"}), InvalidArgument);
}

TEST(ChainSandwich, TrivialCases) {
  CounterRng rng(0);
  const auto zero = StateAccessor::basis(2, 0);
  const DenseVectorAccessor phi0(std::vector<Complex>{{1, 0}, {0, 0}});
  EXPECT_NEAR(std::abs(estimate_chain_sandwich(zero, MatrixChain(2), phi0, 0.1, 0.05, rng) - 1.0), 0.0, 0.1);
  const auto one = StateAccessor::basis(2, 1);
  EXPECT_NEAR(std::abs(estimate_chain_sandwich(one, pauli_chain({"X"}), phi0, 0.1, 0.05, rng) - 1.0), 0.0, 0.1);
}

TEST(ChainSandwich, RandomPauliChainsAgainstDenseOracle) {
  CounterRng gen(2024);
  int within = 0;
  const int runs = 100;
  for (int run = 0; run < runs; ++run) {
    std::vector<std::string> letters;
    for (int i = 0; i < 4; ++i) {
      std::string s;
      for (int q = 0; q < 3; ++q) s += "IXYZ"[gen.below(4)];
      letters.push_back(s);
    }
    const auto chain = pauli_chain(letters);
    const auto psi_v = random_state(8, gen);
    const auto phi_v = random_state(8, gen);
    const Complex truth = exact_sandwich(to_vec(psi_v), chain, to_vec(phi_v));
    CounterRng rng(run);
    const Complex est =
        estimate_chain_sandwich(StateAccessor::dense(psi_v), chain, DenseVectorAccessor(phi_v), 0.1, 0.05, rng);
    within += std::abs(est - truth) <= 0.1;
  }
  EXPECT_GE(within, 95);
}

TEST(ChainSandwich, CountsLeafQueries) {
  WorkCounters counters;
  CounterRng rng(1);
  const auto chain = pauli_chain({"X", "Y"});
  const auto psi = StateAccessor::basis(2, 0);
  const DenseVectorAccessor phi(std::vector<Complex>{{1, 0}, {0, 0}});
  estimate_chain_sandwich(psi, chain, phi, 1.0, 1.0, rng, {1, &counters});
  // One repetition of 8 samples, each one leaf query (Pauli rows have one entry).
  EXPECT_EQ(counters.state_samples.load(), 8u);
  EXPECT_EQ(counters.leaf_queries.load(), 8u);
}
