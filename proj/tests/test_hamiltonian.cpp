#include <gtest/gtest.h>

#include "support.hpp"

using namespace dequant;
using namespace testing_support;

namespace {

Mat term_dense(const SparseTerm& t) { return to_dense(t); }

}  // namespace

TEST(PauliString, MasksAndLetters) {
  const PauliString p("XIYZ");
  EXPECT_EQ(p.qubits(), 4u);
  EXPECT_EQ(p.x_mask(), 0b0101u);
  EXPECT_EQ(p.z_mask(), 0b1100u);
  EXPECT_EQ(p.y_count(), 1u);
  EXPECT_EQ(p.weight(), 3u);
  EXPECT_EQ(p.letter(2), 'Y');
  EXPECT_EQ(p.str(), "XIYZ");
  EXPECT_EQ(p.padded(6).str(), "XIYZII");
}

TEST(PauliString, RejectsBadCharacterWithPosition) {
  try {
    PauliString("XQZ");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 2u);
  }
  EXPECT_THROW(PauliString(""), ParseError);
}

TEST(PauliString, RowEntriesMatchKroneckerProductForEveryString) {
  const char letters[] = "IXYZ";
  for (unsigned n = 1; n <= 3; ++n) {
    const unsigned count = 1u << (2 * n);
    for (unsigned code = 0; code < count; ++code) {
      std::string s;
      for (unsigned q = 0; q < n; ++q) s += letters[(code >> (2 * q)) & 3];
      const Mat expected = pauli_dense(s);
      EXPECT_LT((term_dense(SparseTerm::pauli(PauliString(s))) - expected).cwiseAbs().maxCoeff(), 1e-15) << s;
    }
  }
}

TEST(PauliString, SingleQubitExamples) {
  // <1|X|0> = 1, Y|0> = i|1>, Z|1> = -|1>.
  EXPECT_EQ(PauliString("X").row_entry(1).column, 0u);
  EXPECT_EQ(PauliString("Y").row_entry(1).value, Complex(0, 1));
  EXPECT_EQ(PauliString("Y").row_entry(0).value, Complex(0, -1));
  EXPECT_EQ(PauliString("Z").row_entry(1).value, Complex(-1, 0));
}

TEST(BlockTerm, EmbeddingMatchesReference) {
  CounterRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const unsigned n = 4;
    const Mat block = random_hermitian(2, rng);
    std::vector<unsigned> support = {static_cast<unsigned>(trial % 4), static_cast<unsigned>((trial + 2) % 4)};
    const auto t = block_term(support, block);
    const Mat got = term_dense(term_to_sparse(t, n));
    EXPECT_LT((got - embed_block(block, support, n)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(BlockTerm, SupportOrderIsLowBitFirst) {
  // |01> on support (2, 0): block index bit 0 is qubit 2.
  Mat proj = Mat::Zero(4, 4);
  proj(1, 1) = 1.0;
  Hamiltonian h{3, {block_term({2, 0}, proj)}};
  const auto op = reconstruct(h);
  // Only basis states with qubit 2 set and qubit 0 clear have energy 1.
  for (Index j = 0; j < 8; ++j) {
    const double diag = op.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
    EXPECT_EQ(diag, ((j >> 2) & 1) && !(j & 1) ? 1.0 : 0.0) << j;
  }
}

TEST(Validation, RejectsMalformedTerms) {
  EXPECT_THROW(validate({2, {pauli_term(1.0, "XYZ")}}), InvariantError);
  EXPECT_THROW(validate({2, {block_term({0, 0}, Mat::Identity(4, 4))}}), InvariantError);
  EXPECT_THROW(validate({2, {block_term({0, 5}, Mat::Identity(4, 4))}}), InvariantError);
  EXPECT_THROW(validate({2, {block_term({0}, Mat::Identity(4, 4))}}), InvariantError);
  Mat skew(2, 2);
  skew << 0, 1, 0, 0;
  EXPECT_THROW(validate({1, {block_term({0}, skew)}}), InvariantError);
  EXPECT_NO_THROW(validate({1, {block_term({0}, skew, false)}}));
}

TEST(Decomposition, NormsAndOverrides) {
  Hamiltonian h{2, {pauli_term(-0.5, "XZ"), block_term({1}, 3.0 * pauli_matrix('Y'))}};
  const auto d = decompose(h);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.kappas()[0], 0.5);
  EXPECT_NEAR(d.kappas()[1], 3.0, 1e-12);
  EXPECT_NEAR(d.kappa(), 3.5, 1e-12);
  EXPECT_EQ(d.sparsity(), 1u);

  h.terms[0].kappa_override = 2.0;
  EXPECT_NEAR(decompose(h).kappa(), 5.0, 1e-12);
  h.terms[0].kappa_override = 0.25;
  EXPECT_THROW(decompose(h), InvariantError);
}

TEST(Decomposition, NonHermitianBlockUsesSpectralNorm) {
  Mat m(2, 2);
  m << 0, 2, 0, 0;
  const auto d = decompose({1, {block_term({0}, m, false)}});
  EXPECT_NEAR(d.kappa(), 2.0, 1e-12);
}

TEST(ShiftRescale, SpectrumMapsToUnitInterval) {
  CounterRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = random_local_hamiltonian(3, 4, 2, rng);
    const auto d = decompose(h);
    const auto dp = shift_rescale(d);
    EXPECT_NEAR(dp.kappa(), 1.0, 1e-12);
    const double lam = exact_ground_energy(reconstruct(d));
    const double lam_p = exact_ground_energy(reconstruct(dp));
    EXPECT_NEAR(lam_p, 0.5 * (1.0 + lam / d.kappa()), 1e-10);
    const auto& ev = reconstruct(dp).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-12);
    EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-12);
  }
  EXPECT_THROW(shift_rescale(Decomposition()), ZeroKappaError);
}

TEST(AncillaRegister, EqualsKroneckerWithIdentity) {
  CounterRng rng(9);
  const auto h = random_local_hamiltonian(2, 3, 2, rng);
  Hamiltonian hp = h;
  hp.terms.push_back(pauli_term(0.3, "XY"));
  const auto doubled = with_ancilla_register(hp);
  EXPECT_EQ(doubled.qubits, 4u);
  const Mat expected = kron(Mat::Identity(4, 4), dense_hamiltonian(hp));
  EXPECT_LT((reconstruct(doubled).matrix() - expected).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(decompose(doubled).kappa(), decompose(hp).kappa(), 1e-12);
}

TEST(Reconstruct, AgreesWithIndependentAssembly) {
  CounterRng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    Hamiltonian h = random_pauli_hamiltonian(3, 4, rng);
    const auto extra = random_local_hamiltonian(3, 2, 2, rng);
    h.terms.insert(h.terms.end(), extra.terms.begin(), extra.terms.end());
    EXPECT_LT((reconstruct(h).matrix() - dense_hamiltonian(h)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

// ---------------------------------------------------------------------------
// File formats

TEST(TextFormat, ParsesPauliBlockAndOverride) {
  const auto h = parse_hamiltonian_text(
      "# comment\n"
      "n=2\n"
      "0.5 XZ   # trailing comment\n"
      "\n"
      "-1e-1 IY KAPPA_I=0.2\n"
      "BLOCK q=1 1,0 0,-1 0,1 1,0\n");
  ASSERT_EQ(h.qubits, 2u);
  ASSERT_EQ(h.terms.size(), 3u);
  EXPECT_TRUE(h.terms[0].is_pauli());
  EXPECT_DOUBLE_EQ(*h.terms[1].kappa_override, 0.2);
  const auto& b = std::get<BlockTerm>(h.terms[2].body);
  EXPECT_EQ(b.support, std::vector<unsigned>{1});
  EXPECT_EQ(b.block(0, 1), Complex(0, -1));
}

TEST(TextFormat, ErrorsCarryLineAndColumn) {
  try {
    parse_hamiltonian_text("n=2\n1.0 XX\n0.5 XQ\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 6u);
  }
  try {
    parse_hamiltonian_text("n=2\nabc XX\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 1u);
  }
  EXPECT_THROW(parse_hamiltonian_text("1.0 X\n"), ParseError);
  EXPECT_THROW(parse_hamiltonian_text(""), ParseError);
  EXPECT_THROW(parse_hamiltonian_text("n=1\nBLOCK q=0 1,0 0,0 0,0\n"), ParseError);
  EXPECT_THROW(parse_hamiltonian_text("n=1\nBLOCK q=0 1,0 1,0 0,0 1,0\n"), InvariantError);
}

TEST(TextFormat, RoundTrip) {
  CounterRng rng(3);
  Hamiltonian h = random_pauli_hamiltonian(3, 3, rng);
  const auto blocks = random_local_hamiltonian(3, 2, 2, rng);
  h.terms.insert(h.terms.end(), blocks.terms.begin(), blocks.terms.end());
  h.terms[1].kappa_override = 7.5;
  const auto again = parse_hamiltonian_text(to_text(h));
  EXPECT_EQ(to_text(again), to_text(h));
  EXPECT_EQ((reconstruct(again).matrix() - reconstruct(h).matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(JsonFormat, ParsesBothTermKinds) {
  const auto h = parse_hamiltonian_json(R"({"n": 2, "terms": [
      {"pauli": "ZI", "coeff": 0.25},
      {"qubits": [0, 1], "block": [1, 0, 0, 0, 0, -1, 2, 0, 0, 2, -1, 0, 0, 0, 0, 1], "kappa_i": 4},
      {"qubits": [1], "block": [[0, 0], [1, 0], [0, 0], [0, 0]], "hermitian": false}]})");
  ASSERT_EQ(h.terms.size(), 3u);
  EXPECT_DOUBLE_EQ(*h.terms[1].kappa_override, 4.0);
  EXPECT_FALSE(std::get<BlockTerm>(h.terms[2].body).hermitian);
  EXPECT_THROW(parse_hamiltonian_json(R"({"n": 1, "terms": [{"pauli": "ZZ"}]})"), InvariantError);
  EXPECT_THROW(parse_hamiltonian_json(R"({"n": 1, "terms": [{"foo": 1}]})"), ParseError);
  EXPECT_THROW(parse_hamiltonian_json("{"), ParseError);
}
