#include <gtest/gtest.h>

#include "support.hpp"

using namespace dequant;
using namespace testing_support;

namespace {

const double kHalf = 1 / std::sqrt(2.0);

SolverConfig exact_config(double eps, double chi = 1.0) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.chi = chi;
  cfg.policy = Policy::oracle_exact;
  return cfg;
}

/// <psi|P(A)|psi> from the Chebyshev coefficients on an independent
/// eigendecomposition.
double chebyshev_quadratic_form(const RectanglePolynomial& p, const Mat& a, const Vec& psi) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const Vec c = es.eigenvectors().adjoint() * psi;
  double sum = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) sum += chebyshev_evaluate(p.chebyshev, es.eigenvalues()(i)) * std::norm(c(i));
  return sum;
}

}  // namespace

TEST(IntervalCount, MatchesFormula) {
  for (double eps : {1.0, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1, 0.07, 0.03}) {
    // 4/eps rounded up, with exact quotients such as 4/0.4 kept.
    const long double q = 4.0L / static_cast<long double>(eps);
    const auto expected = static_cast<std::size_t>(std::ceil(q - 1e-9L));
    EXPECT_EQ(interval_count(eps), expected) << eps;
  }
  EXPECT_THROW(interval_count(0.0), InvalidArgument);
}

TEST(EnergyFromIndex, IsExact) {
  for (std::size_t t = 0; t < 16; ++t)
    for (double kappa : {1.0, 3.0, 0.7}) EXPECT_EQ(energy_from_index(t, 0.25, kappa), t * (0.25 / 2) * kappa - kappa);
}

TEST(TestPolynomial, BandsFollowIndex) {
  const auto p = test_polynomial(3, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(p->tau, 0.375);
  EXPECT_DOUBLE_EQ(p->theta, 0.125);
  EXPECT_DOUBLE_EQ(p->xi, 1.0 / 12);
}

TEST(TestPolynomial, EmptyUpperBandGivesConstantOne) {
  const std::size_t last = interval_count(0.3) - 1;  // tau + theta = 1.05
  const auto p = test_polynomial(last, 0.3, 1.0);
  EXPECT_EQ(p->degree(), 0u);
  EXPECT_EQ(p->polynomial(0.4), 1.0);
  EXPECT_TRUE(p->verification.passed);
  EXPECT_THROW(test_polynomial(interval_count(0.25), 0.25, 1.0), InvalidArgument);
}

TEST(ThresholdTest, GroundStateAtBottomSaysYes) {
  const auto a_prime = shift_rescale(decompose(Hamiltonian{1, {pauli_term(1, "Z")}}));
  const auto psi = StateAccessor::basis(2, 1);
  CounterRng rng(0);
  EXPECT_TRUE(test_threshold(0, a_prime, psi, exact_config(0.5), rng));
  const ThresholdTester tester(a_prime, psi, exact_config(0.5));
  const auto rec = tester.run(0, rng);
  EXPECT_GE(rec.estimate.real(), 11.0 / 12);
  EXPECT_EQ(rec.threshold, 0.5);
}

TEST(ThresholdTest, IdentitySaysNoBelowTop) {
  const auto a_prime = shift_rescale(decompose(Hamiltonian{1, {pauli_term(1, "I")}}));
  const double h = kHalf;
  const auto psi = StateAccessor::product({{h, h}});
  const auto cfg = exact_config(0.5);
  CounterRng rng(0);
  for (std::size_t t = 0; t + 2 < interval_count(0.5); ++t) EXPECT_FALSE(test_threshold(t, a_prime, psi, cfg, rng)) << t;
}

TEST(ThresholdTest, AgreesWithIndependentOracleOnRandomHamiltonians) {
  CounterRng gen(31);
  for (int trial = 0; trial < 6; ++trial) {
    const auto h = random_local_hamiltonian(3, 3, 2, gen);
    const auto a_prime = shift_rescale(decompose(h));
    const auto psi_v = random_state(8, gen);
    const auto psi = StateAccessor::dense(psi_v);
    const auto cfg = exact_config(0.5);
    const ThresholdTester tester(a_prime, psi, cfg);
    const Mat ap = 0.5 * (Mat::Identity(8, 8) + dense_hamiltonian(h) / decompose(h).kappa());
    CounterRng rng(trial);
    for (std::size_t t = 0; t < tester.interval_count(); ++t) {
      const auto rec = tester.run(t, rng);
      const double oracle = chebyshev_quadratic_form(*tester.polynomial(t), ap, to_vec(psi_v));
      EXPECT_NEAR(rec.estimate.real(), oracle, 1e-9);
      EXPECT_EQ(rec.yes, std::abs(oracle) >= 0.5) << trial << " " << t;
    }
  }
}

TEST(Estimate, PaulisWithKnownGroundStates) {
  const auto z = solve_guided(Hamiltonian{1, {pauli_term(1, "Z")}}, StateAccessor::basis(2, 1), exact_config(0.25));
  EXPECT_LE(std::abs(z.e_star + 1), 0.25);
  const auto mx = solve_guided(Hamiltonian{1, {pauli_term(-1, "X")}}, StateAccessor::product({{kHalf, kHalf}}),
                               exact_config(0.25));
  EXPECT_LE(std::abs(mx.e_star + 1), 0.25);
  std::vector<Complex> singlet(4);
  singlet[1] = kHalf;
  singlet[2] = -kHalf;
  const Hamiltonian heis{2, {pauli_term(1, "XX"), pauli_term(1, "YY"), pauli_term(1, "ZZ")}};
  const auto e = solve_guided(heis, StateAccessor::dense(singlet), exact_config(0.25));
  EXPECT_DOUBLE_EQ(e.kappa, 3.0);
  EXPECT_LE(std::abs(e.e_star + 3), 0.75);
  EXPECT_FALSE(e.no_yes_found);
}

TEST(Estimate, ZeroHamiltonianIsTrivial) {
  const auto e = solve_guided(Hamiltonian{2, {}}, StateAccessor::basis(4, 0), SolverConfig{});
  EXPECT_TRUE(e.trivial);
  EXPECT_EQ(e.e_star, 0.0);
  EXPECT_TRUE(e.transcript.empty());
}

TEST(Estimate, TranscriptIsComplete) {
  CounterRng gen(8);
  const auto h = normalized(random_local_hamiltonian(2, 3, 2, gen));
  const auto op = reconstruct(h);
  const auto e = solve_guided(h, StateAccessor::dense(to_std(ground_vector(op))), exact_config(0.25));
  ASSERT_EQ(e.transcript.size(), e.t_star + 1);
  for (std::size_t i = 0; i < e.transcript.size(); ++i) {
    const auto& r = e.transcript[i];
    EXPECT_EQ(r.t, i);
    EXPECT_EQ(r.yes, std::abs(r.estimate) >= r.threshold);
    EXPECT_EQ(r.yes, i == e.t_star);
    EXPECT_DOUBLE_EQ(r.tau, i * 0.25 / 4);
  }
  EXPECT_EQ(e.e_star, energy_from_index(e.t_star, 0.25, e.kappa));
  EXPECT_LE(std::abs(e.e_star - exact_ground_energy(op)), 0.25 * e.kappa);
}

TEST(Estimate, UnguidedDiagonalHamiltonians) {
  const auto z = solve_unguided(Hamiltonian{1, {pauli_term(1, "Z")}}, exact_config(0.5));
  EXPECT_LE(std::abs(z.e_star + 1), 0.5);
  EXPECT_NEAR(z.chi, kHalf, 1e-15);
  const auto zz = solve_unguided(Hamiltonian{2, {pauli_term(1, "ZZ")}}, exact_config(0.5));
  EXPECT_LE(std::abs(zz.e_star + 1), 0.5);
  EXPECT_NEAR(zz.chi, 0.5, 1e-15);
}

TEST(Estimate, StrictPolicyFailsPreflight) {
  SolverConfig cfg;
  cfg.policy = Policy::strict;
  cfg.epsilon = 0.25;
  try {
    solve_guided(Hamiltonian{1, {pauli_term(1, "Z")}}, StateAccessor::basis(2, 1), cfg);
    FAIL();
  } catch (const CostCapExceeded& e) {
    const auto report = nlohmann::json::parse(e.report());
    EXPECT_EQ(report.at("T"), 16);
    EXPECT_EQ(report.at("tests").size(), 16u);
    EXPECT_GT(e.predicted(), 1e12);
  }
}

TEST(Config, Validation) {
  const Decomposition d = decompose(Hamiltonian{1, {pauli_term(1, "Z")}});
  SolverConfig cfg;
  EXPECT_NO_THROW(validate(cfg, 1.0));
  EXPECT_DOUBLE_EQ(effective_sigma(cfg, 2.0), 0.25);
  cfg.sigma = 0.25;
  EXPECT_THROW(validate(cfg, 1.0), InvalidArgument);
  cfg.sigma = -0.1;
  EXPECT_THROW(validate(cfg, 1.0), InvalidArgument);
  cfg = {};
  cfg.chi = 0.0;
  EXPECT_THROW(estimate_smallest_eigenvalue(d, StateAccessor::basis(2, 0), cfg), InvalidArgument);
  EXPECT_THROW(estimate_smallest_eigenvalue(d, StateAccessor::basis(4, 0), exact_config(0.5)), InvalidArgument);
  EXPECT_EQ(parse_policy("oracle-exact"), Policy::oracle_exact);
  EXPECT_STREQ(to_string(Policy::tight), "tight");
  EXPECT_THROW(parse_policy("fast"), InvalidArgument);
}

TEST(Decide, Examples) {
  const auto cfg = exact_config(0.25);
  const auto low = decide(Hamiltonian{1, {pauli_term(1, "Z")}}, nullptr, -0.9, -0.1, cfg);
  EXPECT_EQ(low.decision, Decision::low);
  const auto psi1 = StateAccessor::basis(2, 1);
  EXPECT_EQ(decide(Hamiltonian{1, {pauli_term(1, "Z")}}, &psi1, -0.9, -0.1, cfg).decision, Decision::low);
  const auto psi = StateAccessor::basis(2, 0);
  const auto high = decide(Hamiltonian{1, {pauli_term(1, "I")}}, &psi, 0.1, 0.9, cfg);
  EXPECT_EQ(high.decision, Decision::high);
  EXPECT_DOUBLE_EQ(high.midpoint, 0.5);
  EXPECT_THROW(decide(Hamiltonian{1, {pauli_term(1, "Z")}}, &psi1, -0.2, 0.0, cfg), InvalidArgument);
}

TEST(Decide, PromiseViolationStillAnswers) {
  // E_0 = 0 lies strictly inside (a, b).
  const Hamiltonian h{1, {pauli_term(0.5, "Z"), pauli_term(0.5, "I")}};
  const auto psi = StateAccessor::basis(2, 1);
  const auto out = decide(h, &psi, -0.4, 0.4, exact_config(0.25));
  EXPECT_TRUE(out.decision == Decision::low || out.decision == Decision::high);
}
