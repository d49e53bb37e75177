// dequant: command-line front end.
//
//   dequant estimate --hamiltonian h.txt --state basis:1 --epsilon 0.25
//   dequant decide   --hamiltonian h.txt --state maxent --a -0.9 --b -0.1
//   dequant oracle   --hamiltonian h.txt --state dense:psi.bin --spectrum
//   dequant bench    --count 20 --qubits 3 --terms 4 --policy oracle-exact
//   dequant poly     --tau 0.25 --theta 0.25 --xi 0.0833
//
// Exit codes: 0 success, 1 input error, 2 cost-cap abort. Errors are written
// to stderr as one JSON object.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "dequant/dequant.hpp"

namespace {

using dequant::Complex;
using nlohmann::json;

struct Common {
  std::string hamiltonian;
  std::string state;
  double epsilon = 0.25;
  double chi = 1.0;
  std::optional<double> sigma;
  double delta = 0.05;
  std::string policy = "tight";
  double cost_cap = dequant::kDefaultCostCap;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool json_out = false;
  bool transcript = false;
  bool timing = false;
  bool oracle = false;
};

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

void add_solver_flags(CLI::App* app, Common& c) {
  app->add_option("--hamiltonian", c.hamiltonian, "Hamiltonian file (.json for JSON, text otherwise)")->required();
  app->add_option("--epsilon", c.epsilon, "target accuracy relative to kappa")->capture_default_str();
  app->add_option("--chi", c.chi, "overlap lower bound of the guiding state")->capture_default_str();
  app->add_option("--sigma", c.sigma, "generalized-overlap width (default eps*kappa/2)");
  app->add_option("--delta", c.delta, "total failure probability")->capture_default_str();
  app->add_option("--policy", c.policy, "strict | tight | oracle-exact")->capture_default_str();
  app->add_option("--cost-cap", c.cost_cap, "abort when predicted leaf operations exceed this")->capture_default_str();
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  app->add_option("--workers", c.workers, "estimator threads")->capture_default_str();
  app->add_flag("--json", c.json_out, "emit the JSON report");
  app->add_flag("--transcript", c.transcript, "list every Test(t) in text output");
  app->add_flag("--timing", c.timing, "include wall-clock time (makes output run-dependent)");
  app->add_flag("--oracle", c.oracle, "attach a dense-oracle comparison");
}

dequant::SolverConfig solver_config(const Common& c) {
  dequant::SolverConfig cfg;
  cfg.epsilon = c.epsilon;
  cfg.chi = c.chi;
  cfg.sigma = c.sigma;
  cfg.delta = c.delta;
  cfg.policy = dequant::parse_policy(c.policy);
  cfg.cost_cap = c.cost_cap;
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  if (cfg.workers == 0) throw dequant::InvalidArgument("--workers must be at least 1");
  return cfg;
}

json config_echo(const Common& c) {
  json j = {{"hamiltonian", c.hamiltonian}, {"state", c.state},       {"epsilon", c.epsilon},
            {"chi", c.chi},                 {"delta", c.delta},       {"policy", c.policy},
            {"cost_cap", c.cost_cap},       {"seed", c.seed},         {"workers", c.workers}};
  j["sigma"] = c.sigma ? json(*c.sigma) : json(nullptr);
  return j;
}

struct Loaded {
  std::string text;
  dequant::Hamiltonian h;
};

Loaded load(const Common& c) {
  Loaded out;
  out.text = dequant::read_text_file(c.hamiltonian);
  out.h = c.hamiltonian.size() > 5 && c.hamiltonian.ends_with(".json") ? dequant::parse_hamiltonian_json(out.text)
                                                                       : dequant::parse_hamiltonian_text(out.text);
  return out;
}

void print_estimate_text(const dequant::EnergyEstimate& e, bool transcript) {
  std::printf("E* = %.10g  (t* = %zu of T = %zu, kappa = %.10g, policy %s%s%s)\n", e.e_star, e.t_star, e.T, e.kappa,
              dequant::to_string(e.policy), e.trivial ? ", zero Hamiltonian" : "",
              e.no_yes_found ? ", no test answered yes" : "");
  std::printf("guarantee: |E* - E0| <= %.6g with probability >= %.4g\n", e.epsilon * e.kappa, 1.0 - e.delta);
  std::printf("work: %llu state samples, %llu leaf queries, %llu chain samples\n",
              static_cast<unsigned long long>(e.samples_used.state_samples),
              static_cast<unsigned long long>(e.samples_used.leaf_queries),
              static_cast<unsigned long long>(e.samples_used.chain_samples));
  if (!transcript) return;
  for (const auto& r : e.transcript)
    std::printf("  Test(%zu): tau=%.4f theta=%.4f d=%zu |E|=%.6g %s %.6g -> %s\n", r.t, r.tau, r.theta, r.degree,
                std::abs(r.estimate), std::abs(r.estimate) >= r.threshold ? ">=" : "<", r.threshold,
                r.yes ? "yes" : "no");
}

void print_oracle_text(const dequant::OracleComparison& o) {
  std::printf("oracle: lambda_min = %.10g, |E* - lambda_min| = %.4g (tolerance %.4g) %s, overlap %.6g\n", o.lambda_min,
              o.abs_error, o.tolerance, o.within ? "ok" : "MISS", o.overlap);
}

/// Dense comparison for the Hamiltonian actually solved (H, or H (x) I when unguided).
std::optional<dequant::OracleComparison> oracle_block(const dequant::Hamiltonian& h, const dequant::StateAccessor* psi,
                                                      const dequant::EnergyEstimate& e) {
  const bool unguided = psi == nullptr;
  const dequant::Hamiltonian target = unguided ? dequant::with_ancilla_register(h) : h;
  if (target.dimension() > dequant::kMaxOracleDimension) return std::nullopt;
  const auto op = dequant::reconstruct(target);
  const auto phi = unguided ? dequant::StateAccessor::max_entangled(h.qubits) : *psi;
  return dequant::compare_with_oracle(op, dequant::materialize(phi), e);
}

int run_estimate(const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded in = load(c);
  auto cfg = solver_config(c);
  dequant::RunReport report;
  report.command = "estimate";
  report.input_digest = sha256_hex(in.text + '\n' + c.state);
  report.config = config_echo(c);
  const bool unguided = c.state == "maxent";
  std::optional<dequant::StateAccessor> psi;
  if (!unguided) psi = dequant::parse_state_spec(c.state, in.h.qubits);
  report.estimate = unguided ? dequant::solve_unguided(in.h, cfg) : dequant::solve_guided(in.h, *psi, cfg);
  if (c.oracle) report.oracle = oracle_block(in.h, psi ? &*psi : nullptr, *report.estimate);
  if (c.timing) report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.json_out) {
    std::cout << json(report).dump(2) << '\n';
  } else {
    print_estimate_text(*report.estimate, c.transcript);
    if (report.oracle) print_oracle_text(*report.oracle);
    if (report.wall_seconds) std::printf("wall time: %.3f s\n", *report.wall_seconds);
  }
  return 0;
}

int run_decide(const Common& c, double a, double b) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded in = load(c);
  const auto cfg = solver_config(c);
  dequant::RunReport report;
  report.command = "decide";
  report.input_digest = sha256_hex(in.text + '\n' + c.state);
  report.config = config_echo(c);
  report.config["a"] = a;
  report.config["b"] = b;
  std::optional<dequant::StateAccessor> psi;
  if (c.state != "maxent") psi = dequant::parse_state_spec(c.state, in.h.qubits);
  report.decision = dequant::decide(in.h, psi ? &*psi : nullptr, a, b, cfg);
  if (c.oracle) report.oracle = oracle_block(in.h, psi ? &*psi : nullptr, report.decision->estimate);
  if (c.timing) report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.json_out) {
    std::cout << json(report).dump(2) << '\n';
  } else {
    std::printf("%s  (E* = %.10g, midpoint %.10g kappa)\n", dequant::to_string(report.decision->decision),
                report.decision->estimate.e_star, report.decision->midpoint);
    if (c.transcript) print_estimate_text(report.decision->estimate, true);
    if (report.oracle) print_oracle_text(*report.oracle);
  }
  return 0;
}

int run_oracle(const std::string& path, const std::string& state, std::optional<double> sigma, bool spectrum,
               bool json_out) {
  Common c;
  c.hamiltonian = path;
  const Loaded in = load(c);
  const auto d = dequant::decompose(in.h);
  const auto op = dequant::reconstruct(d);
  json j = {{"qubits", in.h.qubits}, {"terms", in.h.terms.size()}, {"kappa", d.kappa()},
            {"lambda_min", dequant::exact_ground_energy(op)}};
  if (spectrum) j["spectrum"] = std::vector<double>(op.eigenvalues().data(), op.eigenvalues().data() + op.eigenvalues().size());
  if (!state.empty()) {
    const double s = sigma.value_or(0.0);
    const auto psi = dequant::materialize(dequant::parse_state_spec(state, in.h.qubits));
    j["state"] = state;
    j["sigma"] = s;
    j["overlap"] = dequant::exact_overlap(op, psi, s);
  }
  if (json_out) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("lambda_min = %.12g  (kappa = %.12g)\n", j["lambda_min"].get<double>(), d.kappa());
    if (j.contains("overlap"))
      std::printf("overlap(%s, sigma = %g) = %.12g\n", state.c_str(), j["sigma"].get<double>(), j["overlap"].get<double>());
    if (spectrum)
      for (Eigen::Index i = 0; i < op.eigenvalues().size(); ++i) std::printf("  %.12g\n", op.eigenvalues()(i));
  }
  return 0;
}

struct BenchOptions {
  std::size_t count = 10;
  unsigned qubits = 2;
  std::size_t terms = 3;
  unsigned locality = 2;
  bool pauli = false;
  std::string guide = "ground";
};

int run_bench(const Common& c, const BenchOptions& b) {
  auto cfg = solver_config(c);
  dequant::CounterRng gen(c.seed, 0xbe9c);
  const bool unguided = b.guide == "maxent";
  if (b.guide != "ground" && !unguided) throw dequant::InvalidArgument("--guide must be ground or maxent");
  const unsigned solved_qubits = unguided ? 2 * b.qubits : b.qubits;
  const bool oracle = solved_qubits <= 12;
  if (!oracle && !unguided) throw dequant::InvalidArgument("exact-ground guiding states need n <= 12");
  std::size_t successes = 0, completed = 0;
  double seconds = 0.0, samples = 0.0;
  json instances = json::array();
  for (std::size_t i = 0; i < b.count; ++i) {
    const auto h = b.pauli ? dequant::random_pauli_hamiltonian(b.qubits, b.terms, gen, b.locality)
                           : dequant::random_local_hamiltonian(b.qubits, b.terms, b.locality, gen);
    dequant::RunReport report;
    report.command = "bench";
    report.input_digest = sha256_hex(dequant::to_text(h) + '\n' + b.guide);
    report.config = config_echo(c);
    report.config["instance"] = i;
    cfg.seed = c.seed + i;
    const auto start = std::chrono::steady_clock::now();
    std::optional<dequant::StateAccessor> psi;
    if (!unguided) {
      const auto ground = dequant::ground_vector(dequant::reconstruct(h));
      psi = dequant::StateAccessor::dense(std::vector<Complex>(ground.data(), ground.data() + ground.size()));
    }
    report.estimate = unguided ? dequant::solve_unguided(h, cfg) : dequant::solve_guided(h, *psi, cfg);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.timing) report.wall_seconds = elapsed;
    if (oracle) {
      report.oracle = oracle_block(h, psi ? &*psi : nullptr, *report.estimate);
      successes += report.oracle->within ? 1 : 0;
    }
    ++completed;
    seconds += elapsed;
    samples += static_cast<double>(report.estimate->samples_used.state_samples);
    if (c.json_out) std::cout << json(report).dump() << '\n';
    else
      std::printf("instance %zu: E* = %.6g%s\n", i, report.estimate->e_star,
                  report.oracle ? (report.oracle->within ? "  ok" : "  MISS") : "");
  }
  json summary = {{"instances", completed}};
  if (completed > 0) {
    summary["mean_state_samples"] = samples / static_cast<double>(completed);
    if (c.timing) summary["mean_wall_seconds"] = seconds / static_cast<double>(completed);
  }
  if (oracle && completed > 0) summary["success_fraction"] = static_cast<double>(successes) / static_cast<double>(completed);
  if (!oracle) summary["notice"] = "dense oracle disabled above 12 qubits; success fraction omitted";
  if (c.json_out) std::cout << json({{"summary", summary}}).dump() << '\n';
  else std::cout << "summary: " << summary.dump() << '\n';
  return 0;
}

int run_poly(double tau, double theta, double xi, std::size_t cap, bool json_out) {
  dequant::RectangleOptions o;
  o.degree_cap = cap;
  const auto p = dequant::build_rectangle_polynomial(tau, theta, xi, o);
  if (json_out) {
    std::cout << json(p).dump(2) << '\n';
  } else {
    std::printf("degree %zu, sum|a_i| = %.6g, verified on %zu points: %s\n", p.degree(),
                dequant::coefficient_l1(p.polynomial), p.verification.grid_points, p.verification.passed ? "yes" : "no");
    const auto a = p.polynomial.coefficients_double();
    for (std::size_t i = 0; i < a.size(); ++i) std::printf("  a_%zu = %.17g\n", i, a[i]);
  }
  return 0;
}

int fail(const char* kind, const std::string& message, int code, const json& extra = nullptr) {
  json j = {{"error", kind}, {"message", message}};
  if (!extra.is_null()) j["report"] = extra;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-state energy estimation from sample-and-query access"};
  app.require_subcommand(1);

  Common common;
  double a = 0.0, b = 0.0;
  auto* estimate = app.add_subcommand("estimate", "estimate the ground energy (guided, or unguided with --state maxent)");
  add_solver_flags(estimate, common);
  estimate->add_option("--state", common.state, "basis:i | product:a,b;... | dense:PATH | maxent")->required();

  auto* decide = app.add_subcommand("decide", "decide E0 <= a*kappa (LOW) versus E0 > b*kappa (HIGH)");
  add_solver_flags(decide, common);
  decide->add_option("--state", common.state, "guiding state spec, or maxent")->required();
  decide->add_option("--a", a)->required();
  decide->add_option("--b", b)->required();

  std::string oracle_state;
  std::optional<double> oracle_sigma;
  bool spectrum = false, oracle_json = false;
  std::string oracle_path;
  auto* oracle = app.add_subcommand("oracle", "exact ground energy, spectrum and overlap by dense diagonalization");
  oracle->add_option("--hamiltonian", oracle_path)->required();
  oracle->add_option("--state", oracle_state, "state whose overlap to report");
  oracle->add_option("--sigma", oracle_sigma, "overlap width (default 0)");
  oracle->add_flag("--spectrum", spectrum, "list all eigenvalues");
  oracle->add_flag("--json", oracle_json);

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "random instances against the dense oracle");
  bench->add_option("--count", bench_opts.count)->capture_default_str();
  bench->add_option("--qubits", bench_opts.qubits)->capture_default_str();
  bench->add_option("--terms", bench_opts.terms)->capture_default_str();
  bench->add_option("--locality", bench_opts.locality, "qubits per term")->capture_default_str();
  bench->add_flag("--pauli", bench_opts.pauli, "Pauli-string terms instead of dense blocks");
  bench->add_option("--guide", bench_opts.guide, "ground | maxent")->capture_default_str();
  bench->add_option("--epsilon", common.epsilon)->capture_default_str();
  bench->add_option("--delta", common.delta)->capture_default_str();
  bench->add_option("--policy", common.policy)->capture_default_str();
  bench->add_option("--cost-cap", common.cost_cap)->capture_default_str();
  bench->add_option("--seed", common.seed)->capture_default_str();
  bench->add_option("--workers", common.workers)->capture_default_str();
  bench->add_flag("--json", common.json_out);
  bench->add_flag("--timing", common.timing);

  double tau = 0.0, theta = 0.0, xi = 0.0;
  std::size_t degree_cap = 200;
  bool poly_json = false;
  auto* poly = app.add_subcommand("poly", "build and verify a rectangle polynomial");
  poly->add_option("--tau", tau)->required();
  poly->add_option("--theta", theta)->required();
  poly->add_option("--xi", xi)->required();
  poly->add_option("--degree-cap", degree_cap)->capture_default_str();
  poly->add_flag("--json", poly_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 1);
  }

  try {
    if (*estimate) return run_estimate(common);
    if (*decide) return run_decide(common, a, b);
    if (*oracle) return run_oracle(oracle_path, oracle_state, oracle_sigma, spectrum, oracle_json);
    if (*bench) return run_bench(common, bench_opts);
    if (*poly) return run_poly(tau, theta, xi, degree_cap, poly_json);
  } catch (const dequant::CostCapExceeded& e) {
    json report = json::parse(e.report(), nullptr, false);
    return fail(e.kind(), e.what(), 2, report.is_discarded() ? json(e.report()) : report);
  } catch (const dequant::Error& e) {
    return fail(e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("error", e.what(), 1);
  }
  return 1;
}
