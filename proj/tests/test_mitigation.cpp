#include <catch_amalgamated.hpp>

#include <random>

#include "cnotasym/mitigation.hpp"
#include "oracles.hpp"

using namespace cnotasym;
using Catch::Approx;

namespace {

NoiseModel readout_model(double p01_q0, double p10_q0, double p01_q1, double p10_q1) {
  NoiseModel m = NoiseModel::ideal(2);
  m.qubits[0].readout_p01 = p01_q0;
  m.qubits[0].readout_p10 = p10_q0;
  m.qubits[1].readout_p01 = p01_q1;
  m.qubits[1].readout_p10 = p10_q1;
  return m;
}

// P(read i | prepared j) for independent per-bit flips.
double flip_prob(std::size_t i, std::size_t j, const std::vector<std::pair<double, double>>& ro) {
  double p = 1.0;
  for (std::size_t b = 0; b < ro.size(); ++b) {
    const bool prep = (j >> b) & 1, read = (i >> b) & 1;
    const double flip = prep ? ro[b].second : ro[b].first;
    p *= prep == read ? 1.0 - flip : flip;
  }
  return p;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.shots_per_rep = 2048;
  return c;
}

}  // namespace

TEST_CASE("perfect readout gives the identity assignment matrix") {
  const auto cal = calibrate_readout({0, 1}, NoiseModel::ideal(2), small_config());
  CHECK((cal.exact.matrix - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((cal.sampled.matrix - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("independent readout errors give the product matrix") {
  const std::vector<std::pair<double, double>> ro{{0.025, 0.04}, {0.035, 0.06}};
  const auto m = readout_model(ro[0].first, ro[0].second, ro[1].first, ro[1].second);
  const auto cal = calibrate_readout({0, 1}, m, small_config());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(cal.exact.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            Approx(flip_prob(i, j, ro)).margin(1e-12));
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(cal.exact.matrix.col(j).sum() == Approx(1.0).margin(1e-9));
    CHECK(cal.sampled.matrix.col(j).sum() == Approx(1.0).margin(1e-9));
    CHECK(cal.sampled.matrix.col(j).minCoeff() >= 0.0);
  }
  // sampled columns stay within a few binomial sigmas of the exact ones
  const double shots = static_cast<double>(small_config().total_shots());
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double p = cal.exact.matrix(i, j);
      CHECK(std::abs(cal.sampled.matrix(i, j) - p) <= 5.0 * std::sqrt(p * (1 - p) / shots) + 1e-12);
    }
}

TEST_CASE("calibration on non-adjacent physical qubits uses their parameters") {
  NoiseModel m = NoiseModel::ideal(3);
  m.qubits[2].readout_p01 = 0.1;
  const auto cal = calibrate_readout({0, 2}, m, small_config());
  // calibration bit 1 is physical qubit 2
  CHECK(cal.exact.matrix(2, 0) == Approx(0.1).margin(1e-12));
  CHECK(cal.exact.matrix(1, 0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("identity matrix leaves distributions unchanged") {
  AssignmentMatrix a{2, Eigen::MatrixXd::Identity(4, 4)};
  const Counts c(2, {{"00", 700}, {"01", 100}, {"10", 150}, {"11", 50}});
  const auto out = mitigate(c, a);
  CHECK(out.probs["00"] == Approx(0.70).margin(1e-12));
  CHECK(out.probs["01"] == Approx(0.10).margin(1e-12));
  CHECK(out.probs["10"] == Approx(0.15).margin(1e-12));
  CHECK(out.probs["11"] == Approx(0.05).margin(1e-12));
  CHECK(out.pseudo_counts[0] == Approx(700.0).margin(1e-9));
}

TEST_CASE("mitigation inverts a known readout channel") {
  const std::vector<std::pair<double, double>> ro{{0.03, 0.05}, {0.02, 0.07}};
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = flip_prob(static_cast<std::size_t>(i), static_cast<std::size_t>(j), ro);
  const Eigen::Vector4d truth(0.6, 0.1, 0.2, 0.1);
  const Eigen::VectorXd observed = a * truth;
  Distribution d{2, {observed.data(), observed.data() + 4}};
  const auto out = mitigate(d, AssignmentMatrix{2, a});
  // direct inverse as the independent route
  const Eigen::VectorXd direct = a.inverse() * observed;
  for (int i = 0; i < 4; ++i) {
    CHECK(out.probs.probs[static_cast<std::size_t>(i)] == Approx(truth(i)).margin(1e-12));
    CHECK(out.probs.probs[static_cast<std::size_t>(i)] == Approx(direct(i)).margin(1e-12));
  }
}

TEST_CASE("NNLS agrees with exhaustive search") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 3 + static_cast<int>(rng() % 4), cols = 2 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
      b(i) = u(rng);
      for (int j = 0; j < cols; ++j) a(i, j) = u(rng);
    }
    const Eigen::VectorXd x = nnls(a, b);
    const Eigen::VectorXd ref = oracle::nnls_bruteforce(a, b);
    CHECK(x.minCoeff() >= 0.0);
    CHECK((a * x - b).squaredNorm() == Approx((a * ref - b).squaredNorm()).margin(1e-10));
  }
}

TEST_CASE("mitigated output is always a distribution") {
  std::mt19937_64 rng(5);
  const auto cal = calibrate_readout({0, 1}, readout_model(0.05, 0.08, 0.04, 0.1), small_config());
  for (int trial = 0; trial < 100; ++trial) {
    Counts c(2);
    for (int k = 0; k < 4; ++k) c.add(to_bitstring(static_cast<std::uint64_t>(k), 2), rng() % 50);
    if (c.total() == 0) continue;
    const auto out = mitigate(c, cal.sampled);
    double sum = 0.0;
    for (double p : out.probs.probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("ill-conditioned calibration is refused") {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.5, 0.5, 0.5;
  const Distribution d{1, {0.5, 0.5}};
  CHECK_THROWS_AS(mitigate(d, AssignmentMatrix{1, a}), UnreliableMitigation);
  a << 0.5 + 1e-10, 0.5, 0.5 - 1e-10, 0.5;
  CHECK_THROWS_AS(mitigate(d, AssignmentMatrix{1, a}), UnreliableMitigation);
}

TEST_CASE("bad calibration inputs") {
  std::vector<Distribution> three(3, Distribution{2, {1, 0, 0, 0}});
  CHECK_THROWS_AS(build_assignment_matrix(std::span<const Distribution>(three)), std::invalid_argument);
  std::vector<Counts> empty(2, Counts(1));
  CHECK_THROWS_AS(build_assignment_matrix(std::span<const Counts>(empty)), std::invalid_argument);
  AssignmentMatrix a{2, Eigen::MatrixXd::Identity(4, 4)};
  CHECK_THROWS_AS(mitigate(Distribution{1, {1, 0}}, a), std::invalid_argument);
}

TEST_CASE("readout-only asymmetry is removed by mitigation") {
  // Coherent IX error on both directions sends the orientations to mirrored
  // outcomes; unequal readout then biases the raw ground fractions.
  NoiseModel m = readout_model(0.0, 0.0, 0.0, 0.05);
  for (auto& e : m.edges) {
    e.coherent_axis = PauliAxis::IX;
    e.coherent_angle_rad = 0.3;
  }
  ExperimentConfig cfg;
  const auto raw = run_asymmetry_experiment({0, 1}, m, cfg);
  const auto cal = calibrate_readout({0, 1}, m, cfg);
  const auto mit = mitigate_report(raw, cal);
  CHECK(raw.max_f_exact >= 0.01);
  CHECK(mit.max_f_exact < 1e-9);
  for (const auto& [n, f] : mit.f) CHECK(f < 0.02);
}

TEST_CASE("gate-induced asymmetry survives mitigation") {
  const NoiseModel m = synth_asymmetric_model(0.01, 2.0);
  ExperimentConfig cfg;
  const auto raw = run_asymmetry_experiment({0, 1}, m, cfg);
  const auto mit = mitigate_report(raw, calibrate_readout({0, 1}, m, cfg));
  REQUIRE(mit.mitigated);
  for (int n = 1; n <= 6; ++n) {
    CHECK(mit.forward.stage(n).exact_p00 > raw.forward.stage(n).exact_p00);
    CHECK(mit.reverse.stage(n).exact_p00 > raw.reverse.stage(n).exact_p00);
  }
  CHECK(mit.classified_asymmetric_exact);
  const auto cmp = compare_mitigated(raw, mit, true);
  CHECK(cmp.max_f_mit >= 0.02);
  CHECK(cmp.mean_g_mit - cmp.mean_g_raw >= 0.01);
}

TEST_CASE("perfect readout makes raw and mitigated tables identical") {
  NoiseModel m = synth_asymmetric_model(0.01, 2.0);
  for (auto& q : m.qubits) q.readout_p01 = q.readout_p10 = 0.0;
  ExperimentConfig cfg;
  cfg.shots_per_rep = 1024;
  const auto raw = run_asymmetry_experiment({0, 1}, m, cfg);
  const auto cmp = compare_mitigated(raw, mitigate_report(raw, calibrate_readout({0, 1}, m, cfg, false)));
  for (const auto& r : cmp.rows) {
    CHECK(r.g_mit_01 == Approx(r.g_raw_01).margin(1e-12));
    CHECK(r.g_mit_10 == Approx(r.g_raw_10).margin(1e-12));
  }
}

TEST_CASE("comparison summary") {
  AsymmetryReport raw, mit;
  raw.config = mit.config = ExperimentConfig{};
  raw.config.max_stages = mit.config.max_stages = 1;
  auto stage = [](double g) {
    StageResult s;
    s.n = 1;
    s.g = g;
    s.exact_p00 = g;
    return s;
  };
  raw.forward.per_n = {stage(0.9)};
  raw.reverse.per_n = {stage(0.9 - 0.0555)};
  mit.forward.per_n = {stage(0.95)};
  mit.reverse.per_n = {stage(0.95 - 0.0618)};
  const auto cmp = compare_mitigated(raw, mit);
  REQUIRE(cmp.relative_change_max_f.has_value());
  CHECK(*cmp.relative_change_max_f == Approx(0.1135).margin(5e-4));
  CHECK(cmp.asymmetry_exacerbated);
  CHECK(cmp.mean_g_mit > cmp.mean_g_raw);

  mit.config.shots_per_rep = 10;
  CHECK_THROWS_AS(compare_mitigated(raw, mit), std::invalid_argument);
}

TEST_CASE("a report cannot be mitigated twice") {
  const NoiseModel m = synth_asymmetric_model(0.01, 1.0);
  ExperimentConfig cfg;
  cfg.max_stages = 1;
  cfg.shots_per_rep = 64;
  const auto raw = run_asymmetry_experiment({0, 1}, m, cfg);
  const auto cal = calibrate_readout({0, 1}, m, cfg);
  const auto mit = mitigate_report(raw, cal);
  CHECK_THROWS_AS(mitigate_report(mit, cal), std::invalid_argument);
}
