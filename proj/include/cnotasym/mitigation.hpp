#pragma once

// Measurement-error mitigation with a full assignment (calibration) matrix.
// Correction solves min ||A x - c||_2 subject to x >= 0 and renormalizes, so
// mitigated outputs are always valid distributions.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "circuit.hpp"
#include "counts.hpp"
#include "experiment.hpp"
#include "noise_model.hpp"
#include "rng.hpp"
#include "simulator.hpp"

namespace cnotasym {

inline constexpr double kMaxAssignmentCondition = 1e8;

/// Column j is the observed outcome distribution when basis state j is
/// prepared.
struct AssignmentMatrix {
  int k = 0;
  Eigen::MatrixXd matrix;

  double condition_number() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) == 0.0 ? INFINITY : s(0) / s(s.size() - 1);
  }
};

namespace detail {

inline int calibration_width(std::size_t sets) {
  int k = 0;
  while ((std::size_t{1} << k) < sets) ++k;
  if (k < 1 || (std::size_t{1} << k) != sets) throw std::invalid_argument("need 2^k calibration sets");
  return k;
}

}  // namespace detail

inline AssignmentMatrix build_assignment_matrix(std::span<const Distribution> calibration) {
  const int k = detail::calibration_width(calibration.size());
  AssignmentMatrix a{k, Eigen::MatrixXd::Zero(1 << k, 1 << k)};
  for (std::size_t j = 0; j < calibration.size(); ++j) {
    const auto& d = calibration[j];
    if (d.num_bits != k) throw std::invalid_argument("calibration distribution width mismatch");
    for (std::size_t i = 0; i < d.probs.size(); ++i)
      a.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d.probs[i];
  }
  return a;
}

inline AssignmentMatrix build_assignment_matrix(std::span<const Counts> calibration) {
  std::vector<Distribution> dists;
  for (const auto& c : calibration) {
    if (c.total() == 0) throw std::invalid_argument("calibration counts with zero total");
    dists.push_back(Distribution::from_counts(c));
  }
  return build_assignment_matrix(std::span<const Distribution>(dists));
}

/// Lawson-Hanson active-set solver for min ||A x - b|| with x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.cols();
  const double tol = 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff()) * static_cast<double>(n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Eigen::VectorXd s_sub = sub.colPivHouseholderQr().solve(b);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) s(idx[c]) = s_sub(static_cast<Eigen::Index>(c));
    return s;
  };

  for (int outer = 0; outer < 3 * static_cast<int>(n) + 10; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < 3 * static_cast<int>(n) + 10; ++inner) {
      const Eigen::VectorXd s = solve_passive();
      bool feasible = true;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!passive[static_cast<std::size_t>(j)] || s(j) > 0.0) continue;
        feasible = false;
        alpha = std::min(alpha, x(j) / (x(j) - s(j)));
      }
      if (feasible) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
    }
  }
  return x;
}

struct MitigatedDistribution {
  Distribution probs;
  std::vector<double> pseudo_counts;  // probs scaled to the input shot total
};

inline MitigatedDistribution mitigate(const Distribution& observed, const AssignmentMatrix& a) {
  if (observed.num_bits != a.k) throw std::invalid_argument("mitigate: bitstring width does not match matrix");
  if (const double cond = a.condition_number(); !(cond <= kMaxAssignmentCondition))
    throw UnreliableMitigation("assignment matrix condition number " + std::to_string(cond) + " exceeds 1e8");
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(observed.probs.data(),
                                                              static_cast<Eigen::Index>(observed.probs.size()));
  Eigen::VectorXd x = nnls(a.matrix, c);
  const double sum = x.sum();
  if (!(sum > 0.0)) throw UnreliableMitigation("mitigated distribution vanished");
  if (std::abs(sum - 1.0) > 1e-12) x /= sum;
  MitigatedDistribution out;
  out.probs = {a.k, std::vector<double>(x.data(), x.data() + x.size())};
  return out;
}

inline MitigatedDistribution mitigate(const Counts& counts, const AssignmentMatrix& a) {
  MitigatedDistribution out = mitigate(Distribution::from_counts(counts), a);
  for (double p : out.probs.probs) out.pseudo_counts.push_back(p * static_cast<double>(counts.total()));
  return out;
}

/// Assignment matrices for a set of qubits, from sampled and from exact
/// calibration runs.
struct ReadoutCalibration {
  std::vector<Qubit> qubits;
  AssignmentMatrix sampled;
  AssignmentMatrix exact;
};

/// Runs the 2^k basis-preparation circuits on `qubits` (ascending; qubit i
/// of the calibration maps to qubits[i]) under `noise`. Shots per circuit
/// match one experiment cell (repetitions * shots_per_rep).
inline ReadoutCalibration calibrate_readout(std::vector<Qubit> qubits, const NoiseModel& noise,
                                            const ExperimentConfig& config, bool include_gate_noise = true) {
  config.validate();
  const int k = static_cast<int>(qubits.size());
  const auto circuits = build_readout_calibration_circuits(k);
  Qubit highest = 0;
  for (Qubit q : qubits) highest = std::max(highest, q);
  SimulationOptions opts;
  opts.gate_noise = include_gate_noise;

  std::vector<Counts> sampled;
  std::vector<Distribution> exact;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const Circuit c = circuits[i].remapped(qubits, highest + 1);
    const Evolution ev = evolve(c, noise, opts);
    exact.push_back(exact_distribution(ev));
    sampled.push_back(sample(ev, config.total_shots(), derive_seed(config.seed, {0xca1b, i})));
  }
  return {std::move(qubits), build_assignment_matrix(std::span<const Counts>(sampled)),
          build_assignment_matrix(std::span<const Distribution>(exact))};
}

/// Applies mitigation to every stage of a raw report: sampled counts with
/// the sampled matrix, exact distributions with the exact matrix.
inline AsymmetryReport mitigate_report(const AsymmetryReport& raw, const ReadoutCalibration& cal) {
  if (raw.mitigated) throw std::invalid_argument("report is already mitigated");
  AsymmetryReport out = raw;
  out.mitigated = true;
  for (OrientationResult* o : {&out.forward, &out.reverse}) {
    for (auto& s : o->per_n) {
      const auto corrected = mitigate(s.counts, cal.sampled);
      s.g = corrected.probs.probs[0];
      s.ground_count = static_cast<std::uint64_t>(std::llround(corrected.pseudo_counts[0]));
      s.exact = mitigate(s.exact, cal.exact).probs;
      s.exact_p00 = s.exact.probs[0];
    }
  }
  finalize_report(out);
  return out;
}

struct ComparisonRow {
  int n = 0;
  double g_raw_01 = 0, g_raw_10 = 0, g_mit_01 = 0, g_mit_10 = 0;
  double f_raw = 0, f_mit = 0;
};

struct MitigationComparison {
  std::vector<ComparisonRow> rows;
  double max_f_raw = 0.0;
  double max_f_mit = 0.0;
  std::optional<double> relative_change_max_f;  // empty when the raw maximum is zero
  bool asymmetry_exacerbated = false;
  double mean_g_raw = 0.0;
  double mean_g_mit = 0.0;
};

/// Per-stage raw vs mitigated comparison. `exact` selects the sampling-free
/// probabilities instead of the sampled fractions.
inline MitigationComparison compare_mitigated(const AsymmetryReport& raw, const AsymmetryReport& mit,
                                              bool exact = false) {
  if (raw.pair != mit.pair || raw.config.threshold != mit.config.threshold ||
      raw.config.max_stages != mit.config.max_stages || raw.config.repetitions != mit.config.repetitions ||
      raw.config.shots_per_rep != mit.config.shots_per_rep || raw.forward.per_n.size() != mit.forward.per_n.size() ||
      raw.reverse.per_n.size() != mit.reverse.per_n.size() || raw.forward.per_n.size() != raw.reverse.per_n.size())
    throw std::invalid_argument("compare_mitigated: reports come from different configurations");

  auto g = [exact](const StageResult& s) { return exact ? s.exact_p00 : s.g; };
  MitigationComparison cmp;
  double sum_raw = 0.0, sum_mit = 0.0;
  for (std::size_t i = 0; i < raw.forward.per_n.size(); ++i) {
    ComparisonRow row;
    row.n = raw.forward.per_n[i].n;
    row.g_raw_01 = g(raw.forward.per_n[i]);
    row.g_raw_10 = g(raw.reverse.per_n[i]);
    row.g_mit_01 = g(mit.forward.per_n[i]);
    row.g_mit_10 = g(mit.reverse.per_n[i]);
    row.f_raw = asymmetry(row.g_raw_01, row.g_raw_10);
    row.f_mit = asymmetry(row.g_mit_01, row.g_mit_10);
    cmp.max_f_raw = std::max(cmp.max_f_raw, row.f_raw);
    cmp.max_f_mit = std::max(cmp.max_f_mit, row.f_mit);
    sum_raw += row.g_raw_01 + row.g_raw_10;
    sum_mit += row.g_mit_01 + row.g_mit_10;
    cmp.rows.push_back(row);
  }
  const double cells = 2.0 * static_cast<double>(cmp.rows.size());
  cmp.mean_g_raw = sum_raw / cells;
  cmp.mean_g_mit = sum_mit / cells;
  if (cmp.max_f_raw > 0.0) cmp.relative_change_max_f = relative_change(cmp.max_f_raw, cmp.max_f_mit);
  cmp.asymmetry_exacerbated = cmp.max_f_mit > cmp.max_f_raw;
  return cmp;
}

}  // namespace cnotasym
