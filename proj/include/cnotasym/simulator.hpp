#pragma once

// Exact density-matrix evolution for circuits touching at most three qubits.
// Noise is attached after each gate's unitary: depolarizing at the gate's
// error rate, thermal relaxation of every active qubit for the gate's
// duration, then the edge's coherent over-rotation if one is configured.
// Measurements are deferred to the end and sampled with per-qubit readout
// flips.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "channels.hpp"
#include "circuit.hpp"
#include "counts.hpp"
#include "linalg.hpp"
#include "noise_model.hpp"
#include "rng.hpp"

namespace cnotasym {

inline constexpr int kMaxSimulatedQubits = 3;

class DensityState {
 public:
  static DensityState ground(int num_qubits) {
    check_size(num_qubits);
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    CMatrix rho = CMatrix::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return DensityState(num_qubits, std::move(rho));
  }

  static DensityState basis(int num_qubits, std::uint64_t index) {
    DensityState s = ground(num_qubits);
    s.rho_(0, 0) = 0.0;
    s.rho_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return s;
  }

  static DensityState from_matrix(CMatrix rho) {
    int k = 0;
    while ((Eigen::Index{1} << k) < rho.rows()) ++k;
    if (rho.rows() != rho.cols() || (Eigen::Index{1} << k) != rho.rows())
      throw std::invalid_argument("density matrix must be 2^k x 2^k");
    check_size(k);
    return DensityState(k, std::move(rho));
  }

  int num_qubits() const noexcept { return num_qubits_; }
  const CMatrix& matrix() const noexcept { return rho_; }

  double trace() const { return rho_.trace().real(); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    const CMatrix h = 0.5 * (rho_ + rho_.adjoint());
    return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }

  /// Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-9.
  bool is_valid() const {
    return hermiticity_error() <= 1e-10 && std::abs(trace() - 1.0) <= 1e-10 && min_eigenvalue() >= -1e-9;
  }

  /// Computational-basis probabilities (diagonal), index bit j = qubit j.
  std::vector<double> probabilities() const {
    std::vector<double> p(static_cast<std::size_t>(rho_.rows()));
    for (Eigen::Index i = 0; i < rho_.rows(); ++i) p[static_cast<std::size_t>(i)] = rho_(i, i).real();
    return p;
  }

  double fidelity_with_pure(const Eigen::VectorXcd& psi) const {
    return (psi.adjoint() * rho_ * psi)(0, 0).real();
  }

 private:
  DensityState(int k, CMatrix rho) : num_qubits_(k), rho_(std::move(rho)) {}

  static void check_size(int k) {
    if (k < 1 || k > kMaxSimulatedQubits)
      throw std::invalid_argument("density simulation supports 1.." + std::to_string(kMaxSimulatedQubits) +
                                  " qubits");
  }

  int num_qubits_ = 0;
  CMatrix rho_;
};

inline DensityState apply_gate(const DensityState& state, const Gate& gate) {
  if (!gate.is_unitary()) throw std::invalid_argument("apply_gate: barriers and measurements are not gates");
  validate_gate(gate);
  const CMatrix u = embed_operator(gate_matrix(gate), gate.qubits, state.num_qubits());
  return DensityState::from_matrix(u * state.matrix() * u.adjoint());
}

inline DensityState apply_channel(const DensityState& state, const KrausChannel& channel,
                                  std::span<const Qubit> qubits) {
  if (static_cast<int>(qubits.size()) != channel.arity)
    throw std::invalid_argument("apply_channel: qubit count does not match channel arity");
  if (channel.operators.empty() || channel.completeness_error() > 1e-8)
    throw std::invalid_argument("apply_channel: Kraus operators are not trace preserving");
  CMatrix out = CMatrix::Zero(state.matrix().rows(), state.matrix().cols());
  for (const auto& k : channel.operators) {
    const CMatrix kf = embed_operator(k, qubits, state.num_qubits());
    out += kf * state.matrix() * kf.adjoint();
  }
  return DensityState::from_matrix(std::move(out));
}

struct ReadoutError {
  double p01 = 0.0;  // read 1 given 0
  double p10 = 0.0;  // read 0 given 1
};

/// Marginal distribution of `measured` (outcome bit j = measured[j]).
/// Tiny negative diagonal entries are clamped and the result renormalized.
inline std::vector<double> marginal_probabilities(const DensityState& state, std::span<const Qubit> measured) {
  if (measured.empty()) throw std::invalid_argument("no measured qubits");
  for (Qubit q : measured)
    if (q < 0 || q >= state.num_qubits()) throw std::out_of_range("measured qubit outside register");
  const auto full = state.probabilities();
  std::vector<double> out(std::size_t{1} << measured.size(), 0.0);
  for (std::size_t i = 0; i < full.size(); ++i) {
    std::size_t key = 0;
    for (std::size_t j = 0; j < measured.size(); ++j) key |= ((i >> measured[j]) & 1U) << j;
    out[key] += std::max(0.0, full[i]);
  }
  double sum = 0.0;
  for (double p : out) sum += p;
  for (double& p : out) p /= sum;
  return out;
}

/// Exact outcome distribution after independent per-bit readout flips.
inline std::vector<double> apply_readout_error(std::span<const double> probs, std::span<const ReadoutError> readout) {
  std::vector<double> cur(probs.begin(), probs.end());
  for (std::size_t bit = 0; bit < readout.size(); ++bit) {
    const auto [p01, p10] = readout[bit];
    std::vector<double> next(cur.size(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const std::size_t flipped = i ^ (std::size_t{1} << bit);
      const bool one = (i >> bit) & 1U;
      const double flip = one ? p10 : p01;
      next[i] += (1.0 - flip) * cur[i];
      next[flipped] += flip * cur[i];
    }
    cur = std::move(next);
  }
  return cur;
}

namespace detail {

inline void check_readout(std::span<const ReadoutError> readout, std::size_t n) {
  if (!readout.empty() && readout.size() != n) throw std::invalid_argument("one readout entry per measured qubit");
  for (const auto& r : readout)
    if (!(r.p01 >= 0.0 && r.p01 <= 1.0 && r.p10 >= 0.0 && r.p10 <= 1.0))
      throw std::invalid_argument("readout probabilities outside [0, 1]");
}

// Draws `shots` outcomes over m bits; returns a histogram indexed by outcome.
inline std::vector<std::uint64_t> sample_outcomes(std::span<const double> probs, std::span<const ReadoutError> readout,
                                                  std::uint64_t shots, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) cdf[i] = (acc += probs[i]);
  std::vector<std::uint64_t> hist(probs.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(engine) * acc;
    std::size_t outcome = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    outcome = std::min(outcome, probs.size() - 1);
    for (std::size_t bit = 0; bit < readout.size(); ++bit) {
      const bool one = (outcome >> bit) & 1U;
      const double flip = one ? readout[bit].p10 : readout[bit].p01;
      if (uniform01(engine) < flip) outcome ^= std::size_t{1} << bit;
    }
    ++hist[outcome];
  }
  return hist;
}

}  // namespace detail

/// Seeded multinomial sample of the measured qubits with readout flips.
/// Keys have one character per measured qubit; measured[0] is rightmost.
inline Counts sample_counts(const DensityState& state, std::span<const Qubit> measured, std::uint64_t shots,
                            std::span<const ReadoutError> readout, std::uint64_t seed) {
  if (measured.empty()) throw std::invalid_argument("sample_counts: no measured qubits");
  if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
  detail::check_readout(readout, measured.size());
  const auto probs = marginal_probabilities(state, measured);
  const auto hist = detail::sample_outcomes(probs, readout, shots, seed);
  const int m = static_cast<int>(measured.size());
  Counts out(m);
  for (std::size_t i = 0; i < hist.size(); ++i) out.add(to_bitstring(i, m), hist[i]);
  return out;
}

struct SimulationOptions {
  bool gate_noise = true;
  bool readout_noise = true;
};

/// Final pre-measurement state of a circuit plus what is needed to read it
/// out. Qubits are compacted: local index i is physical qubit `active[i]`.
struct Evolution {
  DensityState state = DensityState::ground(1);
  std::vector<Qubit> active;
  int num_clbits = 0;
  std::vector<Qubit> measured_local;  // in clbit-ascending order
  std::vector<Clbit> measured_clbits;
  std::vector<ReadoutError> readout;
};

inline Evolution evolve(const Circuit& circuit, const NoiseModel& noise, SimulationOptions opts = {}) {
  Evolution ev;
  std::vector<int> local(static_cast<std::size_t>(circuit.num_qubits()), -1);
  for (const Gate& g : circuit.instructions()) {
    if (g.kind == GateKind::Barrier) continue;
    for (Qubit q : g.qubits)
      if (local[static_cast<std::size_t>(q)] < 0) {
        local[static_cast<std::size_t>(q)] = static_cast<int>(ev.active.size());
        ev.active.push_back(q);
      }
  }
  if (ev.active.empty()) throw std::invalid_argument("simulate: circuit acts on no qubits");
  if (static_cast<int>(ev.active.size()) > kMaxSimulatedQubits)
    throw std::invalid_argument("simulate: circuit touches more than " + std::to_string(kMaxSimulatedQubits) +
                                " qubits");
  std::sort(ev.active.begin(), ev.active.end());
  for (std::size_t i = 0; i < ev.active.size(); ++i) local[static_cast<std::size_t>(ev.active[i])] = static_cast<int>(i);
  for (Qubit q : ev.active) noise.qubit(q);  // every active qubit must be characterized

  const int k = static_cast<int>(ev.active.size());
  DensityState rho = DensityState::ground(k);
  std::vector<Qubit> all_local(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) all_local[static_cast<std::size_t>(i)] = i;

  auto relax_all = [&](double duration_ns) {
    if (duration_ns <= 0.0) return;
    for (int i = 0; i < k; ++i) {
      const auto& qp = noise.qubit(ev.active[static_cast<std::size_t>(i)]);
      const Qubit target[] = {i};
      rho = apply_channel(rho, thermal_relaxation_channel(duration_ns, qp.t1_us, qp.t2_us), target);
    }
  };

  std::vector<bool> measured(static_cast<std::size_t>(k), false);
  std::vector<std::pair<Clbit, Qubit>> measures;
  for (const Gate& g : circuit.instructions()) {
    if (g.kind == GateKind::Barrier) continue;
    std::vector<Qubit> qs;
    for (Qubit q : g.qubits) qs.push_back(local[static_cast<std::size_t>(q)]);
    if (g.kind == GateKind::Measure) {
      measured[static_cast<std::size_t>(qs[0])] = true;
      measures.emplace_back(g.clbit, qs[0]);
      continue;
    }
    for (Qubit q : qs)
      if (measured[static_cast<std::size_t>(q)])
        throw std::invalid_argument("simulate: gate after measurement is not supported");

    Gate lg = g;
    lg.qubits = qs;
    rho = apply_gate(rho, lg);
    if (!opts.gate_noise) continue;

    if (g.kind == GateKind::CNOT) {
      const auto& edge = noise.edge(g.control(), g.target());
      if (edge.cnot_error > 0.0) rho = apply_channel(rho, depolarizing_channel(edge.cnot_error, 2), qs);
      relax_all(edge.duration_ns);
      if (edge.coherent_axis && edge.coherent_angle_rad != 0.0)
        rho = apply_channel(rho, coherent_overrotation_channel(*edge.coherent_axis, edge.coherent_angle_rad), qs);
    } else {
      const auto& qp = noise.qubit(g.qubits[0]);
      const double err = single_qubit_error(g.kind, qp);
      if (err > 0.0) rho = apply_channel(rho, depolarizing_channel(err, 1), qs);
      relax_all(single_qubit_duration_ns(g.kind, qp));
    }
  }

  std::sort(measures.begin(), measures.end());
  ev.state = std::move(rho);
  ev.num_clbits = circuit.num_clbits();
  for (const auto& [clbit, q] : measures) {
    ev.measured_clbits.push_back(clbit);
    ev.measured_local.push_back(q);
    const auto& qp = noise.qubit(ev.active[static_cast<std::size_t>(q)]);
    ev.readout.push_back(opts.readout_noise ? ReadoutError{qp.readout_p01, qp.readout_p10} : ReadoutError{});
  }
  return ev;
}

namespace detail {

inline std::size_t to_clbit_index(std::size_t outcome, std::span<const Clbit> clbits) {
  std::size_t key = 0;
  for (std::size_t j = 0; j < clbits.size(); ++j) key |= ((outcome >> j) & 1U) << clbits[j];
  return key;
}

}  // namespace detail

/// Exact (sampling-free) distribution over the classical register,
/// readout error included. Unmeasured clbits read 0.
inline Distribution exact_distribution(const Evolution& ev) {
  if (ev.measured_local.empty()) throw std::invalid_argument("circuit has no measurements");
  const auto probs = apply_readout_error(marginal_probabilities(ev.state, ev.measured_local), ev.readout);
  Distribution d{ev.num_clbits, std::vector<double>(std::size_t{1} << ev.num_clbits, 0.0)};
  for (std::size_t i = 0; i < probs.size(); ++i) d.probs[detail::to_clbit_index(i, ev.measured_clbits)] += probs[i];
  return d;
}

inline Distribution exact_distribution(const Circuit& circuit, const NoiseModel& noise, SimulationOptions opts = {}) {
  return exact_distribution(evolve(circuit, noise, opts));
}

/// Seeded shot sampling of an already evolved circuit.
inline Counts sample(const Evolution& ev, std::uint64_t shots, std::uint64_t seed) {
  if (ev.measured_local.empty()) throw std::invalid_argument("circuit has no measurements");
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const auto probs = marginal_probabilities(ev.state, ev.measured_local);
  const auto hist = detail::sample_outcomes(probs, ev.readout, shots, seed);
  Counts out(ev.num_clbits);
  for (std::size_t i = 0; i < hist.size(); ++i)
    out.add(to_bitstring(detail::to_clbit_index(i, ev.measured_clbits), ev.num_clbits), hist[i]);
  return out;
}

inline Counts simulate(const Circuit& circuit, const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed,
                       SimulationOptions opts = {}) {
  return sample(evolve(circuit, noise, opts), shots, seed);
}

}  // namespace cnotasym
