#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "circuit.hpp"

namespace cnotasym {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Local matrix of a unitary gate. Local basis index bit j corresponds to
/// gate.qubits[j]; for CNOT that is bit 0 = control, bit 1 = target.
inline CMatrix gate_matrix(const Gate& g) {
  constexpr double s = 0.70710678118654752440;
  const Complex i{0.0, 1.0};
  CMatrix m;
  switch (g.kind) {
    case GateKind::H:
      m.resize(2, 2);
      m << s, s, s, -s;
      return m;
    case GateKind::X:
      m.resize(2, 2);
      m << 0, 1, 1, 0;
      return m;
    case GateKind::SX:
      m.resize(2, 2);
      m << Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5), Complex(0.5, 0.5);
      return m;
    case GateKind::U: {
      const auto [theta, phi, lambda] = g.params;
      const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
      m.resize(2, 2);
      m << c, -std::exp(i * lambda) * sn, std::exp(i * phi) * sn, std::exp(i * (phi + lambda)) * c;
      return m;
    }
    case GateKind::CNOT:
      m = CMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(3, 1) = 1;  // |t=0,c=1> -> |t=1,c=1>
      m(2, 2) = 1;
      m(1, 3) = 1;
      return m;
    case GateKind::Barrier:
    case GateKind::Measure:
      break;
  }
  throw std::invalid_argument("gate_matrix: not a unitary gate");
}

/// Lifts an operator acting on `qubits` (local bit j <-> qubits[j]) to the
/// full 2^num_qubits space.
inline CMatrix embed_operator(const CMatrix& local, std::span<const Qubit> qubits, int num_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  const Eigen::Index local_dim = Eigen::Index{1} << qubits.size();
  if (local.rows() != local_dim || local.cols() != local_dim)
    throw std::invalid_argument("embed_operator: operator size does not match qubit count");
  Eigen::Index mask = 0;
  for (Qubit q : qubits) {
    if (q < 0 || q >= num_qubits) throw std::out_of_range("embed_operator: qubit outside register");
    mask |= Eigen::Index{1} << q;
  }
  auto local_index = [&](Eigen::Index full) {
    Eigen::Index idx = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) idx |= ((full >> qubits[j]) & 1) << j;
    return idx;
  };
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      if ((r & ~mask) == (c & ~mask)) out(r, c) = local(local_index(r), local_index(c));
  return out;
}

/// Composite unitary of all unitary gates of `c`; barriers and measurements
/// are skipped.
inline CMatrix circuit_unitary(const Circuit& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.num_qubits();
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const Gate& g : c.instructions()) {
    if (!g.is_unitary()) continue;
    u = embed_operator(gate_matrix(g), g.qubits, c.num_qubits()) * u;
  }
  return u;
}

/// Max elementwise |a - e^{i phase} b| after aligning the global phase on
/// the largest-magnitude entry of `b`.
inline double phase_aligned_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(b(r, c)) == 0.0) return a.cwiseAbs().maxCoeff();
  if (std::abs(a(r, c)) == 0.0) return INFINITY;
  const Complex phase = (a(r, c) / b(r, c)) / std::abs(a(r, c) / b(r, c));
  return (a - phase * b).cwiseAbs().maxCoeff();
}

inline bool equal_up_to_global_phase(const CMatrix& a, const CMatrix& b, double tol) {
  return phase_aligned_distance(a, b) < tol;
}

}  // namespace cnotasym
