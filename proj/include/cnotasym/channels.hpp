#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "linalg.hpp"

namespace cnotasym {

/// Kraus representation of a channel on `arity` qubits. Operator local bit j
/// acts on the j-th qubit the channel is applied to.
struct KrausChannel {
  int arity = 1;
  std::vector<CMatrix> operators;

  /// max |sum K^dagger K - I|
  double completeness_error() const {
    const Eigen::Index dim = Eigen::Index{1} << arity;
    CMatrix acc = CMatrix::Zero(dim, dim);
    for (const auto& k : operators) acc += k.adjoint() * k;
    return (acc - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  }
};

inline KrausChannel identity_channel(int arity) {
  const Eigen::Index dim = Eigen::Index{1} << arity;
  return {arity, {CMatrix::Identity(dim, dim)}};
}

/// Two-qubit Pauli axes supported for coherent over-rotations. The first
/// letter acts on the CNOT control, the second on the target.
enum class PauliAxis { ZX, XI, IX, ZZ };

constexpr std::string_view to_string(PauliAxis axis) noexcept {
  switch (axis) {
    case PauliAxis::ZX: return "ZX";
    case PauliAxis::XI: return "XI";
    case PauliAxis::IX: return "IX";
    case PauliAxis::ZZ: return "ZZ";
  }
  return "?";
}

inline PauliAxis pauli_axis_from_string(std::string_view label) {
  for (PauliAxis a : {PauliAxis::ZX, PauliAxis::XI, PauliAxis::IX, PauliAxis::ZZ})
    if (to_string(a) == label) return a;
  throw std::invalid_argument("unsupported Pauli axis '" + std::string(label) + "'");
}

namespace detail {

inline CMatrix pauli(char p) {
  CMatrix m(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad Pauli letter");
  }
  return m;
}

// Pauli string over `label.size()` qubits; label[j] acts on local bit j.
inline CMatrix pauli_string(std::string_view label) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (char p : label) out = Eigen::kroneckerProduct(pauli(p), out).eval();
  return out;
}

}  // namespace detail

/// Kraus set {sqrt(1 - p(d^2-1)/d^2) I} plus {sqrt(p/d^2) P} over the
/// non-identity Paulis, d = 2^arity.
inline KrausChannel depolarizing_channel(double p, int arity) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing: p outside [0, 1]");
  if (arity != 1 && arity != 2) throw std::invalid_argument("depolarizing: arity must be 1 or 2");
  if (p == 0.0) return identity_channel(arity);
  const double d2 = static_cast<double>(1 << (2 * arity));
  KrausChannel ch{arity, {}};
  constexpr std::array<char, 4> letters{'I', 'X', 'Y', 'Z'};
  for (int idx = 0; idx < static_cast<int>(d2); ++idx) {
    std::string label;
    for (int j = 0; j < arity; ++j) label.push_back(letters[static_cast<std::size_t>((idx >> (2 * j)) & 3)]);
    const double weight = idx == 0 ? 1.0 - p * (d2 - 1.0) / d2 : p / d2;
    ch.operators.push_back(std::sqrt(weight) * detail::pauli_string(label));
  }
  return ch;
}

/// Amplitude damping with gamma = 1 - exp(-t/T1) combined with extra pure
/// dephasing so that coherences decay as exp(-t/T2). Times: duration in ns,
/// T1/T2 in microseconds. T1 may be +inf.
inline KrausChannel thermal_relaxation_channel(double duration_ns, double t1_us, double t2_us) {
  if (!(duration_ns >= 0.0)) throw std::invalid_argument("thermal relaxation: negative duration");
  if (!(t1_us > 0.0) || !(t2_us > 0.0)) throw std::invalid_argument("thermal relaxation: T1 and T2 must be positive");
  if (t2_us > 2.0 * t1_us) throw std::invalid_argument("thermal relaxation: T2 exceeds 2*T1");
  if (duration_ns == 0.0) return identity_channel(1);
  const double t_us = duration_ns * 1e-3;
  const double survive = std::exp(-t_us / t1_us);  // 1 - gamma
  const double coherence = std::exp(-t_us / t2_us);
  const double rest = std::max(0.0, survive - coherence * coherence);

  KrausChannel ch{1, {}};
  CMatrix k0(2, 2), k1(2, 2), k2(2, 2);
  k0 << 1, 0, 0, coherence;
  k1 << 0, std::sqrt(1.0 - survive), 0, 0;
  k2 << 0, 0, 0, std::sqrt(rest);
  ch.operators = {k0, k1};
  if (rest > 0.0) ch.operators.push_back(k2);
  return ch;
}

/// Unitary error exp(-i angle P / 2) on (control, target).
inline KrausChannel coherent_overrotation_channel(PauliAxis axis, double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("coherent over-rotation: angle must be finite");
  const auto label = to_string(axis);
  // label[0] is the control (local bit 0), label[1] the target (local bit 1)
  const CMatrix p = detail::pauli_string(std::string{label[0], label[1]});
  const CMatrix u = std::cos(angle / 2) * CMatrix::Identity(4, 4) - Complex(0, std::sin(angle / 2)) * p;
  return {2, {u}};
}

inline KrausChannel coherent_overrotation_channel(std::string_view axis, double angle) {
  return coherent_overrotation_channel(pauli_axis_from_string(axis), angle);
}

}  // namespace cnotasym
