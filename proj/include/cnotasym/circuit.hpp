#pragma once

// Circuit IR: a flat instruction list over indexed qubits, plus the
// constructors for the orientation benchmark (identity operation, n-stage
// circuits, CNOT reversal, readout calibration).
//
// Bitstring convention throughout the library: qubit/clbit 0 is the least
// significant bit, i.e. the rightmost character of a bitstring.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cnotasym {

using Qubit = int;
using Clbit = int;

enum class GateKind { H, X, SX, U, CNOT, Barrier, Measure };

constexpr std::string_view to_string(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::SX: return "sx";
    case GateKind::U: return "u";
    case GateKind::CNOT: return "cnot";
    case GateKind::Barrier: return "barrier";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

inline GateKind gate_kind_from_string(std::string_view name) {
  for (GateKind k : {GateKind::H, GateKind::X, GateKind::SX, GateKind::U,
                     GateKind::CNOT, GateKind::Barrier, GateKind::Measure}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

/// One instruction. For CNOT, `qubits = {control, target}`. For Measure,
/// `qubits = {q}` and `clbit` is the destination. U carries (theta, phi,
/// lambda) in `params`.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<Qubit> qubits;
  std::array<double, 3> params{};
  Clbit clbit = -1;

  static Gate h(Qubit q) { return {GateKind::H, {q}}; }
  static Gate x(Qubit q) { return {GateKind::X, {q}}; }
  static Gate sx(Qubit q) { return {GateKind::SX, {q}}; }
  static Gate u(Qubit q, double theta, double phi, double lambda) {
    return {GateKind::U, {q}, {theta, phi, lambda}};
  }
  static Gate cnot(Qubit control, Qubit target) {
    return {GateKind::CNOT, {control, target}};
  }
  static Gate barrier(std::vector<Qubit> qs) { return {GateKind::Barrier, std::move(qs)}; }
  static Gate measure(Qubit q, Clbit c) { return {GateKind::Measure, {q}, {}, c}; }

  bool is_unitary() const noexcept {
    return kind != GateKind::Barrier && kind != GateKind::Measure;
  }
  bool is_single_qubit_unitary() const noexcept {
    return is_unitary() && kind != GateKind::CNOT;
  }
  Qubit control() const { return qubits.at(0); }
  Qubit target() const { return qubits.at(1); }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Checks the per-gate invariants that do not depend on the register size.
inline void validate_gate(const Gate& g) {
  switch (g.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::SX:
      if (g.qubits.size() != 1) throw std::invalid_argument("single-qubit gate needs exactly one qubit");
      break;
    case GateKind::U:
      if (g.qubits.size() != 1) throw std::invalid_argument("u gate needs exactly one qubit");
      for (double a : g.params)
        if (!std::isfinite(a)) throw std::invalid_argument("u gate angles must be finite");
      break;
    case GateKind::CNOT:
      if (g.qubits.size() != 2) throw std::invalid_argument("cnot needs control and target");
      if (g.qubits[0] == g.qubits[1]) throw std::invalid_argument("cnot control equals target");
      break;
    case GateKind::Barrier:
      break;
    case GateKind::Measure:
      if (g.qubits.size() != 1) throw std::invalid_argument("measure needs exactly one qubit");
      if (g.clbit < 0) throw std::invalid_argument("measure needs a classical bit");
      break;
  }
  for (Qubit q : g.qubits)
    if (q < 0) throw std::invalid_argument("negative qubit index");
}

class Circuit {
 public:
  Circuit() = default;
  Circuit(int num_qubits, int num_clbits) : num_qubits_(num_qubits), num_clbits_(num_clbits) {
    if (num_qubits < 0 || num_clbits < 0) throw std::invalid_argument("negative register size");
  }

  int num_qubits() const noexcept { return num_qubits_; }
  int num_clbits() const noexcept { return num_clbits_; }
  const std::vector<Gate>& instructions() const noexcept { return instructions_; }
  std::size_t size() const noexcept { return instructions_.size(); }

  /// Appends after validating indices and the measurement-mapping invariant.
  Circuit& append(Gate g) {
    validate_gate(g);
    for (Qubit q : g.qubits)
      if (q >= num_qubits_) throw std::out_of_range("qubit " + std::to_string(q) + " outside register");
    if (g.kind == GateKind::Measure) {
      if (g.clbit >= num_clbits_) throw std::out_of_range("clbit " + std::to_string(g.clbit) + " outside register");
      for (const Gate& m : instructions_) {
        if (m.kind != GateKind::Measure) continue;
        if (m.qubits[0] == g.qubits[0]) throw std::invalid_argument("qubit measured twice");
        if (m.clbit == g.clbit) throw std::invalid_argument("clbit written twice");
      }
    }
    instructions_.push_back(std::move(g));
    return *this;
  }

  Circuit& append(std::span<const Gate> gates) {
    for (const Gate& g : gates) append(g);
    return *this;
  }

  /// Number of unitary gates (barriers and measurements excluded).
  std::size_t gate_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(instructions_.begin(), instructions_.end(),
                                                  [](const Gate& g) { return g.is_unitary(); }));
  }
  std::size_t count(GateKind kind) const noexcept {
    return static_cast<std::size_t>(std::count_if(instructions_.begin(), instructions_.end(),
                                                  [kind](const Gate& g) { return g.kind == kind; }));
  }

  /// Copy without measurements.
  Circuit without_measurements() const {
    Circuit out(num_qubits_, num_clbits_);
    for (const Gate& g : instructions_)
      if (g.kind != GateKind::Measure) out.instructions_.push_back(g);
    return out;
  }

  /// Relabels qubit i as mapping[i] on a register of `num_qubits`.
  Circuit remapped(std::span<const Qubit> mapping, int num_qubits) const {
    if (static_cast<int>(mapping.size()) < num_qubits_) throw std::invalid_argument("mapping too short");
    Circuit out(num_qubits, num_clbits_);
    for (Gate g : instructions_) {
      for (Qubit& q : g.qubits) q = mapping[static_cast<std::size_t>(q)];
      out.append(std::move(g));
    }
    return out;
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int num_qubits_ = 0;
  int num_clbits_ = 0;
  std::vector<Gate> instructions_;
};

/// Sequence realizing CNOT(control, target) with the opposite physical
/// direction: Hadamards on both qubits around CNOT(target, control).
inline std::vector<Gate> reverse_cnot(Qubit control, Qubit target) {
  if (control == target) throw std::invalid_argument("reverse_cnot: control equals target");
  return {Gate::h(control), Gate::h(target), Gate::cnot(target, control),
          Gate::h(control), Gate::h(target)};
}

namespace detail {

inline void append_identity_op(Circuit& c, Qubit control, Qubit target) {
  c.append(Gate::h(control));
  c.append(Gate::cnot(control, target));
  c.append(Gate::barrier({control, target}));
  c.append(Gate::cnot(control, target));
  c.append(Gate::h(control));
}

inline void check_pair(Qubit control, Qubit target) {
  if (control == target) throw std::invalid_argument("control equals target");
  if (control < 0 || target < 0) throw std::invalid_argument("negative qubit index");
}

}  // namespace detail

/// Bell-state preparation followed by its inverse, fenced by a barrier.
inline Circuit build_identity_op(Qubit control, Qubit target) {
  detail::check_pair(control, target);
  Circuit c(std::max(control, target) + 1, 0);
  detail::append_identity_op(c, control, target);
  return c;
}

/// n identity operations separated by barriers, then both qubits measured.
/// The lower-indexed qubit goes to clbit 0 for either orientation so that
/// the two orientations share one bitstring layout.
inline Circuit build_n_stage(Qubit control, Qubit target, int n) {
  detail::check_pair(control, target);
  if (n < 1) throw std::invalid_argument("build_n_stage: n must be >= 1");
  Circuit c(std::max(control, target) + 1, 2);
  for (int stage = 0; stage < n; ++stage) {
    if (stage > 0) c.append(Gate::barrier({control, target}));
    detail::append_identity_op(c, control, target);
  }
  c.append(Gate::measure(std::min(control, target), 0));
  c.append(Gate::measure(std::max(control, target), 1));
  return c;
}

/// Circuit i prepares |i> (X on each set bit) and measures qubit j to clbit j.
inline std::vector<Circuit> build_readout_calibration_circuits(int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("calibration supports 1..3 qubits");
  std::vector<Circuit> out;
  for (int i = 0; i < (1 << k); ++i) {
    Circuit c(k, k);
    for (int q = 0; q < k; ++q)
      if ((i >> q) & 1) c.append(Gate::x(q));
    for (int q = 0; q < k; ++q) c.append(Gate::measure(q, q));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cnotasym
