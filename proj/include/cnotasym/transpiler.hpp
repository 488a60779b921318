#pragma once

// Direction-aware CNOT orientation passes.
//
// enforce_direction rewrites every CNOT that runs against the pair's physical
// direction into the Hadamard sandwich around the allowed CNOT.
//
// orient_for_error treats each ordered pair with its own characterization as
// executable and picks, per logical CNOT, the realization with the higher
// estimated success (product of 1 - error over the realization's gates).
// The objective is multiplicative with no shared terms between CNOTs, so
// the per-CNOT choice is also the global optimum.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "circuit.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "noise_model.hpp"

namespace cnotasym {

struct CouplingMap {
  int num_qubits = 0;
  std::map<std::pair<Qubit, Qubit>, DirectedEdgeParams> edges;  // keyed by (control, target)
  std::map<QubitPair, Qubit> physical_direction;

  static CouplingMap from_noise_model(const NoiseModel& m) {
    CouplingMap map;
    map.num_qubits = m.num_qubits();
    for (const auto& e : m.edges) map.edges[{e.control, e.target}] = e;
    map.physical_direction = m.physical_direction;
    return map;
  }

  const DirectedEdgeParams* find(Qubit control, Qubit target) const {
    auto it = edges.find({control, target});
    return it == edges.end() ? nullptr : &it->second;
  }

  bool is_coupled(Qubit a, Qubit b) const { return physical_direction.contains(make_pair_key(a, b)); }

  bool is_physical(Qubit control, Qubit target) const {
    auto it = physical_direction.find(make_pair_key(control, target));
    return it != physical_direction.end() && it->second == control;
  }
};

enum class Realization { Direct, Sandwich };

constexpr std::string_view to_string(Realization r) noexcept {
  return r == Realization::Direct ? "direct" : "sandwich";
}

struct CnotDecision {
  std::size_t index = 0;  // instruction index in the input circuit
  Qubit control = 0;
  Qubit target = 0;
  Realization realization = Realization::Direct;
  std::optional<double> est_success_direct{};
  std::optional<double> est_success_sandwich{};
};

struct TranspileReport {
  Circuit circuit;
  std::vector<CnotDecision> decisions;
  std::optional<double> estimated_success;
  std::size_t gates_before = 0;
  std::size_t gates_after = 0;
  std::size_t hadamards_cancelled = 0;

  long gate_delta() const { return static_cast<long>(gates_after) - static_cast<long>(gates_before); }
};

namespace detail {

inline const QubitParams& params_for(std::span<const QubitParams> qubit_params, Qubit q) {
  if (q < 0 || static_cast<std::size_t>(q) >= qubit_params.size())
    throw MissingNoiseParameters("no single-qubit error rate for qubit " + std::to_string(q));
  return qubit_params[static_cast<std::size_t>(q)];
}

inline double gate_success(const Gate& g, const CouplingMap& map, std::span<const QubitParams> qubit_params) {
  switch (g.kind) {
    case GateKind::Barrier:
    case GateKind::Measure:
      return 1.0;
    case GateKind::CNOT: {
      const auto* e = map.find(g.control(), g.target());
      if (!e)
        throw MissingNoiseParameters("no CNOT error rate for direction " + std::to_string(g.control()) + "->" +
                                     std::to_string(g.target()));
      return 1.0 - e->cnot_error;
    }
    default:
      return 1.0 - single_qubit_error(g.kind, params_for(qubit_params, g.qubits[0]));
  }
}

inline void check_coupled(const Gate& g, const CouplingMap& map) {
  if (!map.is_coupled(g.control(), g.target()))
    throw TranspileError("CNOT on uncoupled pair " + std::to_string(g.control()) + "," + std::to_string(g.target()));
}

}  // namespace detail

/// Product over gates of (1 - error). Direction-specific CNOT rates;
/// H/SX at u2_error, X/U at twice that; barriers and measurements count 1.
inline double estimate_success(const Circuit& circuit, const CouplingMap& map,
                               std::span<const QubitParams> qubit_params) {
  double p = 1.0;
  for (const Gate& g : circuit.instructions()) p *= detail::gate_success(g, map, qubit_params);
  return p;
}

/// Replaces CNOTs running against the physical direction by the reversal
/// sandwich. Every other instruction is copied unchanged.
inline TranspileReport enforce_direction(const Circuit& circuit, const CouplingMap& map) {
  TranspileReport rep;
  rep.circuit = Circuit(circuit.num_qubits(), circuit.num_clbits());
  rep.gates_before = circuit.gate_count();
  const auto& ins = circuit.instructions();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const Gate& g = ins[i];
    if (g.kind != GateKind::CNOT) {
      rep.circuit.append(g);
      continue;
    }
    detail::check_coupled(g, map);
    CnotDecision d{i, g.control(), g.target()};
    if (map.is_physical(g.control(), g.target())) {
      rep.circuit.append(g);
    } else {
      d.realization = Realization::Sandwich;
      rep.circuit.append(reverse_cnot(g.control(), g.target()));
    }
    rep.decisions.push_back(d);
  }
  rep.gates_after = rep.circuit.gate_count();
  return rep;
}

/// Lowering used when executing on a characterized device: a CNOT whose own
/// direction has a characterization runs as is (the device's native or
/// compiled configuration); otherwise it is sandwiched onto the opposite,
/// characterized direction.
inline TranspileReport realize_characterized(const Circuit& circuit, const CouplingMap& map) {
  TranspileReport rep;
  rep.circuit = Circuit(circuit.num_qubits(), circuit.num_clbits());
  rep.gates_before = circuit.gate_count();
  const auto& ins = circuit.instructions();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const Gate& g = ins[i];
    if (g.kind != GateKind::CNOT) {
      rep.circuit.append(g);
      continue;
    }
    detail::check_coupled(g, map);
    CnotDecision d{i, g.control(), g.target()};
    if (map.find(g.control(), g.target())) {
      rep.circuit.append(g);
    } else if (map.find(g.target(), g.control())) {
      d.realization = Realization::Sandwich;
      rep.circuit.append(reverse_cnot(g.control(), g.target()));
    } else {
      throw MissingNoiseParameters("pair " + std::to_string(g.control()) + "," + std::to_string(g.target()) +
                                   " has no characterized CNOT direction");
    }
    rep.decisions.push_back(d);
  }
  rep.gates_after = rep.circuit.gate_count();
  return rep;
}

/// Removes H(q) H(q) pairs with nothing on q in between. Barriers touching q
/// block cancellation.
inline Circuit cancel_adjacent_hadamards(const Circuit& circuit, std::size_t* removed = nullptr) {
  const auto& ins = circuit.instructions();
  std::vector<bool> drop(ins.size(), false);
  std::map<Qubit, std::size_t> pending;  // qubit -> index of an uncancelled H that is the last op on it
  std::size_t count = 0;
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const Gate& g = ins[i];
    if (g.kind == GateKind::H) {
      const Qubit q = g.qubits[0];
      if (auto it = pending.find(q); it != pending.end()) {
        drop[it->second] = drop[i] = true;
        count += 2;
        pending.erase(it);
      } else {
        pending[q] = i;
      }
      continue;
    }
    for (Qubit q : g.qubits) pending.erase(q);
  }
  Circuit out(circuit.num_qubits(), circuit.num_clbits());
  for (std::size_t i = 0; i < ins.size(); ++i)
    if (!drop[i]) out.append(ins[i]);
  if (removed) *removed = count;
  return out;
}

struct OrientOptions {
  bool cancel_hadamards = false;
};

inline TranspileReport orient_for_error(const Circuit& circuit, const CouplingMap& map,
                                        std::span<const QubitParams> qubit_params, OrientOptions opts = {}) {
  TranspileReport rep;
  rep.circuit = Circuit(circuit.num_qubits(), circuit.num_clbits());
  rep.gates_before = circuit.gate_count();
  const auto& ins = circuit.instructions();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const Gate& g = ins[i];
    if (g.kind != GateKind::CNOT) {
      detail::gate_success(g, map, qubit_params);  // surfaces missing rates early
      rep.circuit.append(g);
      continue;
    }
    detail::check_coupled(g, map);
    const Qubit a = g.control(), b = g.target();
    CnotDecision d{i, a, b};
    if (map.find(a, b)) d.est_success_direct = detail::gate_success(g, map, qubit_params);
    const auto sandwich = reverse_cnot(a, b);
    if (map.find(b, a)) {
      double p = 1.0;
      for (const Gate& s : sandwich) p *= detail::gate_success(s, map, qubit_params);
      d.est_success_sandwich = p;
    }
    if (!d.est_success_direct && !d.est_success_sandwich)
      throw MissingNoiseParameters("no CNOT error rate for either direction of pair " + std::to_string(a) + "," +
                                   std::to_string(b));

    // rank by (success, fewer gates, physical direction)
    auto rank = [&](Realization r) {
      const bool direct = r == Realization::Direct;
      const double p = direct ? *d.est_success_direct : *d.est_success_sandwich;
      const int gates = direct ? 1 : static_cast<int>(sandwich.size());
      const bool physical = direct ? map.is_physical(a, b) : map.is_physical(b, a);
      return std::make_tuple(p, -gates, physical);
    };
    if (!d.est_success_direct) {
      d.realization = Realization::Sandwich;
    } else if (!d.est_success_sandwich) {
      d.realization = Realization::Direct;
    } else {
      d.realization = rank(Realization::Sandwich) > rank(Realization::Direct) ? Realization::Sandwich
                                                                              : Realization::Direct;
    }
    if (d.realization == Realization::Direct)
      rep.circuit.append(g);
    else
      rep.circuit.append(sandwich);
    rep.decisions.push_back(d);
  }
  if (opts.cancel_hadamards) rep.circuit = cancel_adjacent_hadamards(rep.circuit, &rep.hadamards_cancelled);
  rep.gates_after = rep.circuit.gate_count();
  rep.estimated_success = estimate_success(rep.circuit, map, qubit_params);
  return rep;
}

/// Unitary-equivalence check (up to global phase) over the qubits either
/// circuit touches. Supports at most three such qubits.
inline double equivalence_distance(const Circuit& a, const Circuit& b) {
  std::set<Qubit> used;
  for (const Circuit* c : {&a, &b})
    for (const Gate& g : c->instructions())
      if (g.is_unitary()) used.insert(g.qubits.begin(), g.qubits.end());
  if (used.size() > 3) throw std::invalid_argument("equivalence check supports at most 3 active qubits");
  const int n = std::max<int>(1, static_cast<int>(used.size()));
  std::vector<Qubit> mapping(static_cast<std::size_t>(std::max(a.num_qubits(), b.num_qubits())), 0);
  int next = 0;
  for (Qubit q : used) mapping[static_cast<std::size_t>(q)] = next++;
  auto compact = [&](const Circuit& c) {
    Circuit out(n, 0);
    for (Gate g : c.instructions()) {
      if (!g.is_unitary()) continue;
      for (Qubit& q : g.qubits) q = mapping[static_cast<std::size_t>(q)];
      out.append(std::move(g));
    }
    return circuit_unitary(out);
  };
  return phase_aligned_distance(compact(a), compact(b));
}

/// One JSON object per CNOT decision, newline separated.
inline std::string decision_log_jsonl(const TranspileReport& rep) {
  std::ostringstream os;
  for (const auto& d : rep.decisions) {
    nlohmann::json j{{"index", d.index},
                     {"logical", {d.control, d.target}},
                     {"realization", std::string(to_string(d.realization))},
                     {"est_success_direct", nullptr},
                     {"est_success_sandwich", nullptr}};
    if (d.est_success_direct) j["est_success_direct"] = *d.est_success_direct;
    if (d.est_success_sandwich) j["est_success_sandwich"] = *d.est_success_sandwich;
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace cnotasym
