#pragma once

// Directional noise description: per-qubit decoherence/readout/single-qubit
// error data plus one characterization per *ordered* CNOT pair.
//
// JSON layout (field names are part of the file format):
//   {"qubits":[{"t1_us","t2_us","readout_p01","readout_p10","u2_error","u2_duration_ns"}],
//    "edges":[{"control","target","cnot_error","duration_ns","coherent_axis"?,"coherent_angle_rad"?}],
//    "physical_direction":{"<a>-<b>":<control index>}}

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "channels.hpp"
#include "circuit.hpp"
#include "errors.hpp"

namespace cnotasym {

struct QubitParams {
  double t1_us = 100.0;
  double t2_us = 100.0;
  double readout_p01 = 0.0;  // read 1 given prepared 0
  double readout_p10 = 0.0;  // read 0 given prepared 1
  double u2_error = 0.0;
  double u2_duration_ns = 0.0;

  friend bool operator==(const QubitParams&, const QubitParams&) = default;
};

struct DirectedEdgeParams {
  Qubit control = 0;
  Qubit target = 1;
  double cnot_error = 0.0;
  double duration_ns = 0.0;
  std::optional<PauliAxis> coherent_axis{};
  double coherent_angle_rad = 0.0;

  friend bool operator==(const DirectedEdgeParams&, const DirectedEdgeParams&) = default;
};

/// Unordered coupled pair, stored as (low, high).
using QubitPair = std::pair<Qubit, Qubit>;

inline QubitPair make_pair_key(Qubit a, Qubit b) { return a < b ? QubitPair{a, b} : QubitPair{b, a}; }

// Single-qubit gate classes: U1-type frame changes are free, H/SX are U2-type,
// X and general U are U3-type at twice the U2 error and duration.
inline double single_qubit_error(GateKind kind, const QubitParams& q) {
  switch (kind) {
    case GateKind::H:
    case GateKind::SX: return q.u2_error;
    case GateKind::X:
    case GateKind::U: return std::min(1.0, 2.0 * q.u2_error);
    default: return 0.0;
  }
}

inline double single_qubit_duration_ns(GateKind kind, const QubitParams& q) {
  switch (kind) {
    case GateKind::H:
    case GateKind::SX: return q.u2_duration_ns;
    case GateKind::X:
    case GateKind::U: return 2.0 * q.u2_duration_ns;
    default: return 0.0;
  }
}

class NoiseModel {
 public:
  std::vector<QubitParams> qubits;
  std::vector<DirectedEdgeParams> edges;
  std::map<QubitPair, Qubit> physical_direction;

  int num_qubits() const noexcept { return static_cast<int>(qubits.size()); }

  const QubitParams& qubit(Qubit q) const {
    if (q < 0 || q >= num_qubits())
      throw MissingNoiseParameters("no parameters for qubit " + std::to_string(q));
    return qubits[static_cast<std::size_t>(q)];
  }

  const DirectedEdgeParams* find_edge(Qubit control, Qubit target) const noexcept {
    for (const auto& e : edges)
      if (e.control == control && e.target == target) return &e;
    return nullptr;
  }

  const DirectedEdgeParams& edge(Qubit control, Qubit target) const {
    if (const auto* e = find_edge(control, target)) return *e;
    throw MissingNoiseParameters("no CNOT characterization for direction " + std::to_string(control) +
                                 "->" + std::to_string(target));
  }

  std::optional<Qubit> physical_control(Qubit a, Qubit b) const {
    auto it = physical_direction.find(make_pair_key(a, b));
    if (it == physical_direction.end()) return std::nullopt;
    return it->second;
  }

  bool is_coupled(Qubit a, Qubit b) const { return physical_control(a, b).has_value(); }

  /// Enforces the model invariants; throws SchemaError with a field path.
  void validate() const;

  /// Noise-free model on `n` qubits with both CNOT directions characterized
  /// for every pair; the lower index is the physical control.
  static NoiseModel ideal(int n) {
    NoiseModel m;
    m.qubits.assign(static_cast<std::size_t>(n), QubitParams{});
    for (Qubit a = 0; a < n; ++a)
      for (Qubit b = a + 1; b < n; ++b) {
        m.edges.push_back({a, b});
        m.edges.push_back({b, a});
        m.physical_direction[{a, b}] = a;
      }
    return m;
  }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

namespace detail {

inline void check_probability(double p, const std::string& path) {
  if (!(p >= 0.0 && p <= 1.0)) throw SchemaError(path, "probability outside [0, 1]");
}

inline void check_duration(double d, const std::string& path) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw SchemaError(path, "duration must be finite and >= 0");
}

inline std::string pair_key_string(const QubitPair& p) {
  return std::to_string(p.first) + "-" + std::to_string(p.second);
}

}  // namespace detail

inline void NoiseModel::validate() const {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    const std::string path = "qubits[" + std::to_string(i) + "]";
    const auto& q = qubits[i];
    if (!(q.t1_us > 0.0)) throw SchemaError(path + ".t1_us", "T1 must be positive");
    if (!(q.t2_us > 0.0)) throw SchemaError(path + ".t2_us", "T2 must be positive");
    if (q.t2_us > 2.0 * q.t1_us)
      throw SchemaError(path + ".t2_us", "T2 (" + std::to_string(q.t2_us) + ") exceeds 2*T1 (" +
                                             std::to_string(2.0 * q.t1_us) + ")");
    detail::check_probability(q.readout_p01, path + ".readout_p01");
    detail::check_probability(q.readout_p10, path + ".readout_p10");
    detail::check_probability(q.u2_error, path + ".u2_error");
    detail::check_duration(q.u2_duration_ns, path + ".u2_duration_ns");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    if (e.control < 0 || e.control >= num_qubits()) throw SchemaError(path + ".control", "unknown qubit");
    if (e.target < 0 || e.target >= num_qubits()) throw SchemaError(path + ".target", "unknown qubit");
    if (e.control == e.target) throw SchemaError(path, "control equals target");
    detail::check_probability(e.cnot_error, path + ".cnot_error");
    detail::check_duration(e.duration_ns, path + ".duration_ns");
    if (!std::isfinite(e.coherent_angle_rad)) throw SchemaError(path + ".coherent_angle_rad", "angle must be finite");
    for (std::size_t j = 0; j < i; ++j)
      if (edges[j].control == e.control && edges[j].target == e.target)
        throw SchemaError(path, "duplicate directed edge " + std::to_string(e.control) + "->" +
                                    std::to_string(e.target));
    if (!physical_direction.contains(make_pair_key(e.control, e.target)))
      throw SchemaError("physical_direction", "no entry for pair " +
                                                  detail::pair_key_string(make_pair_key(e.control, e.target)));
  }
  for (const auto& [pair, control] : physical_direction) {
    const std::string path = "physical_direction." + detail::pair_key_string(pair);
    if (pair.first < 0 || pair.second >= num_qubits() || pair.first == pair.second)
      throw SchemaError(path, "unknown qubit pair");
    if (control != pair.first && control != pair.second) throw SchemaError(path, "control is not in the pair");
  }
}

inline nlohmann::json noise_model_to_json(const NoiseModel& m) {
  nlohmann::json doc;
  auto& qs = doc["qubits"] = nlohmann::json::array();
  for (const auto& q : m.qubits) {
    qs.push_back({{"t1_us", q.t1_us},
                  {"t2_us", q.t2_us},
                  {"readout_p01", q.readout_p01},
                  {"readout_p10", q.readout_p10},
                  {"u2_error", q.u2_error},
                  {"u2_duration_ns", q.u2_duration_ns}});
  }
  auto& es = doc["edges"] = nlohmann::json::array();
  for (const auto& e : m.edges) {
    nlohmann::json item{{"control", e.control},
                        {"target", e.target},
                        {"cnot_error", e.cnot_error},
                        {"duration_ns", e.duration_ns}};
    if (e.coherent_axis) {
      item["coherent_axis"] = std::string(to_string(*e.coherent_axis));
      item["coherent_angle_rad"] = e.coherent_angle_rad;
    }
    es.push_back(std::move(item));
  }
  auto& pd = doc["physical_direction"] = nlohmann::json::object();
  for (const auto& [pair, control] : m.physical_direction) pd[detail::pair_key_string(pair)] = control;
  return doc;
}

inline NoiseModel load_noise_model(const nlohmann::json& doc) {
  auto join = [](const std::string& path, const char* key) { return path.empty() ? std::string(key) : path + "." + key; };
  auto field = [&](const nlohmann::json& obj, const char* key, const std::string& path) -> const nlohmann::json& {
    if (!obj.contains(key)) throw SchemaError(join(path, key), "missing field");
    return obj.at(key);
  };
  auto number = [&](const nlohmann::json& obj, const char* key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_number()) throw SchemaError(join(path, key), "expected a number");
    return v.get<double>();
  };
  auto index = [&](const nlohmann::json& obj, const char* key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw SchemaError(join(path, key), "expected a non-negative integer");
    return v.get<Qubit>();
  };

  if (!doc.is_object()) throw SchemaError("", "noise model must be a JSON object");
  NoiseModel m;

  const auto& qs = field(doc, "qubits", "");
  if (!qs.is_array()) throw SchemaError("qubits", "expected an array");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string path = "qubits[" + std::to_string(i) + "]";
    if (!qs[i].is_object()) throw SchemaError(path, "expected an object");
    m.qubits.push_back({number(qs[i], "t1_us", path), number(qs[i], "t2_us", path),
                        number(qs[i], "readout_p01", path), number(qs[i], "readout_p10", path),
                        number(qs[i], "u2_error", path), number(qs[i], "u2_duration_ns", path)});
  }

  const auto& es = field(doc, "edges", "");
  if (!es.is_array()) throw SchemaError("edges", "expected an array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    if (!es[i].is_object()) throw SchemaError(path, "expected an object");
    DirectedEdgeParams e;
    e.control = index(es[i], "control", path);
    e.target = index(es[i], "target", path);
    e.cnot_error = number(es[i], "cnot_error", path);
    e.duration_ns = number(es[i], "duration_ns", path);
    if (es[i].contains("coherent_axis") && !es[i]["coherent_axis"].is_null()) {
      const auto& axis = es[i]["coherent_axis"];
      if (!axis.is_string()) throw SchemaError(path + ".coherent_axis", "expected a string");
      try {
        e.coherent_axis = pauli_axis_from_string(axis.get<std::string>());
      } catch (const std::invalid_argument& err) {
        throw SchemaError(path + ".coherent_axis", err.what());
      }
    }
    if (es[i].contains("coherent_angle_rad")) e.coherent_angle_rad = number(es[i], "coherent_angle_rad", path);
    m.edges.push_back(e);
  }

  const auto& pd = field(doc, "physical_direction", "");
  if (!pd.is_object()) throw SchemaError("physical_direction", "expected an object");
  for (const auto& [key, value] : pd.items()) {
    const std::string path = "physical_direction." + key;
    const auto dash = key.find('-');
    QubitPair pair;
    try {
      if (dash == std::string::npos) throw std::invalid_argument("no dash");
      std::size_t used_a = 0, used_b = 0;
      const int a = std::stoi(key.substr(0, dash), &used_a);
      const int b = std::stoi(key.substr(dash + 1), &used_b);
      if (used_a != dash || used_b != key.size() - dash - 1 || a < 0 || b < 0) throw std::invalid_argument("junk");
      pair = make_pair_key(a, b);
    } catch (const std::logic_error&) {
      throw SchemaError(path, "key must look like \"<a>-<b>\"");
    }
    if (!value.is_number_integer()) throw SchemaError(path, "expected a qubit index");
    if (m.physical_direction.contains(pair)) throw SchemaError(path, "pair listed twice");
    m.physical_direction[pair] = value.get<Qubit>();
  }

  m.validate();
  return m;
}

/// Physical and reversed CNOT schedule durations in ns.
struct DirectionDurations {
  double physical_ns = 348.0;
  double reversed_ns = 384.0;
};

inline QubitParams default_synth_qubit() {
  return {.t1_us = 80.0,
          .t2_us = 100.0,
          .readout_p01 = 0.025,
          .readout_p10 = 0.025,
          .u2_error = 0.00042,
          .u2_duration_ns = 35.5};
}

/// Two-qubit model with 0->1 as the physical direction. The reversed
/// direction carries base_error * asymmetry_factor and the reversed schedule
/// duration. A factor of exactly 1 gives a fully direction-symmetric model,
/// durations included.
inline NoiseModel synth_asymmetric_model(double base_error, double asymmetry_factor,
                                         DirectionDurations durations = {},
                                         QubitParams qubit = default_synth_qubit()) {
  if (!(base_error >= 0.0 && base_error <= 1.0)) throw std::invalid_argument("base_error outside [0, 1]");
  if (!(asymmetry_factor >= 1.0)) throw std::invalid_argument("asymmetry_factor must be >= 1");
  const double reversed_error = base_error * asymmetry_factor;
  if (reversed_error > 1.0) throw std::invalid_argument("base_error * asymmetry_factor exceeds 1");
  const bool symmetric = asymmetry_factor == 1.0;

  NoiseModel m;
  m.qubits = {qubit, qubit};
  m.edges.push_back({.control = 0, .target = 1, .cnot_error = base_error, .duration_ns = durations.physical_ns});
  m.edges.push_back({.control = 1,
                     .target = 0,
                     .cnot_error = reversed_error,
                     .duration_ns = symmetric ? durations.physical_ns : durations.reversed_ns});
  m.physical_direction[{0, 1}] = 0;
  m.validate();
  return m;
}

}  // namespace cnotasym
