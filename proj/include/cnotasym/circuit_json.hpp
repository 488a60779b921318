#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "circuit.hpp"
#include "errors.hpp"

namespace cnotasym {

// {"num_qubits":N,"num_clbits":M,"instructions":[{"kind","qubits","params"?,"clbits"?}]}

inline nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json doc;
  doc["num_qubits"] = c.num_qubits();
  doc["num_clbits"] = c.num_clbits();
  auto& list = doc["instructions"] = nlohmann::json::array();
  for (const Gate& g : c.instructions()) {
    nlohmann::json item;
    item["kind"] = std::string(to_string(g.kind));
    item["qubits"] = g.qubits;
    if (g.kind == GateKind::U) item["params"] = g.params;
    if (g.kind == GateKind::Measure) item["clbits"] = nlohmann::json::array({g.clbit});
    list.push_back(std::move(item));
  }
  return doc;
}

inline Circuit circuit_from_json(const nlohmann::json& doc) {
  auto require = [](const nlohmann::json& obj, const char* key, const std::string& path) -> const nlohmann::json& {
    if (!obj.is_object() || !obj.contains(key)) throw SchemaError(path.empty() ? std::string(key) : path + "." + key, "missing field");
    return obj.at(key);
  };
  auto as_index = [](const nlohmann::json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw SchemaError(path, "expected a non-negative integer");
    return v.get<int>();
  };

  Circuit c(as_index(require(doc, "num_qubits", ""), "num_qubits"),
            as_index(require(doc, "num_clbits", ""), "num_clbits"));
  const auto& list = require(doc, "instructions", "");
  if (!list.is_array()) throw SchemaError("instructions", "expected an array");

  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "instructions[" + std::to_string(i) + "]";
    const auto& item = list[i];
    const auto& kind_field = require(item, "kind", path);
    if (!kind_field.is_string()) throw SchemaError(path + ".kind", "expected a string");
    Gate g;
    try {
      g.kind = gate_kind_from_string(kind_field.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path + ".kind", e.what());
    }
    const auto& qubits = require(item, "qubits", path);
    if (!qubits.is_array()) throw SchemaError(path + ".qubits", "expected an array");
    for (std::size_t j = 0; j < qubits.size(); ++j)
      g.qubits.push_back(as_index(qubits[j], path + ".qubits[" + std::to_string(j) + "]"));
    if (g.kind == GateKind::U) {
      const auto& params = require(item, "params", path);
      if (!params.is_array() || params.size() != 3) throw SchemaError(path + ".params", "expected three angles");
      for (std::size_t j = 0; j < 3; ++j) {
        if (!params[j].is_number()) throw SchemaError(path + ".params", "angles must be numbers");
        g.params[j] = params[j].get<double>();
      }
    }
    if (g.kind == GateKind::Measure) {
      const auto& clbits = require(item, "clbits", path);
      if (!clbits.is_array() || clbits.size() != 1) throw SchemaError(path + ".clbits", "expected one classical bit");
      g.clbit = as_index(clbits[0], path + ".clbits[0]");
    }
    try {
      c.append(std::move(g));
    } catch (const std::logic_error& e) {
      throw SchemaError(path, e.what());
    }
  }
  return c;
}

}  // namespace cnotasym
