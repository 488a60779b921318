#pragma once

// Command implementations behind the `cnotasym` executable. Each returns the
// process exit status: 0 success, 1 runtime failure, 2 usage/schema error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "circuit_json.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "mitigation.hpp"
#include "noise_model.hpp"
#include "report_io.hpp"
#include "transpiler.hpp"

namespace cnotasym::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, unreadable inputs, schema violations.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchOptions {
  std::filesystem::path model;
  QubitPair pair{0, 1};
  ExperimentConfig config;
  std::filesystem::path out_dir = "out";
};

struct MitigateOptions {
  BenchOptions bench;
  bool calibration_gate_noise = true;
};

struct TranspileOptions {
  std::filesystem::path circuit;
  std::filesystem::path model;
  std::filesystem::path out_dir = "out";
  bool enforce_only = false;
  bool cancel_hadamards = false;
  bool verify = false;
};

inline QubitPair parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("missing comma");
    std::size_t used_a = 0, used_b = 0;
    const int a = std::stoi(text.substr(0, comma), &used_a);
    const int b = std::stoi(text.substr(comma + 1), &used_b);
    if (used_a != comma || used_b != text.size() - comma - 1 || a < 0 || b < 0 || a == b)
      throw std::invalid_argument("bad pair");
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError("--pair expects two distinct qubit indices like 0,1, got '" + text + "'");
  }
}

namespace detail {

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

inline NoiseModel read_model(const std::filesystem::path& path) {
  const auto doc = read_json(path);
  try {
    return load_noise_model(doc);
  } catch (const SchemaError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

inline void check_pair_in_model(const QubitPair& pair, const NoiseModel& model) {
  if (!model.is_coupled(pair.first, pair.second))
    throw UsageError("pair " + pair_label(pair) + " is not coupled in the noise model");
}

inline void print_verdict(std::ostream& out, const AsymmetryReport& rep, const char* label) {
  out << label << " pair " << pair_label(rep.pair) << ": "
      << (rep.classified_asymmetric ? "asymmetric" : "symmetric") << " (max_f=" << format_double(rep.max_f)
      << " at n=" << rep.argmax_n << ", threshold=" << format_double(rep.config.threshold) << ")\n";
}

}  // namespace detail

inline int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    opts.config.validate();
    const NoiseModel model = detail::read_model(opts.model);
    detail::check_pair_in_model(opts.pair, model);
    const auto report = run_asymmetry_experiment(opts.pair, model, opts.config);

    detail::prepare_out_dir(opts.out_dir);
    std::ostringstream csv;
    write_results_csv(csv, report);
    detail::write_file(opts.out_dir / "results.csv", csv.str());
    detail::write_file(opts.out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    detail::print_verdict(out, report, "raw");
    return kExitOk;
  });
}

inline int cmd_mitigate(const MitigateOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto& b = opts.bench;
    b.config.validate();
    const NoiseModel model = detail::read_model(b.model);
    detail::check_pair_in_model(b.pair, model);
    const auto raw = run_asymmetry_experiment(b.pair, model, b.config);
    const auto cal = calibrate_readout({std::min(b.pair.first, b.pair.second), std::max(b.pair.first, b.pair.second)},
                                       model, b.config, opts.calibration_gate_noise);
    const auto mit = mitigate_report(raw, cal);
    const auto cmp = compare_mitigated(raw, mit);

    detail::prepare_out_dir(b.out_dir);
    std::ostringstream csv, table;
    write_results_csv(csv, raw);
    write_mitigation_table(table, cmp);
    detail::write_file(b.out_dir / "results.csv", csv.str());
    detail::write_file(b.out_dir / "report.json", report_to_json(raw).dump(2) + "\n");
    detail::write_file(b.out_dir / "report_mitigated.json", report_to_json(mit).dump(2) + "\n");
    detail::write_file(b.out_dir / "comparison.json", comparison_to_json(cmp).dump(2) + "\n");
    detail::write_file(b.out_dir / "mitigation_table.csv", table.str());

    detail::print_verdict(out, raw, "raw");
    detail::print_verdict(out, mit, "mitigated");
    out << "mean g: raw " << format_double(cmp.mean_g_raw) << ", mitigated " << format_double(cmp.mean_g_mit) << '\n';
    out << (cmp.asymmetry_exacerbated ? "asymmetry exacerbated by mitigation" : "asymmetry not exacerbated");
    if (cmp.relative_change_max_f) out << " (max_f change " << format_double(*cmp.relative_change_max_f) << ")";
    out << '\n';
    return kExitOk;
  });
}

inline int cmd_transpile(const TranspileOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() -> int {
    const auto doc = detail::read_json(opts.circuit);
    Circuit input;
    try {
      input = circuit_from_json(doc);
    } catch (const SchemaError& e) {
      throw UsageError(opts.circuit.string() + ": " + e.what());
    }
    const NoiseModel model = detail::read_model(opts.model);
    const auto map = CouplingMap::from_noise_model(model);

    TranspileReport rep;
    try {
      rep = opts.enforce_only ? enforce_direction(input, map)
                              : orient_for_error(input, map, model.qubits, {.cancel_hadamards = opts.cancel_hadamards});
    } catch (const TranspileError& e) {
      throw UsageError(opts.circuit.string() + ": " + e.what());
    }
    if (opts.enforce_only) {
      if (opts.cancel_hadamards) {
        rep.circuit = cancel_adjacent_hadamards(rep.circuit, &rep.hadamards_cancelled);
        rep.gates_after = rep.circuit.gate_count();
      }
      try {
        rep.estimated_success = estimate_success(rep.circuit, map, model.qubits);
      } catch (const MissingNoiseParameters&) {
        rep.estimated_success.reset();
      }
    }

    detail::prepare_out_dir(opts.out_dir);
    detail::write_file(opts.out_dir / "circuit.json", circuit_to_json(rep.circuit).dump(2) + "\n");
    detail::write_file(opts.out_dir / "decisions.jsonl", decision_log_jsonl(rep));

    out << "gates: " << rep.gates_before << " -> " << rep.gates_after << " (delta " << rep.gate_delta() << ")\n";
    if (rep.estimated_success) out << "estimated success: " << format_double(*rep.estimated_success) << '\n';
    if (opts.verify) {
      const double dist = equivalence_distance(input, rep.circuit);
      if (!(dist < 1e-10)) {
        err << "verify: rewritten circuit differs from input (max deviation " << format_double(dist) << ")\n";
        return kExitRuntime;
      }
      out << "verify: equivalent up to global phase (max deviation " << format_double(dist) << ")\n";
    }
    return kExitOk;
  });
}

}  // namespace cnotasym::cli
