#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cnotasym/commands.hpp"

namespace {

void add_bench_flags(CLI::App& cmd, cnotasym::cli::BenchOptions& opts, std::string& pair) {
  cmd.add_option("--model", opts.model, "Noise-model JSON")->required();
  cmd.add_option("--pair", pair, "Coupled qubit pair, e.g. 0,1")->required();
  cmd.add_option("--stages", opts.config.max_stages, "Largest n (circuits n = 1..stages)")->capture_default_str();
  cmd.add_option("--reps", opts.config.repetitions, "Repetitions per circuit")->capture_default_str();
  cmd.add_option("--shots", opts.config.shots_per_rep, "Shots per repetition")->capture_default_str();
  cmd.add_option("--seed", opts.config.seed, "Master seed")->capture_default_str();
  cmd.add_option("--threshold", opts.config.threshold, "Asymmetry threshold (inclusive)")->capture_default_str();
  cmd.add_option("--workers", opts.config.workers, "Worker threads")->capture_default_str();
  cmd.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cnotasym::cli;
  CLI::App app{"CNOT orientation asymmetry benchmark and direction-aware transpiler"};
  app.require_subcommand(1);

  BenchOptions bench;
  std::string bench_pair;
  auto* bench_cmd = app.add_subcommand("bench", "Run the n-stage orientation benchmark");
  add_bench_flags(*bench_cmd, bench, bench_pair);

  MitigateOptions mitigate;
  std::string mitigate_pair;
  bool no_cal_gate_noise = false;
  auto* mitigate_cmd = app.add_subcommand("mitigate", "Benchmark raw and readout-mitigated, then compare");
  add_bench_flags(*mitigate_cmd, mitigate.bench, mitigate_pair);
  mitigate_cmd->add_flag("--no-calibration-gate-noise", no_cal_gate_noise,
                         "Simulate calibration circuits without gate noise");

  TranspileOptions transpile;
  auto* transpile_cmd = app.add_subcommand("transpile", "Orient CNOTs for a directed coupling map");
  transpile_cmd->add_option("--circuit", transpile.circuit, "Circuit JSON")->required();
  transpile_cmd->add_option("--model", transpile.model, "Noise-model JSON used as the coupling map")->required();
  transpile_cmd->add_option("--out", transpile.out_dir, "Output directory")->capture_default_str();
  transpile_cmd->add_flag("--enforce-only", transpile.enforce_only,
                          "Only rewrite CNOTs against the physical direction");
  transpile_cmd->add_flag("--cancel-hadamards", transpile.cancel_hadamards,
                          "Cancel adjacent Hadamard pairs not separated by barriers");
  transpile_cmd->add_flag("--verify", transpile.verify, "Check unitary equivalence (<= 3 active qubits)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto with_pair = [](const std::string& text, BenchOptions& opts) {
    try {
      opts.pair = parse_pair(text);
      return true;
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return false;
    }
  };

  if (*bench_cmd) {
    if (!with_pair(bench_pair, bench)) return kExitUsage;
    return cmd_bench(bench, std::cout, std::cerr);
  }
  if (*mitigate_cmd) {
    if (!with_pair(mitigate_pair, mitigate.bench)) return kExitUsage;
    mitigate.calibration_gate_noise = !no_cal_gate_noise;
    return cmd_mitigate(mitigate, std::cout, std::cerr);
  }
  return cmd_transpile(transpile, std::cout, std::cerr);
}
