#include <catch_amalgamated.hpp>

#include <random>

#include "cnotasym/transpiler.hpp"
#include "oracles.hpp"

using namespace cnotasym;
using Catch::Approx;

namespace {

// Two-qubit coupling map with 0->1 physical and the given directional rates.
// A negative rate leaves that direction uncharacterized.
struct PairSetup {
  CouplingMap map;
  std::vector<QubitParams> qubits;
};

PairSetup pair_setup(double e01, double e10, double u2 = 0.00042) {
  NoiseModel m;
  QubitParams q;
  q.u2_error = u2;
  m.qubits = {q, q};
  if (e01 >= 0) m.edges.push_back({.control = 0, .target = 1, .cnot_error = e01});
  if (e10 >= 0) m.edges.push_back({.control = 1, .target = 0, .cnot_error = e10});
  m.physical_direction[{0, 1}] = 0;
  return {CouplingMap::from_noise_model(m), m.qubits};
}

std::vector<Realization> realizations(const TranspileReport& rep) {
  std::vector<Realization> out;
  for (const auto& d : rep.decisions) out.push_back(d.realization);
  return out;
}

Circuit random_circuit(std::mt19937_64& rng, int n, int length) {
  std::uniform_real_distribution<double> angle(-3.2, 3.2);
  Circuit c(n, 0);
  for (int i = 0; i < length; ++i) {
    const int q = static_cast<int>(rng() % static_cast<unsigned>(n));
    switch (rng() % 6) {
      case 0: c.append(Gate::h(q)); break;
      case 1: c.append(Gate::sx(q)); break;
      case 2: c.append(Gate::u(q, angle(rng), angle(rng), angle(rng))); break;
      case 3: c.append(Gate::barrier({q})); break;
      default: {
        // line topology 0-1-2
        const int a = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        c.append(rng() % 2 ? Gate::cnot(a, a + 1) : Gate::cnot(a + 1, a));
      }
    }
  }
  return c;
}

CouplingMap line3(std::vector<QubitParams>& qubits) {
  NoiseModel m;
  QubitParams q;
  q.u2_error = 0.0004;
  m.qubits = {q, q, q};
  m.edges = {{.control = 0, .target = 1, .cnot_error = 0.008},
             {.control = 1, .target = 0, .cnot_error = 0.012},
             {.control = 2, .target = 1, .cnot_error = 0.009},
             {.control = 1, .target = 2, .cnot_error = 0.03}};
  m.physical_direction[{0, 1}] = 0;
  m.physical_direction[{1, 2}] = 2;
  qubits = m.qubits;
  return CouplingMap::from_noise_model(m);
}

}  // namespace

TEST_CASE("enforce_direction sandwiches disallowed CNOTs") {
  const auto s = pair_setup(0.00862, 0.00862);
  Circuit c(2, 0);
  c.append(Gate::cnot(1, 0));
  const auto rep = enforce_direction(c, s.map);
  Circuit expected(2, 0);
  expected.append(Gate::h(1)).append(Gate::h(0)).append(Gate::cnot(0, 1)).append(Gate::h(1)).append(Gate::h(0));
  CHECK(rep.circuit == expected);
  REQUIRE(rep.decisions.size() == 1);
  CHECK(rep.decisions[0].realization == Realization::Sandwich);
  CHECK(rep.gate_delta() == 4);
  CHECK(oracle::phase_distance(oracle::unitary(rep.circuit), oracle::unitary(c)) < 1e-12);
}

TEST_CASE("enforce_direction keeps allowed CNOTs") {
  const auto s = pair_setup(0.00862, -1);
  const Circuit c = build_n_stage(0, 1, 3);
  const auto rep = enforce_direction(c, s.map);
  CHECK(rep.circuit == c);
  for (const auto& d : rep.decisions) CHECK(d.realization == Realization::Direct);
}

TEST_CASE("enforce_direction preserves semantics of n-stage circuits") {
  const auto s = pair_setup(0.01, 0.02);
  for (int n = 1; n <= 4; ++n) {
    const Circuit c = build_n_stage(1, 0, n).without_measurements();
    const auto rep = enforce_direction(c, s.map);
    CHECK(rep.circuit.count(GateKind::Barrier) == c.count(GateKind::Barrier));
    CHECK(oracle::phase_distance(oracle::unitary(rep.circuit), oracle::unitary(c)) < 1e-12);
  }
}

TEST_CASE("uncoupled CNOTs are rejected") {
  std::vector<QubitParams> qs;
  const auto map = line3(qs);
  Circuit c(3, 0);
  c.append(Gate::cnot(0, 2));
  CHECK_THROWS_AS(enforce_direction(c, map), TranspileError);
  CHECK_THROWS_AS(realize_characterized(c, map), TranspileError);
  CHECK_THROWS_AS(orient_for_error(c, map, qs), TranspileError);
}

TEST_CASE("success estimate examples") {
  const auto s = pair_setup(0.00862, 0.00862);
  CHECK(estimate_success(Circuit(2, 0), s.map, s.qubits) == 1.0);
  Circuit one(2, 0);
  one.append(Gate::cnot(0, 1));
  CHECK(estimate_success(one, s.map, s.qubits) == Approx(0.99138).margin(1e-15));
  Circuit rev(2, 0);
  rev.append(std::span<const Gate>(reverse_cnot(1, 0)));
  const double expected = std::pow(1 - 0.00042, 4) * (1 - 0.00862);
  CHECK(estimate_success(rev, s.map, s.qubits) == Approx(expected).margin(1e-15));
  CHECK(expected == Approx(0.98971).margin(5e-6));
  Circuit with_meas(2, 2);
  with_meas.append(Gate::barrier({0, 1})).append(Gate::measure(0, 0));
  CHECK(estimate_success(with_meas, s.map, s.qubits) == 1.0);
}

TEST_CASE("success estimate needs every rate") {
  const auto s = pair_setup(0.00862, -1);
  Circuit c(2, 0);
  c.append(Gate::cnot(1, 0));
  CHECK_THROWS_AS(estimate_success(c, s.map, s.qubits), MissingNoiseParameters);
  Circuit h(3, 0);
  h.append(Gate::h(2));
  CHECK_THROWS_AS(estimate_success(h, s.map, s.qubits), MissingNoiseParameters);
}

TEST_CASE("symmetric rates keep the direct realization") {
  const auto s = pair_setup(0.01, 0.01);
  Circuit c(2, 0);
  c.append(Gate::cnot(0, 1)).append(Gate::cnot(1, 0));
  const auto rep = orient_for_error(c, s.map, s.qubits);
  CHECK(realizations(rep) == std::vector<Realization>{Realization::Direct, Realization::Direct});
  CHECK(rep.circuit == c);
}

TEST_CASE("a much better opposite direction wins through the sandwich") {
  const auto s = pair_setup(0.03, 0.005, 0.0004);
  Circuit c(2, 0);
  c.append(Gate::cnot(0, 1));
  const auto rep = orient_for_error(c, s.map, s.qubits);
  REQUIRE(rep.decisions.size() == 1);
  const auto& d = rep.decisions[0];
  CHECK(d.realization == Realization::Sandwich);
  CHECK(*d.est_success_direct == Approx(0.97).margin(1e-15));
  CHECK(*d.est_success_sandwich == Approx(0.9934).margin(5e-5));
  CHECK(*rep.estimated_success == Approx(*d.est_success_sandwich).margin(1e-15));
}

TEST_CASE("only the characterized direction is offered") {
  const auto s = pair_setup(0.01, -1);
  Circuit c(2, 0);
  c.append(Gate::cnot(1, 0)).append(Gate::cnot(0, 1));
  const auto rep = orient_for_error(c, s.map, s.qubits);
  CHECK(realizations(rep) == std::vector<Realization>{Realization::Sandwich, Realization::Direct});
  CHECK_FALSE(rep.decisions[0].est_success_direct.has_value());
  CHECK_FALSE(rep.decisions[1].est_success_sandwich.has_value());
}

TEST_CASE("orientation pass matches brute force on all small circuits") {
  const auto corpus = oracle::exhaustive_corpus(4);
  CHECK(corpus.size() == 1 + 2 + 4 * 4 + 8 * 16 + 16 * 64);
  const std::vector<std::array<double, 3>> rate_sets{
      {0.00862, 0.00862, 0.00042}, {0.03, 0.005, 0.0004}, {0.01, 0.02, 0.00042},
      {0.005, 0.0061, 0.0003},     {0.02, -1, 0.001},     {-1, 0.004, 0.0002}};
  for (const auto& [e01, e10, u2] : rate_sets) {
    const auto s = pair_setup(e01, e10, u2);
    for (const auto& c : corpus) {
      const auto rep = orient_for_error(c, s.map, s.qubits);
      const double best = oracle::brute_force_best(c, e01, e10, u2);
      CHECK(*rep.estimated_success == Approx(best).margin(1e-14));
      CHECK(oracle::product_objective(rep.circuit, e01, e10, u2) == Approx(best).margin(1e-14));
    }
  }
}

TEST_CASE("decisions are stable under scaling of all error rates") {
  const auto corpus = oracle::exhaustive_corpus(3);
  for (const auto& [e01, e10, u2] : std::vector<std::array<double, 3>>{
           {0.03, 0.005, 0.0004}, {0.01, 0.02, 0.00042}, {0.00862, 0.00862, 0.00042}}) {
    const auto base = pair_setup(e01, e10, u2);
    for (const auto& c : corpus) {
      const auto reference = realizations(orient_for_error(c, base.map, base.qubits));
      for (double lambda : {0.5, 2.0}) {
        const auto scaled = pair_setup(lambda * e01, lambda * e10, lambda * u2);
        CHECK(realizations(orient_for_error(c, scaled.map, scaled.qubits)) == reference);
      }
    }
  }
}

TEST_CASE("switch point sits where the gap equals the sandwich overhead") {
  const double u2 = 0.00042, reverse = 0.00862;
  const double overhead = std::pow(1 - u2, 4);
  const double threshold = 1.0 - overhead * (1.0 - reverse);
  CHECK(threshold - reverse == Approx(4 * u2).epsilon(0.01));
  Circuit c(2, 0);
  c.append(Gate::cnot(0, 1));
  for (double delta : {-1e-6, -1e-9, 1e-9, 1e-6}) {
    const auto s = pair_setup(threshold + delta, reverse, u2);
    const auto rep = orient_for_error(c, s.map, s.qubits);
    CHECK(rep.decisions[0].realization == (delta > 0 ? Realization::Sandwich : Realization::Direct));
  }
}

TEST_CASE("the pass never does worse than direct execution") {
  std::mt19937_64 rng(8);
  std::vector<QubitParams> qs;
  const auto map = line3(qs);
  for (int trial = 0; trial < 100; ++trial) {
    const Circuit c = random_circuit(rng, 3, 15);
    const auto rep = orient_for_error(c, map, qs);
    CHECK(*rep.estimated_success >= estimate_success(c, map, qs) - 1e-15);
    for (const auto& d : rep.decisions) {
      if (!d.est_success_direct) continue;
      const double chosen = d.realization == Realization::Direct ? *d.est_success_direct : *d.est_success_sandwich;
      CHECK(chosen >= *d.est_success_direct);
    }
  }
}

TEST_CASE("rewrites preserve semantics on random circuits") {
  std::mt19937_64 rng(31);
  std::vector<QubitParams> qs;
  const auto map = line3(qs);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(trial % 2);
    const Circuit c = random_circuit(rng, n, 20);
    const auto ref = oracle::unitary(c);
    for (const auto& rep : {orient_for_error(c, map, qs), orient_for_error(c, map, qs, {.cancel_hadamards = true}),
                            enforce_direction(c, map), realize_characterized(c, map)}) {
      CHECK(oracle::phase_distance(oracle::unitary(rep.circuit), ref) < 1e-10);
      CHECK(equivalence_distance(c, rep.circuit) < 1e-10);
    }
  }
}

TEST_CASE("the pass is idempotent") {
  std::mt19937_64 rng(12);
  std::vector<QubitParams> qs;
  const auto map = line3(qs);
  for (int trial = 0; trial < 100; ++trial) {
    const Circuit c = random_circuit(rng, 3, 12);
    for (bool cancel : {false, true}) {
      const auto once = orient_for_error(c, map, qs, {.cancel_hadamards = cancel}).circuit;
      const auto twice = orient_for_error(once, map, qs, {.cancel_hadamards = cancel}).circuit;
      CHECK(twice == once);
    }
    const auto e1 = enforce_direction(c, map).circuit;
    CHECK(enforce_direction(e1, map).circuit == e1);
  }
}

TEST_CASE("Hadamard cancellation stops at barriers") {
  const auto s = pair_setup(0.001, -1);  // forces the sandwich for CNOT(1,0)
  Circuit back_to_back(2, 0);
  back_to_back.append(Gate::cnot(1, 0)).append(Gate::cnot(1, 0));
  const auto merged = orient_for_error(back_to_back, s.map, s.qubits, {.cancel_hadamards = true});
  CHECK(merged.hadamards_cancelled == 4);
  CHECK(merged.circuit.gate_count() == 6);
  CHECK(equivalence_distance(back_to_back, merged.circuit) < 1e-12);

  Circuit fenced(2, 0);
  fenced.append(Gate::cnot(1, 0)).append(Gate::barrier({0, 1})).append(Gate::cnot(1, 0));
  const auto kept = orient_for_error(fenced, s.map, s.qubits, {.cancel_hadamards = true});
  CHECK(kept.hadamards_cancelled == 0);
  CHECK(kept.circuit.gate_count() == 10);

  const auto off = orient_for_error(back_to_back, s.map, s.qubits);
  CHECK(off.hadamards_cancelled == 0);
  CHECK(off.circuit.gate_count() == 10);
}

TEST_CASE("barriers in the n-stage circuit block cross-stage cancellation") {
  const auto s = pair_setup(0.001, -1);
  const Circuit c = build_n_stage(1, 0, 3).without_measurements();
  const auto rep = orient_for_error(c, s.map, s.qubits, {.cancel_hadamards = true});
  // per stage only the H(c) pairs next to each sandwich cancel: two per stage
  CHECK(rep.hadamards_cancelled == 2 * 2 * 3);
  CHECK(rep.circuit.count(GateKind::Barrier) == c.count(GateKind::Barrier));
  CHECK(equivalence_distance(c, rep.circuit) < 1e-12);
}

TEST_CASE("realize_characterized uses each direction's own entry") {
  const auto s = pair_setup(0.01, 0.02);
  const Circuit c = build_n_stage(1, 0, 2);
  CHECK(realize_characterized(c, s.map).circuit == c);
  const auto only_physical = pair_setup(0.01, -1);
  const auto rep = realize_characterized(c, only_physical.map);
  CHECK(rep.circuit.count(GateKind::H) == c.count(GateKind::H) + 4 * 4);
}

TEST_CASE("decision log records one JSON object per CNOT") {
  const auto s = pair_setup(0.03, 0.005, 0.0004);
  Circuit c(2, 0);
  c.append(Gate::h(0)).append(Gate::cnot(0, 1)).append(Gate::cnot(1, 0));
  const auto rep = orient_for_error(c, s.map, s.qubits);
  const std::string log = decision_log_jsonl(rep);
  std::vector<nlohmann::json> lines;
  std::istringstream in(log);
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0]["index"] == 1);
  CHECK(lines[0]["logical"] == nlohmann::json::array({0, 1}));
  CHECK(lines[0]["realization"] == "sandwich");
  CHECK(lines[1]["realization"] == "direct");
  for (const auto& j : lines) {
    CHECK(j.contains("est_success_direct"));
    CHECK(j.contains("est_success_sandwich"));
  }
}

TEST_CASE("equivalence check is limited to three active qubits") {
  Circuit c(4, 0);
  c.append(Gate::h(0)).append(Gate::h(1)).append(Gate::h(2)).append(Gate::h(3));
  CHECK_THROWS_AS(equivalence_distance(c, c), std::invalid_argument);
  Circuit wide(6, 0);
  wide.append(Gate::cnot(4, 5));
  CHECK(equivalence_distance(wide, wide) < 1e-15);
}
