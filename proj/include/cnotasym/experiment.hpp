#pragma once

// Orientation-asymmetry benchmark: for a coupled pair, run the n-stage
// identity circuits with each qubit as control, aggregate ground-state counts
// over repetitions and compare the two orientations.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "circuit.hpp"
#include "counts.hpp"
#include "noise_model.hpp"
#include "rng.hpp"
#include "simulator.hpp"
#include "transpiler.hpp"

namespace cnotasym {

struct ExperimentConfig {
  int max_stages = 6;
  int repetitions = 3;
  int shots_per_rep = 4096;
  double threshold = 0.02;
  std::uint64_t seed = 0;
  int workers = 1;  // scheduling only; results do not depend on it

  void validate() const {
    if (max_stages < 1) throw std::invalid_argument("max_stages must be >= 1");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (shots_per_rep < 1) throw std::invalid_argument("shots_per_rep must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must be in (0, 1)");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  }

  std::uint64_t total_shots() const {
    return static_cast<std::uint64_t>(repetitions) * static_cast<std::uint64_t>(shots_per_rep);
  }
};

/// Fraction of shots that read all zeros.
inline double ground_fraction(const Counts& counts) {
  if (counts.total() == 0) throw std::invalid_argument("ground_fraction: counts are empty");
  return static_cast<double>(counts[std::string(static_cast<std::size_t>(counts.num_bits()), '0')]) /
         static_cast<double>(counts.total());
}

inline double asymmetry(double g01, double g10) {
  return std::abs(g01 - g10);
}

/// True iff any f(n) reaches the threshold (inclusive).
inline bool classify(const std::map<int, double>& f_by_n, double threshold) {
  if (f_by_n.empty()) throw std::invalid_argument("classify: no stages");
  return std::any_of(f_by_n.begin(), f_by_n.end(), [&](const auto& kv) { return kv.second >= threshold; });
}

inline double relative_change(double before, double after) {
  if (before == 0.0) throw std::invalid_argument("relative_change: baseline is zero");
  return (after - before) / before;
}

struct StageResult {
  int n = 0;
  std::uint64_t ground_count = 0;  // G, summed over repetitions
  std::uint64_t total = 0;         // T
  double g = 0.0;                  // G / T, or a corrected fraction after mitigation
  double exact_p00 = 0.0;          // sampling-free probability of reading 00
  Counts counts;                   // aggregated over repetitions
  Distribution exact;              // sampling-free outcome distribution
};

struct OrientationResult {
  Qubit control = 0;
  Qubit target = 1;
  std::vector<StageResult> per_n;  // n = 1..max_stages in order

  const StageResult& stage(int n) const { return per_n.at(static_cast<std::size_t>(n - 1)); }
};

struct AsymmetryReport {
  QubitPair pair{0, 1};  // as requested: forward orientation is pair.first -> pair.second
  ExperimentConfig config;
  bool mitigated = false;
  OrientationResult forward;  // g_01
  OrientationResult reverse;  // g_10
  std::map<int, double> f;        // from sampled counts
  std::map<int, double> f_exact;  // from exact probabilities
  bool classified_asymmetric = false;
  bool classified_asymmetric_exact = false;
  double max_f = 0.0;
  int argmax_n = 1;
  double max_f_exact = 0.0;
  int argmax_n_exact = 1;
};

namespace detail {

inline std::uint64_t cell_seed(std::uint64_t master, Qubit control, Qubit target, int n, int rep) {
  return derive_seed(master, {static_cast<std::uint64_t>(control), static_cast<std::uint64_t>(target),
                              static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

template <class Fn>
void run_indexed(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(workers, static_cast<int>(count)); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline StageResult run_stage(Qubit control, Qubit target, int n, const NoiseModel& noise,
                             const CouplingMap& map, const ExperimentConfig& config) {
  const Circuit logical = build_n_stage(control, target, n);
  const Circuit physical = realize_characterized(logical, map).circuit;
  const Evolution ev = evolve(physical, noise);
  StageResult r;
  r.n = n;
  r.exact = exact_distribution(ev);
  r.exact_p00 = r.exact.probs[0];
  r.counts = Counts(physical.num_clbits());
  for (int rep = 0; rep < config.repetitions; ++rep)
    r.counts += sample(ev, static_cast<std::uint64_t>(config.shots_per_rep),
                       cell_seed(config.seed, control, target, n, rep));
  r.total = r.counts.total();
  r.ground_count = r.counts["00"];
  r.g = ground_fraction(r.counts);
  return r;
}

inline void check_pair(Qubit control, Qubit target, const NoiseModel& noise) {
  if (control == target) throw std::invalid_argument("control equals target");
  if (!noise.is_coupled(control, target))
    throw std::invalid_argument("pair " + std::to_string(control) + "," + std::to_string(target) +
                                " is not in the noise model");
}

}  // namespace detail

inline OrientationResult run_orientation(Qubit control, Qubit target, const NoiseModel& noise,
                                         const ExperimentConfig& config) {
  config.validate();
  detail::check_pair(control, target, noise);
  const auto map = CouplingMap::from_noise_model(noise);
  OrientationResult out{control, target, std::vector<StageResult>(static_cast<std::size_t>(config.max_stages))};
  detail::run_indexed(out.per_n.size(), config.workers, [&](std::size_t i) {
    out.per_n[i] = detail::run_stage(control, target, static_cast<int>(i) + 1, noise, map, config);
  });
  return out;
}

/// Recomputes f, the classifications and the maxima from the stored
/// orientation results.
inline void finalize_report(AsymmetryReport& rep) {
  rep.f.clear();
  rep.f_exact.clear();
  for (std::size_t i = 0; i < rep.forward.per_n.size(); ++i) {
    const auto& a = rep.forward.per_n[i];
    const auto& b = rep.reverse.per_n.at(i);
    // equal totals: |G01 - G10| / T is the exact rational, rounded once
    const bool rational = !rep.mitigated && a.total == b.total;
    rep.f[a.n] = rational ? static_cast<double>(a.ground_count > b.ground_count ? a.ground_count - b.ground_count
                                                                                 : b.ground_count - a.ground_count) /
                                static_cast<double>(a.total)
                          : asymmetry(a.g, b.g);
    rep.f_exact[a.n] = asymmetry(a.exact_p00, b.exact_p00);
  }
  rep.classified_asymmetric = classify(rep.f, rep.config.threshold);
  rep.classified_asymmetric_exact = classify(rep.f_exact, rep.config.threshold);
  auto argmax = [](const std::map<int, double>& m) {
    return std::max_element(m.begin(), m.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
  };
  const auto it = argmax(rep.f);
  rep.max_f = it->second;
  rep.argmax_n = it->first;
  const auto it_exact = argmax(rep.f_exact);
  rep.max_f_exact = it_exact->second;
  rep.argmax_n_exact = it_exact->first;
}

/// Runs both orientations of `pair` (forward = pair.first as control).
inline AsymmetryReport run_asymmetry_experiment(QubitPair pair, const NoiseModel& noise,
                                                const ExperimentConfig& config) {
  config.validate();
  const auto [a, b] = pair;
  detail::check_pair(a, b, noise);
  const auto map = CouplingMap::from_noise_model(noise);

  AsymmetryReport rep;
  rep.pair = pair;
  rep.config = config;
  const std::size_t stages = static_cast<std::size_t>(config.max_stages);
  std::vector<StageResult> cells(2 * stages);
  detail::run_indexed(cells.size(), config.workers, [&](std::size_t i) {
    const bool fwd = i < stages;
    const int n = static_cast<int>(i % stages) + 1;
    cells[i] = fwd ? detail::run_stage(a, b, n, noise, map, config) : detail::run_stage(b, a, n, noise, map, config);
  });
  rep.forward = {a, b, {cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(stages)}};
  rep.reverse = {b, a, {cells.begin() + static_cast<std::ptrdiff_t>(stages), cells.end()}};
  finalize_report(rep);
  return rep;
}

}  // namespace cnotasym
