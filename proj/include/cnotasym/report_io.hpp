#pragma once

#include <charconv>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "experiment.hpp"
#include "mitigation.hpp"

namespace cnotasym {

/// Shortest round-trip decimal form of `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string pair_label(const QubitPair& p) {
  return std::to_string(p.first) + "-" + std::to_string(p.second);
}

inline void write_results_csv(std::ostream& os, const AsymmetryReport& rep) {
  os << "pair,control,target,n,shots,ground_count,g,exact_p00\n";
  for (const OrientationResult* o : {&rep.forward, &rep.reverse})
    for (const auto& s : o->per_n)
      os << pair_label(rep.pair) << ',' << o->control << ',' << o->target << ',' << s.n << ',' << s.total << ','
         << s.ground_count << ',' << format_double(s.g) << ',' << format_double(s.exact_p00) << '\n';
}

namespace detail {

inline nlohmann::json orientation_json(const OrientationResult& o) {
  nlohmann::json per_n = nlohmann::json::array();
  for (const auto& s : o.per_n)
    per_n.push_back({{"n", s.n},
                     {"ground_count", s.ground_count},
                     {"total", s.total},
                     {"g", s.g},
                     {"exact_p00", s.exact_p00}});
  return {{"control", o.control}, {"target", o.target}, {"per_n", per_n}};
}

inline nlohmann::json by_n_json(const std::map<int, double>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [n, v] : m) j[std::to_string(n)] = v;
  return j;
}

}  // namespace detail

inline nlohmann::json report_to_json(const AsymmetryReport& rep) {
  return {{"pair", {rep.pair.first, rep.pair.second}},
          {"mitigated", rep.mitigated},
          {"config",
           {{"max_stages", rep.config.max_stages},
            {"repetitions", rep.config.repetitions},
            {"shots_per_rep", rep.config.shots_per_rep},
            {"threshold", rep.config.threshold},
            {"seed", rep.config.seed}}},
          {"orientations", {detail::orientation_json(rep.forward), detail::orientation_json(rep.reverse)}},
          {"f", detail::by_n_json(rep.f)},
          {"f_exact", detail::by_n_json(rep.f_exact)},
          {"classified_asymmetric", rep.classified_asymmetric},
          {"classified_asymmetric_exact", rep.classified_asymmetric_exact},
          {"max_f", rep.max_f},
          {"argmax_n", rep.argmax_n},
          {"max_f_exact", rep.max_f_exact},
          {"argmax_n_exact", rep.argmax_n_exact}};
}

inline nlohmann::json comparison_to_json(const MitigationComparison& cmp) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : cmp.rows)
    rows.push_back({{"n", r.n},
                    {"g_raw_01", r.g_raw_01},
                    {"g_raw_10", r.g_raw_10},
                    {"g_mit_01", r.g_mit_01},
                    {"g_mit_10", r.g_mit_10},
                    {"f_raw", r.f_raw},
                    {"f_mit", r.f_mit}});
  nlohmann::json j{{"per_n", rows},
                   {"max_f_raw", cmp.max_f_raw},
                   {"max_f_mit", cmp.max_f_mit},
                   {"relative_change_max_f", nullptr},
                   {"asymmetry_exacerbated", cmp.asymmetry_exacerbated},
                   {"mean_g_raw", cmp.mean_g_raw},
                   {"mean_g_mit", cmp.mean_g_mit}};
  if (cmp.relative_change_max_f) j["relative_change_max_f"] = *cmp.relative_change_max_f;
  return j;
}

/// Plot-ready table: n, g_raw_01, g_raw_10, g_mit_01, g_mit_10.
inline void write_mitigation_table(std::ostream& os, const MitigationComparison& cmp) {
  os << "n,g_raw_01,g_raw_10,g_mit_01,g_mit_10\n";
  for (const auto& r : cmp.rows)
    os << r.n << ',' << format_double(r.g_raw_01) << ',' << format_double(r.g_raw_10) << ','
       << format_double(r.g_mit_01) << ',' << format_double(r.g_mit_10) << '\n';
}

}  // namespace cnotasym
