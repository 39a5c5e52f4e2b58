#pragma once

// JSON forms of mechanisms and results.
//
// Mechanism files (project indices are 0-based):
//   {"kind": "cutoff", "n_projects": N, "cutoffs": [c_0, ..., c_{N-2}]}
//   {"kind": "table", "n_projects": N, "grid_resolution": k,
//    "indicators": [[k^N 0/1 values, row-major, coordinate 0 slowest], ...]}
//   {"kind": "table", ..., "generators": [[[minimal on-point], ...], ...]}
//      (written for N > 3; either form is accepted on input)
//   {"kind": "grid", "n_projects": N, "grid_resolution": k,
//    "decisions": [k^(2N) project indices]}  entry (p, a) at
//      flat(p) * k^N + flat(a)
// Cutoffs are written with full round-trip precision.

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"
#include "projsel/analytic.hpp"
#include "projsel/core.hpp"
#include "projsel/mechanism_eval.hpp"
#include "projsel/monte_carlo.hpp"
#include "projsel/numeric.hpp"
#include "projsel/search.hpp"

namespace projsel {

using Json = nlohmann::json;
using Mechanism = std::variant<CutoffVector, TableMechanismGrid, GridMechanism>;

inline Json to_json(const CutoffVector& c) {
  return Json{{"kind", "cutoff"},
              {"n_projects", c.n_projects()},
              {"cutoffs", std::vector<double>(c.values().begin(), c.values().end())}};
}

inline Json to_json(const TableMechanismGrid& t) {
  Json j{{"kind", "table"},
         {"n_projects", t.n_projects()},
         {"grid_resolution", t.grid_resolution()}};
  if (t.n_projects() <= MonotoneIndicator::kDenseMaxProjects) {
    Json rows = Json::array();
    for (const auto& f : t.indicators()) {
      const auto bits = f.to_dense();
      rows.push_back(std::vector<int>(bits.begin(), bits.end()));
    }
    j["indicators"] = std::move(rows);
  } else {
    Json gens = Json::array();
    for (const auto& f : t.indicators()) gens.push_back(f.minimal_points());
    j["generators"] = std::move(gens);
  }
  return j;
}

inline Json to_json(const GridMechanism& g) {
  return Json{{"kind", "grid"},
              {"n_projects", g.n_projects()},
              {"grid_resolution", g.grid_resolution()},
              {"decisions", std::vector<int>(g.decisions().begin(), g.decisions().end())}};
}

inline Json to_json(const Mechanism& m) {
  return std::visit([](const auto& x) { return to_json(x); }, m);
}

namespace detail {

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("mechanism JSON lacks \"") + key + "\"");
  }
  return j.at(key);
}

}  // namespace detail

inline Mechanism mechanism_from_json(const Json& j) {
  try {
    const std::string kind = detail::require(j, "kind").get<std::string>();
    const auto n = detail::require(j, "n_projects").get<std::size_t>();
    if (kind == "cutoff") {
      CutoffVector c(detail::require(j, "cutoffs").get<std::vector<double>>());
      if (c.n_projects() != n) {
        throw std::invalid_argument("cutoff count must be n_projects - 1");
      }
      return c;
    }
    const GridShape shape(n, detail::require(j, "grid_resolution").get<std::size_t>());
    if (kind == "table") {
      std::vector<MonotoneIndicator> indicators;
      if (j.contains("indicators")) {
        for (const auto& row : j.at("indicators")) {
          indicators.push_back(MonotoneIndicator::from_dense(
              shape, row.get<std::vector<std::uint8_t>>()));
        }
      } else {
        for (const auto& g : detail::require(j, "generators")) {
          indicators.push_back(MonotoneIndicator::from_generators(
              shape, g.get<std::vector<std::vector<int>>>()));
        }
      }
      return TableMechanismGrid(shape, std::move(indicators));
    }
    if (kind == "grid") {
      return GridMechanism(
          shape, detail::require(j, "decisions").get<std::vector<std::uint16_t>>());
    }
    throw std::invalid_argument("unknown mechanism kind \"" + kind + "\"");
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed mechanism JSON: ") + e.what());
  }
}

inline Mechanism load_mechanism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return mechanism_from_json(j);
}

// Result objects; floats rounded to 12 significant digits.

inline Json to_json(const AuditReport& r) {
  Json j{{"incentive_compatible", r.is_ic()}};
  if (const auto& w = r.witness()) {
    auto rounded = [](std::span<const double> xs) {
      Json arr = Json::array();
      for (double x : xs) arr.push_back(round_significant(x));
      return arr;
    };
    j["witness"] = Json{{"profits", rounded(w->truth.profits())},
                        {"payoffs", rounded(w->truth.payoffs())},
                        {"reported_profits", rounded(w->deviation.profits())},
                        {"reported_payoffs", rounded(w->deviation.payoffs())},
                        {"truthful_decision", w->truthful_decision},
                        {"deviation_decision", w->deviation_decision},
                        {"gain", round_significant(w->gain)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline Json to_json(const EstimateWithError& e) {
  return Json{{"mean", round_significant(e.mean)},
              {"std_error", round_significant(e.std_error)},
              {"n_samples", e.n_samples},
              {"seed", e.seed}};
}

inline Json to_json(const OptimalCutoffResult& r) {
  return Json{{"n_projects", r.n_projects},
              {"cutoff", round_significant(r.cutoff)},
              {"expected_utility", round_significant(r.expected_utility)},
              {"residual", round_significant(r.residual)},
              {"iterations", r.iterations},
              {"bracket_sign_changes", r.bracket_sign_changes}};
}

inline Json to_json(const TableSearchResult& r) {
  Json maximizers = Json::array();
  for (const auto& m : r.maximizers) {
    Json entry{{"column_thresholds",
                std::vector<int>(m.thresholds().begin(), m.thresholds().end())},
               {"threshold_shaped", m.cutoff_index().has_value()}};
    if (auto idx = m.cutoff_index()) {
      entry["cutoff"] = round_significant(static_cast<double>(*idx) /
                                          static_cast<double>(r.resolution - 1));
    }
    maximizers.push_back(std::move(entry));
  }
  Json j{{"grid_resolution", r.resolution},
         {"candidates", r.candidates},
         {"expected_profit", round_significant(r.best_value.value())},
         {"expected_profit_fraction",
          std::to_string(r.best_value.numerator) + "/" +
              std::to_string(r.best_value.denominator)},
         {"is_cutoff_shaped", r.is_cutoff_shaped},
         {"maximizers", std::move(maximizers)},
         // Exhaustive over N = 2 only; evidence about larger N is not implied.
         {"scope", "exhaustive over all monotone f_1 for N = 2"}};
  j["cutoff"] = r.cutoff ? Json(round_significant(*r.cutoff)) : Json(nullptr);
  return j;
}

}  // namespace projsel
