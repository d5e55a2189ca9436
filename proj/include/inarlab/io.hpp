#pragma once

/// @file
/// JSON encodings of the library's value types. Doubles are written in the
/// shortest form that parses back to the same value.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "inarlab/dependence.hpp"
#include "inarlab/error.hpp"
#include "inarlab/harness.hpp"
#include "inarlab/mixing.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/rng.hpp"

namespace inarlab::io {

using json = nlohmann::ordered_json;

inline json to_json(const SeedSpec& s) { return {{"root", s.root_seed}, {"stream", s.stream_index}}; }

/// Accepts {"root": r, "stream": s} or a bare integer root.
inline SeedSpec seed_from_json(const json& j) {
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    return {j.get<std::uint64_t>(), 0};
  }
  if (!j.is_object()) throw invalid_config("seed must be a nonnegative integer or {root, stream}");
  SeedSpec s;
  for (const auto& [k, v] : j.items()) {
    if (k == "root") {
      s.root_seed = v.get<std::uint64_t>();
    } else if (k == "stream") {
      s.stream_index = v.get<std::uint64_t>();
    } else {
      throw invalid_config("unknown seed field '" + k + "'");
    }
  }
  return s;
}

inline json to_json(const ParamMap& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

inline json to_json(const Pmf& p) { return {{"probs", p.probs()}, {"tail_mass", p.tail_mass()}}; }

inline Pmf pmf_from_json(const json& j) {
  return Pmf(j.at("probs").get<std::vector<double>>(), j.value("tail_mass", 0.0));
}

inline json to_json(const JointPmf& jp) {
  json mass = json::array();
  for (std::size_t r = 0; r < jp.row_count(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < jp.col_count(); ++c) row.push_back(jp.at(r, c));
    mass.push_back(std::move(row));
  }
  return {{"rows", jp.rows()}, {"cols", jp.cols()}, {"mass", std::move(mass)}};
}

inline JointPmf joint_from_json(const json& j) {
  return JointPmf(j.at("rows").get<std::vector<std::string>>(), j.at("cols").get<std::vector<std::string>>(),
                  j.at("mass").get<std::vector<std::vector<double>>>());
}

inline json to_json(const GapCertificate& c) {
  return {{"a", c.a},         {"epsilon", c.epsilon}, {"delta", c.delta},
          {"gamma", c.gamma}, {"m", c.m},             {"bound", c.bound_name}};
}

inline json to_json(const WindowSpec& w) {
  return {{"width", w.width}, {"S", w.s}, {"T", w.t}, {"gap", w.gap}, {"distance", w.distance()}};
}

inline json to_json(const RhoStarResult& r) {
  json j = {{"value", r.value},
            {"pair_count", r.pair_count},
            {"truncation_error", r.truncation_error},
            {"vacuous", r.vacuous}};
  j["attaining"] = r.attaining ? to_json(*r.attaining) : json(nullptr);
  return j;
}

inline json to_json(const CheckReport& r) {
  json j = {{"check", r.check},
            {"construction", r.construction},
            {"params", to_json(r.params)},
            {"statistic", r.statistic},
            {"comparison", to_string(r.comparison)},
            {"threshold", r.threshold},
            {"pass", r.pass},
            {"provenance", to_string(r.provenance)}};
  j["seed"] = r.seed ? to_json(*r.seed) : json(nullptr);
  j["budget"] = r.budget;
  j["note"] = r.note;
  return j;
}

inline Comparison comparison_from_string(const std::string& s) {
  if (s == "<=") return Comparison::at_most;
  if (s == ">=") return Comparison::at_least;
  if (s == "<") return Comparison::below;
  if (s == ">") return Comparison::above;
  throw invalid_config("unknown comparison '" + s + "'");
}

inline json to_json(const McConfig& c) {
  return {{"n_paths", c.n_paths},
          {"path_length", c.path_length},
          {"seed", to_json(c.seed)},
          {"significance", c.significance},
          {"truncation_budget", c.truncation_budget},
          {"grid_a", c.grid_a},
          {"grid_lambda", c.grid_lambda},
          {"equivalence_window", c.equivalence_window},
          {"threads", c.threads},
          {"corruption", c.corruption},
          {"mixing_checks", c.mixing_checks}};
}

/// Overlays the fields present in `j` onto `base`. Unknown keys and type
/// mismatches throw invalid_config.
inline McConfig config_from_json(const json& j, McConfig base = {}) {
  if (!j.is_object()) throw invalid_config("config must be a JSON object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "n_paths") {
        base.n_paths = v.get<std::size_t>();
      } else if (k == "path_length") {
        base.path_length = v.get<std::size_t>();
      } else if (k == "seed") {
        base.seed = seed_from_json(v);
      } else if (k == "significance") {
        base.significance = v.get<double>();
      } else if (k == "truncation_budget") {
        base.truncation_budget = v.get<double>();
      } else if (k == "grid_a") {
        base.grid_a = v.get<std::vector<double>>();
      } else if (k == "grid_lambda") {
        base.grid_lambda = v.get<std::vector<double>>();
      } else if (k == "equivalence_window") {
        base.equivalence_window = v.get<std::vector<std::uint64_t>>();
      } else if (k == "threads") {
        base.threads = v.get<unsigned>();
      } else if (k == "corruption") {
        base.corruption = v.get<std::string>();
      } else if (k == "mixing_checks") {
        base.mixing_checks = v.get<bool>();
      } else {
        throw invalid_config("unknown config field '" + k + "'");
      }
    }
  } catch (const json::exception& e) {
    throw invalid_config(std::string("config type error: ") + e.what());
  }
  return base;
}

/// Report document. `threads` is excluded from the echoed config because
/// results do not depend on it and byte-identical reports are required
/// across thread counts.
inline json to_json(const CampaignResult& r) {
  json cfg = to_json(r.config);
  cfg.erase("threads");
  json checks = json::array();
  std::size_t passed = 0;
  for (const auto& c : r.reports) {
    checks.push_back(to_json(c));
    if (c.pass) ++passed;
  }
  json failed = r.failed();
  return {{"config", std::move(cfg)},
          {"non_default_significance", r.config.significance != kDefaultSignificance},
          {"check_alpha", r.check_alpha},
          {"monte_carlo_checks", r.monte_carlo_checks},
          {"checks", std::move(checks)},
          {"summary",
           {{"total", r.reports.size()}, {"passed", passed}, {"failed", std::move(failed)}, {"all_pass", r.all_pass()}}}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace inarlab::io
