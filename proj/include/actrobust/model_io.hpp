// Copyright 2026 The actrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON model and policy documents.
//
// Model schema:
//   {
//     "num_states": int,
//     "gamma": float,
//     "action_model": {"type": "finite", "count": int} | {"type": "grid", "knots": [float]},
//     "reward": [[float]]                   // [num_states][num_actions]
//     "transitions": [[[float]]]            // [num_states][num_actions][num_states]
//     "initial_distribution": [float]       // [num_states]
//   }
//
// Policy schema:
//   {"type": "deterministic", "actions": [float]}
//   {"type": "stochastic", "support": [float], "probabilities": [[float]]}

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "actrobust/mdp_model.hpp"

namespace actrobust {

using Json = nlohmann::json;

namespace detail {

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(fmt::format("missing key '{}'", key));
  return *it;
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(fmt::format("{}: expected a number", where));
  return j.get<double>();
}

inline const Json& as_array(const Json& j, std::size_t expected, const std::string& where) {
  if (!j.is_array()) throw ParseError(fmt::format("{}: expected an array", where));
  if (j.size() != expected)
    throw ValidationError(
        fmt::format("{}: expected {} entries, got {}", where, expected, j.size()));
  return j;
}

}  // namespace detail

inline Json model_to_json(const MdpModel& m) {
  const std::size_t S = m.num_states();
  const std::size_t A = m.num_actions();
  Json j;
  j["num_states"] = S;
  j["gamma"] = m.gamma();
  if (m.action_model().is_grid())
    j["action_model"] = {{"type", "grid"}, {"knots", m.action_model().knots()}};
  else
    j["action_model"] = {{"type", "finite"}, {"count", A}};
  Json reward = Json::array();
  Json transitions = Json::array();
  for (std::size_t s = 0; s < S; ++s) {
    Json r_row = Json::array();
    Json p_rows = Json::array();
    for (std::size_t i = 0; i < A; ++i) {
      r_row.push_back(m.reward(s, i));
      auto row = m.transition(s, i);
      p_rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    reward.push_back(std::move(r_row));
    transitions.push_back(std::move(p_rows));
  }
  j["reward"] = std::move(reward);
  j["transitions"] = std::move(transitions);
  auto p1 = m.initial_distribution();
  j["initial_distribution"] = std::vector<double>(p1.begin(), p1.end());
  return j;
}

inline MdpModel model_from_json(const Json& j) {
  using detail::as_array;
  using detail::as_number;
  using detail::require;

  const Json& ns = require(j, "num_states");
  if (!ns.is_number_integer() || ns.get<long long>() < 1)
    throw ValidationError("num_states: must be a positive integer");
  const auto S = static_cast<std::size_t>(ns.get<long long>());
  const double gamma = as_number(require(j, "gamma"), "gamma");

  const Json& am = require(j, "action_model");
  const Json& type = require(am, "type");
  if (!type.is_string()) throw ParseError("action_model.type: expected a string");
  ActionModel actions;
  if (type == "finite") {
    const Json& c = require(am, "count");
    if (!c.is_number_integer() || c.get<long long>() < 1)
      throw ValidationError("action_model.count: must be a positive integer");
    actions = ActionModel::finite(static_cast<std::size_t>(c.get<long long>()));
  } else if (type == "grid") {
    const Json& k = require(am, "knots");
    if (!k.is_array()) throw ParseError("action_model.knots: expected an array");
    std::vector<double> knots;
    for (std::size_t i = 0; i < k.size(); ++i)
      knots.push_back(as_number(k[i], fmt::format("action_model.knots[{}]", i)));
    actions = ActionModel::grid(std::move(knots));
  } else {
    throw ParseError(fmt::format("action_model.type: unknown type '{}'", type.get<std::string>()));
  }
  const std::size_t A = actions.size();

  std::vector<double> reward;
  reward.reserve(S * A);
  const Json& r = as_array(require(j, "reward"), S, "reward");
  for (std::size_t s = 0; s < S; ++s) {
    const Json& row = as_array(r[s], A, fmt::format("reward[{}]", s));
    for (std::size_t i = 0; i < A; ++i)
      reward.push_back(as_number(row[i], fmt::format("reward[{}][{}]", s, i)));
  }

  std::vector<double> transitions;
  transitions.reserve(S * A * S);
  const Json& t = as_array(require(j, "transitions"), S, "transitions");
  for (std::size_t s = 0; s < S; ++s) {
    const Json& per_action = as_array(t[s], A, fmt::format("transitions[{}]", s));
    for (std::size_t i = 0; i < A; ++i) {
      const Json& row = as_array(per_action[i], S, fmt::format("transitions[{}][{}]", s, i));
      for (std::size_t k = 0; k < S; ++k)
        transitions.push_back(as_number(row[k], fmt::format("transitions[{}][{}][{}]", s, i, k)));
    }
  }

  std::vector<double> initial;
  const Json& p1 = as_array(require(j, "initial_distribution"), S, "initial_distribution");
  for (std::size_t s = 0; s < S; ++s)
    initial.push_back(as_number(p1[s], fmt::format("initial_distribution[{}]", s)));

  return MdpModel(S, std::move(actions), std::move(reward), std::move(transitions), gamma,
                  std::move(initial));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
}

inline MdpModel load_model(const std::string& path) {
  return model_from_json(parse_json_text(read_text_file(path), path));
}

inline void save_model(const MdpModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << model_to_json(m).dump(2) << '\n';
}

inline Json policy_to_json(const Policy& p) {
  Json j;
  if (p.is_deterministic()) {
    j["type"] = "deterministic";
    j["actions"] = p.actions();
    return j;
  }
  j["type"] = "stochastic";
  j["support"] = p.support();
  Json rows = Json::array();
  for (std::size_t s = 0; s < p.num_states(); ++s) {
    auto row = p.distribution(s);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["probabilities"] = std::move(rows);
  return j;
}

inline Policy policy_from_json(const Json& j) {
  using detail::as_number;
  using detail::require;
  const Json& type = require(j, "type");
  if (type == "deterministic") {
    const Json& a = require(j, "actions");
    if (!a.is_array()) throw ParseError("actions: expected an array");
    std::vector<double> actions;
    for (std::size_t s = 0; s < a.size(); ++s)
      actions.push_back(as_number(a[s], fmt::format("actions[{}]", s)));
    return Policy::deterministic(std::move(actions));
  }
  if (type == "stochastic") {
    const Json& sup = require(j, "support");
    const Json& rows = require(j, "probabilities");
    if (!sup.is_array() || !rows.is_array()) throw ParseError("stochastic policy: bad arrays");
    std::vector<double> support;
    for (std::size_t k = 0; k < sup.size(); ++k)
      support.push_back(as_number(sup[k], fmt::format("support[{}]", k)));
    std::vector<double> probs;
    for (std::size_t s = 0; s < rows.size(); ++s) {
      const Json& row = detail::as_array(rows[s], support.size(), fmt::format("probabilities[{}]", s));
      for (std::size_t k = 0; k < support.size(); ++k)
        probs.push_back(as_number(row[k], fmt::format("probabilities[{}][{}]", s, k)));
    }
    return Policy::stochastic(std::move(support), std::move(probs));
  }
  throw ParseError("policy: unknown type");
}

}  // namespace actrobust
