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

// Evaluation of fixed policies: worst-case adversary, random-action noise and
// alpha / noise sweeps with CSV and JSON reports.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "actrobust/errors.hpp"
#include "actrobust/mdp_model.hpp"
#include "actrobust/mixture_game.hpp"
#include "actrobust/solvers.hpp"

#ifndef ACTROBUST_VERSION
#define ACTROBUST_VERSION "0.0.0"
#endif

namespace actrobust {

/// Robust value of a fixed agent: the value against the adversary's exact
/// best response over its support.
inline ValueFn best_response_value(const RobustGame& g, const Policy& agent,
                                   double tolerance = 1e-8) {
  return adversary_best_response(g, agent, tolerance * 1e-3 * (1.0 - g.gamma())).second;
}

/**
 * Uniformly random action policy. For a finite model every action has mass
 * 1/n; for a grid model this is the continuous uniform distribution on the
 * action interval, which on a piecewise-linear model is equivalent to the
 * trapezoid weights of the knots.
 */
inline Policy uniform_policy(const MdpModel& m) {
  const ActionModel& am = m.action_model();
  const std::size_t n = am.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  if (am.is_grid() && n > 1) {
    const auto& k = am.knots();
    const double span = k.back() - k.front();
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double half = 0.5 * (k[i + 1] - k[i]) / span;
      w[i] += half;
      w[i + 1] += half;
    }
  }
  std::vector<double> probs;
  probs.reserve(m.num_states() * n);
  for (std::size_t s = 0; s < m.num_states(); ++s) probs.insert(probs.end(), w.begin(), w.end());
  return Policy::stochastic(am.values(), std::move(probs));
}

/// Exact value of the agent when, with probability p, a uniformly random
/// action is executed instead of its own.
inline ValueFn random_perturbation_value(const MdpModel& m, const Policy& agent, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(fmt::format("noise probability {} not in [0, 1]", p));
  RobustGame g(m, Robustness::Probabilistic, p);
  return evaluate_joint(g, agent, uniform_policy(m));
}

// ---------------------------------------------------------------------------
// Sweeps.

enum class Algorithm { ValueIteration, PolicyIteration, SoftPolicyIteration, ZeroSumPI, ZeroSumSoftPI };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ValueIteration: return "vi";
    case Algorithm::PolicyIteration: return "pi";
    case Algorithm::SoftPolicyIteration: return "soft-pi";
    case Algorithm::ZeroSumPI: return "zs-pi";
    case Algorithm::ZeroSumSoftPI: return "zs-soft-pi";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::ValueIteration, Algorithm::PolicyIteration,
                 Algorithm::SoftPolicyIteration, Algorithm::ZeroSumPI, Algorithm::ZeroSumSoftPI})
    if (to_string(a) == s) return a;
  throw ValidationError(fmt::format("unknown algorithm '{}'", s));
}

/// Runs `algo` on `g`. PR-only algorithms fall back to zero-sum PI on NR games.
inline SolveReport solve_game(const RobustGame& g, Algorithm algo, const SolveConfig& cfg) {
  const bool pr = g.kind() == Robustness::Probabilistic;
  switch (algo) {
    case Algorithm::ValueIteration: return value_iteration(g, cfg);
    case Algorithm::PolicyIteration:
      return pr ? pr_policy_iteration(g, cfg) : zs_policy_iteration(g, cfg);
    case Algorithm::SoftPolicyIteration:
      return pr ? soft_pr_policy_iteration(g, cfg) : zs_policy_iteration(g, cfg, cfg.eta);
    case Algorithm::ZeroSumPI: return zs_policy_iteration(g, cfg);
    case Algorithm::ZeroSumSoftPI: return zs_policy_iteration(g, cfg, cfg.eta);
  }
  throw ValidationError("unknown algorithm");
}

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> noise_probs;
  std::vector<Robustness> kinds;

  void validate() const {
    if (alphas.empty() || noise_probs.empty() || kinds.empty())
      throw ValidationError("sweep: alphas, noise probabilities and kinds must be non-empty");
    for (double a : alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw ValidationError(fmt::format("sweep: alpha {} not in [0, 1]", a));
    for (double p : noise_probs)
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError(fmt::format("sweep: noise probability {} not in [0, 1]", p));
  }
};

/// One report line. `kind` is "pr", "nr" or "none" (the non-robust baseline);
/// rows without a noise probability hold the solved robust value.
struct EvalRow {
  std::string kind;
  double alpha = 0.0;
  std::optional<double> noise_prob;
  double value_at_p1 = std::numeric_limits<double>::quiet_NaN();
  double worst_state_value = std::numeric_limits<double>::quiet_NaN();
  /// Empty on success.
  std::string error;

  bool ok() const { return error.empty(); }
};

namespace detail {

inline EvalRow value_row(std::string kind, double alpha, std::optional<double> p, const MdpModel& m,
                         const ValueFn& v) {
  auto p1 = m.initial_distribution();
  EvalRow row{std::move(kind), alpha, p, 0.0, 0.0, {}};
  row.value_at_p1 = Eigen::Map<const Eigen::VectorXd>(p1.data(), v.size()).dot(v);
  row.worst_state_value = v.minCoeff();
  return row;
}

inline EvalRow failed_row(const std::string& kind, double alpha, std::optional<double> p) {
  EvalRow row;
  row.kind = kind;
  row.alpha = alpha;
  row.noise_prob = p;
  return row;
}

inline void append_policy_rows(std::vector<EvalRow>& rows, const std::string& kind, double alpha,
                               const MdpModel& m, const SweepSpec& spec, const ValueFn& value,
                               const Policy& agent) {
  rows.push_back(value_row(kind, alpha, std::nullopt, m, value));
  for (double p : spec.noise_probs)
    rows.push_back(value_row(kind, alpha, p, m, random_perturbation_value(m, agent, p)));
}

}  // namespace detail

/// The non-robust optimum of `m` over its tabulated actions.
inline std::pair<Policy, ValueFn> nominal_optimum(const MdpModel& m, double tolerance = 1e-8) {
  auto actions = m.action_model().values();
  MdpSolution sol = solve_mdp(m, actions, Sense::Maximize, tolerance * 1e-3 * (1.0 - m.gamma()));
  return {Policy::deterministic(detail::pick(actions, sol.policy)), sol.value};
}

/**
 * Rows, in order: the non-robust baseline (its value, then one row per noise
 * probability), followed by the same block for every (kind, alpha) of the
 * spec in spec order. A failing solve marks the rows of its block with the
 * error and NaN values instead of aborting the sweep.
 */
inline std::vector<EvalRow> run_sweep(const MdpModel& m, const SweepSpec& spec, Algorithm algo,
                                      const SolveConfig& cfg) {
  spec.validate();
  cfg.validate();
  std::vector<EvalRow> rows;
  auto [nominal_policy, nominal_value] = nominal_optimum(m, cfg.tolerance);
  detail::append_policy_rows(rows, "none", 0.0, m, spec, nominal_value, nominal_policy);
  for (Robustness kind : spec.kinds)
    for (double alpha : spec.alphas) {
      const std::string name(to_string(kind));
      const std::size_t first = rows.size();
      try {
        RobustGame g(m, kind, alpha);
        SolveReport rep = solve_game(g, algo, cfg);
        detail::append_policy_rows(rows, name, alpha, m, spec, rep.value, rep.agent_policy);
      } catch (const Error& e) {
        rows.resize(first);
        rows.push_back(detail::failed_row(name, alpha, std::nullopt));
        for (double p : spec.noise_probs) rows.push_back(detail::failed_row(name, alpha, p));
        for (std::size_t i = first; i < rows.size(); ++i) rows[i].error = e.what();
      }
    }
  return rows;
}

/// Robust-value rows where the value at p1 increases with alpha (within
/// `slack`) for the same kind. Reported, never enforced.
inline std::vector<std::string> monotonicity_flags(const std::vector<EvalRow>& rows,
                                                   double slack = 1e-8) {
  std::vector<std::string> flags;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EvalRow& a = rows[i];
    if (a.noise_prob || !a.ok() || a.kind == "none") continue;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const EvalRow& b = rows[j];
      if (b.noise_prob || !b.ok() || b.kind != a.kind || !(b.alpha > a.alpha)) continue;
      if (b.value_at_p1 > a.value_at_p1 + slack)
        flags.push_back(fmt::format("{}: value at alpha={:.17g} ({:.17g}) exceeds alpha={:.17g} ({:.17g})",
                                    a.kind, b.alpha, b.value_at_p1, a.alpha, a.value_at_p1));
    }
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Reports.

/// 17 significant digits, "NaN" / "inf" / "-inf" for non-finite values.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

/// RFC 4180 field: quoted when it contains a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
  out << "kind,alpha,noise_prob,value_at_p1,worst_state_value\r\n";
  for (const EvalRow& r : rows) {
    out << csv_field(r.kind) << ',' << format_number(r.alpha) << ','
        << (r.noise_prob ? format_number(*r.noise_prob) : std::string()) << ','
        << format_number(r.value_at_p1) << ',' << format_number(r.worst_state_value) << "\r\n";
  }
}

struct SweepMetadata {
  std::optional<std::uint64_t> seed;
  Algorithm algorithm = Algorithm::ValueIteration;
  SolveConfig config;
  std::string model;
};

inline nlohmann::json sweep_to_json(const std::vector<EvalRow>& rows, const SweepMetadata& meta) {
  using nlohmann::json;
  auto number = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["metadata"] = {{"version", ACTROBUST_VERSION},
                   {"algorithm", std::string(to_string(meta.algorithm))},
                   {"tolerance", meta.config.tolerance},
                   {"inner_solver_tolerance", meta.config.inner_solver_tolerance},
                   {"eta", meta.config.eta},
                   {"max_iterations", meta.config.max_iterations},
                   {"model", meta.model},
                   {"seed", meta.seed ? json(*meta.seed) : json(nullptr)},
                   {"columns", {"kind", "alpha", "noise_prob", "value_at_p1", "worst_state_value"}}};
  json arr = json::array();
  for (const EvalRow& r : rows) {
    json row = {{"kind", r.kind},
                {"alpha", r.alpha},
                {"noise_prob", r.noise_prob ? json(*r.noise_prob) : json(nullptr)},
                {"value_at_p1", number(r.value_at_p1)},
                {"worst_state_value", number(r.worst_state_value)}};
    if (!r.ok()) row["error"] = r.error;
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  j["monotonicity_flags"] = monotonicity_flags(rows);
  return j;
}

}  // namespace actrobust
