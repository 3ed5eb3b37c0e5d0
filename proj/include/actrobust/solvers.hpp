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

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "actrobust/errors.hpp"
#include "actrobust/mdp_model.hpp"
#include "actrobust/mixture_game.hpp"

namespace actrobust {

struct SolveConfig {
  /// Sup-norm accuracy requested for the returned values.
  double tolerance = 1e-8;
  int max_iterations = 10000;
  /// Soft step size, in (0, 1].
  double eta = 1.0;
  /// Accuracy of the inner fixed-opponent MDP solves.
  double inner_solver_tolerance = 1e-9;
  /// PR-PI only: the adversary best-responds and the agent takes greedy steps.
  bool swapped = false;

  void validate() const {
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    if (max_iterations < 1) throw ValidationError("max_iterations must be positive");
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("eta must be in (0, 1]");
    if (!(inner_solver_tolerance > 0.0))
      throw ValidationError("inner_solver_tolerance must be positive");
  }
};

struct SolveReport {
  ValueFn value;
  Policy agent_policy;
  Policy adversary_policy;
  /// v_k for every iteration.
  std::vector<ValueFn> iterates;
  /// |v_k - v_{k-1}|_inf, from the second iterate on.
  std::vector<double> residual_trace;
  /// |v_k - v*|_inf when a reference v* was supplied.
  std::vector<double> reference_error;
  int iterations = 0;
  /// Largest matrix-game duality gap of the final backup (0 for closed forms).
  double certified_gap = 0.0;
  /// |T v - v|_inf of the returned values under the minimax operator.
  double bellman_residual = 0.0;
};

// ---------------------------------------------------------------------------
// Single-agent building blocks.

/// Solution of a single-agent MDP restricted to a list of action values.
struct MdpSolution {
  ValueFn value;
  /// Index into the action list, per state.
  std::vector<std::size_t> policy;
};

inline ValueFn evaluate_mdp_policy(const MdpModel& m, std::span<const double> actions,
                                   std::span<const std::size_t> policy) {
  const std::size_t S = m.num_states();
  InducedChain c{Eigen::VectorXd(static_cast<Eigen::Index>(S)),
                 Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S))};
  std::vector<double> row(S);
  for (std::size_t s = 0; s < S; ++s) {
    const double a = actions[policy[s]];
    std::fill(row.begin(), row.end(), 0.0);
    accumulate_transition(m, s, a, 1.0, row);
    c.reward(static_cast<Eigen::Index>(s)) = eval_reward(m, s, a);
    for (std::size_t j = 0; j < S; ++j)
      c.transition(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = row[j];
  }
  return solve_discounted(c, m.gamma());
}

/**
 * Howard policy iteration with exact evaluation. A state switches action only
 * when the gain exceeds `improvement_threshold`; the returned policy is then
 * within improvement_threshold / (1 - gamma) of optimal in sup-norm.
 */
inline MdpSolution solve_mdp(const MdpModel& m, std::span<const double> actions, Sense sense,
                             double improvement_threshold, int max_iterations = 1000) {
  const std::size_t S = m.num_states();
  MdpSolution sol{ValueFn::Zero(static_cast<Eigen::Index>(S)), std::vector<std::size_t>(S, 0)};
  for (std::size_t s = 0; s < S; ++s)
    sol.policy[s] = extremal_index(action_values(m, s, actions, sol.value), sense);
  for (int it = 0; it < max_iterations; ++it) {
    sol.value = evaluate_mdp_policy(m, actions, sol.policy);
    bool changed = false;
    for (std::size_t s = 0; s < S; ++s) {
      auto q = action_values(m, s, actions, sol.value);
      std::size_t best = extremal_index(q, sense);
      double gain = sense == Sense::Maximize ? q[best] - q[sol.policy[s]]
                                             : q[sol.policy[s]] - q[best];
      if (gain > improvement_threshold) {
        sol.policy[s] = best;
        changed = true;
      }
    }
    if (!changed) return sol;
  }
  throw NotConverged("policy iteration on the inner MDP did not stabilize", {});
}

namespace detail {

inline MdpModel finite_model_from(const MdpModel& like, std::size_t num_actions,
                                  std::vector<double> reward, std::vector<double> transitions) {
  std::vector<double> p1(like.initial_distribution().begin(), like.initial_distribution().end());
  return MdpModel(like.num_states(), ActionModel::finite(num_actions), std::move(reward),
                  std::move(transitions), like.gamma(), std::move(p1));
}

inline std::vector<double> index_actions(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i);
  return out;
}

inline std::vector<double> pick(const std::vector<double>& values,
                                std::span<const std::size_t> index) {
  std::vector<double> out(index.size());
  for (std::size_t s = 0; s < index.size(); ++s) out[s] = values[index[s]];
  return out;
}

/// Lowest-index greedy action per state. Entries within `tie` of the extreme
/// count as ties so that floating-point noise cannot flip a converged policy.
inline std::vector<std::size_t> greedy_indices(const MdpModel& m, std::span<const double> actions,
                                               const ValueFn& v, Sense sense) {
  const double tie = 1e-12 * std::max(1.0, v.lpNorm<Eigen::Infinity>());
  std::vector<std::size_t> out(m.num_states());
  for (std::size_t s = 0; s < m.num_states(); ++s)
    out[s] = extremal_index(action_values(m, s, actions, v), sense, tie);
  return out;
}

inline double stopping_residual(const SolveConfig& cfg, double gamma) {
  return cfg.tolerance * (1.0 - gamma);
}

inline void record(SolveReport& r, const ValueFn& v, const ValueFn* reference) {
  if (!r.iterates.empty()) r.residual_trace.push_back(sup_norm(v, r.iterates.back()));
  if (reference) r.reference_error.push_back(sup_norm(v, *reference));
  r.iterates.push_back(v);
}

}  // namespace detail

/**
 * The agent's MDP against a fixed PR adversary:
 *   r~(s, a) = (1 - alpha) r(s, a) + alpha r^adv(s),
 *   P~(.|s, a) = (1 - alpha) P(.|s, a) + alpha P^adv(.|s).
 * Keeps the base action model; the adversary term is constant in a, so
 * interpolation at any action is consistent with the base model.
 */
inline MdpModel induced_agent_mdp(const RobustGame& g, const Policy& adversary) {
  if (g.kind() != Robustness::Probabilistic)
    throw ValidationError("induced_agent_mdp needs a PR game");
  validate_policy(g.base(), adversary, "adversary policy");
  const MdpModel& m = g.base();
  const std::size_t S = m.num_states();
  const std::size_t A = m.num_actions();
  const double alpha = g.alpha();
  std::vector<double> reward(S * A), transitions(S * A * S);
  std::vector<double> adv_row(S);
  for (std::size_t s = 0; s < S; ++s) {
    double adv_reward = 0.0;
    std::fill(adv_row.begin(), adv_row.end(), 0.0);
    adversary.for_each_atom(s, [&](double b, double q) {
      adv_reward += q * eval_reward(m, s, b);
      accumulate_transition(m, s, b, q, adv_row);
    });
    for (std::size_t i = 0; i < A; ++i) {
      reward[s * A + i] = alpha == 0.0 ? m.reward(s, i)
                                       : (1.0 - alpha) * m.reward(s, i) + alpha * adv_reward;
      auto p = m.transition(s, i);
      double* out = transitions.data() + (s * A + i) * S;
      for (std::size_t j = 0; j < S; ++j)
        out[j] = alpha == 0.0 ? p[j] : (1.0 - alpha) * p[j] + alpha * adv_row[j];
    }
  }
  std::vector<double> p1(m.initial_distribution().begin(), m.initial_distribution().end());
  return MdpModel(S, m.action_model(), std::move(reward), std::move(transitions), m.gamma(),
                  std::move(p1));
}

/// The agent's MDP against a fixed adversary, for either kind. Action i of
/// the returned finite model is g.agent_actions()[i].
inline MdpModel agent_response_model(const RobustGame& g, const Policy& adversary) {
  validate_policy(g.base(), adversary, "adversary policy");
  const std::size_t S = g.num_states();
  const auto& A = g.agent_actions();
  std::vector<double> reward(S * A.size()), transitions(S * A.size() * S, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t i = 0; i < A.size(); ++i) {
      double r = 0.0;
      std::span<double> row(transitions.data() + (s * A.size() + i) * S, S);
      adversary.for_each_atom(s, [&](double b, double q) { g.accumulate_payoff(s, A[i], b, q, r, row); });
      reward[s * A.size() + i] = r;
    }
  return detail::finite_model_from(g.base(), A.size(), std::move(reward), std::move(transitions));
}

/// The adversary's MDP against a fixed agent (to be minimized). Action j of
/// the returned finite model is g.adversary_actions()[j].
inline MdpModel adversary_response_model(const RobustGame& g, const Policy& agent) {
  validate_policy(g.base(), agent, "agent policy");
  const std::size_t S = g.num_states();
  const auto& B = g.adversary_actions();
  std::vector<double> reward(S * B.size()), transitions(S * B.size() * S, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t j = 0; j < B.size(); ++j) {
      double r = 0.0;
      std::span<double> row(transitions.data() + (s * B.size() + j) * S, S);
      agent.for_each_atom(s, [&](double a, double p) { g.accumulate_payoff(s, a, B[j], p, r, row); });
      reward[s * B.size() + j] = r;
    }
  return detail::finite_model_from(g.base(), B.size(), std::move(reward), std::move(transitions));
}

/// Optimal deterministic counter-strategy of the agent and its value.
inline std::pair<Policy, ValueFn> agent_best_response(const RobustGame& g, const Policy& adversary,
                                                      double improvement_threshold) {
  MdpModel m = agent_response_model(g, adversary);
  auto idx = detail::index_actions(g.agent_actions().size());
  MdpSolution sol = solve_mdp(m, idx, Sense::Maximize, improvement_threshold);
  return {Policy::deterministic(detail::pick(g.agent_actions(), sol.policy)), sol.value};
}

/// Optimal deterministic counter-strategy of the adversary and its value.
inline std::pair<Policy, ValueFn> adversary_best_response(const RobustGame& g, const Policy& agent,
                                                          double improvement_threshold) {
  MdpModel m = adversary_response_model(g, agent);
  auto idx = detail::index_actions(g.adversary_actions().size());
  MdpSolution sol = solve_mdp(m, idx, Sense::Minimize, improvement_threshold);
  return {Policy::deterministic(detail::pick(g.adversary_actions(), sol.policy)), sol.value};
}

// ---------------------------------------------------------------------------
// Game solvers.

/// Iterates the minimax operator from v = 0 until the returned values are
/// within cfg.tolerance of the fixed point. PR games use the decoupled
/// operator, NR games the per-state matrix games.
inline SolveReport value_iteration(const RobustGame& g, const SolveConfig& cfg,
                                   const ValueFn* reference = nullptr) {
  cfg.validate();
  const bool pr = g.kind() == Robustness::Probabilistic;
  auto backup = [&](const ValueFn& v) {
    return pr ? bellman_minimax_pr(g, v) : bellman_minimax_generic(g, v);
  };
  const double gamma = g.gamma();
  // |v_{k+1} - v*| <= gamma / (1 - gamma) |v_{k+1} - v_k|.
  const double threshold = gamma > 0.0 ? cfg.tolerance * (1.0 - gamma) / gamma
                                       : std::numeric_limits<double>::infinity();
  SolveReport rep;
  ValueFn v = ValueFn::Zero(static_cast<Eigen::Index>(g.num_states()));
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    Backup b = backup(v);
    double residual = sup_norm(b.value, v);
    v = std::move(b.value);
    detail::record(rep, v, reference);
    if (residual <= threshold) {
      Backup last = backup(v);
      rep.value = v;
      rep.agent_policy = std::move(last.agent);
      rep.adversary_policy = std::move(last.adversary);
      rep.iterations = k;
      rep.certified_gap = last.duality_gap;
      rep.bellman_residual = sup_norm(last.value, v);
      return rep;
    }
  }
  throw NotConverged(fmt::format("value iteration: no convergence in {} iterations",
                                 cfg.max_iterations),
                     rep.residual_trace);
}

namespace detail {

/// Shared tail of the PR policy-iteration loops.
inline bool pr_converged(const RobustGame& g, const SolveConfig& cfg, const ValueFn& v,
                         double& bellman_residual) {
  bellman_residual = sup_norm(bellman_minimax_pr(g, v).value, v);
  return bellman_residual <= stopping_residual(cfg, g.gamma());
}

inline SolveReport pr_policy_iteration_swapped(const RobustGame& g, const SolveConfig& cfg,
                                               const ValueFn* reference) {
  const std::size_t S = g.num_states();
  const double threshold = cfg.inner_solver_tolerance * (1.0 - g.gamma());
  std::vector<std::size_t> agent(S, 0);
  SolveReport rep;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    Policy agent_pol = Policy::deterministic(pick(g.agent_actions(), agent));
    auto [adv_pol, unused] = adversary_best_response(g, agent_pol, threshold);
    ValueFn v = evaluate_joint(g, agent_pol, adv_pol);
    record(rep, v, reference);
    auto next = greedy_indices(g.base(), g.agent_actions(), v, Sense::Maximize);
    if (pr_converged(g, cfg, v, rep.bellman_residual) || next == agent) {
      rep.value = std::move(v);
      rep.agent_policy = std::move(agent_pol);
      rep.adversary_policy = std::move(adv_pol);
      rep.iterations = k;
      return rep;
    }
    agent = std::move(next);
  }
  throw NotConverged("PR policy iteration (swapped) did not converge", rep.residual_trace);
}

}  // namespace detail

/**
 * Probabilistic robust policy iteration. Starting from the adversary that
 * plays the first support action everywhere, alternates
 *   (i)  an exact solve of the agent's MDP against the fixed adversary,
 *   (ii) a greedy one-step minimization of the adversary w.r.t. the joint
 *        value,
 * until the adversary no longer changes or the joint value is certified
 * within cfg.tolerance of the fixed point. With cfg.swapped the roles of the
 * two steps are exchanged.
 */
inline SolveReport pr_policy_iteration(const RobustGame& g, const SolveConfig& cfg,
                                       const ValueFn* reference = nullptr) {
  cfg.validate();
  if (g.kind() != Robustness::Probabilistic)
    throw ValidationError("pr_policy_iteration needs a PR game");
  if (cfg.swapped) return detail::pr_policy_iteration_swapped(g, cfg, reference);

  const std::size_t S = g.num_states();
  const double threshold = cfg.inner_solver_tolerance * (1.0 - g.gamma());
  std::vector<std::size_t> adversary(S, 0);
  SolveReport rep;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    Policy adv_pol = Policy::deterministic(detail::pick(g.adversary_actions(), adversary));
    MdpSolution agent = solve_mdp(induced_agent_mdp(g, adv_pol), g.agent_actions(),
                                  Sense::Maximize, threshold);
    Policy agent_pol = Policy::deterministic(detail::pick(g.agent_actions(), agent.policy));
    ValueFn v = evaluate_joint(g, agent_pol, adv_pol);
    detail::record(rep, v, reference);
    auto next = detail::greedy_indices(g.base(), g.adversary_actions(), v, Sense::Minimize);
    if (detail::pr_converged(g, cfg, v, rep.bellman_residual) || next == adversary) {
      rep.value = std::move(v);
      rep.agent_policy = std::move(agent_pol);
      rep.adversary_policy = std::move(adv_pol);
      rep.iterations = k;
      return rep;
    }
    adversary = std::move(next);
  }
  throw NotConverged("PR policy iteration did not converge", rep.residual_trace);
}

/**
 * Soft probabilistic robust policy iteration: as pr_policy_iteration, but
 * the adversary moves only a fraction eta of the way towards the greedy
 * minimizer, adv_{k+1} = (1 - eta) adv_k + eta greedy_k. The greedy
 * minimizer is the vertex of the policy simplex that minimizes the
 * linearization of the joint value in the adversary's policy.
 */
inline SolveReport soft_pr_policy_iteration(const RobustGame& g, const SolveConfig& cfg,
                                            const ValueFn* reference = nullptr) {
  cfg.validate();
  if (g.kind() != Robustness::Probabilistic)
    throw ValidationError("soft_pr_policy_iteration needs a PR game");
  const std::size_t S = g.num_states();
  const auto& support = g.adversary_actions();
  const std::size_t nB = support.size();
  const double threshold = cfg.inner_solver_tolerance * (1.0 - g.gamma());
  const double eta = cfg.eta;

  std::vector<double> probs(S * nB, 0.0);
  for (std::size_t s = 0; s < S; ++s) probs[s * nB] = 1.0;
  SolveReport rep;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    Policy adv_pol = Policy::stochastic(support, probs);
    MdpSolution agent = solve_mdp(induced_agent_mdp(g, adv_pol), g.agent_actions(),
                                  Sense::Maximize, threshold);
    Policy agent_pol = Policy::deterministic(detail::pick(g.agent_actions(), agent.policy));
    ValueFn v = evaluate_joint(g, agent_pol, adv_pol);
    detail::record(rep, v, reference);
    auto greedy = detail::greedy_indices(g.base(), support, v, Sense::Minimize);
    std::vector<double> next(S * nB);
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t j = 0; j < nB; ++j) {
        double target = j == greedy[s] ? 1.0 : 0.0;
        next[s * nB + j] = eta == 1.0 ? target : (1.0 - eta) * probs[s * nB + j] + eta * target;
      }
    if (detail::pr_converged(g, cfg, v, rep.bellman_residual) || next == probs) {
      rep.value = std::move(v);
      rep.agent_policy = std::move(agent_pol);
      rep.adversary_policy = std::move(adv_pol);
      rep.iterations = k;
      return rep;
    }
    probs = std::move(next);
  }
  throw NotConverged("soft PR policy iteration did not converge", rep.residual_trace);
}

/**
 * Two-player zero-sum policy iteration (soft when `eta` is given): alternates
 * an exact agent best response to the fixed stochastic adversary with a
 * per-state minimax matrix-game update of the adversary,
 * adv_{k+1} = (1 - eta) adv_k + eta adv', where adv' minimizes the
 * fixed-adversary operator at the current joint value.
 *
 * The returned strategies are the minimax strategies of the final backup; for
 * PR games the agent's is the deterministic greedy maximizer.
 */
inline SolveReport zs_policy_iteration(const RobustGame& g, const SolveConfig& cfg,
                                       std::optional<double> eta = std::nullopt,
                                       const ValueFn* reference = nullptr) {
  cfg.validate();
  const double step = eta.value_or(1.0);
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("eta must be in (0, 1]");
  const std::size_t S = g.num_states();
  const auto& support = g.adversary_actions();
  const std::size_t nB = support.size();
  const double threshold = cfg.inner_solver_tolerance * (1.0 - g.gamma());

  std::vector<double> probs(S * nB, 0.0);
  for (std::size_t s = 0; s < S; ++s) probs[s * nB] = 1.0;
  SolveReport rep;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    Policy adv_pol = Policy::stochastic(support, probs);
    auto [agent_pol, unused] = agent_best_response(g, adv_pol, threshold);
    ValueFn v = evaluate_joint(g, agent_pol, adv_pol);
    detail::record(rep, v, reference);
    Backup b = bellman_minimax_generic(g, v);
    double residual = sup_norm(b.value, v);
    std::vector<double> next(S * nB);
    const auto& minimax = b.adversary.probabilities();
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = step == 1.0 ? minimax[i] : (1.0 - step) * probs[i] + step * minimax[i];
    if (residual <= detail::stopping_residual(cfg, g.gamma()) || next == probs) {
      rep.value = std::move(v);
      rep.agent_policy = g.kind() == Robustness::Probabilistic
                             ? bellman_minimax_pr(g, rep.value).agent
                             : std::move(b.agent);
      rep.adversary_policy = std::move(b.adversary);
      rep.iterations = k;
      rep.certified_gap = b.duality_gap;
      rep.bellman_residual = residual;
      return rep;
    }
    probs = std::move(next);
  }
  throw NotConverged("zero-sum policy iteration did not converge", rep.residual_trace);
}

// ---------------------------------------------------------------------------
// Exhaustive checks over deterministic policies.

/// Enumeration guard: at most this many states and support actions per player.
inline constexpr std::size_t kMaxEnumerationStates = 6;
inline constexpr std::size_t kMaxEnumerationActions = 7;
/// Above this many (agent, adversary) pairs the inner optimization of
/// brute_force_duality is done by an exact MDP best response instead of a
/// second enumeration loop.
inline constexpr double kMaxEnumeratedPairs = 65536.0;

struct DualityReport {
  /// Componentwise max over deterministic agents of min over deterministic adversaries.
  ValueFn maxmin_det;
  /// Componentwise min over deterministic adversaries of max over deterministic agents.
  ValueFn minmax_det;
};

namespace detail {

inline void check_enumeration_guard(const RobustGame& g) {
  if (g.num_states() > kMaxEnumerationStates ||
      g.agent_actions().size() > kMaxEnumerationActions ||
      g.adversary_actions().size() > kMaxEnumerationActions)
    throw TooLarge(fmt::format("enumeration needs <= {} states and <= {} actions per player",
                               kMaxEnumerationStates, kMaxEnumerationActions));
}

/// Calls f(policy) for every deterministic policy over `support`.
template <class F>
void for_each_deterministic(std::size_t num_states, const std::vector<double>& support, F&& f) {
  std::vector<std::size_t> idx(num_states, 0);
  for (;;) {
    f(Policy::deterministic(pick(support, idx)));
    std::size_t s = 0;
    while (s < num_states && ++idx[s] == support.size()) idx[s++] = 0;
    if (s == num_states) return;
  }
}

inline void componentwise(ValueFn& acc, const ValueFn& v, Sense sense) {
  if (sense == Sense::Maximize)
    acc = acc.cwiseMax(v);
  else
    acc = acc.cwiseMin(v);
}

}  // namespace detail

/// Componentwise min over every deterministic adversary of the joint value
/// against `agent`, by full enumeration.
inline ValueFn worst_case_enumerated(const RobustGame& g, const Policy& agent) {
  detail::check_enumeration_guard(g);
  const auto S = static_cast<Eigen::Index>(g.num_states());
  ValueFn worst = ValueFn::Constant(S, std::numeric_limits<double>::infinity());
  detail::for_each_deterministic(g.num_states(), g.adversary_actions(), [&](const Policy& adv) {
    detail::componentwise(worst, evaluate_joint(g, agent, adv), Sense::Minimize);
  });
  return worst;
}

/// Componentwise max over every deterministic agent of the joint value
/// against `adversary`, by full enumeration.
inline ValueFn best_case_enumerated(const RobustGame& g, const Policy& adversary) {
  detail::check_enumeration_guard(g);
  const auto S = static_cast<Eigen::Index>(g.num_states());
  ValueFn best = ValueFn::Constant(S, -std::numeric_limits<double>::infinity());
  detail::for_each_deterministic(g.num_states(), g.agent_actions(), [&](const Policy& agent) {
    detail::componentwise(best, evaluate_joint(g, agent, adversary), Sense::Maximize);
  });
  return best;
}

/**
 * Max-min and min-max values over stationary deterministic policies of both
 * players. The outer player is always enumerated; the inner optimum is
 * enumerated too when the number of pairs is small and otherwise obtained
 * from an exact best-response MDP solve (a deterministic optimum exists, so
 * both give the same componentwise extremum).
 */
inline DualityReport brute_force_duality(const RobustGame& g) {
  detail::check_enumeration_guard(g);
  const std::size_t S = g.num_states();
  const auto Si = static_cast<Eigen::Index>(S);
  const double pairs = std::pow(static_cast<double>(g.agent_actions().size()), S) *
                       std::pow(static_cast<double>(g.adversary_actions().size()), S);
  const bool enumerate_inner = pairs <= kMaxEnumeratedPairs;
  const double exact = 1e-13;

  DualityReport rep{ValueFn::Constant(Si, -std::numeric_limits<double>::infinity()),
                    ValueFn::Constant(Si, std::numeric_limits<double>::infinity())};
  detail::for_each_deterministic(S, g.agent_actions(), [&](const Policy& agent) {
    ValueFn inner = enumerate_inner ? worst_case_enumerated(g, agent)
                                    : adversary_best_response(g, agent, exact).second;
    detail::componentwise(rep.maxmin_det, inner, Sense::Maximize);
  });
  detail::for_each_deterministic(S, g.adversary_actions(), [&](const Policy& adv) {
    ValueFn inner = enumerate_inner ? best_case_enumerated(g, adv)
                                    : agent_best_response(g, adv, exact).second;
    detail::componentwise(rep.minmax_det, inner, Sense::Minimize);
  });
  return rep;
}

/**
 * Single-state NR game with reward r(a) = a^2 on [-1, 1].
 *
 * The agent plays {-1, 0, 1}, the adversary {-1, -1/3, 0, 1/3, 1}. The reward
 * is tabulated at every mixed action (1 - alpha) a + alpha b these supports
 * produce for alpha in {0.25, 0.75}, so at those mixing weights every payoff
 * the game can realize equals the true quadratic. Other weights evaluate the
 * piecewise-linear interpolant, which over-estimates a^2 between knots.
 */
inline RobustGame counterexample_model(double alpha = 0.25, double gamma = 0.9) {
  const std::vector<double> positive = {1.0 / 12, 0.25, 1.0 / 3, 0.5, 2.0 / 3, 0.75, 5.0 / 6, 1.0};
  std::vector<double> knots;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) knots.push_back(-*it);
  knots.push_back(0.0);
  knots.insert(knots.end(), positive.begin(), positive.end());
  std::vector<double> reward;
  for (double a : knots) reward.push_back(a * a);
  std::vector<double> transitions(knots.size(), 1.0);
  MdpModel base(1, ActionModel::grid(knots), std::move(reward), std::move(transitions), gamma, {1.0});
  return RobustGame(std::move(base), Robustness::Noisy, alpha, {-1.0, 0.0, 1.0},
                    {-1.0, -1.0 / 3, 0.0, 1.0 / 3, 1.0});
}

}  // namespace actrobust
