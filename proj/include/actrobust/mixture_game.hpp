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

// Zero-sum Markov games induced by action-robust criteria.
//
// Probabilistic robustness (PR): with probability alpha the adversary's action
// is executed instead of the agent's,
//   r(s, a, b) = (1 - alpha) r(s, a) + alpha r(s, b),
//   P(.|s, a, b) = (1 - alpha) P(.|s, a) + alpha P(.|s, b).
// Noisy robustness (NR): the executed action is the convex mixture,
//   r(s, a, b) = r(s, (1 - alpha) a + alpha b),
//   P(.|s, a, b) = P(.|s, (1 - alpha) a + alpha b).
// The agent maximizes, the adversary minimizes.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "actrobust/errors.hpp"
#include "actrobust/matrix_game.hpp"
#include "actrobust/mdp_model.hpp"

namespace actrobust {

/// State values v(s).
using ValueFn = Eigen::VectorXd;

/// Residual accepted by evaluate_joint, relative to max(1, |v|_inf).
inline constexpr double kEvaluationResidual = 1e-10;

enum class Robustness { Probabilistic, Noisy };

inline std::string_view to_string(Robustness k) {
  return k == Robustness::Probabilistic ? "pr" : "nr";
}

inline Robustness parse_robustness(std::string_view s) {
  if (s == "pr" || s == "PR") return Robustness::Probabilistic;
  if (s == "nr" || s == "NR") return Robustness::Noisy;
  throw ValidationError(fmt::format("unknown robustness kind '{}'", s));
}

enum class Sense { Maximize, Minimize };

/// Lowest index whose entry is within `tie_tolerance` of the max (or min).
inline std::size_t extremal_index(std::span<const double> q, Sense sense,
                                  double tie_tolerance = 0.0) {
  double best = q[0];
  for (double x : q) best = sense == Sense::Maximize ? std::max(best, x) : std::min(best, x);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double slack = sense == Sense::Maximize ? best - q[i] : q[i] - best;
    if (slack <= tie_tolerance) return i;
  }
  return 0;
}

inline double sup_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

/**
 * A base model together with a robustness criterion and mixing weight.
 *
 * Each player is restricted to a finite list of action values (its support)
 * whenever a finite game has to be formed: per-state matrix games, greedy
 * steps, best responses and enumeration. Both supports default to the
 * model's tabulated actions (indices or knots). Mixed NR actions are always
 * evaluated exactly through interpolation, also off the knots.
 */
class RobustGame {
 public:
  RobustGame(MdpModel base, Robustness kind, double alpha)
      : RobustGame(base, kind, alpha, base.action_model().values(),
                   base.action_model().values()) {}

  RobustGame(MdpModel base, Robustness kind, double alpha, std::vector<double> agent_actions,
             std::vector<double> adversary_actions)
      : base_(std::move(base)),
        kind_(kind),
        alpha_(alpha),
        agent_actions_(std::move(agent_actions)),
        adversary_actions_(std::move(adversary_actions)) {
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0))
      throw ValidationError(fmt::format("alpha: {} is not in [0, 1]", alpha_));
    if (kind_ == Robustness::Noisy && !base_.action_model().is_grid())
      throw ValidationError("NR games need a grid action model (actions must be mixable)");
    check_support(agent_actions_, "agent support");
    check_support(adversary_actions_, "adversary support");
  }

  const MdpModel& base() const noexcept { return base_; }
  Robustness kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double gamma() const noexcept { return base_.gamma(); }
  std::size_t num_states() const noexcept { return base_.num_states(); }
  const std::vector<double>& agent_actions() const noexcept { return agent_actions_; }
  const std::vector<double>& adversary_actions() const noexcept { return adversary_actions_; }

  RobustGame with_alpha(double alpha) const {
    return RobustGame(base_, kind_, alpha, agent_actions_, adversary_actions_);
  }

  /// Executed NR action for agent action a and adversary action b.
  double mixed_action(double a, double b) const {
    double x = (1.0 - alpha_) * a + alpha_ * b;
    return std::clamp(x, base_.action_model().lower(), base_.action_model().upper());
  }

  /// reward += w r(s, a, b);  row += w P(.|s, a, b).
  void accumulate_payoff(std::size_t s, double a, double b, double w, double& reward,
                         std::span<double> row) const {
    if (kind_ == Robustness::Noisy) {
      double x = mixed_action(a, b);
      reward += w * eval_reward(base_, s, x);
      accumulate_transition(base_, s, x, w, row);
      return;
    }
    if (alpha_ < 1.0) {
      reward += w * (1.0 - alpha_) * eval_reward(base_, s, a);
      accumulate_transition(base_, s, a, w * (1.0 - alpha_), row);
    }
    if (alpha_ > 0.0) {
      reward += w * alpha_ * eval_reward(base_, s, b);
      accumulate_transition(base_, s, b, w * alpha_, row);
    }
  }

 private:
  void check_support(const std::vector<double>& support, const char* who) const {
    if (support.empty()) throw ValidationError(fmt::format("{}: empty", who));
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (!base_.action_model().contains(support[i]))
        throw ValidationError(fmt::format("{}: action {} outside the domain", who, support[i]));
      if (i > 0 && !(support[i] > support[i - 1]))
        throw ValidationError(fmt::format("{}: must be strictly increasing", who));
    }
  }

  MdpModel base_;
  Robustness kind_;
  double alpha_;
  std::vector<double> agent_actions_;
  std::vector<double> adversary_actions_;
};

/// Reward vector and stochastic matrix of the chain induced by a joint policy.
struct InducedChain {
  Eigen::VectorXd reward;
  Eigen::MatrixXd transition;
};

/**
 * r^mix and P^mix of the joint policy (agent, adversary). Stochastic policies
 * enter through the product of their per-state distributions.
 */
inline InducedChain induced_reward_dynamics(const RobustGame& g, const Policy& agent,
                                            const Policy& adversary) {
  validate_policy(g.base(), agent, "agent policy");
  validate_policy(g.base(), adversary, "adversary policy");
  const std::size_t S = g.num_states();
  InducedChain c{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S)),
                 Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S))};
  std::vector<double> row(S);
  const double alpha = g.alpha();
  for (std::size_t s = 0; s < S; ++s) {
    std::fill(row.begin(), row.end(), 0.0);
    double reward = 0.0;
    if (g.kind() == Robustness::Probabilistic) {
      // Linear in each player separately: no product expansion needed.
      if (alpha < 1.0)
        agent.for_each_atom(s, [&](double a, double p) {
          reward += (1.0 - alpha) * p * eval_reward(g.base(), s, a);
          accumulate_transition(g.base(), s, a, (1.0 - alpha) * p, row);
        });
      if (alpha > 0.0)
        adversary.for_each_atom(s, [&](double b, double q) {
          reward += alpha * q * eval_reward(g.base(), s, b);
          accumulate_transition(g.base(), s, b, alpha * q, row);
        });
    } else {
      agent.for_each_atom(s, [&](double a, double p) {
        adversary.for_each_atom(
            s, [&](double b, double q) { g.accumulate_payoff(s, a, b, p * q, reward, row); });
      });
    }
    const auto si = static_cast<Eigen::Index>(s);
    c.reward(si) = reward;
    for (std::size_t j = 0; j < S; ++j) c.transition(si, static_cast<Eigen::Index>(j)) = row[j];
  }
  return c;
}

/// Solves v = r + gamma P v directly (LU with one refinement step).
inline ValueFn solve_discounted(const InducedChain& c, double gamma) {
  const Eigen::Index S = c.reward.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S) - gamma * c.transition;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  ValueFn v = lu.solve(c.reward);
  v += lu.solve(c.reward - A * v);
  double residual = (v - (c.reward + gamma * c.transition * v)).lpNorm<Eigen::Infinity>();
  double scale = std::max(1.0, v.lpNorm<Eigen::Infinity>());
  if (!v.allFinite() || !(residual <= kEvaluationResidual * scale))
    throw NumericalError(fmt::format("policy evaluation residual {:.3e}", residual));
  return v;
}

/// Value of the joint policy: the fixed point of the fixed-pair operator.
inline ValueFn evaluate_joint(const RobustGame& g, const Policy& agent, const Policy& adversary) {
  return solve_discounted(induced_reward_dynamics(g, agent, adversary), g.gamma());
}

/// One application of the fixed-pair operator  r^mix + gamma P^mix v.
inline ValueFn bellman_fixed_pair(const RobustGame& g, const Policy& agent,
                                  const Policy& adversary, const ValueFn& v) {
  if (static_cast<std::size_t>(v.size()) != g.num_states())
    throw IncompatiblePolicy("value function has the wrong number of states");
  InducedChain c = induced_reward_dynamics(g, agent, adversary);
  return c.reward + g.gamma() * c.transition * v;
}

/// q(s, a) = r(s, a) + gamma sum_s' P(s'|s, a) v(s') of the base model for
/// every action in `actions`.
inline std::vector<double> action_values(const MdpModel& m, std::size_t s,
                                         std::span<const double> actions, const ValueFn& v) {
  std::vector<double> q(actions.size());
  std::vector<double> row(m.num_states());
  for (std::size_t k = 0; k < actions.size(); ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    accumulate_transition(m, s, actions[k], 1.0, row);
    double ev = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) ev += row[j] * v(static_cast<Eigen::Index>(j));
    q[k] = eval_reward(m, s, actions[k]) + m.gamma() * ev;
  }
  return q;
}

/// One-step payoff matrix of state s: rows are agent actions, columns are
/// adversary actions, entries r(s, a, b) + gamma sum P(s'|s, a, b) v(s').
inline Eigen::MatrixXd payoff_matrix(const RobustGame& g, std::size_t s, const ValueFn& v) {
  const auto& A = g.agent_actions();
  const auto& B = g.adversary_actions();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(A.size()), static_cast<Eigen::Index>(B.size()));
  std::vector<double> row(g.num_states());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j) {
      std::fill(row.begin(), row.end(), 0.0);
      double reward = 0.0;
      g.accumulate_payoff(s, A[i], B[j], 1.0, reward, row);
      double ev = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) ev += row[k] * v(static_cast<Eigen::Index>(k));
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = reward + g.gamma() * ev;
    }
  return M;
}

/// Output of a minimax backup: the new values and per-state strategies.
struct Backup {
  ValueFn value;
  Policy agent;
  Policy adversary;
  /// Largest per-state matrix-game duality gap (zero for closed-form backups).
  double duality_gap = 0.0;
};

/**
 * Minimax operator of a PR game in its decoupled form,
 *   (Tv)(s) = (1 - alpha) max_a q(s, a) + alpha min_b q(s, b),
 * with deterministic greedy strategies (lowest index on ties).
 */
inline Backup bellman_minimax_pr(const RobustGame& g, const ValueFn& v) {
  if (g.kind() != Robustness::Probabilistic)
    throw ValidationError("bellman_minimax_pr needs a PR game");
  const std::size_t S = g.num_states();
  Backup out{ValueFn(static_cast<Eigen::Index>(S)), {}, {}, 0.0};
  std::vector<double> best_a(S), best_b(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto qa = action_values(g.base(), s, g.agent_actions(), v);
    auto qb = g.agent_actions() == g.adversary_actions()
                  ? qa
                  : action_values(g.base(), s, g.adversary_actions(), v);
    std::size_t ia = extremal_index(qa, Sense::Maximize);
    std::size_t ib = extremal_index(qb, Sense::Minimize);
    best_a[s] = g.agent_actions()[ia];
    best_b[s] = g.adversary_actions()[ib];
    out.value(static_cast<Eigen::Index>(s)) = (1.0 - g.alpha()) * qa[ia] + g.alpha() * qb[ib];
  }
  out.agent = Policy::deterministic(std::move(best_a));
  out.adversary = Policy::deterministic(std::move(best_b));
  return out;
}

/**
 * Minimax operator of any robust game: per state, the value of the one-step
 * payoff matrix over the two supports, with optimal mixed strategies.
 */
inline Backup bellman_minimax_generic(const RobustGame& g, const ValueFn& v) {
  const std::size_t S = g.num_states();
  const std::size_t nA = g.agent_actions().size();
  const std::size_t nB = g.adversary_actions().size();
  Backup out{ValueFn(static_cast<Eigen::Index>(S)), {}, {}, 0.0};
  std::vector<double> pa(S * nA), pb(S * nB);
  for (std::size_t s = 0; s < S; ++s) {
    MatrixGameSolution sol = solve_matrix_game(payoff_matrix(g, s, v));
    out.value(static_cast<Eigen::Index>(s)) = sol.value;
    out.duality_gap = std::max(out.duality_gap, sol.duality_gap);
    std::copy(sol.row_strategy.begin(), sol.row_strategy.end(), pa.begin() + s * nA);
    std::copy(sol.col_strategy.begin(), sol.col_strategy.end(), pb.begin() + s * nB);
  }
  out.agent = Policy::stochastic(g.agent_actions(), std::move(pa));
  out.adversary = Policy::stochastic(g.adversary_actions(), std::move(pb));
  return out;
}

/// Fixed-agent operator: min over adversary actions of the expected one-step
/// payoff under the agent's policy. Returns the values and the minimizing
/// deterministic adversary.
inline Backup bellman_fixed_agent(const RobustGame& g, const Policy& agent, const ValueFn& v) {
  validate_policy(g.base(), agent, "agent policy");
  const std::size_t S = g.num_states();
  const auto& B = g.adversary_actions();
  Backup out{ValueFn(static_cast<Eigen::Index>(S)), agent, {}, 0.0};
  std::vector<double> best(S), row(S), q(B.size());
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t j = 0; j < B.size(); ++j) {
      std::fill(row.begin(), row.end(), 0.0);
      double reward = 0.0;
      agent.for_each_atom(s, [&](double a, double p) {
        g.accumulate_payoff(s, a, B[j], p, reward, row);
      });
      double ev = 0.0;
      for (std::size_t k = 0; k < S; ++k) ev += row[k] * v(static_cast<Eigen::Index>(k));
      q[j] = reward + g.gamma() * ev;
    }
    std::size_t j = extremal_index(q, Sense::Minimize);
    best[s] = B[j];
    out.value(static_cast<Eigen::Index>(s)) = q[j];
  }
  out.adversary = Policy::deterministic(std::move(best));
  return out;
}

/// Fixed-adversary operator: max over agent actions of the expected one-step
/// payoff under the adversary's policy.
inline Backup bellman_fixed_adversary(const RobustGame& g, const Policy& adversary,
                                      const ValueFn& v) {
  validate_policy(g.base(), adversary, "adversary policy");
  const std::size_t S = g.num_states();
  const auto& A = g.agent_actions();
  Backup out{ValueFn(static_cast<Eigen::Index>(S)), {}, adversary, 0.0};
  std::vector<double> best(S), row(S), q(A.size());
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < A.size(); ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      double reward = 0.0;
      adversary.for_each_atom(s, [&](double b, double p) {
        g.accumulate_payoff(s, A[i], b, p, reward, row);
      });
      double ev = 0.0;
      for (std::size_t k = 0; k < S; ++k) ev += row[k] * v(static_cast<Eigen::Index>(k));
      q[i] = reward + g.gamma() * ev;
    }
    std::size_t i = extremal_index(q, Sense::Maximize);
    best[s] = A[i];
    out.value(static_cast<Eigen::Index>(s)) = q[i];
  }
  out.agent = Policy::deterministic(std::move(best));
  return out;
}

/// Standard single-agent optimal Bellman operator over `actions`.
inline ValueFn bellman_optimal(const MdpModel& m, std::span<const double> actions,
                               const ValueFn& v) {
  ValueFn out(static_cast<Eigen::Index>(m.num_states()));
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    auto q = action_values(m, s, actions, v);
    out(static_cast<Eigen::Index>(s)) = *std::max_element(q.begin(), q.end());
  }
  return out;
}

}  // namespace actrobust
