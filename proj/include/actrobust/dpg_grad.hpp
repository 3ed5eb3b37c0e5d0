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

// Exact deterministic policy gradients for tabular actors and adversaries on
// interval action models.
//
// The objective is J = p1 . v of the joint policy. With rho the discounted
// occupancy from p1 and Q(s, a) = r(s, a) + gamma sum_s' P(s'|s, a) v(s'),
//   PR:  dJ/dtheta_s = (1 - alpha) rho(s) Q'(s, theta_s),
//        dJ/dbar_s   =       alpha rho(s) Q'(s, bar_s),
//   NR:  dJ/dtheta_s = (1 - alpha) rho(s) Q'(s, x_s),
//        dJ/dbar_s   =       alpha rho(s) Q'(s, x_s),   x_s = (1 - alpha) theta_s + alpha bar_s,
// where Q' is the slope of the piecewise-linear segment containing the action.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "actrobust/errors.hpp"
#include "actrobust/mdp_model.hpp"
#include "actrobust/mixture_game.hpp"

namespace actrobust {

/// Distance to a knot below which the action derivative is undefined.
inline constexpr double kKnotTolerance = 1e-12;
/// Margin kept between parameters and the ends of the action interval.
inline constexpr double kInteriorMargin = 1e-6;

enum class Owner { Agent, Adversary };

/// One action value per state.
struct ParamPolicy {
  std::vector<double> theta;
  Owner owner = Owner::Agent;

  Policy policy() const { return Policy::deterministic(theta); }
};

struct GradReport {
  Eigen::VectorXd grad_agent;
  Eigen::VectorXd grad_adversary;
  double objective = 0.0;
};

namespace detail {

inline void check_params(const RobustGame& g, const ParamPolicy& p, const char* who) {
  if (!g.base().action_model().is_grid())
    throw ValidationError("policy gradients need a grid action model");
  if (p.theta.size() != g.num_states())
    throw IncompatiblePolicy(fmt::format("{}: {} parameters for {} states", who, p.theta.size(),
                                         g.num_states()));
  const double lo = g.base().action_model().lower();
  const double hi = g.base().action_model().upper();
  for (std::size_t s = 0; s < p.theta.size(); ++s)
    if (!(p.theta[s] > lo && p.theta[s] < hi))
      throw OutOfDomain(fmt::format("{}: theta[{}] = {} is not inside ({}, {})", who, s,
                                    p.theta[s], lo, hi));
}

/// Distance from `a` to the nearest knot.
inline double knot_distance(const ActionModel& am, double a) {
  const auto& k = am.knots();
  auto it = std::lower_bound(k.begin(), k.end(), a);
  double d = std::numeric_limits<double>::infinity();
  if (it != k.end()) d = std::min(d, *it - a);
  if (it != k.begin()) d = std::min(d, a - *(it - 1));
  return d;
}

/// dQ(s, a)/da on the segment containing a.
inline double q_slope(const MdpModel& m, std::size_t s, double a, const ValueFn& v) {
  const ActionModel& am = m.action_model();
  if (knot_distance(am, a) <= kKnotTolerance)
    throw KnotSingularity(
        fmt::format("state {}: action {} lies on a knot; the action derivative is undefined", s, a));
  const std::size_t i = am.locate(a).lo;
  const double width = am.knots()[i + 1] - am.knots()[i];
  double dq = m.reward(s, i + 1) - m.reward(s, i);
  auto p0 = m.transition(s, i);
  auto p1 = m.transition(s, i + 1);
  double ev = 0.0;
  for (std::size_t j = 0; j < m.num_states(); ++j)
    ev += (p1[j] - p0[j]) * v(static_cast<Eigen::Index>(j));
  dq += m.gamma() * ev;
  return dq / width;
}

}  // namespace detail

/// J = p1 . v of the joint policy of the two parameter vectors.
inline double objective(const RobustGame& g, const ParamPolicy& agent, const ParamPolicy& adversary) {
  detail::check_params(g, agent, "agent");
  detail::check_params(g, adversary, "adversary");
  ValueFn v = evaluate_joint(g, agent.policy(), adversary.policy());
  auto p1 = g.base().initial_distribution();
  return Eigen::Map<const Eigen::VectorXd>(p1.data(), static_cast<Eigen::Index>(p1.size())).dot(v);
}

/// Discounted occupancy rho with rho^T = p1^T (I - gamma P)^{-1}.
inline Eigen::VectorXd occupancy(const InducedChain& c, std::span<const double> p1, double gamma) {
  const Eigen::Index S = c.reward.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S) - gamma * c.transition.transpose();
  Eigen::Map<const Eigen::VectorXd> b(p1.data(), S);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd rho = lu.solve(b);
  rho += lu.solve(b - A * rho);
  if (!rho.allFinite()) throw NumericalError("occupancy solve failed");
  return rho;
}

inline GradReport exact_gradient(const RobustGame& g, const ParamPolicy& agent,
                                 const ParamPolicy& adversary) {
  detail::check_params(g, agent, "agent");
  detail::check_params(g, adversary, "adversary");
  const MdpModel& m = g.base();
  const std::size_t S = g.num_states();
  const double alpha = g.alpha();

  InducedChain chain = induced_reward_dynamics(g, agent.policy(), adversary.policy());
  ValueFn v = solve_discounted(chain, g.gamma());
  Eigen::VectorXd rho = occupancy(chain, m.initial_distribution(), g.gamma());

  GradReport rep{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S)),
                 Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S)), 0.0};
  auto p1 = m.initial_distribution();
  rep.objective = Eigen::Map<const Eigen::VectorXd>(p1.data(), static_cast<Eigen::Index>(S)).dot(v);
  for (std::size_t s = 0; s < S; ++s) {
    const auto si = static_cast<Eigen::Index>(s);
    if (g.kind() == Robustness::Noisy) {
      const double x = g.mixed_action(agent.theta[s], adversary.theta[s]);
      const double dq = rho(si) * detail::q_slope(m, s, x, v);
      rep.grad_agent(si) = (1.0 - alpha) * dq;
      rep.grad_adversary(si) = alpha * dq;
    } else {
      if (alpha < 1.0)
        rep.grad_agent(si) = (1.0 - alpha) * rho(si) * detail::q_slope(m, s, agent.theta[s], v);
      if (alpha > 0.0)
        rep.grad_adversary(si) = alpha * rho(si) * detail::q_slope(m, s, adversary.theta[s], v);
    }
  }
  return rep;
}

/// Moves parameters whose gradient evaluation point sits on a knot by a small
/// inward step. Returns true when anything moved.
inline bool nudge_off_knots(const RobustGame& g, ParamPolicy& agent, ParamPolicy& adversary,
                            double step = 1e-7) {
  const ActionModel& am = g.base().action_model();
  const double mid = 0.5 * (am.lower() + am.upper());
  auto nudge = [&](double& x) { x += x < mid ? step : -step; };
  bool moved = false;
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    for (int guard = 0; guard < 8; ++guard) {
      bool hit = false;
      if (g.kind() == Robustness::Noisy) {
        if (detail::knot_distance(am, g.mixed_action(agent.theta[s], adversary.theta[s])) <=
            kKnotTolerance) {
          nudge(g.alpha() < 1.0 ? agent.theta[s] : adversary.theta[s]);
          hit = true;
        }
      } else {
        if (g.alpha() < 1.0 && detail::knot_distance(am, agent.theta[s]) <= kKnotTolerance) {
          nudge(agent.theta[s]);
          hit = true;
        }
        if (g.alpha() > 0.0 && detail::knot_distance(am, adversary.theta[s]) <= kKnotTolerance) {
          nudge(adversary.theta[s]);
          hit = true;
        }
      }
      if (!hit) break;
      moved = true;
    }
  }
  return moved;
}

struct TrainConfig {
  /// Steps of the inner player per step of the outer player.
  int n_steps = 5;
  double lr_agent = 0.05;
  double lr_adversary = 0.05;
  int max_outer = 2000;
  double grad_tol = 1e-6;
  /// Adversary takes the N steps, agent the single step.
  bool swapped = false;
};

struct TrainResult {
  ParamPolicy agent;
  ParamPolicy adversary;
  /// J after every outer step.
  std::vector<double> trace;
  bool converged = false;
  int outer_steps = 0;
};

/**
 * Alternating projected gradient play: N ascent steps on the agent's
 * parameters followed by one descent step on the adversary's (or the reverse
 * with cfg.swapped). Parameters are clamped to
 * [lower + 1e-6, upper - 1e-6] after each step. Stops when both projected
 * gradients are below cfg.grad_tol in sup-norm; otherwise returns the last
 * iterate with converged = false.
 */
inline TrainResult alternating_train(const RobustGame& g, ParamPolicy agent, ParamPolicy adversary,
                                     const TrainConfig& cfg) {
  if (cfg.n_steps < 1 || cfg.max_outer < 1 || !(cfg.lr_agent > 0.0) ||
      !(cfg.lr_adversary > 0.0) || !(cfg.grad_tol >= 0.0))
    throw ValidationError("train: invalid configuration");
  detail::check_params(g, agent, "agent");
  detail::check_params(g, adversary, "adversary");
  const double lo = g.base().action_model().lower() + kInteriorMargin;
  const double hi = g.base().action_model().upper() - kInteriorMargin;

  // Projected gradient: drop components pushing against an active bound.
  auto projected_norm = [&](const Eigen::VectorXd& grad, const std::vector<double>& theta,
                            double sign) {
    double n = 0.0;
    for (std::size_t s = 0; s < theta.size(); ++s) {
      const double d = sign * grad(static_cast<Eigen::Index>(s));
      if ((theta[s] >= hi && d > 0.0) || (theta[s] <= lo && d < 0.0)) continue;
      n = std::max(n, std::abs(d));
    }
    return n;
  };
  auto gradient = [&]() {
    nudge_off_knots(g, agent, adversary);
    return exact_gradient(g, agent, adversary);
  };
  auto step = [&](ParamPolicy& p, const Eigen::VectorXd& grad, double lr) {
    for (std::size_t s = 0; s < p.theta.size(); ++s)
      p.theta[s] = std::clamp(p.theta[s] + lr * grad(static_cast<Eigen::Index>(s)), lo, hi);
  };
  auto agent_step = [&]() { step(agent, gradient().grad_agent, cfg.lr_agent); };
  auto adversary_step = [&]() { step(adversary, gradient().grad_adversary, -cfg.lr_adversary); };

  TrainResult out;
  for (int k = 0; k < cfg.max_outer; ++k) {
    GradReport gr = gradient();
    if (projected_norm(gr.grad_agent, agent.theta, 1.0) <= cfg.grad_tol &&
        projected_norm(gr.grad_adversary, adversary.theta, -1.0) <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
    if (!cfg.swapped) {
      for (int i = 0; i < cfg.n_steps; ++i) agent_step();
      adversary_step();
    } else {
      for (int i = 0; i < cfg.n_steps; ++i) adversary_step();
      agent_step();
    }
    out.trace.push_back(objective(g, agent, adversary));
    out.outer_steps = k + 1;
  }
  out.agent = std::move(agent);
  out.adversary = std::move(adversary);
  return out;
}

/// Central finite differences of the objective in every parameter.
inline GradReport finite_difference_gradient(const RobustGame& g, const ParamPolicy& agent,
                                             const ParamPolicy& adversary, double h = 1e-6) {
  const std::size_t S = g.num_states();
  GradReport rep{Eigen::VectorXd(static_cast<Eigen::Index>(S)),
                 Eigen::VectorXd(static_cast<Eigen::Index>(S)), objective(g, agent, adversary)};
  auto diff = [&](ParamPolicy& p, std::size_t s) {
    const double x = p.theta[s];
    p.theta[s] = x + h;
    double up = objective(g, p.owner == Owner::Agent ? p : agent,
                          p.owner == Owner::Agent ? adversary : p);
    p.theta[s] = x - h;
    double down = objective(g, p.owner == Owner::Agent ? p : agent,
                            p.owner == Owner::Agent ? adversary : p);
    p.theta[s] = x;
    return (up - down) / (2.0 * h);
  };
  ParamPolicy a = agent, b = adversary;
  a.owner = Owner::Agent;
  b.owner = Owner::Adversary;
  for (std::size_t s = 0; s < S; ++s) {
    rep.grad_agent(static_cast<Eigen::Index>(s)) = diff(a, s);
    rep.grad_adversary(static_cast<Eigen::Index>(s)) = diff(b, s);
  }
  return rep;
}

/// |x - y| / max(|x|, |y|, floor). The floor keeps coordinates whose true
/// derivative is (near) zero from being judged on rounding noise alone.
inline double relative_error(double x, double y, double floor = 1e-4) {
  return std::abs(x - y) / std::max({std::abs(x), std::abs(y), floor});
}

struct GradCheckResult {
  int trials = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
};

/**
 * Random gradient probes: grid models with 1-4 states and 3-7 knots on
 * [-1, 1], both kinds, alpha in [0, 1] and gamma in [0, 0.95]. Parameters
 * (and NR mixed actions) are drawn at least 1e-3 away from every knot so the
 * finite-difference stencil stays on one linear segment.
 */
inline GradCheckResult gradient_check(std::uint64_t seed, int trials, double h = 1e-6) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * detail::unit_uniform(rng); };
  GradCheckResult out;
  for (int t = 0; t < trials; ++t) {
    const auto S = static_cast<std::size_t>(1 + rng() % 4);
    const auto K = static_cast<std::size_t>(3 + rng() % 5);
    std::vector<double> knots(K);
    for (std::size_t i = 0; i < K; ++i)
      knots[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(K - 1);
    const double gamma = uniform(0.0, 0.95);
    MdpModel m = generate_random_model(rng(), S, ActionModel::grid(knots), -1.0, 1.0, gamma);
    const Robustness kind = rng() % 2 == 0 ? Robustness::Probabilistic : Robustness::Noisy;
    const double alpha = t % 10 == 0 ? 0.0 : uniform(0.0, 1.0);
    RobustGame g(std::move(m), kind, alpha);
    const ActionModel& am = g.base().action_model();

    ParamPolicy agent{std::vector<double>(S), Owner::Agent};
    ParamPolicy adversary{std::vector<double>(S), Owner::Adversary};
    const double margin = 1e-3;
    for (std::size_t s = 0; s < S; ++s) {
      for (;;) {
        agent.theta[s] = uniform(-1.0 + margin, 1.0 - margin);
        adversary.theta[s] = uniform(-1.0 + margin, 1.0 - margin);
        bool clear = kind == Robustness::Noisy
                         ? detail::knot_distance(am, g.mixed_action(agent.theta[s],
                                                                    adversary.theta[s])) > margin
                         : detail::knot_distance(am, agent.theta[s]) > margin &&
                               detail::knot_distance(am, adversary.theta[s]) > margin;
        if (clear) break;
      }
    }
    GradReport exact = exact_gradient(g, agent, adversary);
    GradReport fd = finite_difference_gradient(g, agent, adversary, h);
    for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(S); ++s) {
      for (auto [x, y] : {std::pair{exact.grad_agent(s), fd.grad_agent(s)},
                          std::pair{exact.grad_adversary(s), fd.grad_adversary(s)}}) {
        out.max_relative_error = std::max(out.max_relative_error, relative_error(x, y));
        out.max_absolute_error = std::max(out.max_absolute_error, std::abs(x - y));
      }
    }
    ++out.trials;
  }
  return out;
}

}  // namespace actrobust
