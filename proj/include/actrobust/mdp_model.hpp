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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "actrobust/errors.hpp"

namespace actrobust {

/// Tolerance used when checking that probability vectors sum to one.
inline constexpr double kStochasticTolerance = 1e-9;

/**
 * The action set of a base decision process.
 *
 * A finite model has actions 0, 1, ..., count-1 and its action values are the
 * indices themselves. A grid model is a closed interval [knots.front(),
 * knots.back()]; rewards and transitions are tabulated at the knots and
 * interpolated linearly in between, so every convex combination of two
 * admissible actions is again admissible and can be evaluated exactly.
 */
class ActionModel {
 public:
  enum class Kind { Finite, Grid };

  /// Position of an action value inside the table: the value interpolates
  /// between entries `lo` and `lo + 1` with weight `weight` on the upper one.
  /// A weight of exactly zero means the action sits on entry `lo`.
  struct Bracket {
    std::size_t lo = 0;
    double weight = 0.0;
  };

  ActionModel() = default;

  static ActionModel finite(std::size_t count) {
    if (count < 1) throw ValidationError("action_model: finite count must be >= 1");
    ActionModel m;
    m.kind_ = Kind::Finite;
    m.count_ = count;
    return m;
  }

  static ActionModel grid(std::vector<double> knots) {
    if (knots.size() < 2) throw ValidationError("action_model: grid needs at least 2 knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!std::isfinite(knots[i]))
        throw ValidationError(fmt::format("action_model: knot {} is not finite", i));
      if (i > 0 && !(knots[i] > knots[i - 1]))
        throw ValidationError(
            fmt::format("action_model: knots must be strictly increasing (knot {})", i));
    }
    ActionModel m;
    m.kind_ = Kind::Grid;
    m.count_ = knots.size();
    m.knots_ = std::move(knots);
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_grid() const noexcept { return kind_ == Kind::Grid; }

  /// Number of tabulated actions (the count, or the number of knots).
  std::size_t size() const noexcept { return count_; }

  const std::vector<double>& knots() const noexcept { return knots_; }

  double lower() const noexcept { return is_grid() ? knots_.front() : 0.0; }
  double upper() const noexcept {
    return is_grid() ? knots_.back() : static_cast<double>(count_ - 1);
  }

  /// Action value of table entry i.
  double value(std::size_t i) const { return is_grid() ? knots_[i] : static_cast<double>(i); }

  std::vector<double> values() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = value(i);
    return out;
  }

  bool contains(double a) const noexcept {
    if (!std::isfinite(a)) return false;
    if (is_grid()) return a >= knots_.front() && a <= knots_.back();
    return a >= 0.0 && a <= static_cast<double>(count_ - 1) && a == std::floor(a);
  }

  Bracket locate(double a) const {
    if (!contains(a)) throw OutOfDomain(fmt::format("action {} outside the action domain", a));
    if (!is_grid()) return {static_cast<std::size_t>(a), 0.0};
    auto it = std::upper_bound(knots_.begin(), knots_.end(), a);
    std::size_t lo = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (lo + 1 == knots_.size()) return {lo, 0.0};
    return {lo, (a - knots_[lo]) / (knots_[lo + 1] - knots_[lo])};
  }

  bool operator==(const ActionModel&) const = default;

 private:
  Kind kind_ = Kind::Finite;
  std::size_t count_ = 1;
  std::vector<double> knots_;
};

/**
 * Finite-state discounted decision process with a finite or interval action
 * set. Immutable once constructed; the constructor validates every invariant
 * and throws ValidationError naming the offending field.
 *
 * Rewards are stored row-major as [state][action]; transitions as
 * [state][action][next_state].
 */
class MdpModel {
 public:
  MdpModel(std::size_t num_states, ActionModel actions, std::vector<double> reward,
           std::vector<double> transitions, double gamma,
           std::vector<double> initial_distribution)
      : num_states_(num_states),
        actions_(std::move(actions)),
        reward_(std::move(reward)),
        transitions_(std::move(transitions)),
        gamma_(gamma),
        initial_(std::move(initial_distribution)) {
    validate();
  }

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return actions_.size(); }
  const ActionModel& action_model() const noexcept { return actions_; }
  double gamma() const noexcept { return gamma_; }

  double reward(std::size_t s, std::size_t i) const { return reward_[s * num_actions() + i]; }

  std::span<const double> transition(std::size_t s, std::size_t i) const {
    return {transitions_.data() + (s * num_actions() + i) * num_states_, num_states_};
  }

  std::span<const double> initial_distribution() const noexcept { return initial_; }
  const std::vector<double>& rewards() const noexcept { return reward_; }
  const std::vector<double>& transitions() const noexcept { return transitions_; }

  /// max |r(s, a)| over the table; interpolation cannot exceed it.
  double reward_bound() const noexcept { return reward_bound_; }

  bool operator==(const MdpModel& o) const {
    return num_states_ == o.num_states_ && actions_ == o.actions_ && reward_ == o.reward_ &&
           transitions_ == o.transitions_ && gamma_ == o.gamma_ && initial_ == o.initial_;
  }

 private:
  void validate() {
    const std::size_t S = num_states_;
    const std::size_t A = actions_.size();
    if (S < 1) throw ValidationError("num_states: must be >= 1");
    if (!(gamma_ >= 0.0 && gamma_ < 1.0))
      throw ValidationError(fmt::format("gamma: {} is not in [0, 1)", gamma_));
    if (reward_.size() != S * A)
      throw ValidationError(
          fmt::format("reward: expected {}x{} entries, got {}", S, A, reward_.size()));
    if (transitions_.size() != S * A * S)
      throw ValidationError(fmt::format("transitions: expected {}x{}x{} entries, got {}", S, A,
                                        S, transitions_.size()));
    if (initial_.size() != S)
      throw ValidationError(fmt::format("initial_distribution: expected {} entries, got {}", S,
                                        initial_.size()));
    reward_bound_ = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t i = 0; i < A; ++i) {
        double r = reward(s, i);
        if (!std::isfinite(r))
          throw ValidationError(fmt::format("reward: state {} action {} is not finite", s, i));
        reward_bound_ = std::max(reward_bound_, std::abs(r));
        double sum = 0.0;
        for (double p : transition(s, i)) {
          if (!std::isfinite(p) || p < 0.0)
            throw ValidationError(
                fmt::format("transitions: state {} action {} has a negative or non-finite entry",
                            s, i));
          sum += p;
        }
        if (std::abs(sum - 1.0) > kStochasticTolerance)
          throw ValidationError(
              fmt::format("transitions: state {} action {} sums to {:.17g}", s, i, sum));
      }
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      if (!std::isfinite(initial_[s]) || initial_[s] < 0.0)
        throw ValidationError(fmt::format("initial_distribution: entry {} is invalid", s));
      sum += initial_[s];
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance)
      throw ValidationError(fmt::format("initial_distribution: sums to {:.17g}", sum));
  }

  std::size_t num_states_;
  ActionModel actions_;
  std::vector<double> reward_;
  std::vector<double> transitions_;
  double gamma_;
  std::vector<double> initial_;
  double reward_bound_ = 0.0;
};

/// r(s, a). Table lookup for finite models, linear interpolation for grids.
inline double eval_reward(const MdpModel& m, std::size_t s, double a) {
  auto [lo, w] = m.action_model().locate(a);
  if (w == 0.0) return m.reward(s, lo);
  return (1.0 - w) * m.reward(s, lo) + w * m.reward(s, lo + 1);
}

/// out += weight * P(. | s, a). `out` must have num_states entries.
inline void accumulate_transition(const MdpModel& m, std::size_t s, double a, double weight,
                                  std::span<double> out) {
  auto [lo, w] = m.action_model().locate(a);
  auto p_lo = m.transition(s, lo);
  if (w == 0.0) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += weight * p_lo[j];
    return;
  }
  auto p_hi = m.transition(s, lo + 1);
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] += weight * ((1.0 - w) * p_lo[j] + w * p_hi[j]);
}

/// P(. | s, a) as a probability vector over next states.
inline std::vector<double> eval_transition(const MdpModel& m, std::size_t s, double a) {
  std::vector<double> out(m.num_states(), 0.0);
  accumulate_transition(m, s, a, 1.0, out);
  return out;
}

/**
 * Stationary policy of either player.
 *
 * A deterministic policy stores one action value per state (an index for
 * finite models, a point of the interval for grids). A stochastic policy
 * stores, per state, a distribution over a fixed list of action values (its
 * support), row-major [state][support entry].
 */
class Policy {
 public:
  enum class Kind { Deterministic, Stochastic };

  Policy() = default;

  static Policy deterministic(std::vector<double> actions) {
    Policy p;
    p.kind_ = Kind::Deterministic;
    p.num_states_ = actions.size();
    p.actions_ = std::move(actions);
    return p;
  }

  static Policy stochastic(std::vector<double> support, std::vector<double> probabilities) {
    if (support.empty()) throw ValidationError("policy: empty support");
    if (probabilities.size() % support.size() != 0)
      throw ValidationError("policy: probability table does not match the support size");
    Policy p;
    p.kind_ = Kind::Stochastic;
    p.num_states_ = probabilities.size() / support.size();
    p.actions_ = std::move(support);
    p.probs_ = std::move(probabilities);
    for (std::size_t s = 0; s < p.num_states_; ++s) {
      double sum = 0.0;
      for (double q : p.distribution(s)) {
        if (!std::isfinite(q) || q < 0.0)
          throw ValidationError(fmt::format("policy: state {} has an invalid probability", s));
        sum += q;
      }
      if (std::abs(sum - 1.0) > kStochasticTolerance)
        throw ValidationError(fmt::format("policy: state {} sums to {:.17g}", s, sum));
    }
    return p;
  }

  /// Point masses on `actions[s]`, expressed over `support`.
  static Policy one_hot(const std::vector<double>& support, std::span<const std::size_t> index) {
    std::vector<double> probs(index.size() * support.size(), 0.0);
    for (std::size_t s = 0; s < index.size(); ++s) probs[s * support.size() + index[s]] = 1.0;
    return stochastic(support, std::move(probs));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_deterministic() const noexcept { return kind_ == Kind::Deterministic; }
  std::size_t num_states() const noexcept { return num_states_; }

  /// Action of a deterministic policy.
  double action(std::size_t s) const { return actions_[s]; }
  const std::vector<double>& actions() const noexcept { return actions_; }

  /// Support of a stochastic policy.
  const std::vector<double>& support() const noexcept { return actions_; }
  std::span<const double> distribution(std::size_t s) const {
    return {probs_.data() + s * actions_.size(), actions_.size()};
  }
  const std::vector<double>& probabilities() const noexcept { return probs_; }

  /// Calls f(action_value, probability) for every atom of state s with
  /// positive probability.
  template <class F>
  void for_each_atom(std::size_t s, F&& f) const {
    if (is_deterministic()) {
      f(actions_[s], 1.0);
      return;
    }
    auto row = distribution(s);
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k] > 0.0) f(actions_[k], row[k]);
  }

  bool operator==(const Policy&) const = default;

 private:
  Kind kind_ = Kind::Deterministic;
  std::size_t num_states_ = 0;
  std::vector<double> actions_;
  std::vector<double> probs_;
};

/// Throws IncompatiblePolicy on a state-count mismatch and OutOfDomain when an
/// action value lies outside the model's action domain.
inline void validate_policy(const MdpModel& m, const Policy& p, const char* who = "policy") {
  if (p.num_states() != m.num_states())
    throw IncompatiblePolicy(fmt::format("{}: has {} states, model has {}", who, p.num_states(),
                                         m.num_states()));
  const auto& am = m.action_model();
  for (double a : p.actions())
    if (!am.contains(a))
      throw OutOfDomain(fmt::format("{}: action {} outside the action domain", who, a));
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/**
 * Random model for property tests and the `gen` command. A deterministic
 * function of its arguments: rewards are uniform in [reward_lo, reward_hi],
 * transition rows and the initial distribution are normalized exponential
 * draws.
 */
inline MdpModel generate_random_model(std::uint64_t seed, std::size_t num_states,
                                      const ActionModel& actions, double reward_lo,
                                      double reward_hi, double gamma = 0.9) {
  if (num_states < 1) throw ValidationError("num_states: must be >= 1");
  if (!(reward_lo <= reward_hi)) throw ValidationError("reward range is empty");
  std::mt19937_64 rng(seed);
  const std::size_t A = actions.size();
  std::vector<double> reward(num_states * A);
  for (double& r : reward) r = reward_lo + (reward_hi - reward_lo) * detail::unit_uniform(rng);

  auto draw_distribution = [&](double* out, std::size_t n) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = -std::log1p(-detail::unit_uniform(rng)) + 1e-3;
      sum += out[j];
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= sum;
  };

  std::vector<double> transitions(num_states * A * num_states);
  for (std::size_t row = 0; row < num_states * A; ++row)
    draw_distribution(transitions.data() + row * num_states, num_states);
  std::vector<double> initial(num_states);
  draw_distribution(initial.data(), num_states);
  return MdpModel(num_states, actions, std::move(reward), std::move(transitions), gamma,
                  std::move(initial));
}

}  // namespace actrobust
