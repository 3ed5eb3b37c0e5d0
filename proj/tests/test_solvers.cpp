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


#include <cmath>

#include <gtest/gtest.h>

#include "actrobust/solvers.hpp"
#include "instances.hpp"
#include "oracles.hpp"

namespace actrobust {
namespace {

constexpr double kTol = 1e-8;

ValueFn reference_value(const RobustGame& g) {
  SolveConfig cfg;
  cfg.tolerance = 1e-11;
  return value_iteration(g, cfg).value;
}

TEST(SolveConfigTest, Validation) {
  SolveConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.eta = 1.5;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = SolveConfig{};
  cfg.tolerance = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = SolveConfig{};
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(ValueIterationTest, ScalarPrFixedPoint) {
  MdpModel m(1, ActionModel::finite(2), {0.0, 1.0}, {1.0, 1.0}, 0.9, {1.0});
  SolveReport r = value_iteration(RobustGame(m, Robustness::Probabilistic, 0.3), SolveConfig{});
  EXPECT_NEAR(r.value(0), 7.0, kTol);
  EXPECT_EQ(r.agent_policy.action(0), 1.0);
  EXPECT_EQ(r.adversary_policy.action(0), 0.0);
}

TEST(ValueIterationTest, AlphaZeroIsSingleAgentOptimum) {
  for (int t = 0; t < 20; ++t) {
    MdpModel m = instances::random_finite(10 + t);
    SolveReport r = value_iteration(RobustGame(m, Robustness::Probabilistic, 0.0), SolveConfig{});
    MdpSolution opt = solve_mdp(m, m.action_model().values(), Sense::Maximize, 1e-14);
    EXPECT_LE(sup_norm(r.value, opt.value), kTol);
  }
}

TEST(ValueIterationTest, ResidualAndReferenceTraces) {
  RobustGame g = instances::random_pr_game(3);
  ValueFn ref = reference_value(g);
  SolveReport r = value_iteration(g, SolveConfig{}, &ref);
  EXPECT_LE(r.bellman_residual, kTol);
  EXPECT_LE(sup_norm(r.value, ref), kTol);
  ASSERT_EQ(r.reference_error.size(), r.iterates.size());
  ASSERT_EQ(r.residual_trace.size() + 1, r.iterates.size());
  for (std::size_t k = 1; k < r.reference_error.size(); ++k)
    EXPECT_LE(r.reference_error[k], g.gamma() * r.reference_error[k - 1] + 1e-10);
}

TEST(ValueIterationTest, GammaZeroStopsAfterOneBackup) {
  MdpModel m(2, ActionModel::finite(2), {1, 2, 3, 0}, {1, 0, 0, 1, 1, 0, 0, 1}, 0.0, {0.5, 0.5});
  SolveReport r = value_iteration(RobustGame(m, Robustness::Probabilistic, 0.25), SolveConfig{});
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.value(0), 0.75 * 2 + 0.25 * 1, 1e-15);
  EXPECT_NEAR(r.value(1), 0.75 * 3 + 0.25 * 0, 1e-15);
}

TEST(ValueIterationTest, BudgetExhaustionReportsTrace) {
  SolveConfig cfg;
  cfg.max_iterations = 3;
  try {
    value_iteration(instances::random_pr_game(5), cfg);
    FAIL();
  } catch (const NotConverged& e) {
    EXPECT_EQ(e.trace().size(), 2u);
  }
}

TEST(InducedAgentMdpTest, AlphaZeroIsTheBaseModel) {
  MdpModel m = instances::random_finite(21);
  RobustGame g(m, Robustness::Probabilistic, 0.0);
  Policy adv = Policy::deterministic(std::vector<double>(m.num_states(), 1.0));
  EXPECT_EQ(induced_agent_mdp(g, adv), m);
}

TEST(InducedAgentMdpTest, AlphaOneRemovesTheAgent) {
  MdpModel m = instances::random_finite(22);
  RobustGame g(m, Robustness::Probabilistic, 1.0);
  Policy adv = Policy::deterministic(std::vector<double>(m.num_states(), 0.0));
  MdpModel induced = induced_agent_mdp(g, adv);
  for (std::size_t s = 0; s < m.num_states(); ++s)
    for (std::size_t i = 1; i < m.num_actions(); ++i) {
      EXPECT_EQ(induced.reward(s, i), induced.reward(s, 0));
      for (std::size_t n = 0; n < m.num_states(); ++n)
        EXPECT_EQ(induced.transition(s, i)[n], induced.transition(s, 0)[n]);
    }
}

TEST(InducedAgentMdpTest, OptimumMatchesEnumeration) {
  for (int t = 0; t < 30; ++t) {
    RobustGame g = instances::random_pr_game(30 + t, 4, 3);
    std::vector<double> adv_actions;
    for (std::size_t s = 0; s < g.num_states(); ++s)
      adv_actions.push_back(static_cast<double>((s + t) % g.base().num_actions()));
    Policy adv = Policy::deterministic(adv_actions);
    MdpModel induced = induced_agent_mdp(g, adv);
    MdpSolution opt = solve_mdp(induced, induced.action_model().values(), Sense::Maximize, 1e-14);
    // Enumerate every deterministic agent policy.
    ValueFn best = ValueFn::Constant(static_cast<Eigen::Index>(g.num_states()), -1e300);
    std::vector<double> a(g.num_states(), 0.0);
    for (;;) {
      best = best.cwiseMax(evaluate_joint(g, Policy::deterministic(a), adv));
      std::size_t s = 0;
      while (s < a.size() && ++a[s] == static_cast<double>(g.base().num_actions())) a[s++] = 0.0;
      if (s == a.size()) break;
    }
    EXPECT_LE(sup_norm(opt.value, best), 1e-9);
  }
}

TEST(InducedAgentMdpTest, RejectsNrGames) {
  RobustGame g(instances::random_grid(1, 2, 3), Robustness::Noisy, 0.2);
  EXPECT_THROW(induced_agent_mdp(g, Policy::deterministic({0.0, 0.0})), ValidationError);
}

TEST(PrPolicyIterationTest, AlphaZeroTakesOneIteration) {
  for (int t = 0; t < 10; ++t) {
    MdpModel m = instances::random_finite(40 + t);
    SolveReport r = pr_policy_iteration(RobustGame(m, Robustness::Probabilistic, 0.0), SolveConfig{});
    EXPECT_EQ(r.iterations, 1);
    MdpSolution opt = solve_mdp(m, m.action_model().values(), Sense::Maximize, 1e-14);
    EXPECT_LE(sup_norm(r.value, opt.value), kTol);
  }
}

TEST(PrPolicyIterationTest, AgreesWithValueIteration) {
  for (int t = 0; t < 40; ++t) {
    RobustGame g = instances::random_pr_game(50 + t);
    SolveReport vi = value_iteration(g, SolveConfig{});
    SolveReport pi = pr_policy_iteration(g, SolveConfig{});
    EXPECT_LE(sup_norm(vi.value, pi.value), 2 * kTol);
    EXPECT_TRUE(pi.agent_policy.is_deterministic());
    EXPECT_TRUE(pi.adversary_policy.is_deterministic());
  }
}

TEST(PrPolicyIterationTest, SwappedVariantReachesTheSameValue) {
  SolveConfig swapped;
  swapped.swapped = true;
  for (int t = 0; t < 30; ++t) {
    RobustGame g = instances::random_pr_game(90 + t);
    SolveReport a = pr_policy_iteration(g, SolveConfig{});
    SolveReport b = pr_policy_iteration(g, swapped);
    EXPECT_LE(sup_norm(a.value, b.value), 2 * kTol);
    EXPECT_TRUE(b.agent_policy.is_deterministic());
  }
}

TEST(PrPolicyIterationTest, RejectsNrGames) {
  RobustGame g(instances::random_grid(1, 2, 3), Robustness::Noisy, 0.2);
  EXPECT_THROW(pr_policy_iteration(g, SolveConfig{}), ValidationError);
  EXPECT_THROW(soft_pr_policy_iteration(g, SolveConfig{}), ValidationError);
}

TEST(SoftPolicyIterationTest, EtaOneReproducesPolicyIteration) {
  for (int t = 0; t < 20; ++t) {
    RobustGame g = instances::random_pr_game(130 + t);
    SolveReport pi = pr_policy_iteration(g, SolveConfig{});
    SolveReport soft = soft_pr_policy_iteration(g, SolveConfig{});
    ASSERT_EQ(pi.iterates.size(), soft.iterates.size());
    for (std::size_t k = 0; k < pi.iterates.size(); ++k)
      EXPECT_LE(sup_norm(pi.iterates[k], soft.iterates[k]), 1e-10);
  }
}

TEST(SoftPolicyIterationTest, ContractionAndMonotonicity) {
  for (double eta : {0.25, 0.5, 1.0}) {
    SolveConfig cfg;
    cfg.eta = eta;
    for (int t = 0; t < 15; ++t) {
      RobustGame g = instances::random_pr_game(160 + t);
      ValueFn ref = reference_value(g);
      SolveReport r = soft_pr_policy_iteration(g, cfg, &ref);
      const double rate = 1.0 - eta + g.gamma() * eta;
      for (std::size_t k = 1; k < r.reference_error.size(); ++k)
        EXPECT_LE(r.reference_error[k], rate * r.reference_error[k - 1] + 1e-8)
            << "eta " << eta << " instance " << t << " iteration " << k;
      for (std::size_t k = 0; k < r.iterates.size(); ++k) {
        EXPECT_GE((r.iterates[k] - ref).minCoeff(), -1e-8);
        if (k > 0) {
          EXPECT_LE((r.iterates[k] - r.iterates[k - 1]).maxCoeff(), 1e-8);
        }
      }
      EXPECT_LE(sup_norm(r.value, ref), kTol + 1e-10);
      EXPECT_FALSE(r.adversary_policy.is_deterministic());
      EXPECT_TRUE(r.agent_policy.is_deterministic());
    }
  }
}

TEST(ZeroSumPolicyIterationTest, AgreesWithPrSolvers) {
  for (int t = 0; t < 25; ++t) {
    RobustGame g = instances::random_pr_game(200 + t);
    SolveReport pi = pr_policy_iteration(g, SolveConfig{});
    SolveReport zs = zs_policy_iteration(g, SolveConfig{});
    SolveReport zs_soft = zs_policy_iteration(g, SolveConfig{}, 0.5);
    EXPECT_LE(sup_norm(pi.value, zs.value), 2 * kTol);
    EXPECT_LE(sup_norm(pi.value, zs_soft.value), 2 * kTol);
    EXPECT_TRUE(zs.agent_policy.is_deterministic());
  }
}

TEST(ZeroSumPolicyIterationTest, SoftTraceContractsOnPrGames) {
  for (double eta : {0.25, 0.5}) {
    for (int t = 0; t < 10; ++t) {
      RobustGame g = instances::random_pr_game(230 + t);
      ValueFn ref = reference_value(g);
      SolveReport r = zs_policy_iteration(g, SolveConfig{}, eta, &ref);
      const double rate = 1.0 - eta + g.gamma() * eta;
      for (std::size_t k = 1; k < r.reference_error.size(); ++k)
        EXPECT_LE(r.reference_error[k], rate * r.reference_error[k - 1] + 1e-8);
    }
  }
}

TEST(ZeroSumPolicyIterationTest, NrGamesAgreeWithValueIteration) {
  for (int t = 0; t < 10; ++t) {
    RobustGame g(instances::random_grid(250 + t, 1 + t % 3, 4), Robustness::Noisy, 0.1 + 0.08 * t);
    SolveReport vi = value_iteration(g, SolveConfig{});
    SolveReport zs = zs_policy_iteration(g, SolveConfig{});
    EXPECT_LE(sup_norm(vi.value, zs.value), 2 * kTol);
    EXPECT_LE(vi.certified_gap, 1e-8);
  }
}

TEST(CounterexampleTest, ModelIsValid) {
  RobustGame g = counterexample_model();
  EXPECT_EQ(g.kind(), Robustness::Noisy);
  EXPECT_EQ(g.num_states(), 1u);
  EXPECT_DOUBLE_EQ(g.alpha(), 0.25);
  EXPECT_DOUBLE_EQ(g.gamma(), 0.9);
  const auto& k = g.base().action_model().knots();
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_EQ(g.base().reward(0, i), k[i] * k[i]);
  EXPECT_NO_THROW(counterexample_model(0.75, 0.5));
}

TEST(CounterexampleTest, DeterministicDualityGap) {
  const double stage = 0.1;
  RobustGame g = counterexample_model(0.25);
  DualityReport d = brute_force_duality(g);
  EXPECT_NEAR(d.maxmin_det(0) * stage, 0.25, 1e-8);
  EXPECT_NEAR(d.minmax_det(0) * stage, 0.5625, 1e-8);
  EXPECT_NEAR((d.minmax_det(0) - d.maxmin_det(0)) * stage, 0.3125, 1e-8);
  DualityReport high = brute_force_duality(counterexample_model(0.75));
  EXPECT_NEAR(high.maxmin_det(0) * stage, 0.0, 1e-8);
}

TEST(CounterexampleTest, StochasticValueEqualsDeterministicMinMax) {
  RobustGame g = counterexample_model(0.25);
  SolveReport vi = value_iteration(g, SolveConfig{});
  EXPECT_NEAR(vi.value(0) * 0.1, 0.5625, 1e-8);
  SolveReport zs = zs_policy_iteration(g, SolveConfig{});
  EXPECT_NEAR(zs.value(0) * 0.1, 0.5625, 1e-8);
  // Optimal agent strategies: all mass on -1 and +1 with P(-1) in [17/36, 19/36].
  for (const Policy& p : {vi.agent_policy, zs.agent_policy}) {
    auto d = p.distribution(0);
    EXPECT_LE(d[1], 1e-9);
    EXPECT_GE(d[0], 17.0 / 36 - 1e-9);
    EXPECT_LE(d[0], 19.0 / 36 + 1e-9);
    // Every such strategy guarantees the game value against each column.
    Eigen::MatrixXd M = payoff_matrix(g, 0, ValueFn::Zero(1));
    Eigen::Map<const Eigen::VectorXd> x(d.data(), 3);
    EXPECT_GE((x.transpose() * M).minCoeff(), 0.5625 - 1e-8);
  }
}

TEST(CounterexampleTest, GameValueIsHorizonIndependentPerStage) {
  for (double gamma : {0.0, 0.5, 0.9, 0.99}) {
    RobustGame g = counterexample_model(0.25, gamma);
    SolveReport vi = value_iteration(g, SolveConfig{});
    EXPECT_NEAR(vi.value(0) * (1 - gamma), 0.5625, 1e-8);
  }
}

TEST(BruteForceDualityTest, PrStrongDuality) {
  for (int t = 0; t < 25; ++t) {
    RobustGame g = instances::random_pr_game(300 + t);
    DualityReport d = brute_force_duality(g);
    ValueFn ref = reference_value(g);
    EXPECT_LE(sup_norm(d.maxmin_det, d.minmax_det), 1e-8);
    EXPECT_LE(sup_norm(d.maxmin_det, ref), 1e-8);
  }
}

TEST(BruteForceDualityTest, BestResponsePathMatchesFullEnumeration) {
  // 4 states and 4 actions exceed the pair budget; compare with a direct
  // double loop written here.
  MdpModel m = generate_random_model(77, 4, ActionModel::finite(4), 0.0, 1.0);
  RobustGame big(m, Robustness::Probabilistic, 0.3);
  DualityReport d = brute_force_duality(big);
  ValueFn maxmin = ValueFn::Constant(4, -1e300);
  std::vector<double> a(4, 0.0);
  for (;;) {
    maxmin = maxmin.cwiseMax(worst_case_enumerated(big, Policy::deterministic(a)));
    std::size_t s = 0;
    while (s < 4 && ++a[s] == 4.0) a[s++] = 0.0;
    if (s == 4) break;
  }
  EXPECT_LE(sup_norm(d.maxmin_det, maxmin), 1e-12);
}

TEST(BruteForceDualityTest, GuardRejectsLargeInstances) {
  MdpModel many_states = generate_random_model(1, 7, ActionModel::finite(2), 0.0, 1.0);
  EXPECT_THROW(brute_force_duality(RobustGame(many_states, Robustness::Probabilistic, 0.1)), TooLarge);
  MdpModel many_actions = generate_random_model(1, 2, ActionModel::finite(8), 0.0, 1.0);
  EXPECT_THROW(brute_force_duality(RobustGame(many_actions, Robustness::Probabilistic, 0.1)), TooLarge);
}

TEST(RmdpEquivalenceTest, WorstDeterministicAdversaryAttainsTheRobustValue) {
  for (int t = 0; t < 25; ++t) {
    RobustGame g = instances::random_pr_game(400 + t);
    SolveReport r = pr_policy_iteration(g, SolveConfig{});
    ValueFn ref = reference_value(g);
    EXPECT_LE(sup_norm(worst_case_enumerated(g, r.agent_policy), ref), 1e-8);
  }
}

TEST(GreedyStepTest, MinimizesTheLinearizationOverVertices) {
  // The joint value is linear-fractional in the adversary's policy; the
  // chain is linear in it, so the directional derivative towards a vertex
  // can be taken by central differences of the interpolated chain.
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    const bool noisy = t % 3 == 2;
    MdpModel m = noisy ? instances::random_grid(500 + t, 1 + t % 3, 3)
                       : instances::random_finite(500 + t, 3, 3);
    RobustGame g(m, noisy ? Robustness::Noisy : Robustness::Probabilistic,
                 0.1 + 0.8 * detail::unit_uniform(rng));
    const std::size_t S = g.num_states(), nA = g.agent_actions().size(),
                      nB = g.adversary_actions().size();
    auto random_rows = [&](std::size_t n) {
      std::vector<double> p;
      for (std::size_t s = 0; s < S; ++s) {
        std::vector<double> w(n);
        double sum = 0;
        for (double& x : w) sum += (x = 0.05 + detail::unit_uniform(rng));
        for (double x : w) p.push_back(x / sum);
      }
      return p;
    };
    Policy agent = Policy::stochastic(g.agent_actions(), random_rows(nA));
    Policy adv = Policy::stochastic(g.adversary_actions(), random_rows(nB));
    ValueFn v = evaluate_joint(g, agent, adv);
    Policy greedy = bellman_fixed_agent(g, agent, v).adversary;
    InducedChain base = induced_reward_dynamics(g, agent, adv);

    auto derivative = [&](const Policy& vertex) {
      InducedChain target = induced_reward_dynamics(g, agent, vertex);
      auto at = [&](double eps) {
        InducedChain c{(1 - eps) * base.reward + eps * target.reward,
                       (1 - eps) * base.transition + eps * target.transition};
        return solve_discounted(c, g.gamma());
      };
      const double h = 1e-6;
      return ValueFn((at(h) - at(-h)) / (2 * h));
    };
    ValueFn dg = derivative(greedy);
    std::vector<double> b(S, 0.0);
    for (;;) {
      std::vector<double> actions(S);
      for (std::size_t s = 0; s < S; ++s) actions[s] = g.adversary_actions()[static_cast<std::size_t>(b[s])];
      ValueFn dv = derivative(Policy::deterministic(actions));
      EXPECT_LE((dg - dv).maxCoeff(), 1e-5);
      std::size_t s = 0;
      while (s < S && ++b[s] == static_cast<double>(nB)) b[s++] = 0.0;
      if (s == S) break;
    }
  }
}

TEST(SolveMdpTest, MinimizationAndThreshold) {
  MdpModel m = instances::trap();
  MdpSolution best = solve_mdp(m, m.action_model().values(), Sense::Maximize, 1e-14);
  EXPECT_NEAR(best.value(1), 10.0, 1e-12);
  EXPECT_NEAR(best.value(0), 9.5, 1e-12);
  MdpSolution worst = solve_mdp(m, m.action_model().values(), Sense::Minimize, 1e-14);
  EXPECT_NEAR(worst.value(1), -10.0, 1e-12);
  EXPECT_NEAR(worst.value(0), 0.5 + 0.9 * -10.0, 1e-12);
}

}  // namespace
}  // namespace actrobust
