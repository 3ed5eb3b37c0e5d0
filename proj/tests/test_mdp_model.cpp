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
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "actrobust/mdp_model.hpp"
#include "actrobust/model_io.hpp"
#include "instances.hpp"
#include "oracles.hpp"

namespace actrobust {
namespace {

MdpModel two_state_grid() {
  // Knots {-1, 0, 2}; reward and transitions differ per knot.
  return MdpModel(2, ActionModel::grid({-1.0, 0.0, 2.0}), {0.0, 1.0, 5.0, -1.0, 3.0, 2.0},
                  {1.0, 0.0, 0.5, 0.5, 0.0, 1.0,  //
                   0.2, 0.8, 0.6, 0.4, 1.0, 0.0},
                  0.5, {0.25, 0.75});
}

TEST(ActionModelTest, FiniteDomainIsTheIndexSet) {
  ActionModel am = ActionModel::finite(3);
  EXPECT_FALSE(am.is_grid());
  EXPECT_EQ(am.size(), 3u);
  EXPECT_TRUE(am.contains(0.0));
  EXPECT_TRUE(am.contains(2.0));
  EXPECT_FALSE(am.contains(1.5));
  EXPECT_FALSE(am.contains(3.0));
  EXPECT_FALSE(am.contains(-1.0));
  EXPECT_EQ(am.values(), (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_THROW(ActionModel::finite(0), ValidationError);
}

TEST(ActionModelTest, GridValidation) {
  EXPECT_THROW(ActionModel::grid({0.0}), ValidationError);
  EXPECT_THROW(ActionModel::grid({0.0, 0.0}), ValidationError);
  EXPECT_THROW(ActionModel::grid({1.0, 0.0}), ValidationError);
  EXPECT_THROW(ActionModel::grid({0.0, NAN}), ValidationError);
  ActionModel am = ActionModel::grid({-1.0, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(am.lower(), -1.0);
  EXPECT_DOUBLE_EQ(am.upper(), 1.0);
  EXPECT_TRUE(am.contains(0.123));
  EXPECT_FALSE(am.contains(1.0000001));
  EXPECT_THROW(am.locate(-2.0), OutOfDomain);
}

TEST(ActionModelTest, LocateBrackets) {
  ActionModel am = ActionModel::grid({-1.0, 0.0, 2.0});
  auto b = am.locate(1.0);
  EXPECT_EQ(b.lo, 1u);
  EXPECT_DOUBLE_EQ(b.weight, 0.5);
  b = am.locate(0.0);
  EXPECT_EQ(b.lo, 1u);
  EXPECT_EQ(b.weight, 0.0);
  b = am.locate(2.0);
  EXPECT_EQ(b.lo, 2u);
  EXPECT_EQ(b.weight, 0.0);
}

TEST(MdpModelTest, InterpolationMatchesScanOracle) {
  MdpModel m = instances::random_grid(11, 3, 6);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double a = u(rng);
    const std::size_t s = rng() % 3;
    EXPECT_NEAR(eval_reward(m, s, a), oracle::reward(m, s, a), 1e-14);
    auto p = eval_transition(m, s, a);
    double sum = 0.0;
    for (std::size_t n = 0; n < 3; ++n) {
      EXPECT_NEAR(p[n], oracle::transition(m, s, a, n), 1e-14);
      sum += p[n];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(MdpModelTest, InterpolationHandComputed) {
  MdpModel m = two_state_grid();
  EXPECT_DOUBLE_EQ(eval_reward(m, 0, -0.5), 0.5);
  EXPECT_DOUBLE_EQ(eval_reward(m, 0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(eval_reward(m, 1, 2.0), 2.0);
  auto p = eval_transition(m, 1, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.8);
  EXPECT_DOUBLE_EQ(p[1], 0.2);
  EXPECT_THROW(eval_reward(m, 0, 2.5), OutOfDomain);
}

TEST(MdpModelTest, RejectsInvalidModels) {
  const ActionModel am = ActionModel::finite(1);
  EXPECT_THROW(MdpModel(1, am, {0.0}, {1.0}, 1.0, {1.0}), ValidationError);
  EXPECT_THROW(MdpModel(1, am, {0.0}, {1.0}, -0.1, {1.0}), ValidationError);
  EXPECT_THROW(MdpModel(1, am, {NAN}, {1.0}, 0.9, {1.0}), ValidationError);
  EXPECT_THROW(MdpModel(2, am, {0.0, 0.0}, {0.5, 0.4, 1.0, 0.0}, 0.9, {1.0, 0.0}),
               ValidationError);
  EXPECT_THROW(MdpModel(2, am, {0.0, 0.0}, {1.1, -0.1, 1.0, 0.0}, 0.9, {1.0, 0.0}),
               ValidationError);
  EXPECT_THROW(MdpModel(2, am, {0.0, 0.0}, {1.0, 0.0, 1.0, 0.0}, 0.9, {0.5, 0.6}),
               ValidationError);
  EXPECT_THROW(MdpModel(2, am, {0.0}, {1.0, 0.0, 1.0, 0.0}, 0.9, {1.0, 0.0}), ValidationError);
  EXPECT_NO_THROW(MdpModel(1, am, {2.0}, {1.0}, 0.0, {1.0}));
}

TEST(MdpModelTest, ErrorNamesStateAndAction) {
  try {
    MdpModel(2, ActionModel::finite(2), {0, 0, 0, 0}, {1, 0, 1, 0, 1, 0, 0.7, 0.2}, 0.9, {1, 0});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("state 1 action 1"), std::string::npos) << e.what();
  }
}

TEST(MdpModelTest, RandomModelsAreDeterministicAndValid) {
  MdpModel a = generate_random_model(3, 4, ActionModel::finite(3), -2.0, 5.0);
  MdpModel b = generate_random_model(3, 4, ActionModel::finite(3), -2.0, 5.0);
  MdpModel c = generate_random_model(4, 4, ActionModel::finite(3), -2.0, 5.0);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  for (double r : a.rewards()) {
    EXPECT_GE(r, -2.0);
    EXPECT_LE(r, 5.0);
  }
  for (double p : a.transitions()) EXPECT_GT(p, 0.0);
  EXPECT_DOUBLE_EQ(a.gamma(), 0.9);
}

TEST(ModelIoTest, JsonRoundTrip) {
  for (const MdpModel& m : {two_state_grid(), instances::random_finite(8), instances::trap()}) {
    Json j = model_to_json(m);
    MdpModel back = model_from_json(parse_json_text(j.dump(), "test"));
    EXPECT_EQ(back, m);
  }
}

TEST(ModelIoTest, ParseAndValidationErrors) {
  Json good = model_to_json(two_state_grid());
  EXPECT_THROW(parse_json_text("{not json", "x"), ParseError);
  Json j = good;
  j.erase("gamma");
  EXPECT_THROW(model_from_json(j), ParseError);
  j = good;
  j["gamma"] = "high";
  EXPECT_THROW(model_from_json(j), ParseError);
  j = good;
  j["action_model"]["type"] = "cube";
  EXPECT_THROW(model_from_json(j), ParseError);
  j = good;
  j["reward"][0].push_back(1.0);
  EXPECT_THROW(model_from_json(j), ValidationError);
  j = good;
  j["transitions"][1][2] = {0.5, 0.6};
  EXPECT_THROW(model_from_json(j), ValidationError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), ParseError);
}

TEST(PolicyTest, StochasticValidation) {
  EXPECT_THROW(Policy::stochastic({}, {}), ValidationError);
  EXPECT_THROW(Policy::stochastic({0.0, 1.0}, {0.5, 0.4}), ValidationError);
  EXPECT_THROW(Policy::stochastic({0.0, 1.0}, {1.5, -0.5}), ValidationError);
  EXPECT_THROW(Policy::stochastic({0.0, 1.0}, {0.5, 0.5, 0.5}), ValidationError);
  Policy p = Policy::stochastic({0.0, 1.0}, {0.25, 0.75, 1.0, 0.0});
  EXPECT_EQ(p.num_states(), 2u);
  int atoms = 0;
  p.for_each_atom(1, [&](double a, double q) {
    ++atoms;
    EXPECT_EQ(a, 0.0);
    EXPECT_EQ(q, 1.0);
  });
  EXPECT_EQ(atoms, 1);
}

TEST(PolicyTest, CompatibilityWithModel) {
  MdpModel m = two_state_grid();
  EXPECT_NO_THROW(validate_policy(m, Policy::deterministic({0.3, 2.0})));
  EXPECT_THROW(validate_policy(m, Policy::deterministic({0.3})), IncompatiblePolicy);
  EXPECT_THROW(validate_policy(m, Policy::deterministic({0.3, 2.5})), OutOfDomain);
  MdpModel f = instances::trap();
  EXPECT_THROW(validate_policy(f, Policy::deterministic({0.0, 0.5, 1.0})), OutOfDomain);
}

TEST(PolicyTest, JsonRoundTrip) {
  Policy d = Policy::deterministic({0.0, 2.0, 1.0});
  Policy s = Policy::stochastic({-1.0, 1.0}, {0.5, 0.5, 0.1, 0.9});
  EXPECT_EQ(policy_from_json(policy_to_json(d)), d);
  EXPECT_EQ(policy_from_json(policy_to_json(s)), s);
  EXPECT_THROW(policy_from_json(Json{{"type", "mixed"}}), ParseError);
}

}  // namespace
}  // namespace actrobust
