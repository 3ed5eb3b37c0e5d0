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

// actrobust command-line tool.
//
// Exit codes: 0 success, 1 invalid input, 2 no convergence, 3 numerical
// failure (including a failed gradient check).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "actrobust.hpp"

namespace {

using namespace actrobust;

struct Common {
  std::string out;
  bool quiet = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Write the machine-readable result to this file");
  cmd->add_flag("--quiet", c.quiet, "Suppress progress messages");
  cmd->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
}

std::string num(double x) { return format_number(x); }

std::string vec(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

std::string vec(const std::vector<double>& v) {
  return vec(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string policy_text(const Policy& p) {
  if (p.is_deterministic()) return "deterministic " + vec(p.actions());
  std::string s = "stochastic support " + vec(p.support());
  for (std::size_t st = 0; st < p.num_states(); ++st) {
    auto d = p.distribution(st);
    s += fmt::format("\n  state {}: {}", st, vec(std::vector<double>(d.begin(), d.end())));
  }
  return s;
}

Json values_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void progress(const Common& c, const std::string& msg) {
  if (!c.quiet) std::cerr << msg << '\n';
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) return;
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ValidationError(fmt::format("cannot write '{}'", c.out));
  f << text;
  progress(c, fmt::format("wrote {}", c.out));
}

std::vector<double> split_numbers(const std::string& list, const char* what) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError(fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  if (out.empty()) throw ValidationError(fmt::format("{}: empty list", what));
  return out;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string model, kind = "pr", algo = "vi";
  double alpha = 0.1, eta = 1.0, tol = 1e-8;
  int max_iter = 10000;
  bool swapped = false;
};

SolveConfig make_config(const SolveArgs& a) {
  SolveConfig cfg;
  cfg.tolerance = a.tol;
  cfg.inner_solver_tolerance = a.tol / 10.0;
  cfg.max_iterations = a.max_iter;
  cfg.eta = a.eta;
  cfg.swapped = a.swapped;
  return cfg;
}

Json report_json(const SolveReport& r, const RobustGame& g, Algorithm algo) {
  return Json{{"kind", std::string(to_string(g.kind()))},
              {"alpha", g.alpha()},
              {"algorithm", std::string(to_string(algo))},
              {"iterations", r.iterations},
              {"value", values_json(r.value)},
              {"certified_gap", r.certified_gap},
              {"bellman_residual", r.bellman_residual},
              {"residual_trace", r.residual_trace},
              {"agent_policy", policy_to_json(r.agent_policy)},
              {"adversary_policy", policy_to_json(r.adversary_policy)}};
}

int run_solve(const SolveArgs& a, const Common& c) {
  RobustGame g(load_model(a.model), parse_robustness(a.kind), a.alpha);
  Algorithm algo = parse_algorithm(a.algo);
  if (a.swapped && algo != Algorithm::PolicyIteration)
    throw ValidationError("--swapped applies to --algo pi only");
  if (g.kind() == Robustness::Noisy &&
      (algo == Algorithm::PolicyIteration || algo == Algorithm::SoftPolicyIteration))
    throw ValidationError("pi and soft-pi are PR algorithms; use vi, zs-pi or zs-soft-pi for NR");
  SolveReport r = solve_game(g, algo, make_config(a));
  std::cout << fmt::format("kind {}\nalpha {}\nalgorithm {}\niterations {}\n", to_string(g.kind()),
                           num(g.alpha()), to_string(algo), r.iterations)
            << "value " << vec(r.value) << '\n'
            << "certified_gap " << num(r.certified_gap) << '\n'
            << "bellman_residual " << num(r.bellman_residual) << '\n'
            << "agent_policy " << policy_text(r.agent_policy) << '\n'
            << "adversary_policy " << policy_text(r.adversary_policy) << '\n';
  emit(c, report_json(r, g, algo).dump(2) + "\n");
  return 0;
}

struct EvalArgs {
  std::string model, policy, kind = "pr", noise = "0";
  double alpha = 0.1;
};

int run_eval(const EvalArgs& a, const Common& c) {
  MdpModel m = load_model(a.model);
  Json doc = parse_json_text(read_text_file(a.policy), a.policy);
  Policy agent = policy_from_json(doc.contains("agent_policy") ? doc["agent_policy"] : doc);
  validate_policy(m, agent, "agent policy");
  RobustGame g(m, parse_robustness(a.kind), a.alpha);
  ValueFn nominal = random_perturbation_value(m, agent, 0.0);
  ValueFn robust = best_response_value(g, agent);
  std::cout << "nominal_value " << vec(nominal) << '\n'
            << fmt::format("robust_value {} alpha={} ", to_string(g.kind()), num(g.alpha()))
            << vec(robust) << '\n';
  Json noisy = Json::array();
  for (double p : split_numbers(a.noise, "--noise")) {
    ValueFn v = random_perturbation_value(m, agent, p);
    std::cout << fmt::format("noise {} ", num(p)) << vec(v) << '\n';
    noisy.push_back({{"noise_prob", p}, {"value", values_json(v)}});
  }
  emit(c, Json{{"nominal_value", values_json(nominal)},
               {"kind", a.kind},
               {"alpha", a.alpha},
               {"robust_value", values_json(robust)},
               {"noise", noisy}}
                  .dump(2) + "\n");
  return 0;
}

struct SweepArgs {
  std::string model, alphas = "0,0.05,0.1,0.2", noise = "0,0.1,0.2", kinds = "pr", algo = "vi",
                     report;
  double tol = 1e-8, eta = 1.0;
};

int run_sweep_cmd(const SweepArgs& a, const Common& c) {
  MdpModel m = load_model(a.model);
  SweepSpec spec;
  spec.alphas = split_numbers(a.alphas, "--alphas");
  spec.noise_probs = split_numbers(a.noise, "--noise");
  std::stringstream ks(a.kinds);
  for (std::string k; std::getline(ks, k, ',');) spec.kinds.push_back(parse_robustness(k));
  SolveArgs sa;
  sa.tol = a.tol;
  sa.eta = a.eta;
  SweepMetadata meta;
  meta.algorithm = parse_algorithm(a.algo);
  meta.config = make_config(sa);
  meta.model = a.model;
  auto rows = run_sweep(m, spec, meta.algorithm, meta.config);
  std::ostringstream csv;
  write_csv(csv, rows);
  if (c.out.empty())
    std::cout << csv.str();
  else
    emit(c, csv.str());
  for (const auto& flag : monotonicity_flags(rows)) progress(c, "note: " + flag);
  if (!a.report.empty()) {
    std::ofstream f(a.report, std::ios::binary);
    if (!f) throw ValidationError(fmt::format("cannot write '{}'", a.report));
    f << sweep_to_json(rows, meta).dump(2) << '\n';
    progress(c, fmt::format("wrote {}", a.report));
  }
  return 0;
}

struct GradArgs {
  std::uint64_t seed = 7;
  int trials = 200;
};

int run_gradcheck(const GradArgs& a, const Common& c) {
  if (a.trials < 1) throw ValidationError("--trials must be positive");
  GradCheckResult r = gradient_check(a.seed, a.trials);
  const bool pass = r.max_relative_error <= 1e-5;
  std::cout << fmt::format("trials {}\nmax_relative_error {}\nmax_absolute_error {}\n{}\n",
                           r.trials, num(r.max_relative_error), num(r.max_absolute_error),
                           pass ? "PASS" : "FAIL");
  emit(c, Json{{"seed", a.seed},
               {"trials", r.trials},
               {"max_relative_error", r.max_relative_error},
               {"max_absolute_error", r.max_absolute_error},
               {"pass", pass}}
                  .dump(2) + "\n");
  return pass ? 0 : 3;
}

struct TrainArgs {
  std::string model, kind = "pr";
  double alpha = 0.1, lr = 0.05, lr_adv = 0.05, grad_tol = 1e-6;
  std::optional<double> init_agent, init_adversary;
  int n_steps = 5, max_outer = 2000;
  bool swapped = false;
};

int run_train(const TrainArgs& a, const Common& c) {
  RobustGame g(load_model(a.model), parse_robustness(a.kind), a.alpha);
  const ActionModel& am = g.base().action_model();
  if (!am.is_grid()) throw ValidationError("train needs a grid action model");
  const double mid = 0.5 * (am.lower() + am.upper());
  const std::size_t S = g.num_states();
  ParamPolicy agent{std::vector<double>(S, a.init_agent.value_or(mid)), Owner::Agent};
  ParamPolicy adversary{std::vector<double>(S, a.init_adversary.value_or(mid)), Owner::Adversary};
  TrainConfig cfg;
  cfg.n_steps = a.n_steps;
  cfg.lr_agent = a.lr;
  cfg.lr_adversary = a.lr_adv;
  cfg.max_outer = a.max_outer;
  cfg.grad_tol = a.grad_tol;
  cfg.swapped = a.swapped;
  TrainResult r = alternating_train(g, agent, adversary, cfg);
  const double j = objective(g, r.agent, r.adversary);
  std::cout << fmt::format("objective {}\nouter_steps {}\nconverged {}\n", num(j), r.outer_steps,
                           r.converged)
            << "agent_theta " << vec(r.agent.theta) << '\n'
            << "adversary_theta " << vec(r.adversary.theta) << '\n';
  emit(c, Json{{"objective", j},
               {"outer_steps", r.outer_steps},
               {"converged", r.converged},
               {"agent_theta", r.agent.theta},
               {"adversary_theta", r.adversary.theta},
               {"trace", r.trace}}
                  .dump(2) + "\n");
  return r.converged ? 0 : 2;
}

struct DualityArgs {
  std::string model, kind = "pr";
  double alpha = 0.1;
};

int run_duality(const DualityArgs& a, const Common& c) {
  RobustGame g(load_model(a.model), parse_robustness(a.kind), a.alpha);
  DualityReport d = brute_force_duality(g);
  SolveReport vi = value_iteration(g, SolveConfig{});
  std::cout << "maxmin_det " << vec(d.maxmin_det) << '\n'
            << "minmax_det " << vec(d.minmax_det) << '\n'
            << "game_value " << vec(vi.value) << '\n'
            << "max_gap " << num((d.minmax_det - d.maxmin_det).maxCoeff()) << '\n';
  emit(c, Json{{"maxmin_det", values_json(d.maxmin_det)},
               {"minmax_det", values_json(d.minmax_det)},
               {"game_value", values_json(vi.value)}}
                  .dump(2) + "\n");
  return 0;
}

struct CounterArgs {
  double alpha = 0.25, gamma = 0.9;
};

int run_counterexample(const CounterArgs& a, const Common& c) {
  RobustGame g = counterexample_model(a.alpha, a.gamma);
  DualityReport d = brute_force_duality(g);
  SolveConfig cfg;
  cfg.tolerance = 1e-11;
  SolveReport vi = value_iteration(g, cfg);
  const double stage = 1.0 - g.gamma();
  const double maxmin = d.maxmin_det(0) * stage;
  const double minmax = d.minmax_det(0) * stage;
  const double value = vi.value(0) * stage;
  auto agent = vi.agent_policy.distribution(0);
  std::cout << fmt::format("alpha {}\ngamma {}\n", num(g.alpha()), num(g.gamma()))
            << "maxmin_det " << num(maxmin) << '\n'
            << "minmax_det " << num(minmax) << '\n'
            << "game_value " << num(value) << '\n'
            << "agent_support " << vec(g.agent_actions()) << '\n'
            << "agent_strategy " << vec(std::vector<double>(agent.begin(), agent.end())) << '\n';
  emit(c, Json{{"alpha", g.alpha()},
               {"gamma", g.gamma()},
               {"maxmin_det", maxmin},
               {"minmax_det", minmax},
               {"game_value", value},
               {"agent_policy", policy_to_json(vi.agent_policy)}}
                  .dump(2) + "\n");
  return 0;
}

struct GenArgs {
  std::uint64_t seed = 0;
  std::size_t states = 3;
  std::optional<std::size_t> actions, knots;
  double reward_lo = 0.0, reward_hi = 1.0, gamma = 0.9;
};

int run_gen(const GenArgs& a, const Common& c) {
  if (a.actions && a.knots) throw ValidationError("give either --actions or --knots");
  ActionModel am;
  if (a.knots) {
    if (*a.knots < 2) throw ValidationError("--knots must be >= 2");
    std::vector<double> k(*a.knots);
    for (std::size_t i = 0; i < k.size(); ++i)
      k[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(k.size() - 1);
    am = ActionModel::grid(std::move(k));
  } else {
    am = ActionModel::finite(a.actions.value_or(2));
  }
  MdpModel m = generate_random_model(a.seed, a.states, am, a.reward_lo, a.reward_hi, a.gamma);
  std::string text = model_to_json(m).dump(2) + "\n";
  if (c.out.empty())
    std::cout << text;
  else
    emit(c, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action-robust MDP solver"};
  app.set_version_flag("--version", ACTROBUST_VERSION);
  app.require_subcommand(1, 1);
  Common common;

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve a PR or NR robust game");
  s->add_option("--model", solve.model, "Model JSON file")->required();
  s->add_option("--kind", solve.kind, "pr or nr");
  s->add_option("--alpha", solve.alpha, "Mixing weight in [0, 1]");
  s->add_option("--algo", solve.algo, "vi, pi, soft-pi, zs-pi or zs-soft-pi");
  s->add_option("--eta", solve.eta, "Soft step size in (0, 1]");
  s->add_option("--tol", solve.tol, "Sup-norm tolerance");
  s->add_option("--max-iter", solve.max_iter, "Iteration budget");
  s->add_flag("--swapped", solve.swapped, "PR-PI with the two update steps exchanged");
  add_common(s, common);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a policy against worst-case and random actions");
  e->add_option("--model", eval.model)->required();
  e->add_option("--policy", eval.policy, "Policy JSON or a solve report")->required();
  e->add_option("--kind", eval.kind);
  e->add_option("--alpha", eval.alpha);
  e->add_option("--noise", eval.noise, "Comma-separated noise probabilities");
  add_common(e, common);

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "Alpha and noise sweep, CSV output");
  w->add_option("--model", sweep.model)->required();
  w->add_option("--alphas", sweep.alphas);
  w->add_option("--noise", sweep.noise);
  w->add_option("--kinds", sweep.kinds, "Comma-separated subset of pr,nr");
  w->add_option("--algo", sweep.algo);
  w->add_option("--tol", sweep.tol);
  w->add_option("--eta", sweep.eta);
  w->add_option("--report", sweep.report, "Also write a JSON report with run metadata");
  add_common(w, common);

  GradArgs grad;
  auto* gc = app.add_subcommand("gradcheck", "Exact gradients against finite differences");
  gc->add_option("--seed", grad.seed);
  gc->add_option("--trials", grad.trials);
  add_common(gc, common);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Alternating gradient training of tabular policies");
  t->add_option("--model", train.model)->required();
  t->add_option("--kind", train.kind);
  t->add_option("--alpha", train.alpha);
  t->add_option("--n-steps", train.n_steps, "Inner-player steps per outer-player step");
  t->add_option("--lr", train.lr);
  t->add_option("--lr-adv", train.lr_adv);
  t->add_option("--max-outer", train.max_outer);
  t->add_option("--grad-tol", train.grad_tol);
  t->add_option("--init-agent", train.init_agent);
  t->add_option("--init-adversary", train.init_adversary);
  t->add_flag("--swapped", train.swapped, "N adversary steps per agent step");
  add_common(t, common);

  DualityArgs dual;
  auto* d = app.add_subcommand("duality", "Deterministic max-min and min-max by enumeration");
  d->add_option("--model", dual.model)->required();
  d->add_option("--kind", dual.kind);
  d->add_option("--alpha", dual.alpha);
  add_common(d, common);

  CounterArgs counter;
  auto* ce = app.add_subcommand("counterexample", "Quadratic-reward NR duality gap");
  ce->add_option("--alpha", counter.alpha);
  ce->add_option("--gamma", counter.gamma);
  add_common(ce, common);

  GenArgs gen;
  auto* gn = app.add_subcommand("gen", "Write a random model");
  gn->add_option("--seed", gen.seed);
  gn->add_option("--states", gen.states);
  gn->add_option("--actions", gen.actions, "Finite action count");
  gn->add_option("--knots", gen.knots, "Grid of equally spaced knots on [-1, 1]");
  gn->add_option("--reward-lo", gen.reward_lo);
  gn->add_option("--reward-hi", gen.reward_hi);
  gn->add_option("--gamma", gen.gamma);
  add_common(gn, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return 1;
  }

  try {
    if (*s) return run_solve(solve, common);
    if (*e) return run_eval(eval, common);
    if (*w) return run_sweep_cmd(sweep, common);
    if (*gc) return run_gradcheck(grad, common);
    if (*t) return run_train(train, common);
    if (*d) return run_duality(dual, common);
    if (*ce) return run_counterexample(counter, common);
    if (*gn) return run_gen(gen, common);
  } catch (const NotConverged& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const NumericalError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 3;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 3;
  }
  return 1;
}
