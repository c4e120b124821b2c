#include "mscr/funcsys.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mscr {

namespace {
const std::vector<size_t> kNoRules;
}

const std::vector<size_t>& FSMemory::rules_for(GoalId g) const {
  auto it = by_goal_.find(g);
  return it == by_goal_.end() ? kNoRules : it->second;
}

bool FSMemory::creates_cycle(const FSRule& r) const {
  // Would r.goal become reachable from one of its own subgoals?
  std::vector<GoalId> stack(r.subgoals.begin(), r.subgoals.end());
  std::set<GoalId> seen;
  while (!stack.empty()) {
    GoalId g = stack.back();
    stack.pop_back();
    if (g == r.goal) return true;
    if (!seen.insert(g).second) continue;
    for (size_t i : rules_for(g))
      for (GoalId sg : rules_[i].subgoals) stack.push_back(sg);
  }
  return false;
}

size_t FSMemory::add_rule(const FSRule& r) {
  if (r.successes > r.trials) throw DataError("successes exceed trials");
  for (size_t i : rules_for(r.goal)) {
    FSRule& e = rules_[i];
    if (e.env_conditions == r.env_conditions && e.subgoals == r.subgoals &&
        e.actions == r.actions) {
      e.successes += r.successes;
      e.trials += r.trials;
      return i;
    }
  }
  if (creates_cycle(r)) throw DataError("rule would create a goal cycle");
  rules_.push_back(r);
  by_goal_[r.goal].push_back(rules_.size() - 1);
  return rules_.size() - 1;
}

std::vector<size_t> afferent_synthesis(const FSMemory& m, GoalId g,
                                       const FeatureSet& percept) {
  std::vector<size_t> out;
  for (size_t i : m.rules_for(g)) {
    const FSRule& r = m.rules()[i];
    bool applicable = true;
    for (const auto& l : r.env_conditions.literals())
      if (!percept.entails(l)) {
        applicable = false;
        break;
      }
    if (applicable) out.push_back(i);
  }
  return out;
}

namespace {

std::optional<DecisionNode> decide_goal(const FSMemory& m, GoalId g,
                                        const FeatureSet& percept, int depth);

double best_subgoal_estimate(const FSMemory& m, GoalId g,
                             const FeatureSet& percept, int depth,
                             std::optional<DecisionNode>* node_out) {
  auto node = decide_goal(m, g, percept, depth);
  double est = node ? node->estimate : m.floor_estimate;
  if (node_out) *node_out = std::move(node);
  return est;
}

std::optional<DecisionNode> decide_goal(const FSMemory& m, GoalId g,
                                        const FeatureSet& percept, int depth) {
  if (depth <= 0) throw DataError("goal hierarchy depth guard exceeded");
  std::optional<DecisionNode> best;
  for (size_t i : afferent_synthesis(m, g, percept)) {
    const FSRule& r = m.rules()[i];
    DecisionNode node;
    node.goal = g;
    node.rule_index = i;
    double est = r.estimate();
    for (GoalId sg : r.subgoals) {
      std::optional<DecisionNode> child;
      est *= best_subgoal_estimate(m, sg, percept, depth - 1, &child);
      node.children.push_back(std::move(child));
    }
    node.estimate = est;
    // strict > keeps the earliest (canonical) rule on ties
    if (!best || node.estimate > best->estimate) best = std::move(node);
  }
  return best;
}

}  // namespace

double estimate_goal_probability(const FSMemory& m, const FSRule& rule,
                                 const FeatureSet& percept, int depth_guard) {
  double est = rule.estimate();
  for (GoalId sg : rule.subgoals)
    est *= best_subgoal_estimate(m, sg, percept, depth_guard - 1, nullptr);
  return est;
}

Decision decide(const FSMemory& m, GoalId g, const FeatureSet& percept,
                int depth_guard) {
  Decision d;
  d.root = decide_goal(m, g, percept, depth_guard);
  return d;
}

namespace {

void assemble_node(const DecisionNode& n, const std::vector<FSRule>& rules,
                   Plan& plan, Acceptor& acc) {
  for (const auto& child : n.children)
    if (child) assemble_node(*child, rules, plan, acc);
  for (ActionId a : rules[n.rule_index].actions)
    plan.steps.push_back({a, n.goal});
  acc.entries.push_back({n.goal, n.rule_index, plan.steps.size()});
}

void walk_plan(const Decision& d, const std::vector<FSRule>& rules, Plan& plan,
               Acceptor& acc) {
  if (!d.made()) throw DataError("no decision to assemble");
  assemble_node(*d.root, rules, plan, acc);
}

}  // namespace

Plan assemble_plan(const FSMemory& m, const Decision& d) {
  Plan p;
  Acceptor a;
  walk_plan(d, m.rules(), p, a);
  return p;
}

Acceptor build_acceptor(const FSMemory& m, const Decision& d) {
  Plan p;
  Acceptor a;
  walk_plan(d, m.rules(), p, a);
  return a;
}

Outcome execute(const Plan& plan, const Acceptor& acceptor, Environment& env,
                int step_budget) {
  Outcome o;
  size_t entry = 0;
  size_t pos = 0;
  for (;;) {
    while (entry < acceptor.entries.size() &&
           acceptor.entries[entry].check_after == pos) {
      bool ok = env.holds(acceptor.entries[entry].goal);
      o.matched.push_back(ok);
      if (!ok) {
        o.failing_goal = acceptor.entries[entry].goal;
        o.failing_entry = entry;
        o.success = false;
        return o;
      }
      ++entry;
    }
    if (pos == plan.steps.size()) break;
    if (o.steps_used >= step_budget) {
      o.budget_exhausted = true;
      o.success = false;
      return o;
    }
    env.act(plan.steps[pos].action);
    ++o.steps_used;
    ++pos;
  }
  o.success = entry == acceptor.entries.size();
  return o;
}

namespace {

void collect_rules_postorder(const DecisionNode& n, std::vector<size_t>& out) {
  for (const auto& c : n.children)
    if (c) collect_rules_postorder(*c, out);
  out.push_back(n.rule_index);
}

}  // namespace

void learn_outcome(FSMemory& m, const Decision& d, const Outcome& o) {
  if (!d.made()) return;
  std::vector<size_t> order;
  collect_rules_postorder(*d.root, order);
  if (o.success) {
    for (size_t i : order) {
      ++m.rule(i).successes;
      ++m.rule(i).trials;
    }
    return;
  }
  if (o.failing_entry && *o.failing_entry < order.size())
    ++m.rule(order[*o.failing_entry]).trials;  // penalty: estimate drops
  m.exploration_flag = true;
}

void explore_step(FSMemory& m, Environment& env, SplitMix64& rng) {
  FeatureSet pre = env.perceive();
  ActionId a = static_cast<ActionId>(
      rng.below(static_cast<uint64_t>(env.action_count())));
  env.act(a);
  FeatureSet post = env.perceive();

  std::vector<int> changed;
  for (const auto& l : post.literals())
    if (!l.neg && !pre.contains(l)) changed.push_back(l.attr);
  if (changed.empty()) return;

  // Conditions generalize: keep only the attributes the environment declares
  // relevant to the observed change, plus the goal's own attribute.
  std::vector<int> relevant = env.related_attrs(changed);
  std::sort(relevant.begin(), relevant.end());
  relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());

  for (GoalId g = 0; g < env.goal_count(); ++g) {
    Literal gl = env.goal_literal(g);
    if (pre.entails(gl) || !post.entails(gl)) continue;
    FSRule r;
    r.goal = g;
    for (const auto& l : pre.literals())
      if (l.attr == gl.attr ||
          std::binary_search(relevant.begin(), relevant.end(), l.attr))
        r.env_conditions.insert(l);
    r.actions = {a};
    r.successes = 1;
    r.trials = 1;
    m.add_rule(r);
  }
}

namespace {

EpisodeStats run_episode(Environment& env, FSMemory& m,
                         const AnimatParams& params, SplitMix64& rng,
                         double eps, bool learning) {
  EpisodeStats st;
  while (!env.holds(params.goal) && st.steps < params.step_budget) {
    bool explore = learning && rng.unit() < eps;
    if (!explore) {
      Decision d = decide(m, params.goal, env.perceive());
      Plan plan;
      Acceptor acc;
      if (d.made()) walk_plan(d, m.rules(), plan, acc);
      if (d.made() && !plan.steps.empty()) {
        Outcome o = execute(plan, acc, env, params.step_budget - st.steps);
        st.steps += o.steps_used;
        if (learning) learn_outcome(m, d, o);
        continue;
      }
      explore = true;  // no usable plan
    }
    if (learning) {
      explore_step(m, env, rng);
    } else {
      env.act(static_cast<ActionId>(
          rng.below(static_cast<uint64_t>(env.action_count()))));
    }
    ++st.steps;
  }
  st.success = env.holds(params.goal);
  st.memory_size = m.size();
  return st;
}

}  // namespace

AnimatReport run_animat(Environment& env, FSMemory& memory, int train_episodes,
                        int eval_episodes, const AnimatParams& params,
                        uint64_t seed) {
  if (train_episodes < 0 || eval_episodes <= 0)
    throw DataError("episode counts must be positive");
  SplitMix64 rng(seed);
  AnimatReport rep;
  for (int e = 0; e < train_episodes; ++e) {
    double t = train_episodes > 1
                   ? static_cast<double>(e) / (train_episodes - 1)
                   : 0.0;
    double eps = params.eps_start + (params.eps_end - params.eps_start) * t;
    env.reset(rng.next());
    rep.training.push_back(run_episode(env, memory, params, rng, eps, true));
  }
  int successes = 0;
  int64_t steps = 0;
  for (int e = 0; e < eval_episodes; ++e) {
    env.reset(rng.next());
    EpisodeStats st = run_episode(env, memory, params, rng, 0.0, false);
    successes += st.success ? 1 : 0;
    steps += st.steps;
    rep.evaluation.push_back(st);
  }
  rep.eval_success_rate = static_cast<double>(successes) / eval_episodes;
  rep.eval_mean_steps = static_cast<double>(steps) / eval_episodes;
  rep.final_memory_size = memory.size();
  return rep;
}

std::string to_json(const AnimatReport& r) {
  nlohmann::json j;
  auto eps = [](const std::vector<EpisodeStats>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v)
      a.push_back({{"success", e.success},
                   {"steps", e.steps},
                   {"memory_size", e.memory_size}});
    return a;
  };
  j["training"] = eps(r.training);
  j["evaluation"] = eps(r.evaluation);
  j["eval_success_rate"] = r.eval_success_rate;
  j["eval_mean_steps"] = r.eval_mean_steps;
  j["final_memory_size"] = r.final_memory_size;
  return j.dump();
}

std::string to_text(const AnimatReport& r) {
  std::ostringstream s;
  s << "training episodes: " << r.training.size()
    << "\nevaluation episodes: " << r.evaluation.size()
    << "\neval success rate: " << r.eval_success_rate
    << "\neval mean steps: " << r.eval_mean_steps
    << "\nmemory size: " << r.final_memory_size << "\n";
  return s.str();
}

}  // namespace mscr
