#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mscr/core.hpp"
#include "mscr/corpus_io.hpp"

namespace mscr {

using GoalId = int;
using ActionId = int;

// Condition/subgoal/action rule of a functional system with success
// statistics; its Laplace estimate is (successes+1)/(trials+2).
struct FSRule {
  GoalId goal = 0;
  FeatureSet env_conditions;
  std::vector<GoalId> subgoals;   // empty for a leaf rule
  std::vector<ActionId> actions;  // executed after the subgoals
  int64_t successes = 0;
  int64_t trials = 0;

  double estimate() const {
    return static_cast<double>(successes + 1) / static_cast<double>(trials + 2);
  }
};

// Abstract environment contract for the planner harness. Deterministic under
// a fixed seed.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual void reset(uint64_t seed) = 0;
  virtual FeatureSet perceive() const = 0;
  virtual void act(ActionId a) = 0;
  virtual int action_count() const = 0;
  virtual int goal_count() const = 0;
  virtual bool holds(GoalId g) const = 0;
  // Relevance map used when generalizing exploration rules: attributes
  // related to the ones that changed.
  virtual std::vector<int> related_attrs(const std::vector<int>& changed) const = 0;
  // The percept literal achieved when goal g holds.
  virtual Literal goal_literal(GoalId g) const = 0;
};

class FSMemory {
 public:
  // Inserts or merges (same goal/conditions/subgoals/actions accumulate
  // statistics). Rejects rules that would create a goal-hierarchy cycle.
  size_t add_rule(const FSRule& r);
  const std::vector<FSRule>& rules() const { return rules_; }
  FSRule& rule(size_t i) { return rules_[i]; }
  const std::vector<size_t>& rules_for(GoalId g) const;
  size_t size() const { return rules_.size(); }

  double floor_estimate = 0.01;  // subgoal with no applicable rule
  bool exploration_flag = false;  // raised by a penalized outcome

 private:
  bool creates_cycle(const FSRule& r) const;
  std::vector<FSRule> rules_;
  std::map<GoalId, std::vector<size_t>> by_goal_;
};

struct DecisionNode {
  GoalId goal = 0;
  size_t rule_index = 0;
  double estimate = 0.0;  // rule estimate x subgoal estimates
  // One entry per subgoal; nullopt when no rule was applicable for it.
  std::vector<std::optional<DecisionNode>> children;
};

struct Decision {
  std::optional<DecisionNode> root;  // nullopt => no-decision
  bool made() const { return root.has_value(); }
  double overall() const { return root ? root->estimate : 0.0; }
};

struct PlanStep {
  ActionId action = 0;
  GoalId origin_goal = 0;
};

struct Plan {
  std::vector<PlanStep> steps;
};

struct AcceptorEntry {
  GoalId goal = 0;
  size_t rule_index = 0;
  size_t check_after = 0;  // plan position after this subsystem's actions
};

struct Acceptor {
  std::vector<AcceptorEntry> entries;  // execution order, one per chosen rule
};

struct Outcome {
  bool success = false;
  bool budget_exhausted = false;
  std::vector<bool> matched;            // per acceptor entry
  std::optional<GoalId> failing_goal;   // first failing subsystem
  std::optional<size_t> failing_entry;
  int steps_used = 0;
};

// Rules for g whose environmental conditions are entailed by the percept.
std::vector<size_t> afferent_synthesis(const FSMemory& m, GoalId g,
                                       const FeatureSet& percept);

constexpr int kDefaultDepthGuard = 32;

// Laplace estimate of the rule times the product of the best achievable
// estimates of its subgoals under the current percept.
double estimate_goal_probability(const FSMemory& m, const FSRule& rule,
                                 const FeatureSet& percept,
                                 int depth_guard = kDefaultDepthGuard);

// Maximum-probability choice at every level; deterministic tie-break by
// canonical rule order. Empty candidate set yields a no-decision value.
Decision decide(const FSMemory& m, GoalId g, const FeatureSet& percept,
                int depth_guard = kDefaultDepthGuard);

// Depth-first hierarchy order: each subgoal's actions precede its parent's.
Plan assemble_plan(const FSMemory& m, const Decision& d);
Acceptor build_acceptor(const FSMemory& m, const Decision& d);

Outcome execute(const Plan& plan, const Acceptor& acceptor, Environment& env,
                int step_budget);

// Success reinforces every chosen rule; failure penalizes exactly the failing
// subsystem's rule (trials only) and raises the exploration flag.
void learn_outcome(FSMemory& m, const Decision& d, const Outcome& o);

// Seeded-random action; every goal literal that became true records a leaf
// rule conditioned on the pre-action percept restricted to changed-relevant
// attributes.
void explore_step(FSMemory& m, Environment& env, SplitMix64& rng);

struct AnimatParams {
  GoalId goal = 0;
  int step_budget = 60;
  double eps_start = 1.0;
  double eps_end = 0.1;
};

struct EpisodeStats {
  bool success = false;
  int steps = 0;
  size_t memory_size = 0;
};

struct AnimatReport {
  std::vector<EpisodeStats> training;
  std::vector<EpisodeStats> evaluation;
  double eval_success_rate = 0.0;
  double eval_mean_steps = 0.0;
  size_t final_memory_size = 0;
};

// epsilon-greedy training (epsilon decaying linearly from eps_start to
// eps_end), then greedy-only evaluation. Fully seed-deterministic.
AnimatReport run_animat(Environment& env, FSMemory& memory, int train_episodes,
                        int eval_episodes, const AnimatParams& params,
                        uint64_t seed);

std::string to_json(const AnimatReport& r);
std::string to_text(const AnimatReport& r);

}  // namespace mscr
