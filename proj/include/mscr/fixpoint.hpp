#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mscr/core.hpp"
#include "mscr/miner.hpp"

namespace mscr {

struct TraceEntry {
  FeatureSet state;
  double krit;
};

struct DivergenceError : std::runtime_error {
  std::vector<TraceEntry> trace;
  int record_index = -1;
  DivergenceError(const std::string& msg, std::vector<TraceEntry> t)
      : std::runtime_error(msg), trace(std::move(t)) {}
};

// A fixed point of the prediction operator, with the rules that fire on it.
struct Concept {
  FeatureSet prototype;
  double krit = 0.0;
  std::vector<size_t> supporting_rules;  // indices into the rule base
  std::string id;                        // canonical hash of the prototype
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

struct FixpointParams {
  int max_iter = 0;               // 0 => 4 * attribute count
  bool preserve_stimulus = false; // strict mode: never remove x0 literals
  double weight_clamp = 20.0;     // bound on |ln(gamma/(1-gamma))|
};

// Log-odds weight of a rule, clamped. Always finite under Laplace smoothing.
double rule_weight(const Rule& r, double clamp = 20.0);

// Rules whose every premise literal is entailed by x.
std::vector<size_t> fired_rules(const RuleBase& rb, const FeatureSet& x);

// Weighted signed agreement: sum over fired rules of w(r) * s, where s is +1
// when x entails the conclusion, -1 when x entails its complement, 0 else.
double krit(const RuleBase& rb, const FeatureSet& x);

// Greedy single-literal local search maximizing krit. The candidate may
// contain contradictory literals; complement pairs are resolved first, the
// side with the larger summed fired-rule weight kept.
FeatureSet phi_krit(const RuleBase& rb, const std::vector<Literal>& candidate,
                    const FixpointParams& fp = {},
                    const FeatureSet* protected_literals = nullptr);

// Pr(X): union x with the conclusions of all fired rules, then repair with
// phi_krit. Never decreases krit; returns x unchanged when nothing improves.
FeatureSet predict_step(const RuleBase& rb, const FeatureSet& x,
                        const FixpointParams& fp = {});

Concept find_fixed_point(const RuleBase& rb, const AttributeSchema& schema,
                         const FeatureSet& x0, const FixpointParams& fp = {});

// Reusable prediction evaluator bound to one rule base. Building the rule
// index once and running many stimuli through it is much cheaper than the
// per-call free functions above.
class Predictor {
 public:
  Predictor(const RuleBase& rb, const AttributeSchema& schema,
            const FixpointParams& fp = {});
  ~Predictor();
  Predictor(const Predictor&) = delete;
  Predictor& operator=(const Predictor&) = delete;

  FeatureSet phi(const std::vector<Literal>& candidate,
                 const FeatureSet* protected_literals = nullptr);
  FeatureSet step(const FeatureSet& x);
  Concept find_fixed_point(const FeatureSet& x0);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Fixed points from every record's literal set, deduplicated by prototype,
// in canonical order.
std::vector<Concept> enumerate_concepts(const RuleBase& rb, const Corpus& c,
                                        const FixpointParams& fp = {});

void save_concepts(const std::vector<Concept>& cs, uint64_t rulebase_hash,
                   const std::string& path);
std::vector<Concept> load_concepts(const std::string& path,
                                   uint64_t* rulebase_hash = nullptr);

}  // namespace mscr
