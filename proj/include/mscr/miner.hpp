#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mscr/core.hpp"

namespace mscr {

// premise => conclusion with Laplace-smoothed conditional probability
// gamma = (n_joint + 1) / (n_premise + 2).
struct Rule {
  std::vector<Literal> premise;  // sorted, consistent, conclusion attr absent
  Literal conclusion;
  int64_t n_premise = 0;
  int64_t n_joint = 0;

  double gamma() const {
    return static_cast<double>(n_joint + 1) /
           static_cast<double>(n_premise + 2);
  }
  void validate(const AttributeSchema& s) const;

  bool operator==(const Rule& o) const {
    return premise == o.premise && conclusion == o.conclusion;
  }
};

// Exact comparison of (j1+1)/(p1+2) vs (j2+1)/(p2+2); floating point must
// never decide a Cartwright check.
inline bool gamma_less(int64_t j1, int64_t p1, int64_t j2, int64_t p2) {
  return (j1 + 1) * (p2 + 2) < (j2 + 1) * (p1 + 2);
}

enum class MaximalityMode { Local, Global };

struct MiningParams {
  int max_premise_length = 4;
  int64_t min_support = 5;
  double min_gamma = 0.7;
  int64_t beam_width = 0;  // 0 = unlimited
  MaximalityMode maximality = MaximalityMode::Local;
  int threads = 1;

  void validate() const;
};

struct RuleBase {
  uint64_t schema_hash = 0;
  MiningParams params;
  std::vector<Rule> rules;  // canonical order

  // Canonical order: (conclusion, premise length, lexicographic premise).
  static bool canonical_less(const Rule& a, const Rule& b);
  void sort_canonical();
  uint64_t hash() const;
};

int64_t support(const Corpus& c, const std::vector<Literal>& conj);
double gamma(const Corpus& c, const Rule& r);
bool cartwright_holds(const Corpus& c, const Rule& r);
bool is_mscr(const Corpus& c, const Rule& r, const MiningParams& p);
RuleBase mine_mscr(const Corpus& c, const MiningParams& p);

void save_rulebase(const RuleBase& rb, const std::string& path);
RuleBase load_rulebase(const std::string& path);

}  // namespace mscr
