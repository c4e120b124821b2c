#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "mscr/corpus_io.hpp"
#include "mscr/miner.hpp"

using namespace mscr;

namespace {

Corpus tiny() {
  Corpus c;
  c.schema.arities = {2, 2, 2};
  c.schema.names = {"A", "B", "C"};
  c.records = {{{1, 1, 1}}, {{1, 1, 1}}, {{0, 0, 1}}, {{0, 0, 0}}};
  return c;
}

Rule make_rule(std::vector<Literal> prem, Literal concl, const Corpus& c) {
  Rule r;
  std::sort(prem.begin(), prem.end());
  r.premise = std::move(prem);
  r.conclusion = concl;
  r.n_premise = support(c, r.premise);
  std::vector<Literal> joint = r.premise;
  joint.push_back(concl);
  r.n_joint = support(c, joint);
  return r;
}

// Brute-force reference miner, written against the definitions only: no
// search-tree pruning, no grouping, no bitmasks.
std::vector<Literal> all_literals(const AttributeSchema& s) {
  std::vector<Literal> out;
  for (int a = 0; a < s.attribute_count(); ++a)
    for (int v = 0; v < s.arities[static_cast<size_t>(a)]; ++v) {
      out.emplace_back(a, v, false);
      out.emplace_back(a, v, true);
    }
  return out;
}

bool consistent_premise(const std::vector<Literal>& prem) {
  FeatureSet f;
  for (const auto& l : prem)
    if (f.contains(l) || !f.insert(l)) return false;
  // insert() silently absorbs entailed negatives; premises must keep every
  // literal explicit, so require them all to survive.
  return f.size() == prem.size();
}

void enumerate_premises(const std::vector<Literal>& lits, size_t from,
                        std::vector<Literal>& cur, int max_len,
                        const std::function<void(const std::vector<Literal>&)>& fn) {
  fn(cur);
  if (static_cast<int>(cur.size()) == max_len) return;
  for (size_t i = from; i < lits.size(); ++i) {
    cur.push_back(lits[i]);
    if (consistent_premise(cur))
      enumerate_premises(lits, i + 1, cur, max_len, fn);
    cur.pop_back();
  }
}

RuleBase oracle_mine(const Corpus& c, const MiningParams& p) {
  RuleBase rb;
  rb.schema_hash = c.schema.hash();
  rb.params = p;
  auto lits = all_literals(c.schema);
  for (const auto& concl : lits) {
    std::vector<Literal> cur;
    enumerate_premises(lits, 0, cur, p.max_premise_length,
                       [&](const std::vector<Literal>& prem) {
      for (const auto& l : prem)
        if (l.attr == concl.attr) return;
      Rule r = make_rule(prem, concl, c);
      if (is_mscr(c, r, p)) rb.rules.push_back(r);
    });
  }
  rb.sort_canonical();
  return rb;
}

Corpus random_corpus(SplitMix64& rng) {
  Corpus c;
  int nattrs = 2 + static_cast<int>(rng.below(4));  // 2..5
  c.schema.arities.assign(static_cast<size_t>(nattrs), 2);
  int nrecs = 4 + static_cast<int>(rng.below(29));  // 4..32
  for (int i = 0; i < nrecs; ++i) {
    ObjectRecord r;
    for (int a = 0; a < nattrs; ++a)
      r.values.push_back(static_cast<int>(rng.below(2)));
    c.records.push_back(std::move(r));
  }
  return c;
}

}  // namespace

TEST_CASE("support counts exact matches") {
  Corpus c = tiny();
  CHECK(support(c, {}) == 4);
  CHECK(support(c, {Literal(0, 1, false)}) == 2);
  CHECK(support(c, {Literal(0, 1, false), Literal(2, 0, false)}) == 0);
}

TEST_CASE("gamma uses Laplace smoothing") {
  Corpus c = tiny();
  Rule empty_prem = make_rule({}, Literal(1, 1, false), c);
  CHECK(gamma(c, empty_prem) == doctest::Approx(0.5));
  Rule a_implies_b = make_rule({Literal(0, 1, false)}, Literal(1, 1, false), c);
  CHECK(gamma(c, a_implies_b) == doctest::Approx(0.75));
  Corpus empty;
  empty.schema = c.schema;
  Rule r = a_implies_b;
  r.n_premise = 0;
  r.n_joint = 0;
  CHECK(r.gamma() == doctest::Approx(0.5));
}

TEST_CASE("gamma comparison is exact rational arithmetic") {
  // (2+1)/(4+2) = 0.5 vs (1+1)/(2+2) = 0.5: equal, neither is less
  CHECK_FALSE(gamma_less(2, 4, 1, 2));
  CHECK_FALSE(gamma_less(1, 2, 2, 4));
  CHECK(gamma_less(1, 2, 3, 4));
}

TEST_CASE("cartwright condition requires every premise literal to help") {
  Corpus c = tiny();
  Rule good = make_rule({Literal(0, 1, false)}, Literal(1, 1, false), c);
  CHECK(cartwright_holds(c, good));  // 0.75 > 0.5
  Rule vacuous = make_rule({}, Literal(1, 1, false), c);
  CHECK(cartwright_holds(c, vacuous));
  // adding C=1 to the premise leaves gamma at 0.75, so C=1 does not help
  Rule padded = make_rule({Literal(0, 1, false), Literal(2, 1, false)},
                          Literal(1, 1, false), c);
  CHECK_FALSE(cartwright_holds(c, padded));
}

TEST_CASE("is_mscr demands support, gamma, cartwright, and maximality") {
  Corpus c = tiny();
  MiningParams p;
  p.min_support = 2;
  p.min_gamma = 0.7;
  p.max_premise_length = 2;
  Rule good = make_rule({Literal(0, 1, false)}, Literal(1, 1, false), c);
  CHECK(is_mscr(c, good, p));
  p.min_support = 3;
  CHECK_FALSE(is_mscr(c, good, p));  // support 2 < 3
}

TEST_CASE("mined rules may mix positive and negative premise literals") {
  Corpus c;
  c.schema.arities = {2, 2, 2};
  // B=1 exactly when A=1 and C != 1
  c.records = {{{1, 1, 0}}, {{1, 1, 0}}, {{1, 0, 1}}, {{1, 0, 1}},
               {{0, 0, 0}}, {{0, 0, 1}}};
  MiningParams p;
  p.min_support = 2;
  p.min_gamma = 0.7;
  p.max_premise_length = 2;
  RuleBase rb = mine_mscr(c, p);
  Rule want = make_rule({Literal(0, 1, false), Literal(2, 1, true)},
                        Literal(1, 1, false), c);
  bool found = false;
  for (const auto& r : rb.rules)
    if (r == want) found = true;
  CHECK(found);
}

TEST_CASE("miner equals the brute-force oracle on the tiny corpus") {
  Corpus c = tiny();
  MiningParams p;
  p.min_support = 2;
  p.min_gamma = 0.7;
  p.max_premise_length = 2;
  RuleBase mined = mine_mscr(c, p);
  RuleBase want = oracle_mine(c, p);
  REQUIRE(mined.rules.size() == want.rules.size());
  for (size_t i = 0; i < mined.rules.size(); ++i) {
    CHECK(mined.rules[i] == want.rules[i]);
    CHECK(mined.rules[i].n_premise == want.rules[i].n_premise);
    CHECK(mined.rules[i].n_joint == want.rules[i].n_joint);
  }
}

TEST_CASE("miner equals the brute-force oracle on random corpora") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    Corpus c = random_corpus(rng);
    MiningParams p;
    p.min_support = 1 + static_cast<int64_t>(rng.below(3));
    p.min_gamma = 0.5 + 0.1 * static_cast<double>(rng.below(4));
    p.max_premise_length = 3;
    RuleBase mined = mine_mscr(c, p);
    RuleBase want = oracle_mine(c, p);
    REQUIRE(mined.rules.size() == want.rules.size());
    for (size_t i = 0; i < mined.rules.size(); ++i)
      CHECK(mined.rules[i] == want.rules[i]);
  }
}

TEST_CASE("single-record corpus mines against the oracle") {
  Corpus c;
  c.schema.arities = {2, 2, 2};
  c.records = {{{1, 0, 1}}, {{1, 0, 1}}, {{1, 0, 1}}};
  MiningParams p;
  p.min_support = 1;
  p.min_gamma = 0.6;
  p.max_premise_length = 2;
  RuleBase mined = mine_mscr(c, p);
  RuleBase want = oracle_mine(c, p);
  REQUIRE(mined.rules.size() == want.rules.size());
  for (size_t i = 0; i < mined.rules.size(); ++i)
    CHECK(mined.rules[i] == want.rules[i]);
}

TEST_CASE("rule bases round-trip byte-identically") {
  Corpus c = tiny();
  MiningParams p;
  p.min_support = 2;
  p.min_gamma = 0.6;
  p.max_premise_length = 2;
  RuleBase rb = mine_mscr(c, p);
  REQUIRE(!rb.rules.empty());
  std::string p1 = "/tmp/mscr-test-rb1.rules";
  std::string p2 = "/tmp/mscr-test-rb2.rules";
  save_rulebase(rb, p1);
  RuleBase back = load_rulebase(p1);
  CHECK(back.schema_hash == rb.schema_hash);
  CHECK(back.params.min_support == rb.params.min_support);
  REQUIRE(back.rules.size() == rb.rules.size());
  for (size_t i = 0; i < rb.rules.size(); ++i) {
    CHECK(back.rules[i] == rb.rules[i]);
    CHECK(back.rules[i].n_premise == rb.rules[i].n_premise);
    CHECK(back.rules[i].n_joint == rb.rules[i].n_joint);
  }
  save_rulebase(back, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("threaded mining matches single-threaded output") {
  Corpus c = gen_glyph_corpus(builtin_letters(), 5, 0.0, 3);
  MiningParams p;
  p.min_support = 3;
  p.min_gamma = 0.7;
  p.max_premise_length = 2;
  RuleBase one = mine_mscr(c, p);
  p.threads = 4;
  RuleBase four = mine_mscr(c, p);
  REQUIRE(one.rules.size() == four.rules.size());
  for (size_t i = 0; i < one.rules.size(); ++i)
    CHECK(one.rules[i] == four.rules[i]);
}
