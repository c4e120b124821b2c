#include <algorithm>

#include "doctest.h"
#include "mscr/concepts.hpp"
#include "mscr/corpus_io.hpp"

using namespace mscr;

namespace {

// Two independent attribute blocks (0-2 and 3-5). Within a block the values
// always co-occur as one of two patterns; across blocks all four pattern
// combinations appear equally, so no cross-block rule survives Cartwright.
Corpus two_block_corpus() {
  Corpus c;
  c.schema.arities.assign(6, 2);
  const int p[2][3] = {{1, 1, 0}, {0, 0, 1}};
  const int q[2][3] = {{1, 0, 1}, {0, 1, 0}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int copy = 0; copy < 5; ++copy) {
        ObjectRecord r;
        r.values = {p[i][0], p[i][1], p[i][2], q[j][0], q[j][1], q[j][2]};
        c.records.push_back(std::move(r));
      }
  return c;
}

// Two contexts sharing the conclusion attribute 3. Context A (attr2 = 0)
// copies attr0 into attr3; context B (attr2 = 1) copies attr1.
Corpus context_corpus(int which) {  // 0 = A, 1 = B, 2 = union
  Corpus c;
  c.schema.arities.assign(4, 2);
  auto add_context = [&](int marker) {
    for (int a0 = 0; a0 < 2; ++a0)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int copy = 0; copy < 5; ++copy) {
          ObjectRecord r;
          r.values = {a0, a1, marker, marker == 0 ? a0 : a1};
          c.records.push_back(std::move(r));
        }
  };
  if (which == 0 || which == 2) add_context(0);
  if (which == 1 || which == 2) add_context(1);
  return c;
}

MiningParams block_params() {
  MiningParams p;
  p.min_support = 3;
  p.min_gamma = 0.8;
  p.max_premise_length = 3;
  return p;
}

}  // namespace

TEST_CASE("catalog classifies its own prototypes exactly") {
  Corpus c = gen_glyph_corpus(builtin_letters(), 10, 0.0, 4);
  MiningParams mp;
  mp.min_support = 4;
  mp.min_gamma = 0.7;
  mp.max_premise_length = 3;
  RuleBase rb = mine_mscr(c, mp);
  ConceptCatalog cat = build_catalog(rb, c);
  REQUIRE(cat.concepts.size() == 6);
  Predictor pred(rb, c.schema);
  for (const auto& k : cat.concepts) {
    ClassifyResult res = classify(cat, pred, k.prototype);
    REQUIRE(res.concept_id.has_value());
    CHECK(*res.concept_id == k.id);
    CHECK(res.agreement == doctest::Approx(1.0));
  }
}

TEST_CASE("classify reports novel when no catalog prototype matches") {
  ConceptCatalog cat;  // empty catalog, empty rule base
  RuleBase rb;
  AttributeSchema s;
  s.arities = {2, 2};
  rb.schema_hash = s.hash();
  ClassifyResult res = classify(cat, rb, s, FeatureSet{});
  CHECK_FALSE(res.concept_id.has_value());
  CHECK(res.prototype.empty());
}

TEST_CASE("rivalry rejects identical ids") {
  ConceptCatalog cat;
  Concept k;
  k.id = "x";
  cat.concepts.push_back(k);
  RuleBase rb;
  AttributeSchema s;
  s.arities = {2};
  CHECK_THROWS_AS(rivalry(cat, rb, s, "x", "x"), DataError);
}

TEST_CASE("disjoint-block concepts compose instead of competing") {
  Corpus c = two_block_corpus();
  RuleBase rb = mine_mscr(c, block_params());
  REQUIRE(!rb.rules.empty());
  // no rule crosses the block boundary
  for (const auto& r : rb.rules) {
    bool low = r.conclusion.attr < 3;
    for (const auto& l : r.premise) CHECK((l.attr < 3) == low);
  }

  Predictor pred(rb, c.schema);
  ConceptCatalog cat;
  cat.schema_hash = c.schema.hash();
  cat.rulebase_hash = rb.hash();
  const int p[2][3] = {{1, 1, 0}, {0, 0, 1}};
  const int q[2][3] = {{1, 0, 1}, {0, 1, 0}};
  for (int i = 0; i < 2; ++i) {
    FeatureSet block1;
    for (int a = 0; a < 3; ++a) block1.insert(Literal(a, p[i][a], false));
    cat.concepts.push_back(pred.find_fixed_point(block1));
    FeatureSet block2;
    for (int a = 0; a < 3; ++a) block2.insert(Literal(a + 3, q[i][a], false));
    cat.concepts.push_back(pred.find_fixed_point(block2));
  }
  // block-local stimuli are already fixed points
  for (const auto& k : cat.concepts) CHECK(k.prototype.size() == 3);

  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Concept& a = cat.concepts[static_cast<size_t>(2 * i)];
      const Concept& b = cat.concepts[static_cast<size_t>(2 * j + 1)];
      ResolutionReport rep = rivalry(cat, pred, a.id, b.id);
      CHECK(rep.mode == ResolutionMode::Composition);
      for (const auto& l : a.prototype.literals())
        CHECK(rep.outcome.entails(l));
      for (const auto& l : b.prototype.literals())
        CHECK(rep.outcome.entails(l));
    }
}

TEST_CASE("union context rules gain separating premise literals") {
  MiningParams p = block_params();
  RuleBase rb_a = mine_mscr(context_corpus(0), p);
  RuleBase rb_b = mine_mscr(context_corpus(1), p);
  RuleBase rb_u = mine_mscr(context_corpus(2), p);
  ContextReport rep = context_report(rb_a, rb_b, rb_u);
  CHECK(rep.ambiguous_conclusions > 0);
  CHECK(rep.gained == rep.ambiguous_conclusions);
  for (const auto& e : rep.entries)
    if (e.single_rule_count > 0 && e.union_rule_count > 0)
      CHECK(e.gained_literals);
}

TEST_CASE("identical contexts need no extra premise literals") {
  MiningParams p = block_params();
  RuleBase rb_a = mine_mscr(context_corpus(0), p);
  // both contexts and their union are the same corpus
  ContextReport rep = context_report(rb_a, rb_a, rb_a);
  CHECK(rep.gained == 0);
  CHECK(rep.union_only == 0);
}

TEST_CASE("reports serialize to json and text") {
  MiningParams p = block_params();
  RuleBase rb_a = mine_mscr(context_corpus(0), p);
  RuleBase rb_b = mine_mscr(context_corpus(1), p);
  RuleBase rb_u = mine_mscr(context_corpus(2), p);
  ContextReport rep = context_report(rb_a, rb_b, rb_u);
  CHECK(to_json(rep).find("ambiguous") != std::string::npos);
  CHECK_FALSE(to_text(rep).empty());
}
