#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "mscr/corpus_io.hpp"

using namespace mscr;

namespace {

Corpus tiny() {
  Corpus c;
  c.schema.arities = {2, 2, 2};
  c.schema.names = {"A", "B", "C"};
  c.records = {{{1, 1, 1}}, {{1, 1, 1}}, {{0, 0, 1}}, {{0, 0, 0}}};
  return c;
}

std::string tmp_path(const char* name) {
  return std::string("/tmp/mscr-test-") + name;
}

}  // namespace

TEST_CASE("literal complement is a polarity flip and an involution") {
  Literal l(1, 5, false);
  CHECK(l.complement() == Literal(1, 5, true));
  CHECK(Literal(1, 5, true).complement() == l);
  for (int a = 0; a < 3; ++a)
    for (int v = 0; v < 2; ++v)
      for (int n = 0; n < 2; ++n) {
        Literal x(a, v, n != 0);
        CHECK(x.complement().complement() == x);
      }
}

TEST_CASE("record satisfaction including closed-world negation") {
  ObjectRecord r{{1, 0}};
  CHECK(satisfies(r, Literal(0, 1, false)));
  CHECK(satisfies(r, Literal(0, 0, true)));  // A=1 denies A=0
  CHECK_FALSE(satisfies(r, Literal(0, 1, true)));
  CHECK_FALSE(satisfies(r, Literal(1, 1, false)));
}

TEST_CASE("feature set rejects contradictions and entails by exclusion") {
  FeatureSet f;
  CHECK(f.insert(Literal(0, 1, false)));
  CHECK_FALSE(f.insert(Literal(0, 0, false)));  // second positive on attr 0
  CHECK_FALSE(f.insert(Literal(0, 1, true)));   // complement
  CHECK(f.insert(Literal(0, 0, true)));         // already entailed, no-op
  CHECK(f.size() == 1);
  CHECK(f.entails(Literal(0, 0, true)));
  CHECK(f.entails(Literal(0, 1, false)));
  CHECK_FALSE(f.entails(Literal(1, 0, false)));
}

TEST_CASE("one glyph, one copy, no noise reproduces the glyph") {
  GlyphSet g;
  g.width = 2;
  g.height = 1;
  g.names = {"x"};
  g.patterns = {ObjectRecord{{1, 0}}};
  Corpus c = gen_glyph_corpus(g, 1, 0.0, 5);
  REQUIRE(c.records.size() == 1);
  CHECK(c.records[0].values == std::vector<int>{1, 0});
  CHECK(c.schema.arities == std::vector<int>(2, 2));
}

TEST_CASE("noise flips roughly noise_rate of all pixels") {
  // Single-glyph corpus so every record's source pattern is known.
  GlyphSet all = builtin_digits();
  GlyphSet g;
  g.width = all.width;
  g.height = all.height;
  g.names = {all.names[0]};
  g.patterns = {all.patterns[0]};
  const double rate = 0.05;
  Corpus noisy = gen_glyph_corpus(g, 300, rate, 7);
  REQUIRE(noisy.records.size() == 300);
  int flips = 0;
  const int n = 35 * 300;
  for (const auto& r : noisy.records)
    for (size_t j = 0; j < 35; ++j)
      if (r.values[j] != g.patterns[0].values[j]) ++flips;
  double mean = rate * n;
  double sigma = std::sqrt(n * rate * (1 - rate));
  CHECK(std::abs(flips - mean) < 3 * sigma);
}

TEST_CASE("corpus round-trips through its text format") {
  Corpus c = tiny();
  c.provenance = {"unit test"};
  auto path = tmp_path("tiny.corpus");
  save_corpus(c, path);
  Corpus back = load_corpus(path);
  CHECK(back.schema.arities == c.schema.arities);
  REQUIRE(back.records.size() == c.records.size());
  for (size_t i = 0; i < c.records.size(); ++i)
    CHECK(back.records[i].values == c.records[i].values);
  CHECK(back.provenance == c.provenance);
  std::remove(path.c_str());
}

TEST_CASE("digit corpus round-trips with identical provenance") {
  Corpus c = gen_glyph_corpus(builtin_digits(), 30, 0.0, 1);
  CHECK(c.records.size() == 300);
  auto path = tmp_path("digits.corpus");
  save_corpus(c, path);
  Corpus back = load_corpus(path);
  CHECK(back.provenance == c.provenance);
  REQUIRE(back.records.size() == 300);
  for (size_t i = 0; i < 300; ++i)
    CHECK(back.records[i].values == c.records[i].values);
  std::remove(path.c_str());
}

TEST_CASE("value outside the arity reports the offending line") {
  auto path = tmp_path("bad.corpus");
  {
    std::ofstream f(path);
    f << "mscr-corpus v1\n2 2\n0 1\n1 2\n";
  }
  try {
    load_corpus(path);
    FAIL("expected a schema violation");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("glyph sets round-trip") {
  GlyphSet g = builtin_letters();
  auto path = tmp_path("letters.glyphs");
  save_glyphs(g, path);
  GlyphSet back = load_glyphs(path);
  CHECK(back.width == g.width);
  CHECK(back.height == g.height);
  CHECK(back.names == g.names);
  CHECK(back.patterns == g.patterns);
  std::remove(path.c_str());
}

TEST_CASE("corpus generation is seed-deterministic") {
  Corpus a = gen_glyph_corpus(builtin_digits(), 5, 0.1, 99);
  Corpus b = gen_glyph_corpus(builtin_digits(), 5, 0.1, 99);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i)
    CHECK(a.records[i].values == b.records[i].values);
  Corpus c = gen_glyph_corpus(builtin_digits(), 5, 0.1, 100);
  bool same = true;
  for (size_t i = 0; i < a.records.size() && same; ++i)
    same = a.records[i].values == c.records[i].values;
  CHECK_FALSE(same);
}
