#include "mscr/corpus_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mscr {

namespace {

std::string format_noise(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", r);
  return buf;
}

void shuffle_records(std::vector<ObjectRecord>& recs, SplitMix64& rng) {
  for (size_t i = recs.size(); i > 1; --i) {
    size_t j = rng.below(i);
    std::swap(recs[i - 1], recs[j]);
  }
}

}  // namespace

Corpus gen_glyph_corpus(const GlyphSet& g, int copies, double noise_rate,
                        uint64_t seed) {
  if (g.patterns.empty()) throw DataError("glyph set is empty");
  g.validate();
  if (copies <= 0) throw DataError("copies must be positive");
  if (noise_rate < 0.0 || noise_rate >= 1.0)
    throw DataError("noise_rate must be in [0,1)");

  Corpus c;
  c.schema = g.schema();
  SplitMix64 rng(seed);
  for (size_t gi = 0; gi < g.patterns.size(); ++gi) {
    for (int k = 0; k < copies; ++k) {
      ObjectRecord r = g.patterns[gi];
      if (noise_rate > 0.0) {
        for (size_t a = 0; a < r.values.size(); ++a) {
          if (rng.unit() < noise_rate) {
            int arity = c.schema.arities[a];
            int nv = static_cast<int>(rng.below(static_cast<uint64_t>(arity - 1)));
            if (nv >= r.values[a]) ++nv;  // different value, uniform
            r.values[a] = nv;
          }
        }
      }
      c.records.push_back(std::move(r));
    }
  }
  shuffle_records(c.records, rng);
  c.provenance.push_back("gen_glyph_corpus glyphs=" +
                         std::to_string(g.patterns.size()) +
                         " copies=" + std::to_string(copies) +
                         " noise=" + format_noise(noise_rate) +
                         " seed=" + std::to_string(seed));
  return c;
}

void save_corpus(const Corpus& c, const std::string& path) {
  c.validate();
  std::ostringstream out;
  out << "mscr-corpus v1\n";
  for (size_t i = 0; i < c.schema.arities.size(); ++i)
    out << (i ? " " : "") << c.schema.arities[i];
  out << "\n";
  for (const auto& p : c.provenance) out << "# provenance: " << p << "\n";
  for (const auto& r : c.records) {
    for (size_t i = 0; i < r.values.size(); ++i)
      out << (i ? " " : "") << r.values[i];
    out << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << out.str();
}

namespace {

struct LineReader {
  std::istream& in;
  std::string path;
  int lineno = 0;
  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++lineno;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(path + ":" + std::to_string(lineno) + ": " + msg);
  }
};

std::vector<int> parse_ints(const std::string& line, LineReader& r) {
  std::istringstream ss(line);
  std::vector<int> vals;
  int v;
  while (ss >> v) vals.push_back(v);
  std::string rest;
  if (ss.clear(), ss >> rest) r.fail("non-numeric token '" + rest + "'");
  return vals;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  LineReader r{f, path};
  std::string line;
  if (!r.next(line) || line != "mscr-corpus v1")
    r.fail("malformed header, expected 'mscr-corpus v1'");
  if (!r.next(line)) r.fail("missing schema line");
  Corpus c;
  c.schema.arities = parse_ints(line, r);
  c.schema.validate();
  while (r.next(line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string prov = "# provenance: ";
      if (line.rfind(prov, 0) == 0)
        c.provenance.push_back(line.substr(prov.size()));
      continue;
    }
    ObjectRecord rec;
    rec.values = parse_ints(line, r);
    if (rec.values.size() != c.schema.arities.size())
      r.fail("row has " + std::to_string(rec.values.size()) + " values, expected " +
             std::to_string(c.schema.arities.size()));
    for (size_t a = 0; a < rec.values.size(); ++a)
      if (rec.values[a] < 0 || rec.values[a] >= c.schema.arities[a])
        r.fail("value " + std::to_string(rec.values[a]) + " out of range for attribute " +
               std::to_string(a));
    c.records.push_back(std::move(rec));
  }
  return c;
}

void save_glyphs(const GlyphSet& g, const std::string& path) {
  g.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << "mscr-corpus v1\n";
  const auto schema = g.schema();
  for (size_t i = 0; i < schema.arities.size(); ++i)
    f << (i ? " " : "") << schema.arities[i];
  f << "\n";
  f << "# grid: " << g.width << " " << g.height << "\n";
  for (size_t gi = 0; gi < g.patterns.size(); ++gi) {
    f << "# glyph: " << g.names[gi] << "\n";
    for (size_t i = 0; i < g.patterns[gi].values.size(); ++i)
      f << (i ? " " : "") << g.patterns[gi].values[i];
    f << "\n";
  }
}

GlyphSet load_glyphs(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  LineReader r{f, path};
  std::string line;
  if (!r.next(line) || line != "mscr-corpus v1")
    r.fail("malformed header, expected 'mscr-corpus v1'");
  if (!r.next(line)) r.fail("missing schema line");
  AttributeSchema schema;
  schema.arities = parse_ints(line, r);
  schema.validate();

  GlyphSet g;
  std::string pending_name;
  while (r.next(line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string grid = "# grid: ";
      const std::string glyph = "# glyph: ";
      if (line.rfind(grid, 0) == 0) {
        std::istringstream ss(line.substr(grid.size()));
        if (!(ss >> g.width >> g.height)) r.fail("malformed grid line");
      } else if (line.rfind(glyph, 0) == 0) {
        pending_name = line.substr(glyph.size());
      }
      continue;
    }
    ObjectRecord rec;
    rec.values = parse_ints(line, r);
    if (rec.values.size() != schema.arities.size())
      r.fail("glyph row has wrong pixel count");
    if (pending_name.empty())
      pending_name = "glyph" + std::to_string(g.patterns.size());
    g.names.push_back(pending_name);
    g.patterns.push_back(std::move(rec));
    pending_name.clear();
  }
  if (g.width <= 0 || g.height <= 0) r.fail("missing grid line");
  g.validate();
  return g;
}

namespace {

GlyphSet from_bitmaps(const char* const* rows, const char* const* names,
                      size_t count) {
  GlyphSet g;
  g.width = 5;
  g.height = 7;
  for (size_t i = 0; i < count; ++i) {
    ObjectRecord rec;
    for (const char* p = rows[i]; *p; ++p)
      if (*p == '0' || *p == '1') rec.values.push_back(*p - '0');
    g.names.emplace_back(names[i]);
    g.patterns.push_back(std::move(rec));
  }
  g.validate();
  return g;
}

// 5x7 pixel font, one string per glyph, rows top to bottom.
const char* kDigitRows[10] = {
    "01110 10001 10011 10101 11001 10001 01110",  // 0
    "00100 01100 00100 00100 00100 00100 01110",  // 1
    "01110 10001 00001 00010 00100 01000 11111",  // 2
    "11111 00010 00100 00010 00001 10001 01110",  // 3
    "00010 00110 01010 10010 11111 00010 00010",  // 4
    "11111 10000 11110 00001 00001 10001 01110",  // 5
    "00110 01000 10000 11110 10001 10001 01110",  // 6
    "11111 00001 00010 00100 01000 01000 01000",  // 7
    "01110 10001 10001 01110 10001 10001 01110",  // 8
    "01110 10001 10001 01111 00001 00010 01100",  // 9
};
const char* kDigitNames[10] = {"0", "1", "2", "3", "4",
                               "5", "6", "7", "8", "9"};

const char* kLetterRows[6] = {
    "01110 10001 10001 11111 10001 10001 10001",  // A
    "11110 10001 10001 11110 10001 10001 11110",  // B
    "01110 10001 10000 10000 10000 10001 01110",  // C
    "11100 10010 10001 10001 10001 10010 11100",  // D
    "11111 10000 10000 11110 10000 10000 11111",  // E
    "11111 10000 10000 11110 10000 10000 10000",  // F
};
const char* kLetterNames[6] = {"A", "B", "C", "D", "E", "F"};

}  // namespace

GlyphSet builtin_digits() { return from_bitmaps(kDigitRows, kDigitNames, 10); }
GlyphSet builtin_letters() { return from_bitmaps(kLetterRows, kLetterNames, 6); }

}  // namespace mscr
