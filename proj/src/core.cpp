#include "mscr/core.hpp"

#include <algorithm>
#include <set>

namespace mscr {

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64(const std::string& s, uint64_t seed) {
  return fnv1a64(s.data(), s.size(), seed);
}

std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

void AttributeSchema::validate() const {
  if (arities.empty()) throw SchemaError("schema has no attributes");
  for (size_t i = 0; i < arities.size(); ++i) {
    if (arities[i] < 2)
      throw SchemaError("attribute " + std::to_string(i) + " has arity " +
                        std::to_string(arities[i]) + " (minimum 2)");
  }
  if (!names.empty()) {
    if (names.size() != arities.size())
      throw SchemaError("name count does not match attribute count");
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second)
        throw SchemaError("duplicate attribute name: " + n);
  }
}

uint64_t AttributeSchema::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (int a : arities) {
    int32_t v = a;
    h = fnv1a64(&v, sizeof v, h);
  }
  return h;
}

std::string to_string(const Literal& l) {
  std::string s = l.neg ? "!" : "";
  s += std::to_string(l.attr);
  s += '-';
  s += std::to_string(l.value);
  return s;
}

FeatureSet::FeatureSet(std::initializer_list<Literal> ls) {
  for (const auto& l : ls)
    if (!insert(l))
      throw DataError("inconsistent literal set: " + to_string(l));
}

FeatureSet::FeatureSet(const std::vector<Literal>& ls) {
  for (const auto& l : ls)
    if (!insert(l))
      throw DataError("inconsistent literal set: " + to_string(l));
}

int FeatureSet::positive_value(int attr) const {
  for (const auto& m : lits_) {
    if (m.attr < attr) continue;
    if (m.attr > attr) break;
    if (!m.neg) return m.value;
  }
  return -1;
}

bool FeatureSet::contains(const Literal& l) const {
  return std::binary_search(lits_.begin(), lits_.end(), l);
}

bool FeatureSet::entails(const Literal& l) const {
  if (!l.neg) return contains(l);
  if (contains(l)) return true;
  int pv = positive_value(l.attr);
  return pv >= 0 && pv != l.value;
}

bool FeatureSet::insert(const Literal& l) {
  if (contains(l)) return true;
  int pv = positive_value(l.attr);
  if (!l.neg) {
    if (pv >= 0) return false;                       // second positive
    if (contains(l.complement())) return false;     // complement pair
    // A new positive subsumes same-attribute negatives on other values.
    lits_.erase(std::remove_if(lits_.begin(), lits_.end(),
                               [&](const Literal& m) {
                                 return m.attr == l.attr && m.neg &&
                                        m.value != l.value;
                               }),
                lits_.end());
    lits_.insert(std::upper_bound(lits_.begin(), lits_.end(), l), l);
    return true;
  }
  if (pv == l.value) return false;  // contradicts the positive member
  if (pv >= 0) return true;         // already entailed, keep normalized
  lits_.insert(std::upper_bound(lits_.begin(), lits_.end(), l), l);
  return true;
}

bool FeatureSet::erase(const Literal& l) {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), l);
  if (it == lits_.end() || *it != l) return false;
  lits_.erase(it);
  return true;
}

uint64_t FeatureSet::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& l : lits_) {
    int32_t buf[3] = {l.attr, l.value, l.neg ? 1 : 0};
    h = fnv1a64(buf, sizeof buf, h);
  }
  return h;
}

bool ObjectRecord::conforms(const AttributeSchema& s) const {
  if (static_cast<int>(values.size()) != s.attribute_count()) return false;
  for (size_t i = 0; i < values.size(); ++i)
    if (values[i] < 0 || values[i] >= s.arities[i]) return false;
  return true;
}

FeatureSet ObjectRecord::to_features() const {
  FeatureSet fs;
  for (size_t a = 0; a < values.size(); ++a)
    fs.insert(Literal(static_cast<int>(a), values[a], false));
  return fs;
}

bool satisfies(const ObjectRecord& r, const Literal& l) {
  bool match = r.values[static_cast<size_t>(l.attr)] == l.value;
  return l.neg ? !match : match;
}

void Corpus::validate() const {
  schema.validate();
  for (size_t i = 0; i < records.size(); ++i)
    if (!records[i].conforms(schema))
      throw SchemaError("record " + std::to_string(i) +
                        " does not conform to schema");
}

AttributeSchema GlyphSet::schema() const {
  AttributeSchema s;
  s.arities.assign(static_cast<size_t>(width * height), 2);
  return s;
}

void GlyphSet::validate() const {
  if (width <= 0 || height <= 0) throw SchemaError("glyph grid is empty");
  if (patterns.empty()) throw DataError("glyph set is empty");
  if (names.size() != patterns.size())
    throw DataError("glyph name count does not match pattern count");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw DataError("duplicate glyph name: " + n);
  const AttributeSchema s = schema();
  for (size_t i = 0; i < patterns.size(); ++i)
    if (!patterns[i].conforms(s))
      throw SchemaError("glyph '" + names[i] + "' has wrong pixel count");
}

}  // namespace mscr
