#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace mscr {

// Exit-code mapping in the CLI: usage 1, data 2, divergence 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : DataError {
  using DataError::DataError;
};

uint64_t fnv1a64(const void* data, size_t len,
                 uint64_t seed = 0xcbf29ce484222325ull);
uint64_t fnv1a64(const std::string& s, uint64_t seed = 0xcbf29ce484222325ull);
std::string to_hex(uint64_t v);

struct AttributeSchema {
  std::vector<int> arities;          // one per attribute, each >= 2
  std::vector<std::string> names;    // empty, or one unique name per attribute

  int attribute_count() const { return static_cast<int>(arities.size()); }
  int arity(int attr) const { return arities[static_cast<size_t>(attr)]; }
  void validate() const;
  uint64_t hash() const;

  bool operator==(const AttributeSchema& o) const {
    return arities == o.arities && names == o.names;
  }
};

// Signed attribute-value assertion. Canonical order: (attr, value, neg),
// positive before negative.
struct Literal {
  int attr = 0;
  int value = 0;
  bool neg = false;

  Literal() = default;
  Literal(int a, int v, bool n = false) : attr(a), value(v), neg(n) {}

  Literal complement() const { return Literal(attr, value, !neg); }

  bool valid_under(const AttributeSchema& s) const {
    return attr >= 0 && attr < s.attribute_count() && value >= 0 &&
           value < s.arity(attr);
  }

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.attr == b.attr && a.value == b.value && a.neg == b.neg;
  }
  friend bool operator!=(const Literal& a, const Literal& b) {
    return !(a == b);
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.attr != b.attr) return a.attr < b.attr;
    if (a.value != b.value) return a.value < b.value;
    return a.neg < b.neg;
  }
};

std::string to_string(const Literal& l);

// Consistent literal set: never a literal together with its complement, at
// most one positive literal per attribute. Kept normalized: a negative
// literal entailed by a positive one on the same attribute is dropped.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::initializer_list<Literal> ls);
  explicit FeatureSet(const std::vector<Literal>& ls);

  // Returns false (and leaves the set unchanged) when the literal would
  // contradict a member. Entailed-but-absent literals insert as a no-op.
  bool insert(const Literal& l);
  bool erase(const Literal& l);

  bool contains(const Literal& l) const;
  // Closed-world within an attribute: (a,v,-) is entailed by an explicit
  // member or by any positive (a,w,+) with w != v.
  bool entails(const Literal& l) const;

  const std::vector<Literal>& literals() const { return lits_; }
  size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }

  bool operator==(const FeatureSet& o) const { return lits_ == o.lits_; }
  bool operator!=(const FeatureSet& o) const { return lits_ != o.lits_; }
  bool operator<(const FeatureSet& o) const { return lits_ < o.lits_; }

  uint64_t hash() const;

 private:
  std::vector<Literal> lits_;  // sorted, normalized
  int positive_value(int attr) const;  // -1 when no positive member
};

// Total assignment: exactly one value per schema attribute.
struct ObjectRecord {
  std::vector<int> values;

  bool conforms(const AttributeSchema& s) const;
  FeatureSet to_features() const;

  bool operator==(const ObjectRecord& o) const { return values == o.values; }
  bool operator<(const ObjectRecord& o) const { return values < o.values; }
};

bool satisfies(const ObjectRecord& r, const Literal& l);

struct Corpus {
  AttributeSchema schema;
  std::vector<ObjectRecord> records;
  std::vector<std::string> provenance;  // free-form comment lines

  void validate() const;
};

struct GlyphSet {
  int width = 0;
  int height = 0;
  std::vector<std::string> names;
  std::vector<ObjectRecord> patterns;  // binary pixels, width*height attrs

  AttributeSchema schema() const;
  size_t size() const { return patterns.size(); }
  void validate() const;
};

}  // namespace mscr
