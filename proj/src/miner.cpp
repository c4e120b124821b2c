#include "mscr/miner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mscr {

void Rule::validate(const AttributeSchema& s) const {
  if (!conclusion.valid_under(s)) throw SchemaError("conclusion out of schema");
  FeatureSet fs;
  for (const auto& l : premise) {
    if (!l.valid_under(s)) throw SchemaError("premise literal out of schema");
    if (l.attr == conclusion.attr)
      throw DataError("conclusion attribute occurs in premise");
    if (!fs.insert(l)) throw DataError("inconsistent premise");
  }
  if (!std::is_sorted(premise.begin(), premise.end()))
    throw DataError("premise not in canonical order");
  if (n_joint < 0 || n_joint > n_premise)
    throw DataError("rule counts out of order");
}

void MiningParams::validate() const {
  if (max_premise_length < 1) throw DataError("max_premise_length must be positive");
  if (min_support < 1) throw DataError("min_support must be positive");
  if (min_gamma <= 0.0 || min_gamma >= 1.0)
    throw DataError("min_gamma must be in (0,1)");
  if (beam_width < 0) throw DataError("beam_width must be positive or 0");
  if (threads < 1) throw DataError("threads must be positive");
}

bool RuleBase::canonical_less(const Rule& a, const Rule& b) {
  if (a.conclusion != b.conclusion) return a.conclusion < b.conclusion;
  if (a.premise.size() != b.premise.size())
    return a.premise.size() < b.premise.size();
  return a.premise < b.premise;
}

void RuleBase::sort_canonical() {
  std::sort(rules.begin(), rules.end(), canonical_less);
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
}

uint64_t RuleBase::hash() const {
  uint64_t h = schema_hash;
  for (const auto& r : rules) {
    for (const auto& l : r.premise) {
      int32_t buf[3] = {l.attr, l.value, l.neg};
      h = fnv1a64(buf, sizeof buf, h);
    }
    int64_t buf[5] = {r.conclusion.attr, r.conclusion.value, r.conclusion.neg,
                      r.n_premise, r.n_joint};
    h = fnv1a64(buf, sizeof buf, h);
  }
  return h;
}

int64_t support(const Corpus& c, const std::vector<Literal>& conj) {
  int64_t n = 0;
  for (const auto& rec : c.records) {
    bool all = true;
    for (const auto& l : conj)
      if (!satisfies(rec, l)) {
        all = false;
        break;
      }
    if (all) ++n;
  }
  return n;
}

namespace {

// Counts by direct corpus scan; the mining path below recomputes these with
// grouped bitsets, so this stays usable as an independent audit.
void rule_counts(const Corpus& c, const Rule& r, int64_t& np, int64_t& nj) {
  np = nj = 0;
  for (const auto& rec : c.records) {
    bool all = true;
    for (const auto& l : r.premise)
      if (!satisfies(rec, l)) {
        all = false;
        break;
      }
    if (!all) continue;
    ++np;
    if (satisfies(rec, r.conclusion)) ++nj;
  }
}

bool premise_has_positive_on(const std::vector<Literal>& premise, int attr) {
  for (const auto& l : premise)
    if (l.attr == attr && !l.neg) return true;
  return false;
}

bool in_premise(const std::vector<Literal>& premise, const Literal& l) {
  return std::binary_search(premise.begin(), premise.end(), l);
}

std::vector<Literal> all_literals(const AttributeSchema& s) {
  std::vector<Literal> ls;
  for (int a = 0; a < s.attribute_count(); ++a)
    for (int v = 0; v < s.arity(a); ++v) {
      ls.emplace_back(a, v, false);
      ls.emplace_back(a, v, true);
    }
  return ls;
}

bool meets_min_gamma(int64_t nj, int64_t np, double min_gamma) {
  return static_cast<double>(nj + 1) >= min_gamma * static_cast<double>(np + 2);
}

// True when some superset of r.premise (any length, support >= min_support)
// has strictly greater gamma. Desk-scale only.
bool global_extension_improves(const Corpus& c, const Rule& r,
                               const MiningParams& p,
                               const std::vector<Literal>& lits, size_t from,
                               Rule& work, int64_t base_nj, int64_t base_np) {
  for (size_t i = from; i < lits.size(); ++i) {
    const Literal& l = lits[i];
    if (l.attr == r.conclusion.attr) continue;
    if (premise_has_positive_on(work.premise, l.attr) && !l.neg) continue;
    if (in_premise(work.premise, l)) continue;
    FeatureSet fs(work.premise);
    if (!fs.insert(l) || fs.size() != work.premise.size() + 1) continue;
    Rule ext;
    ext.premise = fs.literals();
    ext.conclusion = r.conclusion;
    int64_t np, nj;
    rule_counts(c, ext, np, nj);
    if (np < p.min_support) continue;
    if (gamma_less(base_nj, base_np, nj, np)) return true;
    std::swap(work.premise, ext.premise);
    bool improves =
        global_extension_improves(c, r, p, lits, i + 1, work, base_nj, base_np);
    std::swap(work.premise, ext.premise);
    if (improves) return true;
  }
  return false;
}

}  // namespace

double gamma(const Corpus& c, const Rule& r) {
  int64_t np, nj;
  rule_counts(c, r, np, nj);
  return static_cast<double>(nj + 1) / static_cast<double>(np + 2);
}

bool cartwright_holds(const Corpus& c, const Rule& r) {
  if (r.premise.empty()) return true;
  int64_t np, nj;
  rule_counts(c, r, np, nj);
  for (size_t i = 0; i < r.premise.size(); ++i) {
    Rule sub = r;
    sub.premise.erase(sub.premise.begin() + static_cast<long>(i));
    int64_t snp, snj;
    rule_counts(c, sub, snp, snj);
    if (!gamma_less(snj, snp, nj, np)) return false;
  }
  return true;
}

bool is_mscr(const Corpus& c, const Rule& r, const MiningParams& p) {
  r.validate(c.schema);
  int64_t np, nj;
  rule_counts(c, r, np, nj);
  if (np < p.min_support) return false;
  if (!meets_min_gamma(nj, np, p.min_gamma)) return false;
  if (!cartwright_holds(c, r)) return false;

  const auto lits = all_literals(c.schema);
  if (p.maximality == MaximalityMode::Global) {
    Rule work = r;
    return !global_extension_improves(c, r, p, lits, 0, work, nj, np);
  }
  for (const auto& l : lits) {
    if (l.attr == r.conclusion.attr) continue;
    if (premise_has_positive_on(r.premise, l.attr) && !l.neg) continue;
    if (in_premise(r.premise, l)) continue;
    Rule ext = r;
    ext.premise.insert(
        std::upper_bound(ext.premise.begin(), ext.premise.end(), l), l);
    int64_t enp, enj;
    rule_counts(c, ext, enp, enj);
    if (enp >= p.min_support && gamma_less(nj, np, enj, enp)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Mining. Records are grouped by identical assignment; every conjunction is a
// bitmask over groups, so support counting is a handful of word operations.
// The refinement tree enumerates consistent premises in canonical literal
// order (each set visited once), pruned by support and by redundant literals
// (a literal that leaves the satisfying record set unchanged can never pass a
// Cartwright check, in this premise or any superset of it).
// ---------------------------------------------------------------------------

namespace {

struct GroupedCorpus {
  const Corpus* corpus;
  std::vector<ObjectRecord> groups;
  std::vector<int64_t> weights;
  size_t nwords;
  std::vector<uint64_t> lit_masks;  // lid * nwords
  std::vector<Literal> lits;
  int64_t total = 0;

  explicit GroupedCorpus(const Corpus& c) : corpus(&c) {
    std::map<ObjectRecord, int64_t> by_assignment;
    for (const auto& r : c.records) ++by_assignment[r];
    for (auto& [rec, w] : by_assignment) {
      groups.push_back(rec);
      weights.push_back(w);
      total += w;
    }
    nwords = (groups.size() + 63) / 64;
    lits = all_literals(c.schema);
    lit_masks.assign(lits.size() * nwords, 0);
    for (size_t li = 0; li < lits.size(); ++li)
      for (size_t g = 0; g < groups.size(); ++g)
        if (satisfies(groups[g], lits[li]))
          lit_masks[li * nwords + g / 64] |= 1ull << (g % 64);
  }

  const uint64_t* mask_of(size_t lid) const { return &lit_masks[lid * nwords]; }

  int64_t weight_of(const uint64_t* mask) const {
    int64_t w = 0;
    for (size_t i = 0; i < nwords; ++i) {
      uint64_t m = mask[i];
      while (m) {
        w += weights[i * 64 + static_cast<size_t>(__builtin_ctzll(m))];
        m &= m - 1;
      }
    }
    return w;
  }

  int64_t weight_of_and(const uint64_t* a, const uint64_t* b) const {
    int64_t w = 0;
    for (size_t i = 0; i < nwords; ++i) {
      uint64_t m = a[i] & b[i];
      while (m) {
        w += weights[i * 64 + static_cast<size_t>(__builtin_ctzll(m))];
        m &= m - 1;
      }
    }
    return w;
  }

  static bool masks_equal(const uint64_t* a, const uint64_t* b, size_t n) {
    for (size_t i = 0; i < n; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }
};

class ConclusionMiner {
 public:
  ConclusionMiner(const GroupedCorpus& gc, const MiningParams& p, size_t cid)
      : gc_(gc), p_(p), cid_(cid), cattr_(gc.lits[cid].attr) {
    cmask_ = gc_.mask_of(cid_);
    scratch_.resize(gc_.nwords * (static_cast<size_t>(p.max_premise_length) + 2));
  }

  std::vector<Rule> run() {
    std::vector<uint64_t> root(gc_.nwords, 0);
    for (size_t g = 0; g < gc_.groups.size(); ++g)
      root[g / 64] |= 1ull << (g % 64);
    if (p_.beam_width > 0)
      beam_search(root);
    else
      dfs(root.data(), 0);
    return std::move(out_);
  }

 private:
  struct Node {
    std::vector<size_t> premise;
    std::vector<uint64_t> mask;
    int64_t support;
  };

  void consider_emit(const uint64_t* mask, int64_t np) {
    if (np < p_.min_support) return;
    int64_t nj = gc_.weight_of_and(mask, cmask_);
    if (!meets_min_gamma(nj, np, p_.min_gamma)) return;
    if (!cartwright(mask, nj, np)) return;
    if (!maximal(mask, nj, np)) return;
    Rule r;
    for (size_t lid : premise_) r.premise.push_back(gc_.lits[lid]);
    r.conclusion = gc_.lits[cid_];
    r.n_premise = np;
    r.n_joint = nj;
    out_.push_back(std::move(r));
  }

  bool cartwright(const uint64_t* mask, int64_t nj, int64_t np) {
    (void)mask;
    const size_t k = premise_.size();
    uint64_t* sub = scratch_.data() + gc_.nwords * (static_cast<size_t>(p_.max_premise_length) + 1);
    for (size_t skip = 0; skip < k; ++skip) {
      for (size_t w = 0; w < gc_.nwords; ++w) sub[w] = ~0ull;
      for (size_t i = 0; i < k; ++i) {
        if (i == skip) continue;
        const uint64_t* lm = gc_.mask_of(premise_[i]);
        for (size_t w = 0; w < gc_.nwords; ++w) sub[w] &= lm[w];
      }
      // Mask off bits beyond the last group.
      size_t ng = gc_.groups.size();
      if (ng % 64) sub[gc_.nwords - 1] &= (1ull << (ng % 64)) - 1;
      int64_t snp = gc_.weight_of(sub);
      int64_t snj = gc_.weight_of_and(sub, cmask_);
      if (!gamma_less(snj, snp, nj, np)) return false;
    }
    return true;
  }

  bool maximal(const uint64_t* mask, int64_t nj, int64_t np) {
    if (p_.maximality == MaximalityMode::Global)
      return global_maximal(mask, nj, np, 0);
    for (size_t lid = 0; lid < gc_.lits.size(); ++lid) {
      const Literal& l = gc_.lits[lid];
      if (l.attr == cattr_) continue;
      if (positive_on_attr_[static_cast<size_t>(l.attr)] && !l.neg) continue;
      if (std::binary_search(premise_.begin(), premise_.end(), lid)) continue;
      int64_t enp = gc_.weight_of_and(mask, gc_.mask_of(lid));
      if (enp < p_.min_support) continue;
      // gamma of the extension
      uint64_t* ext = scratch_.data() + gc_.nwords * static_cast<size_t>(p_.max_premise_length);
      const uint64_t* lm = gc_.mask_of(lid);
      for (size_t w = 0; w < gc_.nwords; ++w) ext[w] = mask[w] & lm[w];
      int64_t enj = gc_.weight_of_and(ext, cmask_);
      if (gamma_less(nj, np, enj, enp)) return false;
    }
    return true;
  }

  bool global_maximal(const uint64_t* mask, int64_t base_nj, int64_t base_np,
                      size_t from) {
    for (size_t lid = from; lid < gc_.lits.size(); ++lid) {
      const Literal& l = gc_.lits[lid];
      if (l.attr == cattr_) continue;
      if (positive_on_attr_[static_cast<size_t>(l.attr)] && !l.neg) continue;
      if (std::binary_search(premise_.begin(), premise_.end(), lid)) continue;
      std::vector<uint64_t> ext(gc_.nwords);
      const uint64_t* lm = gc_.mask_of(lid);
      for (size_t w = 0; w < gc_.nwords; ++w) ext[w] = mask[w] & lm[w];
      int64_t enp = gc_.weight_of(ext.data());
      if (enp < p_.min_support) continue;
      int64_t enj = gc_.weight_of_and(ext.data(), cmask_);
      if (gamma_less(base_nj, base_np, enj, enp)) return false;
      bool was_pos = positive_on_attr_[static_cast<size_t>(l.attr)];
      if (!l.neg) positive_on_attr_[static_cast<size_t>(l.attr)] = true;
      bool ok = global_maximal(ext.data(), base_nj, base_np, lid + 1);
      positive_on_attr_[static_cast<size_t>(l.attr)] = was_pos;
      if (!ok) return false;
    }
    return true;
  }

  bool child_allowed(const Literal& l) const {
    if (l.attr == cattr_) return false;
    if (positive_on_attr_[static_cast<size_t>(l.attr)] && !l.neg) return false;
    // complement of an existing premise literal
    for (size_t lid : premise_) {
      const Literal& m = gc_.lits[lid];
      if (m.attr == l.attr && m.value == l.value && m.neg != l.neg) return false;
      if (!l.neg && m.attr == l.attr && m.neg && m.value == l.value) return false;
    }
    return true;
  }

  void dfs(const uint64_t* mask, size_t depth) {
    if (positive_on_attr_.empty())
      positive_on_attr_.assign(
          static_cast<size_t>(gc_.corpus->schema.attribute_count()), 0);
    int64_t np = gc_.weight_of(mask);
    consider_emit(mask, np);
    if (depth == static_cast<size_t>(p_.max_premise_length)) return;
    uint64_t* child = scratch_.data() + gc_.nwords * depth;
    size_t first = premise_.empty() ? 0 : premise_.back() + 1;
    for (size_t lid = first; lid < gc_.lits.size(); ++lid) {
      const Literal& l = gc_.lits[lid];
      if (!child_allowed(l)) continue;
      const uint64_t* lm = gc_.mask_of(lid);
      bool same = true, any = false;
      for (size_t w = 0; w < gc_.nwords; ++w) {
        child[w] = mask[w] & lm[w];
        same = same && child[w] == mask[w];
        any = any || child[w] != 0;
      }
      if (same) continue;  // redundant literal, prune whole subtree
      if (!any) continue;
      if (gc_.weight_of(child) < p_.min_support) continue;
      premise_.push_back(lid);
      bool was = positive_on_attr_[static_cast<size_t>(l.attr)];
      if (!l.neg) positive_on_attr_[static_cast<size_t>(l.attr)] = true;
      dfs(child, depth + 1);
      positive_on_attr_[static_cast<size_t>(l.attr)] = was;
      premise_.pop_back();
    }
  }

  // Breadth-limited variant: per depth keep the beam_width premises with the
  // highest gamma (ties broken canonically). Output may be incomplete.
  void beam_search(const std::vector<uint64_t>& root) {
    positive_on_attr_.assign(
        static_cast<size_t>(gc_.corpus->schema.attribute_count()), 0);
    std::vector<Node> frontier;
    frontier.push_back({{}, root, gc_.weight_of(root.data())});
    for (int depth = 0; depth <= p_.max_premise_length; ++depth) {
      for (const auto& n : frontier) {
        load_node(n);
        consider_emit(n.mask.data(), n.support);
      }
      if (depth == p_.max_premise_length) break;
      std::vector<Node> next;
      for (const auto& n : frontier) {
        load_node(n);
        size_t first = n.premise.empty() ? 0 : n.premise.back() + 1;
        for (size_t lid = first; lid < gc_.lits.size(); ++lid) {
          if (!child_allowed(gc_.lits[lid])) continue;
          std::vector<uint64_t> cm(gc_.nwords);
          const uint64_t* lm = gc_.mask_of(lid);
          bool same = true;
          for (size_t w = 0; w < gc_.nwords; ++w) {
            cm[w] = n.mask[w] & lm[w];
            same = same && cm[w] == n.mask[w];
          }
          if (same) continue;
          int64_t sup = gc_.weight_of(cm.data());
          if (sup < p_.min_support) continue;
          Node c;
          c.premise = n.premise;
          c.premise.push_back(lid);
          c.mask = std::move(cm);
          c.support = sup;
          next.push_back(std::move(c));
        }
      }
      auto gamma_key = [&](const Node& n) {
        return std::pair<int64_t, int64_t>(
            gc_.weight_of_and(n.mask.data(), cmask_), n.support);
      };
      std::sort(next.begin(), next.end(), [&](const Node& a, const Node& b) {
        auto [ja, pa] = gamma_key(a);
        auto [jb, pb] = gamma_key(b);
        if (gamma_less(jb, pb, ja, pa)) return true;
        if (gamma_less(ja, pa, jb, pb)) return false;
        return a.premise < b.premise;
      });
      if (static_cast<int64_t>(next.size()) > p_.beam_width)
        next.resize(static_cast<size_t>(p_.beam_width));
      frontier = std::move(next);
      if (frontier.empty()) break;
    }
  }

  void load_node(const Node& n) {
    premise_ = n.premise;
    std::fill(positive_on_attr_.begin(), positive_on_attr_.end(), 0);
    for (size_t lid : premise_)
      if (!gc_.lits[lid].neg)
        positive_on_attr_[static_cast<size_t>(gc_.lits[lid].attr)] = 1;
  }

  const GroupedCorpus& gc_;
  const MiningParams& p_;
  size_t cid_;
  int cattr_;
  const uint64_t* cmask_;
  std::vector<size_t> premise_;
  std::vector<uint8_t> positive_on_attr_;
  std::vector<uint64_t> scratch_;
  std::vector<Rule> out_;
};

std::vector<Rule> mine_conclusions(const GroupedCorpus& gc,
                                   const MiningParams& p, size_t begin,
                                   size_t end) {
  std::vector<Rule> out;
  for (size_t cid = begin; cid < end; ++cid) {
    ConclusionMiner m(gc, p, cid);
    auto rules = m.run();
    out.insert(out.end(), std::make_move_iterator(rules.begin()),
               std::make_move_iterator(rules.end()));
  }
  return out;
}

}  // namespace

RuleBase mine_mscr(const Corpus& c, const MiningParams& p) {
  p.validate();
  c.validate();
  if (c.records.empty()) throw DataError("corpus has no records");

  GroupedCorpus gc(c);
  RuleBase rb;
  rb.schema_hash = c.schema.hash();
  rb.params = p;

  const size_t nlits = gc.lits.size();
  if (p.threads <= 1) {
    rb.rules = mine_conclusions(gc, p, 0, nlits);
  } else {
    size_t nthreads = std::min<size_t>(static_cast<size_t>(p.threads), nlits);
    std::vector<std::future<std::vector<Rule>>> futs;
    size_t chunk = (nlits + nthreads - 1) / nthreads;
    for (size_t t = 0; t < nthreads; ++t) {
      size_t b = t * chunk, e = std::min(nlits, b + chunk);
      if (b >= e) break;
      futs.push_back(std::async(std::launch::async, mine_conclusions,
                                std::cref(gc), std::cref(p), b, e));
    }
    for (auto& f : futs) {
      auto part = f.get();
      rb.rules.insert(rb.rules.end(), std::make_move_iterator(part.begin()),
                      std::make_move_iterator(part.end()));
    }
  }
  rb.sort_canonical();
  return rb;
}

// ---------------------------------------------------------------------------
// Persistence: one JSON object per line, fixed field order, gamma printed
// with 9 significant digits so identical inputs give identical bytes.
// ---------------------------------------------------------------------------

namespace {

std::string literal_json(const Literal& l) {
  std::ostringstream s;
  s << "{\"attr\":" << l.attr << ",\"val\":" << l.value << ",\"neg\":"
    << (l.neg ? "true" : "false") << "}";
  return s.str();
}

Literal literal_from_json(const nlohmann::json& j) {
  return Literal(j.at("attr").get<int>(), j.at("val").get<int>(),
                 j.at("neg").get<bool>());
}

std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void save_rulebase(const RuleBase& rb, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << "{\"format\":\"mscr-rules v1\",\"schema_hash\":\"" << to_hex(rb.schema_hash)
    << "\",\"params\":{\"max_premise_length\":" << rb.params.max_premise_length
    << ",\"min_support\":" << rb.params.min_support
    << ",\"min_gamma\":" << format_sig9(rb.params.min_gamma)
    << ",\"beam_width\":" << rb.params.beam_width << ",\"maximality\":\""
    << (rb.params.maximality == MaximalityMode::Local ? "local" : "global")
    << "\"}}\n";
  for (const auto& r : rb.rules) {
    f << "{\"premise\":[";
    for (size_t i = 0; i < r.premise.size(); ++i)
      f << (i ? "," : "") << literal_json(r.premise[i]);
    f << "],\"conclusion\":" << literal_json(r.conclusion)
      << ",\"n_premise\":" << r.n_premise << ",\"n_joint\":" << r.n_joint
      << ",\"gamma\":" << format_sig9(r.gamma()) << "}\n";
  }
}

RuleBase load_rulebase(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": empty rule base file");
  RuleBase rb;
  try {
    auto h = nlohmann::json::parse(line);
    if (h.at("format").get<std::string>() != "mscr-rules v1")
      throw DataError(path + ": unknown format");
    rb.schema_hash = std::stoull(h.at("schema_hash").get<std::string>(), nullptr, 16);
    const auto& p = h.at("params");
    rb.params.max_premise_length = p.at("max_premise_length").get<int>();
    rb.params.min_support = p.at("min_support").get<int64_t>();
    rb.params.min_gamma = p.at("min_gamma").get<double>();
    rb.params.beam_width = p.at("beam_width").get<int64_t>();
    rb.params.maximality = p.at("maximality").get<std::string>() == "global"
                               ? MaximalityMode::Global
                               : MaximalityMode::Local;
    int lineno = 1;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      Rule r;
      for (const auto& lj : j.at("premise")) r.premise.push_back(literal_from_json(lj));
      r.conclusion = literal_from_json(j.at("conclusion"));
      r.n_premise = j.at("n_premise").get<int64_t>();
      r.n_joint = j.at("n_joint").get<int64_t>();
      rb.rules.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return rb;
}

}  // namespace mscr
