#include "mscr/concepts.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mscr {

const Concept* ConceptCatalog::by_id(const std::string& id) const {
  for (const auto& c : concepts)
    if (c.id == id) return &c;
  return nullptr;
}

const Concept* ConceptCatalog::by_prototype(const FeatureSet& p) const {
  for (const auto& c : concepts)
    if (c.prototype == p) return &c;
  return nullptr;
}

ConceptCatalog build_catalog(const RuleBase& rb, const Corpus& c,
                             const FixpointParams& fp) {
  ConceptCatalog cat;
  cat.schema_hash = c.schema.hash();
  cat.rulebase_hash = rb.hash();
  cat.concepts = enumerate_concepts(rb, c, fp);
  return cat;
}

ClassifyResult classify(const ConceptCatalog& catalog, const RuleBase& rb,
                        const AttributeSchema& schema,
                        const FeatureSet& stimulus, const FixpointParams& fp) {
  Predictor p(rb, schema, fp);
  return classify(catalog, p, stimulus);
}

ClassifyResult classify(const ConceptCatalog& catalog, Predictor& p,
                        const FeatureSet& stimulus) {
  Concept k = p.find_fixed_point(stimulus);
  ClassifyResult res;
  res.prototype = k.prototype;
  res.krit = k.krit;
  res.iterations = k.iterations;
  res.trace = std::move(k.trace);
  if (const Concept* hit = catalog.by_prototype(res.prototype))
    res.concept_id = hit->id;
  if (!res.prototype.empty()) {
    size_t present = 0;
    for (const auto& l : res.prototype.literals())
      if (stimulus.contains(l)) ++present;
    res.agreement =
        static_cast<double>(present) / static_cast<double>(res.prototype.size());
  }
  return res;
}

namespace {

// Attributes on which the two prototypes assert incompatible literals.
std::set<int> conflicting_attrs(const FeatureSet& a, const FeatureSet& b) {
  std::set<int> out;
  for (const auto& la : a.literals())
    for (const auto& lb : b.literals()) {
      if (la.attr != lb.attr) continue;
      FeatureSet probe{la};
      if (!probe.insert(lb)) out.insert(la.attr);
    }
  return out;
}

FeatureSet part_outside(const FeatureSet& p, const std::set<int>& attrs) {
  FeatureSet out;
  for (const auto& l : p.literals())
    if (!attrs.count(l.attr)) out.insert(l);
  return out;
}

bool contains_all(const FeatureSet& whole, const FeatureSet& part) {
  for (const auto& l : part.literals())
    if (!whole.contains(l)) return false;
  return true;
}

}  // namespace

ResolutionReport rivalry(const ConceptCatalog& catalog, const RuleBase& rb,
                         const AttributeSchema& schema, const std::string& a,
                         const std::string& b, const FixpointParams& fp) {
  Predictor p(rb, schema, fp);
  return rivalry(catalog, p, a, b);
}

ResolutionReport rivalry(const ConceptCatalog& catalog, Predictor& p,
                         const std::string& a, const std::string& b) {
  if (a == b) throw DataError("rivalry requires two distinct concepts");
  const Concept* ca = catalog.by_id(a);
  const Concept* cb = catalog.by_id(b);
  if (!ca) throw DataError("unknown concept id: " + a);
  if (!cb) throw DataError("unknown concept id: " + b);

  ResolutionReport rep;
  rep.stimulus = ca->prototype.literals();
  for (const auto& l : cb->prototype.literals())
    if (std::find(rep.stimulus.begin(), rep.stimulus.end(), l) ==
        rep.stimulus.end())
      rep.stimulus.push_back(l);
  std::sort(rep.stimulus.begin(), rep.stimulus.end());

  FeatureSet repaired = p.phi(rep.stimulus);
  Concept k = p.find_fixed_point(repaired);
  // Each rival's own prototype is a consistent repair of the merged candidate
  // set, so a krit-maximizing resolution must not settle for less: evaluate
  // the two side-coherent repairs (one rival's literals plus whatever fits
  // from the other) and keep the best fixed point. Without this, local ascent
  // from the literal-by-literal repair can drift into a third attractor whose
  // krit is below both rivals.
  for (const Concept* side : {ca, cb}) {
    FeatureSet toward = side->prototype;
    for (const auto& l : rep.stimulus) toward.insert(l);
    Concept ks = p.find_fixed_point(toward);
    if (ks.krit > k.krit + 1e-9 ||
        (ks.krit > k.krit - 1e-9 && ks.prototype < k.prototype))
      k = std::move(ks);
  }
  rep.outcome = k.prototype;
  rep.krit = k.krit;
  rep.iterations = k.iterations;

  if (rep.outcome == ca->prototype || rep.outcome == cb->prototype) {
    rep.mode = ResolutionMode::Winner;
    rep.outcome_id = rep.outcome == ca->prototype ? ca->id : cb->id;
    rep.summary = "winner: " + rep.outcome_id;
    return rep;
  }
  auto conflicts = conflicting_attrs(ca->prototype, cb->prototype);
  FeatureSet na = part_outside(ca->prototype, conflicts);
  FeatureSet nb = part_outside(cb->prototype, conflicts);
  if (contains_all(rep.outcome, na) && contains_all(rep.outcome, nb)) {
    rep.mode = ResolutionMode::Composition;
    rep.outcome_id = catalog.by_prototype(rep.outcome)
                         ? catalog.by_prototype(rep.outcome)->id
                         : to_hex(rep.outcome.hash());
    rep.summary = "composition: " + rep.outcome_id;
    return rep;
  }
  rep.mode = ResolutionMode::Unresolved;
  rep.outcome_id = to_hex(rep.outcome.hash());
  rep.summary = "unresolved: " + rep.outcome_id;
  return rep;
}

namespace {

using PremisesByConclusion = std::map<Literal, std::vector<std::vector<Literal>>>;

PremisesByConclusion index_conclusions(const RuleBase& rb) {
  PremisesByConclusion m;
  for (const auto& r : rb.rules) m[r.conclusion].push_back(r.premise);
  return m;
}

bool strict_superset(const std::vector<Literal>& big,
                     const std::vector<Literal>& small) {
  if (big.size() <= small.size()) return false;
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::string premise_text(const std::vector<Literal>& p) {
  std::string s = "{";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += " & ";
    s += to_string(p[i]);
  }
  return s + "}";
}

}  // namespace

ContextReport context_report(const RuleBase& rb_a, const RuleBase& rb_b,
                             const RuleBase& rb_union) {
  if (rb_a.schema_hash != rb_b.schema_hash ||
      rb_a.schema_hash != rb_union.schema_hash)
    throw SchemaError("context rule bases were mined over different schemas");

  auto ca = index_conclusions(rb_a);
  auto cb = index_conclusions(rb_b);
  auto cu = index_conclusions(rb_union);

  ContextReport rep;
  for (const auto& [concl, union_premises] : cu) {
    bool in_a = ca.count(concl) > 0, in_b = cb.count(concl) > 0;
    if (!in_a && !in_b) rep.union_only += union_premises.size();
  }

  std::set<Literal> ambiguous;
  for (const auto& [concl, ps] : ca)
    if (cb.count(concl)) ambiguous.insert(concl);

  for (const auto& concl : ambiguous) {
    ContextConclusionEntry e;
    e.conclusion = concl;
    e.single_rule_count = ca[concl].size() + cb[concl].size();
    auto it = cu.find(concl);
    e.union_rule_count = it == cu.end() ? 0 : it->second.size();
    e.gained_literals = e.union_rule_count > 0;
    if (it != cu.end()) {
      for (const auto& up : it->second) {
        bool extends = false;
        for (const auto* single : {&ca[concl], &cb[concl]}) {
          for (const auto& sp : *single)
            if (strict_superset(up, sp)) {
              extends = true;
              if (e.example.empty())
                e.example = premise_text(up) + " extends " + premise_text(sp) +
                            " => " + to_string(concl);
              break;
            }
          if (extends) break;
        }
        if (!extends) {
          e.gained_literals = false;
          break;
        }
      }
    }
    rep.entries.push_back(std::move(e));
  }
  rep.ambiguous_conclusions = rep.entries.size();
  for (const auto& e : rep.entries)
    if (e.gained_literals) ++rep.gained;
  return rep;
}

namespace {
nlohmann::json literal_to_json(const Literal& l) {
  return {{"attr", l.attr}, {"val", l.value}, {"neg", l.neg}};
}
const char* mode_name(ResolutionMode m) {
  switch (m) {
    case ResolutionMode::Winner: return "winner";
    case ResolutionMode::Composition: return "composition";
    default: return "unresolved";
  }
}
}  // namespace

std::string to_json(const ResolutionReport& r) {
  nlohmann::json j;
  j["mode"] = mode_name(r.mode);
  j["outcome_id"] = r.outcome_id;
  j["krit"] = r.krit;
  j["iterations"] = r.iterations;
  j["stimulus"] = nlohmann::json::array();
  for (const auto& l : r.stimulus) j["stimulus"].push_back(literal_to_json(l));
  j["outcome"] = nlohmann::json::array();
  for (const auto& l : r.outcome.literals())
    j["outcome"].push_back(literal_to_json(l));
  return j.dump();
}

std::string to_json(const ContextReport& r) {
  nlohmann::json j;
  j["ambiguous_conclusions"] = r.ambiguous_conclusions;
  j["gained"] = r.gained;
  j["union_only_rules"] = r.union_only;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json je;
    je["conclusion"] = literal_to_json(e.conclusion);
    je["single_rule_count"] = e.single_rule_count;
    je["union_rule_count"] = e.union_rule_count;
    je["gained_literals"] = e.gained_literals;
    if (!e.example.empty()) je["example"] = e.example;
    j["entries"].push_back(std::move(je));
  }
  return j.dump();
}

std::string to_text(const ResolutionReport& r) {
  std::ostringstream s;
  s << "mode: " << mode_name(r.mode) << "\noutcome: " << r.outcome_id
    << "\nkrit: " << r.krit << "\niterations: " << r.iterations << "\n";
  s << "outcome literals:";
  for (const auto& l : r.outcome.literals()) s << " " << to_string(l);
  s << "\n";
  return s.str();
}

std::string to_text(const ContextReport& r) {
  std::ostringstream s;
  s << "cross-context-ambiguous conclusions: " << r.ambiguous_conclusions
    << "\ngained additional premise literals: " << r.gained
    << "\nunion-only rules: " << r.union_only << "\n";
  for (const auto& e : r.entries) {
    s << "  " << to_string(e.conclusion) << ": single=" << e.single_rule_count
      << " union=" << e.union_rule_count
      << (e.gained_literals ? " gained" : " not-gained");
    if (!e.example.empty()) s << "  e.g. " << e.example;
    s << "\n";
  }
  return s.str();
}

}  // namespace mscr
