#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mscr/core.hpp"
#include "mscr/fixpoint.hpp"
#include "mscr/miner.hpp"

namespace mscr {

struct ConceptCatalog {
  uint64_t schema_hash = 0;
  uint64_t rulebase_hash = 0;
  std::vector<Concept> concepts;  // canonical order, unique ids

  const Concept* by_id(const std::string& id) const;
  const Concept* by_prototype(const FeatureSet& p) const;
};

ConceptCatalog build_catalog(const RuleBase& rb, const Corpus& c,
                             const FixpointParams& fp = {});

struct ClassifyResult {
  std::optional<std::string> concept_id;  // empty => novel
  FeatureSet prototype;                   // converged fixed point
  double agreement = 0.0;  // fraction of prototype literals in the stimulus
  double krit = 0.0;
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

// Convergence-based classification; never force-assigns to the nearest
// catalog concept.
ClassifyResult classify(const ConceptCatalog& catalog, const RuleBase& rb,
                        const AttributeSchema& schema,
                        const FeatureSet& stimulus,
                        const FixpointParams& fp = {});
ClassifyResult classify(const ConceptCatalog& catalog, Predictor& p,
                        const FeatureSet& stimulus);

enum class ResolutionMode { Winner, Composition, Unresolved };

struct ResolutionReport {
  std::vector<Literal> stimulus;  // merged pre-repair candidate
  ResolutionMode mode = ResolutionMode::Unresolved;
  std::string outcome_id;  // winner/composition id, or hash of novel outcome
  FeatureSet outcome;
  double krit = 0.0;
  int iterations = 0;
  std::string summary;
};

// Contradictory-stimulus resolution between two catalog concepts: both
// prototypes enter the pre-repair candidate, conflicts included.
ResolutionReport rivalry(const ConceptCatalog& catalog, const RuleBase& rb,
                         const AttributeSchema& schema, const std::string& a,
                         const std::string& b, const FixpointParams& fp = {});
ResolutionReport rivalry(const ConceptCatalog& catalog, Predictor& p,
                         const std::string& a, const std::string& b);

struct ContextConclusionEntry {
  Literal conclusion;
  size_t single_rule_count = 0;  // across both single-context bases
  size_t union_rule_count = 0;
  bool gained_literals = false;  // every union rule strictly extends a
                                 // single-context premise for this conclusion
  std::string example;           // one premise pair, when available
};

struct ContextReport {
  size_t ambiguous_conclusions = 0;  // concluded in both single-context bases
  size_t gained = 0;                 // of those, gained >= 1 premise literal
  size_t union_only = 0;             // union rules without single-context peer
  std::vector<ContextConclusionEntry> entries;
};

// Compares rules mined from two single-context corpora against rules mined
// from their union: conclusions shared by both contexts should require extra
// separating premise literals in the union base.
ContextReport context_report(const RuleBase& rb_a, const RuleBase& rb_b,
                             const RuleBase& rb_union);

std::string to_json(const ResolutionReport& r);
std::string to_json(const ContextReport& r);
std::string to_text(const ResolutionReport& r);
std::string to_text(const ContextReport& r);

}  // namespace mscr
