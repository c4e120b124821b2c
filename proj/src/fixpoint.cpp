#include "mscr/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mscr {

double rule_weight(const Rule& r, double clamp) {
  double w = std::log(static_cast<double>(r.n_joint + 1) /
                      static_cast<double>(r.n_premise - r.n_joint + 1));
  return std::clamp(w, -clamp, clamp);
}

std::vector<size_t> fired_rules(const RuleBase& rb, const FeatureSet& x) {
  std::vector<size_t> out;
  for (size_t i = 0; i < rb.rules.size(); ++i) {
    const Rule& r = rb.rules[i];
    bool all = true;
    for (const auto& l : r.premise)
      if (!x.entails(l)) {
        all = false;
        break;
      }
    if (all) out.push_back(i);
  }
  return out;
}

double krit(const RuleBase& rb, const FeatureSet& x) {
  double total = 0.0;
  for (const auto& r : rb.rules) {
    bool all = true;
    for (const auto& l : r.premise)
      if (!x.entails(l)) {
        all = false;
        break;
      }
    if (!all) continue;
    int s = (x.entails(r.conclusion) ? 1 : 0) -
            (x.entails(r.conclusion.complement()) ? 1 : 0);
    if (s) total += rule_weight(r) * s;
  }
  return total;
}

namespace {

constexpr double kEps = 1e-12;

// Incremental krit evaluator over a possibly inconsistent literal multiset.
// Each rule keeps a count of unsatisfied premise literals; flipping the
// entailment of one literal only touches the rules that mention it, via a
// flattened premise index.
class KritEngine {
 public:
  KritEngine(const RuleBase& rb, const std::vector<Literal>& seed_bounds,
             double clamp)
      : rb_(rb) {
    int nattrs = 0;
    auto grow = [&](const Literal& l) {
      nattrs = std::max(nattrs, l.attr + 1);
    };
    for (const auto& r : rb.rules) {
      for (const auto& l : r.premise) grow(l);
      grow(r.conclusion);
    }
    for (const auto& l : seed_bounds) grow(l);
    std::vector<int> arity(static_cast<size_t>(nattrs), 1);
    auto grow_val = [&](const Literal& l) {
      arity[static_cast<size_t>(l.attr)] =
          std::max(arity[static_cast<size_t>(l.attr)], l.value + 1);
    };
    for (const auto& r : rb.rules) {
      for (const auto& l : r.premise) grow_val(l);
      grow_val(r.conclusion);
    }
    for (const auto& l : seed_bounds) grow_val(l);

    val_base_.assign(static_cast<size_t>(nattrs) + 1, 0);
    for (int a = 0; a < nattrs; ++a)
      val_base_[static_cast<size_t>(a) + 1] =
          val_base_[static_cast<size_t>(a)] + arity[static_cast<size_t>(a)];
    nvals_ = val_base_.back();
    size_t nlids = static_cast<size_t>(nvals_) * 2;
    size_t nrules = rb.rules.size();

    w_.resize(nrules);
    plen_.resize(nrules);
    conc_lid_.resize(nrules);
    prem_start_.assign(nrules + 1, 0);
    for (size_t i = 0; i < nrules; ++i) {
      w_[i] = rule_weight(rb.rules[i], clamp);
      plen_[i] = static_cast<int32_t>(rb.rules[i].premise.size());
      conc_lid_[i] = static_cast<int32_t>(lid(rb.rules[i].conclusion));
      prem_start_[i + 1] = prem_start_[i] + plen_[i];
    }
    prem_lids_.resize(prem_start_.back());
    std::vector<int32_t> lid_count(nlids, 0);
    for (size_t i = 0; i < nrules; ++i) {
      size_t at = prem_start_[i];
      for (const auto& l : rb.rules[i].premise) {
        int32_t id = static_cast<int32_t>(lid(l));
        prem_lids_[at++] = id;
        ++lid_count[static_cast<size_t>(id)];
      }
    }
    idx_start_.assign(nlids + 1, 0);
    for (size_t id = 0; id < nlids; ++id)
      idx_start_[id + 1] = idx_start_[id] + lid_count[id];
    idx_rules_.resize(idx_start_.back());
    std::vector<uint32_t> fill(idx_start_.begin(), idx_start_.end() - 1);
    for (size_t i = 0; i < nrules; ++i)
      for (size_t k = prem_start_[i]; k < prem_start_[i + 1]; ++k)
        idx_rules_[fill[static_cast<size_t>(prem_lids_[k])]++] =
            static_cast<uint32_t>(i);

    posf_.assign(static_cast<size_t>(nvals_), 0);
    negf_.assign(static_cast<size_t>(nvals_), 0);
    poscount_.assign(static_cast<size_t>(nattrs), 0);
    ent_.assign(nlids, 0);
    unsat_.assign(nrules, 0);
    pred_w_.assign(nlids, 0.0);
    pred_cnt_.assign(nlids, 0);
  }

  int nattrs() const { return static_cast<int>(poscount_.size()); }

  void set_state(const std::vector<Literal>& lits) {
    std::fill(posf_.begin(), posf_.end(), 0);
    std::fill(negf_.begin(), negf_.end(), 0);
    std::fill(poscount_.begin(), poscount_.end(), 0);
    members_.clear();
    for (const auto& l : lits) set_flags(l, true);
    for (size_t id = 0; id < ent_.size(); ++id)
      ent_[id] = compute_ent(static_cast<int>(id)) ? 1 : 0;
    std::fill(pred_w_.begin(), pred_w_.end(), 0.0);
    std::fill(pred_cnt_.begin(), pred_cnt_.end(), 0);
    predicted_.clear();
    unsat_ = plen_;
    for (size_t i = 0; i < unsat_.size(); ++i)
      for (size_t k = prem_start_[i]; k < prem_start_[i + 1]; ++k)
        unsat_[i] -= ent_[static_cast<size_t>(prem_lids_[k])];
    for (size_t i = 0; i < unsat_.size(); ++i)
      if (unsat_[i] == 0) track_prediction(i, +1);
    recompute_total();
  }

  double total() const { return total_; }
  const std::set<Literal>& members() const { return members_; }
  bool has(const Literal& l) const { return members_.count(l) > 0; }

  bool entails(const Literal& l) const { return ent_[lid(l)] != 0; }

  void add(const Literal& l) { move(l, true); }
  void remove(const Literal& l) { move(l, false); }

  double peek_delta(const Literal& l, bool adding) {
    double before = total_;
    move(l, adding);
    double d = total_ - before;
    move(l, !adding);
    return d;
  }

  // Conflicting member pairs: two positive values on one attribute, or a
  // value asserted both positively and negatively.
  std::vector<std::pair<Literal, Literal>> conflicts() const {
    std::vector<std::pair<Literal, Literal>> out;
    for (int a = 0; a < nattrs(); ++a) {
      int base = val_base_[static_cast<size_t>(a)];
      int end = val_base_[static_cast<size_t>(a) + 1];
      if (poscount_[static_cast<size_t>(a)] > 1) {
        std::vector<int> vals;
        for (int s = base; s < end; ++s)
          if (posf_[static_cast<size_t>(s)]) vals.push_back(s - base);
        for (size_t i = 0; i < vals.size(); ++i)
          for (size_t j = i + 1; j < vals.size(); ++j)
            out.emplace_back(Literal(a, vals[i], false),
                             Literal(a, vals[j], false));
      }
      for (int s = base; s < end; ++s)
        if (posf_[static_cast<size_t>(s)] && negf_[static_cast<size_t>(s)])
          out.emplace_back(Literal(a, s - base, false),
                           Literal(a, s - base, true));
    }
    return out;
  }

  // Summed weight of fired rules whose conclusion supports l.
  double side_score(const Literal& l) const {
    double sc = pred_w_[lid(l)];
    if (l.neg) {
      int base = val_base_[static_cast<size_t>(l.attr)];
      int end = val_base_[static_cast<size_t>(l.attr) + 1];
      for (int s = base; s < end; ++s)
        if (s - base != l.value)
          sc += pred_w_[static_cast<size_t>(s) * 2];  // positive lid
    }
    return sc;
  }

  // Conclusions of fired rules not yet entailed, canonical order.
  std::vector<Literal> predicted_additions() const {
    std::vector<Literal> out;
    for (int id : predicted_)
      if (!ent_[static_cast<size_t>(id)]) out.push_back(from_lid(id));
    return out;
  }

  std::vector<size_t> fired_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < unsat_.size(); ++i)
      if (unsat_[i] == 0) out.push_back(i);
    return out;
  }

  bool insertable(const Literal& l) const {
    size_t s = slot(l);
    if (!l.neg)
      return poscount_[static_cast<size_t>(l.attr)] == 0 && !negf_[s];
    return !posf_[s];
  }

  // Members standing in the way of inserting l.
  std::vector<Literal> blockers(const Literal& l) const {
    std::vector<Literal> out;
    int base = val_base_[static_cast<size_t>(l.attr)];
    int end = val_base_[static_cast<size_t>(l.attr) + 1];
    if (!l.neg) {
      for (int s = base; s < end; ++s)
        if (posf_[static_cast<size_t>(s)] && s - base != l.value)
          out.emplace_back(l.attr, s - base, false);
      if (negf_[slot(l)]) out.emplace_back(l.attr, l.value, true);
    } else {
      if (posf_[slot(l)]) out.emplace_back(l.attr, l.value, false);
    }
    return out;
  }

  // Net krit change of removing `removes` and then inserting `add`.
  double peek_swap(const std::vector<Literal>& removes, const Literal& add) {
    double before = total_;
    for (const auto& m : removes) move(m, false);
    move(add, true);
    double d = total_ - before;
    move(add, false);
    for (auto it = removes.rbegin(); it != removes.rend(); ++it)
      move(*it, true);
    return d;
  }

 private:
  size_t slot(const Literal& l) const {
    return static_cast<size_t>(val_base_[static_cast<size_t>(l.attr)] +
                               l.value);
  }
  size_t lid(const Literal& l) const { return slot(l) * 2 + (l.neg ? 1 : 0); }
  Literal from_lid(int id) const {
    int s = id / 2;
    auto it = std::upper_bound(val_base_.begin(), val_base_.end(), s);
    int attr = static_cast<int>(it - val_base_.begin()) - 1;
    return Literal(attr, s - val_base_[static_cast<size_t>(attr)], id % 2 != 0);
  }

  bool compute_ent(int id) const {
    size_t s = static_cast<size_t>(id / 2);
    if (id % 2 == 0) return posf_[s] != 0;
    if (negf_[s]) return true;
    auto it = std::upper_bound(val_base_.begin(), val_base_.end(),
                               static_cast<int>(s));
    size_t attr = static_cast<size_t>(it - val_base_.begin()) - 1;
    return poscount_[attr] - posf_[s] > 0;
  }

  void set_flags(const Literal& l, bool on) {
    size_t s = slot(l);
    if (on) {
      members_.insert(l);
      if (!l.neg) {
        posf_[s] = 1;
        ++poscount_[static_cast<size_t>(l.attr)];
      } else {
        negf_[s] = 1;
      }
    } else {
      members_.erase(l);
      if (!l.neg) {
        posf_[s] = 0;
        --poscount_[static_cast<size_t>(l.attr)];
      } else {
        negf_[s] = 0;
      }
    }
  }

  void track_prediction(size_t rule, int dir) {
    size_t id = static_cast<size_t>(conc_lid_[rule]);
    pred_w_[id] += dir * w_[rule];
    pred_cnt_[id] += dir;
    if (dir > 0 && pred_cnt_[id] == 1) predicted_.insert(static_cast<int>(id));
    if (dir < 0 && pred_cnt_[id] == 0) predicted_.erase(static_cast<int>(id));
  }

  void recompute_total() {
    total_ = 0.0;
    for (int id : predicted_) {
      size_t u = static_cast<size_t>(id);
      int s = static_cast<int>(ent_[u]) - static_cast<int>(ent_[u ^ 1]);
      if (s) total_ += pred_w_[u] * s;
    }
  }

  void move(const Literal& l, bool on) {
    set_flags(l, on);
    int base = val_base_[static_cast<size_t>(l.attr)];
    int end = val_base_[static_cast<size_t>(l.attr) + 1];
    flip_buf_.assign(static_cast<size_t>(end - base) * 4, 0);
    int* off_flips = flip_buf_.data();
    int* on_flips = flip_buf_.data() + flip_buf_.size() / 2;
    int noff = 0, non = 0;
    for (int s = base; s < end; ++s) {
      for (int p = 0; p < 2; ++p) {
        int id = s * 2 + p;
        uint8_t e = compute_ent(id) ? 1 : 0;
        if (e == ent_[static_cast<size_t>(id)]) continue;
        ent_[static_cast<size_t>(id)] = e;
        (e ? on_flips[non++] : off_flips[noff++]) = id;
      }
    }
    // unfire before firing so a rule touched by both stays consistent
    for (int k = 0; k < noff; ++k) {
      size_t id = static_cast<size_t>(off_flips[k]);
      for (size_t j = idx_start_[id]; j < idx_start_[id + 1]; ++j) {
        size_t r = idx_rules_[j];
        if (unsat_[r]++ == 0) track_prediction(r, -1);
      }
    }
    for (int k = 0; k < non; ++k) {
      size_t id = static_cast<size_t>(on_flips[k]);
      for (size_t j = idx_start_[id]; j < idx_start_[id + 1]; ++j) {
        size_t r = idx_rules_[j];
        if (--unsat_[r] == 0) track_prediction(r, +1);
      }
    }
    recompute_total();
  }

  const RuleBase& rb_;
  std::vector<int> val_base_;
  int nvals_ = 0;
  std::vector<double> w_;
  std::vector<int32_t> plen_, conc_lid_;
  std::vector<uint32_t> prem_start_, idx_start_, idx_rules_;
  std::vector<int32_t> prem_lids_;

  std::vector<uint8_t> posf_, negf_, ent_;
  std::vector<int> poscount_;
  std::set<Literal> members_;
  std::vector<int32_t> unsat_;
  std::vector<double> pred_w_;
  std::vector<int> pred_cnt_;
  std::set<int> predicted_;
  std::vector<int> flip_buf_;
  double total_ = 0.0;
};

FeatureSet normalized_members(const KritEngine& e) {
  FeatureSet out;
  for (const auto& l : e.members())
    if (!l.neg) out.insert(l);
  for (const auto& l : e.members())
    if (l.neg) out.insert(l);
  return out;
}

void resolve_conflicts(KritEngine& e) {
  for (;;) {
    auto pairs = e.conflicts();
    if (pairs.empty()) return;
    size_t best = 0;
    double best_gap = -1.0;
    for (size_t i = 0; i < pairs.size(); ++i) {
      double gap = std::abs(e.side_score(pairs[i].first) -
                            e.side_score(pairs[i].second));
      if (gap > best_gap + kEps) {
        best_gap = gap;
        best = i;
      }
    }
    const auto& [a, b] = pairs[best];
    double sa = e.side_score(a), sb = e.side_score(b);
    // Keep the better-supported side; on an exact tie keep the canonically
    // smaller literal.
    Literal loser = (sa > sb + kEps) ? b : (sb > sa + kEps) ? a
                                      : (a < b ? b : a);
    e.remove(loser);
  }
}

void greedy_maximize(KritEngine& e, const FeatureSet* protected_literals) {
  // Best-improvement ascent over single insertions and removals; when no
  // single flip improves, fall back to swap moves (displace the members
  // blocking a predicted literal, then insert it atomically). Swaps let the
  // search cross the ridge between one literal and its better-supported
  // complement, and confining them to the fallback tier keeps their cost off
  // the common path.
  for (;;) {
    bool found = false;
    double best_delta = kEps;
    bool best_add = true;
    Literal best_lit;
    auto offer = [&](const Literal& l, bool adding, double d) {
      if (d > best_delta + kEps) {
        found = true;
        best_delta = d;
        best_lit = l;
        best_add = adding;
      } else if (found && d > best_delta - kEps) {
        // deterministic tie-break: additions first, then canonical literal
        if (adding && !best_add) {
          best_lit = l;
          best_add = true;
        } else if (adding == best_add && l < best_lit) {
          best_lit = l;
        }
      }
    };
    for (const auto& l : e.predicted_additions()) {
      if (!e.insertable(l)) continue;
      offer(l, true, e.peek_delta(l, true));
    }
    std::vector<Literal> removable(e.members().begin(), e.members().end());
    for (const auto& l : removable) {
      if (protected_literals && protected_literals->contains(l)) continue;
      offer(l, false, e.peek_delta(l, false));
    }
    if (found) {
      if (best_add)
        e.add(best_lit);
      else
        e.remove(best_lit);
      continue;
    }
    std::vector<Literal> best_removes;
    for (const auto& l : e.predicted_additions()) {
      if (e.insertable(l)) continue;
      std::vector<Literal> removes = e.blockers(l);
      bool shielded = false;
      if (protected_literals)
        for (const auto& m : removes)
          if (protected_literals->contains(m)) shielded = true;
      if (shielded) continue;
      double d = e.peek_swap(removes, l);
      if (d > best_delta + kEps ||
          (found && d > best_delta - kEps && l < best_lit)) {
        found = true;
        best_delta = std::max(best_delta, d);
        best_lit = l;
        best_removes = std::move(removes);
      }
    }
    if (!found) return;
    for (const auto& m : best_removes) e.remove(m);
    e.add(best_lit);
  }
}

FeatureSet phi_on_engine(KritEngine& e,
                         const FeatureSet* protected_literals) {
  resolve_conflicts(e);
  greedy_maximize(e, protected_literals);
  return normalized_members(e);
}

// Moves the engine from its current members to exactly `target`.
void restore_state(KritEngine& e, const FeatureSet& target) {
  std::vector<Literal> drop;
  for (const auto& l : e.members())
    if (!target.contains(l)) drop.push_back(l);
  for (const auto& l : drop) e.remove(l);
  for (const auto& l : target.literals())
    if (!e.has(l)) e.add(l);
}

// One Pr step on a live engine. Returns true when the state changed; on a
// rejected step (no strict krit gain) the engine is restored to x.
bool step_on_engine(KritEngine& e, const FeatureSet& x,
                    const FeatureSet* protected_literals, FeatureSet& out) {
  double base = e.total();
  // Union the state with every conclusion that fits without contradiction;
  // predicted literals that conflict with members compete through krit-scored
  // swap moves inside the greedy phase instead of being dropped up front.
  for (const auto& l : e.predicted_additions())
    if (e.insertable(l)) e.add(l);
  greedy_maximize(e, protected_literals);
  FeatureSet y = normalized_members(e);
  if (y != x && e.total() > base + 1e-9) {
    // Drop repair leftovers (entailed negatives the normalization absorbs) so
    // the engine state is exactly y; the next step must behave as if it had
    // started from y on a fresh engine, or convergence detection and a later
    // re-evaluation of the fixed point could disagree.
    restore_state(e, y);
    out = y;
    return true;
  }
  restore_state(e, x);
  out = x;
  return false;
}

Concept fixed_point_on_engine(KritEngine& e, const FeatureSet& x0,
                              int max_iter, bool preserve_stimulus) {
  restore_state(e, x0);
  Concept c;
  c.trace.push_back({x0, e.total()});
  FeatureSet x = x0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    FeatureSet y;
    bool changed =
        step_on_engine(e, x, preserve_stimulus ? &x0 : nullptr, y);
    if (!changed) {
      c.prototype = x;
      c.krit = e.total();
      c.supporting_rules = e.fired_indices();
      c.id = to_hex(x.hash());
      c.iterations = iter;
      return c;
    }
    // A repeated state would mean krit failed to increase strictly.
    for (const auto& t : c.trace)
      if (t.state == y)
        throw DivergenceError("prediction trace revisited a state", c.trace);
    c.trace.push_back({y, e.total()});
    x = y;
  }
  throw DivergenceError("no fixed point within " + std::to_string(max_iter) +
                            " iterations",
                        c.trace);
}

// Literals spanning the whole schema, so a shared engine accepts any state.
std::vector<Literal> schema_bounds(const AttributeSchema& schema) {
  std::vector<Literal> out;
  for (int a = 0; a < schema.attribute_count(); ++a)
    out.emplace_back(a, schema.arities[static_cast<size_t>(a)] - 1, false);
  return out;
}

}  // namespace

struct Predictor::Impl {
  Impl(const RuleBase& rb, const AttributeSchema& schema,
       const FixpointParams& fp)
      : engine(rb, schema_bounds(schema), fp.weight_clamp),
        max_iter(fp.max_iter > 0 ? fp.max_iter
                                 : 4 * schema.attribute_count()),
        preserve(fp.preserve_stimulus) {
    engine.set_state({});
  }
  KritEngine engine;
  int max_iter;
  bool preserve;
};

Predictor::Predictor(const RuleBase& rb, const AttributeSchema& schema,
                     const FixpointParams& fp)
    : impl_(std::make_unique<Impl>(rb, schema, fp)) {}
Predictor::~Predictor() = default;

FeatureSet Predictor::phi(const std::vector<Literal>& candidate,
                          const FeatureSet* protected_literals) {
  impl_->engine.set_state(candidate);
  return phi_on_engine(impl_->engine, protected_literals);
}

FeatureSet Predictor::step(const FeatureSet& x) {
  restore_state(impl_->engine, x);
  FeatureSet out;
  step_on_engine(impl_->engine, x, impl_->preserve ? &x : nullptr, out);
  return out;
}

Concept Predictor::find_fixed_point(const FeatureSet& x0) {
  return fixed_point_on_engine(impl_->engine, x0, impl_->max_iter,
                               impl_->preserve);
}

FeatureSet phi_krit(const RuleBase& rb, const std::vector<Literal>& candidate,
                    const FixpointParams& fp,
                    const FeatureSet* protected_literals) {
  KritEngine e(rb, candidate, fp.weight_clamp);
  e.set_state(candidate);
  return phi_on_engine(e, protected_literals);
}

FeatureSet predict_step(const RuleBase& rb, const FeatureSet& x,
                        const FixpointParams& fp) {
  KritEngine e(rb, x.literals(), fp.weight_clamp);
  e.set_state(x.literals());
  FeatureSet out;
  step_on_engine(e, x, fp.preserve_stimulus ? &x : nullptr, out);
  return out;
}

Concept find_fixed_point(const RuleBase& rb, const AttributeSchema& schema,
                         const FeatureSet& x0, const FixpointParams& fp) {
  Predictor p(rb, schema, fp);
  return p.find_fixed_point(x0);
}

std::vector<Concept> enumerate_concepts(const RuleBase& rb, const Corpus& c,
                                        const FixpointParams& fp) {
  Predictor p(rb, c.schema, fp);
  std::map<FeatureSet, Concept> by_start;  // repeated records converge alike
  std::map<FeatureSet, Concept> by_prototype;
  for (size_t i = 0; i < c.records.size(); ++i) {
    FeatureSet x0 = c.records[i].to_features();
    if (by_start.count(x0)) continue;
    try {
      Concept k = p.find_fixed_point(x0);
      by_start.emplace(std::move(x0), k);
      by_prototype.emplace(k.prototype, std::move(k));
    } catch (DivergenceError& e) {
      e.record_index = static_cast<int>(i);
      throw;
    }
  }
  std::vector<Concept> out;
  out.reserve(by_prototype.size());
  for (auto& [proto, k] : by_prototype) out.push_back(std::move(k));
  return out;
}

namespace {
std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace

void save_concepts(const std::vector<Concept>& cs, uint64_t rulebase_hash,
                   const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << "{\"format\":\"mscr-concepts v1\",\"rulebase_hash\":\""
    << to_hex(rulebase_hash) << "\"}\n";
  for (const auto& c : cs) {
    f << "{\"id\":\"" << c.id << "\",\"prototype\":[";
    const auto& ls = c.prototype.literals();
    for (size_t i = 0; i < ls.size(); ++i)
      f << (i ? "," : "") << "{\"attr\":" << ls[i].attr << ",\"val\":"
        << ls[i].value << ",\"neg\":" << (ls[i].neg ? "true" : "false") << "}";
    f << "],\"krit\":" << format_sig9(c.krit)
      << ",\"iterations\":" << c.iterations << "}\n";
  }
}

std::vector<Concept> load_concepts(const std::string& path,
                                   uint64_t* rulebase_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": empty concept file");
  std::vector<Concept> out;
  try {
    auto h = nlohmann::json::parse(line);
    if (h.at("format").get<std::string>() != "mscr-concepts v1")
      throw DataError(path + ": unknown format");
    if (rulebase_hash)
      *rulebase_hash =
          std::stoull(h.at("rulebase_hash").get<std::string>(), nullptr, 16);
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      Concept c;
      for (const auto& lj : j.at("prototype"))
        c.prototype.insert(Literal(lj.at("attr").get<int>(),
                                   lj.at("val").get<int>(),
                                   lj.at("neg").get<bool>()));
      c.id = j.at("id").get<std::string>();
      c.krit = j.at("krit").get<double>();
      c.iterations = j.at("iterations").get<int>();
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return out;
}

}  // namespace mscr
