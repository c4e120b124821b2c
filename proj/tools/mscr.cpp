// Command-line front end: corpus generation, rule mining, fixed-point
// enumeration, stimulus classification, rivalry resolution, cross-context
// rule diagnostics, and the gridworld animat harness.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 divergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mscr/concepts.hpp"
#include "mscr/corpus_io.hpp"
#include "mscr/fixpoint.hpp"
#include "mscr/gridworld.hpp"
#include "mscr/miner.hpp"

namespace {

using namespace mscr;

// Routes file-writing savers to stdout via a scratch file when out is "-".
template <typename Saver>
void emit(const Saver& save, const std::string& out) {
  if (out != "-") {
    save(out);
    return;
  }
  std::string tmp = "/tmp/mscr-stdout.tmp";
  save(tmp);
  std::ifstream f(tmp, std::ios::binary);
  std::cout << f.rdbuf();
  std::remove(tmp.c_str());
}

void write_out(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

GlyphSet load_glyph_arg(const std::string& arg) {
  if (arg == "builtin-digits") return builtin_digits();
  if (arg == "builtin-letters") return builtin_letters();
  return load_glyphs(arg);
}

// Literal notation: "attr-value" asserts, "!attr-value" denies. Zero-based.
Literal parse_literal(const std::string& tok, const AttributeSchema& schema) {
  std::string body = tok;
  bool neg = false;
  if (!body.empty() && body[0] == '!') {
    neg = true;
    body = body.substr(1);
  }
  auto dash = body.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == body.size())
    throw DataError("bad literal '" + tok + "' (expected attr-value)");
  Literal l;
  try {
    l.attr = std::stoi(body.substr(0, dash));
    l.value = std::stoi(body.substr(dash + 1));
  } catch (const std::exception&) {
    throw DataError("bad literal '" + tok + "' (expected attr-value)");
  }
  l.neg = neg;
  if (!l.valid_under(schema))
    throw DataError("literal '" + tok + "' outside the schema");
  return l;
}

std::vector<Literal> parse_stimulus(const std::vector<std::string>& toks,
                                    const AttributeSchema& schema) {
  std::vector<Literal> out;
  out.reserve(toks.size());
  for (const auto& t : toks) out.push_back(parse_literal(t, schema));
  return out;
}

std::string literal_str(const Literal& l) {
  std::string s = l.neg ? "!" : "";
  return s + std::to_string(l.attr) + "-" + std::to_string(l.value);
}

void check_schema(const RuleBase& rb, const Corpus& c) {
  if (rb.schema_hash != c.schema.hash())
    throw DataError("rule base schema does not match the corpus schema");
}

nlohmann::json trace_json(const std::vector<TraceEntry>& trace) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& t : trace) {
    nlohmann::json lits = nlohmann::json::array();
    for (const auto& l : t.state.literals()) lits.push_back(literal_str(l));
    a.push_back({{"state", lits}, {"krit", t.krit}});
  }
  return a;
}

int run(int argc, char** argv) {
  CLI::App app{"maximally specific causal rules, concept fixed points, and a "
               "functional-systems planner"};
  app.require_subcommand(1);

  // gen-corpus
  std::string g_glyphs, g_out = "-";
  int g_copies = 30;
  double g_noise = 0.0;
  uint64_t g_seed = 1;
  auto* gen = app.add_subcommand("gen-corpus", "expand glyphs into a corpus");
  gen->add_option("--glyphs", g_glyphs,
                  "glyph file, builtin-digits, or builtin-letters")
      ->required();
  gen->add_option("--copies", g_copies, "copies per glyph");
  gen->add_option("--noise", g_noise, "per-pixel resample probability");
  gen->add_option("--seed", g_seed, "rng seed");
  gen->add_option("--out", g_out, "output path, - for stdout");

  // mine
  std::string m_corpus, m_out = "-", m_maximality = "local";
  MiningParams mp;
  auto* mine = app.add_subcommand("mine", "mine maximally specific rules");
  mine->add_option("--corpus", m_corpus, "corpus file")->required();
  mine->add_option("--min-support", mp.min_support, "minimum premise support");
  mine->add_option("--min-gamma", mp.min_gamma, "minimum rule gamma");
  mine->add_option("--max-premise", mp.max_premise_length,
                   "maximum premise length");
  mine->add_option("--beam-width", mp.beam_width, "0 for exhaustive search");
  mine->add_option("--maximality", m_maximality, "local or global");
  mine->add_option("--threads", mp.threads, "worker threads");
  mine->add_option("--out", m_out, "output path, - for stdout");

  // fixpoints
  std::string f_rules, f_corpus, f_out = "-";
  FixpointParams fx;
  auto* fixp = app.add_subcommand("fixpoints",
                                  "enumerate prediction fixed points");
  fixp->add_option("--rules", f_rules, "rule base file")->required();
  fixp->add_option("--corpus", f_corpus, "corpus file")->required();
  fixp->add_option("--max-iter", fx.max_iter, "0 for 4x attribute count");
  fixp->add_option("--out", f_out, "output path, - for stdout");

  // classify
  std::string c_rules, c_concepts, c_corpus, c_format = "text";
  std::vector<std::string> c_stimulus;
  bool c_trace = false;
  auto* cls = app.add_subcommand("classify", "converge a stimulus");
  cls->add_option("--rules", c_rules, "rule base file")->required();
  cls->add_option("--concepts", c_concepts, "concept file")->required();
  cls->add_option("--corpus", c_corpus, "corpus file (schema source)")
      ->required();
  cls->add_option("--stimulus", c_stimulus,
                  "literals: attr-value or !attr-value, zero-based")
      ->required();
  cls->add_option("--format", c_format, "text or json");
  cls->add_flag("--trace", c_trace, "include the convergence trace");

  // rivalry
  std::string r_rules, r_concepts, r_corpus, r_a, r_b, r_format = "text";
  auto* riv = app.add_subcommand("rivalry",
                                 "resolve two contradictory concepts");
  riv->add_option("--rules", r_rules, "rule base file")->required();
  riv->add_option("--concepts", r_concepts, "concept file")->required();
  riv->add_option("--corpus", r_corpus, "corpus file (schema source)")
      ->required();
  riv->add_option("--a", r_a, "first concept id")->required();
  riv->add_option("--b", r_b, "second concept id")->required();
  riv->add_option("--format", r_format, "text or json");

  // context-report
  std::string x_a, x_b, x_union, x_format = "text";
  auto* ctx = app.add_subcommand(
      "context-report", "compare single-context rule bases with their union");
  ctx->add_option("--rules-a", x_a, "first context rule base")->required();
  ctx->add_option("--rules-b", x_b, "second context rule base")->required();
  ctx->add_option("--rules-union", x_union, "union rule base")->required();
  ctx->add_option("--format", x_format, "text or json");

  // animat
  int a_train = 200, a_eval = 100, a_width = 15, a_height = 15;
  uint64_t a_seed = 1;
  AnimatParams ap;
  std::string a_format = "text", a_out = "-";
  auto* ani = app.add_subcommand("animat", "gridworld planner harness");
  ani->add_option("--train", a_train, "training episodes");
  ani->add_option("--eval", a_eval, "evaluation episodes");
  ani->add_option("--steps", ap.step_budget, "step budget per episode");
  ani->add_option("--width", a_width, "grid width");
  ani->add_option("--height", a_height, "grid height");
  ani->add_option("--seed", a_seed, "rng seed");
  ani->add_option("--format", a_format, "text or json");
  ani->add_option("--out", a_out, "output path, - for stdout");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    Corpus c = gen_glyph_corpus(load_glyph_arg(g_glyphs), g_copies, g_noise,
                                g_seed);
    emit([&](const std::string& p) { save_corpus(c, p); }, g_out);
    return 0;
  }

  if (mine->parsed()) {
    if (m_maximality == "local")
      mp.maximality = MaximalityMode::Local;
    else if (m_maximality == "global")
      mp.maximality = MaximalityMode::Global;
    else
      throw DataError("--maximality must be local or global");
    Corpus c = load_corpus(m_corpus);
    RuleBase rb = mine_mscr(c, mp);
    emit([&](const std::string& p) { save_rulebase(rb, p); }, m_out);
    std::cerr << rb.rules.size() << " rules\n";
    return 0;
  }

  if (fixp->parsed()) {
    RuleBase rb = load_rulebase(f_rules);
    Corpus c = load_corpus(f_corpus);
    check_schema(rb, c);
    std::vector<Concept> cs = enumerate_concepts(rb, c, fx);
    emit([&](const std::string& p) { save_concepts(cs, rb.hash(), p); }, f_out);
    std::cerr << cs.size() << " concepts\n";
    return 0;
  }

  if (cls->parsed()) {
    RuleBase rb = load_rulebase(c_rules);
    Corpus c = load_corpus(c_corpus);
    check_schema(rb, c);
    ConceptCatalog cat;
    cat.schema_hash = rb.schema_hash;
    cat.concepts = load_concepts(c_concepts, &cat.rulebase_hash);
    if (cat.rulebase_hash != rb.hash())
      throw DataError("concept file was built from a different rule base");
    FeatureSet stim;
    for (const auto& l : parse_stimulus(c_stimulus, c.schema))
      if (!stim.insert(l))
        throw DataError("contradictory stimulus literal " + literal_str(l));
    ClassifyResult res = classify(cat, rb, c.schema, stim);
    if (c_format == "json") {
      nlohmann::json j;
      j["concept_id"] = res.concept_id ? nlohmann::json(*res.concept_id)
                                       : nlohmann::json(nullptr);
      nlohmann::json lits = nlohmann::json::array();
      for (const auto& l : res.prototype.literals())
        lits.push_back(literal_str(l));
      j["prototype"] = lits;
      j["agreement"] = res.agreement;
      j["krit"] = res.krit;
      j["iterations"] = res.iterations;
      if (c_trace) j["trace"] = trace_json(res.trace);
      std::cout << j.dump() << "\n";
    } else {
      std::cout << "concept: " << (res.concept_id ? *res.concept_id : "novel")
                << "\nagreement: " << res.agreement << "\nkrit: " << res.krit
                << "\niterations: " << res.iterations << "\nprototype:";
      for (const auto& l : res.prototype.literals())
        std::cout << ' ' << literal_str(l);
      std::cout << "\n";
      if (c_trace)
        for (const auto& t : res.trace)
          std::cout << "  krit=" << t.krit << " size="
                    << t.state.literals().size() << "\n";
    }
    return 0;
  }

  if (riv->parsed()) {
    RuleBase rb = load_rulebase(r_rules);
    Corpus c = load_corpus(r_corpus);
    check_schema(rb, c);
    ConceptCatalog cat;
    cat.schema_hash = rb.schema_hash;
    cat.concepts = load_concepts(r_concepts, &cat.rulebase_hash);
    if (cat.rulebase_hash != rb.hash())
      throw DataError("concept file was built from a different rule base");
    ResolutionReport rep = rivalry(cat, rb, c.schema, r_a, r_b);
    std::cout << (r_format == "json" ? to_json(rep) : to_text(rep));
    return 0;
  }

  if (ctx->parsed()) {
    ContextReport rep = context_report(load_rulebase(x_a), load_rulebase(x_b),
                                       load_rulebase(x_union));
    std::cout << (x_format == "json" ? to_json(rep) : to_text(rep));
    return 0;
  }

  if (ani->parsed()) {
    Gridworld env(a_width, a_height);
    FSMemory mem = gridworld_base_memory();
    ap.goal = Gridworld::kOnFood;
    AnimatReport rep = run_animat(env, mem, a_train, a_eval, ap, a_seed);
    write_out(a_out, a_format == "json" ? to_json(rep) : to_text(rep));
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mscr::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const mscr::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
