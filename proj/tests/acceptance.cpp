// Acceptance checks. Each criterion prints one line:
//   criterion <id> [<name>]: PASS|FAIL|SKIP  <details>
// Exit status: 0 pass, 1 fail, 77 skip (data not present).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "mplr/indicators.hpp"
#include "mplr/model.hpp"
#include "mplr/train.hpp"
#include "oracles.hpp"

using namespace mplr;
using namespace mplr::testing;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }
Outcome skip(std::string why) { return {Status::Skip, std::move(why)}; }

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path data_root() {
  if (const char* env = std::getenv("MPLR_DATA_DIR"); env && *env) return env;
#ifdef MPLR_DATA_DIR
  return MPLR_DATA_DIR;
#else
  return "data";
#endif
}

std::optional<Dataset> try_load(const std::string& name) {
  const fs::path dir = data_root() / name;
  for (const char* f : {"train.txt", "valid.txt", "test.txt"}) {
    if (!fs::is_regular_file(dir / f)) return std::nullopt;
  }
  return load_dataset_dir(dir);
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

RulePattern named_pattern(const KnowledgeGraph& kg, std::initializer_list<std::string> names) {
  RulePattern p;
  for (const auto& n : names) p.hops.push_back(kg.predicates().at(n));
  return p;
}

// ---------------------------------------------------------------------------
// 1, 2: toy graph

Outcome tensorlog_example() {
  const auto start = Clock::now();
  const KnowledgeGraph kg = toy_kg();
  const OperatorSet ops(kg);
  const auto product = chain_matrix(ops, named_pattern(kg, {"sisterOf", "daughterOf"}));
  // Rows z1, z2, z4 reach both x1 and x2 once; everything else is zero.
  bool exact = true;
  for (EntityId i = 0; i < kg.num_entities(); ++i) {
    for (EntityId j = 0; j < kg.num_entities(); ++j) {
      const std::string& row = kg.entities().name(i);
      const std::string& col = kg.entities().name(j);
      const bool lit = (row == "z1" || row == "z2" || row == "z4") && (col == "x1" || col == "x2");
      exact = exact && product[i][j] == (lit ? 1.0 : 0.0);
    }
  }
  StateVector s = one_hot(kg.num_entities(), kg.entities().at("z1"));
  for (PredicateId p : named_pattern(kg, {"sisterOf", "daughterOf"}).hops) s = propagate(s, ops.op(operator_of(p)));
  const double score = s[kg.entities().at("x1")];
  const double secs = seconds_since(start);
  return verdict(exact && score == 1.0 && secs < 1.0,
                 std::string("product ") + (exact ? "exact" : "differs") + ", s.v_x1 = " + fmt(score, 1) + ", " +
                     fmt(secs, 4) + " s");
}

Outcome toy_bifurcation() {
  const auto start = Clock::now();
  const KnowledgeGraph kg = toy_kg();
  const PredicateId d = kg.predicates().at("daughterOf");
  const double bw = bifurcation(kg, d, Direction::Backward, 2).at(2);
  const double fw = bifurcation(kg, d, Direction::Forward, 2).at(2);
  const double secs = seconds_since(start);
  return verdict(bw == 0.5 && fw == 0.0 && secs < 1.0,
                 "bw(2) = " + fmt(bw, 2) + ", fw(2) = " + fmt(fw, 2) + ", " + fmt(secs, 4) + " s");
}

// ---------------------------------------------------------------------------
// 3, 5: saturation tables

struct SaturationRow {
  std::vector<std::string> pattern;
  std::string predicate;
  double gamma, delta, eta;
};

const std::vector<SaturationRow>& family_saturation_rows() {
  static const std::vector<SaturationRow> rows = {
      {{"motherOf", "sonOf"}, "wifeOf", .47, .35, .17},
      {{"motherOf", "daughterOf"}, "wifeOf", .36, .24, .09},
      {{"fatherOf", "sonOf"}, "husbandOf", .47, .35, .17},
      {{"fatherOf", "daughterOf"}, "husbandOf", .36, .24, .09},
      {{"wifeOf", "fatherOf"}, "motherOf", 1.0, .34, .34},
      {{"motherOf", "brotherOf"}, "motherOf", .70, .27, .19},
      {{"motherOf", "sisterOf"}, "motherOf", .62, .22, .14},
      {{"sisterOf", "sonOf"}, "daughterOf", .68, .25, .17},
      {{"sisterOf", "daughterOf"}, "daughterOf", .61, .20, .12},
      {{"daughterOf", "husbandOf"}, "daughterOf", .46, .15, .07},
      {{"daughterOf", "wifeOf"}, "daughterOf", .46, .14, .06},
      {{"brotherOf", "brotherOf"}, "brotherOf", .86, .14, .12},
      {{"nephewOf", "uncleOf"}, "brotherOf", .77, .13, .10},
      {{"brotherOf", "sisterOf"}, "brotherOf", .81, .13, .10},
      {{"sonOf", "fatherOf"}, "brotherOf", 1.0, .08, .08},  // printed ".100"
      {{"nephewOf", "auntOf"}, "brotherOf", .68, .11, .08},
      {{"brotherOf", "uncleOf"}, "uncleOf", .85, .23, .20},
      {{"uncleOf", "brotherOf"}, "uncleOf", .82, .22, .18},
      {{"brotherOf", "auntOf"}, "uncleOf", .78, .22, .17},
      {{"uncleOf", "sisterOf"}, "uncleOf", .74, .18, .13},
      {{"brotherOf", "fatherOf"}, "uncleOf", .62, .09, .06},
      {{"brotherOf", "motherOf"}, "uncleOf", .38, .05, .02},
      {{"nephewOf", "brotherOf"}, "nephewOf", .86, .25, .21},
      {{"nephewOf", "sisterOf"}, "nephewOf", .79, .22, .17},
      {{"brotherOf", "nephewOf"}, "nephewOf", .79, .21, .16},
      {{"brotherOf", "nieceOf"}, "nephewOf", .72, .17, .12},
      {{"sonOf", "brotherOf"}, "nephewOf", .64, .10, .06},
      {{"sonOf", "sisterOf"}, "nephewOf", .36, .05, .02},
  };
  return rows;
}

const std::vector<SaturationRow>& umls_saturation_rows() {
  static const std::vector<SaturationRow> rows = {
      {{"manifestationOf", "resultOf"}, "manifestationOf", 1.0, .05, .05},
      {{"manifestationOf", "affects"}, "manifestationOf", .91, .04, .04},
      {{"manifestationOf", "processOf"}, "manifestationOf", .91, .04, .04},
      {{"resultOf", "resultOf"}, "manifestationOf", .71, .05, .04},
      {{"resultOf", "affects"}, "manifestationOf", .75, .04, .03},
      {{"interactWith", "performs"}, "performs", .83, .31, .26},
      {{"isA", "performs"}, "performs", .83, .13, .11},
      {{"performs", "isA"}, "performs", .33, .16, .05},
      {{"interactWith", "ingredientOf"}, "ingredientOf", .96, .61, .52},
      {{"isA", "ingredientOf"}, "ingredientOf", .86, .32, .31},
      {{"interactWith", "exhibits"}, "exhibits", .87, .29, .25},
      {{"exhibits", "affects"}, "exhibits", 1.0, .21, .21},
      {{"isA", "exhibits"}, "exhibits", .87, .15, .13},
      {{"performs", "affects"}, "exhibits", .40, .07, .03},
  };
  return rows;
}

/// Relation names as printed, mapped to the spelling used by a dataset file.
std::string resolve_name(const KnowledgeGraph& kg, const std::string& printed) {
  if (kg.predicates().find(printed).has_value()) return printed;
  static const std::map<std::string, std::string> aliases = {
      {"interactWith", "interacts_with"}, {"isA", "isa"}, {"precede", "precedes"}, {"issueIn", "issue_in"}};
  if (auto it = aliases.find(printed); it != aliases.end() && kg.predicates().find(it->second).has_value()) {
    return it->second;
  }
  std::string snake;
  for (char c : printed) {
    if (std::isupper(static_cast<unsigned char>(c))) {
      snake += '_';
      snake += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      snake += c;
    }
  }
  if (kg.predicates().find(snake).has_value()) return snake;
  throw std::runtime_error("relation '" + printed + "' not found in the dataset");
}

struct ConventionResult {
  std::size_t cells_ok = 0, cells = 0;
  std::vector<std::string> misses;
};

ConventionResult compare_saturations(const KnowledgeGraph& kg, const std::vector<SaturationRow>& rows,
                                     DirectEdge direct, double tolerance) {
  const SaturationEngine engine(kg, direct);
  ConventionResult res;
  for (const auto& row : rows) {
    RulePattern pat;
    for (const auto& p : row.pattern) pat.hops.push_back(kg.predicates().at(resolve_name(kg, p)));
    const PredicateId q = kg.predicates().at(resolve_name(kg, row.predicate));
    const double gamma = engine.macro(pat, q), delta = engine.micro(pat, q, 2);
    const double got[3] = {gamma, delta, comprehensive_saturation(gamma, delta)};
    const double want[3] = {row.gamma, row.delta, row.eta};
    const char* label[3] = {"gamma", "delta", "eta"};
    for (int i = 0; i < 3; ++i) {
      ++res.cells;
      if (std::abs(got[i] - want[i]) <= tolerance + 1e-12) {
        ++res.cells_ok;
      } else {
        res.misses.push_back(row.pattern[0] + "," + row.pattern[1] + "=>" + row.predicate + " " + label[i] + " " +
                             fmt(got[i]) + " vs " + fmt(want[i], 2));
      }
    }
  }
  return res;
}

Outcome saturation_table(const std::string& dataset, const std::vector<SaturationRow>& rows, double time_limit) {
  const auto start = Clock::now();
  const auto ds = try_load(dataset);
  if (!ds) return skip("dataset '" + dataset + "' not found under " + data_root().string());
  std::ostringstream detail;
  bool any = false;
  for (DirectEdge direct : {DirectEdge::Exclude, DirectEdge::Include}) {
    const auto r = compare_saturations(ds->graph, rows, direct, 0.02);
    const bool all = r.cells_ok == r.cells;
    any = any || all;
    detail << (direct == DirectEdge::Exclude ? "exclude" : "include") << " " << r.cells_ok << "/" << r.cells;
    if (!r.misses.empty()) {
      detail << " (";
      for (std::size_t i = 0; i < r.misses.size(); ++i) detail << (i ? "; " : "") << r.misses[i];
      detail << ")";
    }
    detail << ", ";
  }
  const double secs = seconds_since(start);
  detail << fmt(secs, 1) << " s";
  return verdict(any && secs < time_limit, detail.str());
}

// ---------------------------------------------------------------------------
// 4: Family bifurcation

Outcome family_bifurcation() {
  const auto start = Clock::now();
  const auto ds = try_load("family");
  if (!ds) return skip("dataset 'family' not found under " + data_root().string());
  const KnowledgeGraph& kg = ds->graph;
  const std::vector<std::pair<std::string, std::vector<double>>> full = {
      {"husbandOf", {14, 2, 1, 0, 0, 0}}, {"wifeOf", {8, 1, 0, 0, 0, 0}},
      {"sonOf", {85, 0, 0, 0, 0, 0}},     {"daughterOf", {84, 0, 0, 0, 0, 0}},
      {"brotherOf", {77, 57, 42, 30, 23, 18}}, {"uncleOf", {84, 74, 64, 52, 44, 39}},
  };
  const std::vector<std::pair<std::string, std::vector<double>>> test = {
      {"husbandOf", {2, 0, 0}}, {"wifeOf", {1, 0, 0}},     {"sonOf", {3, 0, 0}},
      {"daughterOf", {5, 0, 0}}, {"brotherOf", {23, 4, 1}}, {"uncleOf", {40, 11, 2}},
  };
  std::size_t ok = 0, cells = 0;
  std::vector<std::string> misses;
  auto check = [&](const std::string& tag, const std::string& name, const BifurcationRecord& rec,
                   const std::vector<double>& want) {
    for (std::size_t i = 0; i < want.size(); ++i) {
      const double got = 100.0 * rec.at(i + 2);
      ++cells;
      if (std::abs(got - want[i]) <= 1.0 + 1e-9) {
        ++ok;
      } else {
        misses.push_back(tag + " " + name + " l=" + std::to_string(i + 2) + " " + fmt(got, 1) + " vs " +
                         fmt(want[i], 0));
      }
    }
  };
  for (const auto& [name, want] : full) {
    const PredicateId q = kg.predicates().at(name);
    check("full", name, bifurcation(kg, q, Direction::Forward, 7), want);
  }
  for (const auto& [name, want] : test) {
    const PredicateId q = kg.predicates().at(name);
    check("test", name, bifurcation(ds->splits.test, kg.num_entities(), q, Direction::Forward, 4, name), want);
  }
  const double secs = seconds_since(start);
  std::string detail = std::to_string(ok) + "/" + std::to_string(cells) + " cells within 1 point";
  for (const auto& m : misses) detail += "; " + m;
  return verdict(ok == cells && secs < 60.0, detail + ", " + fmt(secs, 1) + " s");
}

// ---------------------------------------------------------------------------
// 6-9: exact properties

Outcome hit_bound() {
  BifurcationRecord family;
  family.proportions = {1.0, 0.84, 0.0};
  BifurcationRecord pairs;
  pairs.proportions = {1.0, 1.0, 0.0};
  const double a = hit_upper_bound(family, 1), b = hit_upper_bound(pairs, 1);
  return verdict(std::abs(a - 0.58) < 1e-12 && std::abs(b - 0.50) < 1e-12,
                 "(16%, 84%) -> " + fmt(a, 4) + ", p2 = 1 -> " + fmt(b, 4));
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> entities(3, 8), predicates(1, 4);
  std::uniform_real_distribution<double> density(0.05, 0.3);
  const ScoreOptions raw{Normalization::None, EpsilonMode::Corrected};
  double worst_oracle = 0.0, worst_delete = 0.0;
  std::size_t targets = 0, deleted = 0;
  for (int graph = 0; graph < 50; ++graph) {
    const KnowledgeGraph kg = random_kg(rng(), entities(rng), predicates(rng), density(rng));
    const OperatorSet ops(kg);
    const AttentionTensor attn = random_attention(rng, 1, 2, kg.num_predicates() + 1);
    for (const auto& query : group_queries(kg.triples())) {
      const auto res = score_query(ops, attn, query, raw);
      for (EntityId t : query.targets) {
        ++targets;
        const double s = res.prediction[t];
        worst_oracle = std::max(worst_oracle, std::abs(s - weighted_path_oracle(kg, attn, query.head, query.query, t)));
        if (max_direct_uses(kg, 2, query.head, query.query, t) <= 1) {
          ++deleted;
          const Triple direct{query.head, query.query, t};
          std::vector<Triple> kept;
          for (const Triple& e : kg.triples()) {
            if (!(e == direct)) kept.push_back(e);
          }
          const KnowledgeGraph pruned(kg.entities(), kg.predicates(), std::move(kept));
          worst_delete = std::max(worst_delete, std::abs(s - neural_lp_score(OperatorSet(pruned), attn, query.head, t)));
        }
      }
    }
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "50 graphs, " << targets << " targets, max |oracle diff| " << std::scientific << std::setprecision(2)
    << worst_oracle << ", " << deleted << " single-use targets, max |delete diff| " << worst_delete << ", "
    << std::fixed << secs << " s";
  return verdict(worst_oracle <= 1e-9 && worst_delete <= 1e-9 && secs < 60.0, d.str());
}

Outcome gradient() {
  const auto start = Clock::now();
  const KnowledgeGraph kg = make_kg({{"a", "r", "b"}, {"b", "r", "c"}, {"a", "s", "c"}, {"c", "s", "d"},
                                     {"b", "s", "d"}, {"a", "r", "d"}, {"d", "r", "a"}, {"c", "r", "c"}});
  const OperatorSet ops(kg);
  const MultiTargetQuery query{kg.entities().at("a"), kg.predicates().at("s"), {kg.entities().at("c")}};
  double worst = 0.0;
  std::size_t blocks = 0;
  bool all_active = true;
  for (Normalization norm : {Normalization::L1, Normalization::L2, Normalization::None}) {
    ModelConfig c;
    c.num_predicates = kg.num_predicates();
    c.embedding_dim = 3;
    c.hidden_dim = 2;
    c.rank = 2;
    c.max_rule_len = 2;
    c.normalization = norm;
    c.seed = 11;
    for (const auto& e : gradient_check(ops, ModelParams::initialize(c), query)) {
      worst = std::max(worst, e.relative);
      all_active = all_active && e.analytic_norm > 0.0;
      ++blocks;
    }
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << blocks << " parameter blocks, max relative error " << std::scientific << std::setprecision(2) << worst << ", "
    << std::fixed << secs << " s";
  return verdict(worst < 1e-4 && all_active && secs < 60.0, d.str());
}

Outcome loss_stability() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> draw(-20.0, 20.0);
  std::bernoulli_distribution coin(0.4);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(16), y(16);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = draw(rng);
      y[i] = coin(rng) ? 1.0 : 0.0;
    }
    worst = std::max(worst, std::abs(logit_loss(s, y) - naive_logit_loss(s, y)));
  }
  const std::vector<double> big = {1e4, -1e4, 1e4, -1e4}, labels = {1.0, 0.0, 0.0, 1.0};
  const double extreme = logit_loss(big, labels);
  std::ostringstream d;
  d << "max |stable - naive| " << std::scientific << std::setprecision(2) << worst << ", loss at |s| = 1e4 "
    << extreme;
  return verdict(worst <= 1e-9 && std::isfinite(extreme), d.str());
}

// ---------------------------------------------------------------------------
// 10-12: training

struct RunMetrics {
  std::uint64_t seed = 0;
  double mrr = 0.0, hit3 = 0.0, seconds = 0.0;
  std::size_t epochs = 0;
};

RunMetrics train_and_test(const Dataset& ds, std::uint64_t seed) {
  const auto start = Clock::now();
  TrainConfig config;  // L = 2, R = 3, d = 128, batch 128, lr 0.001
  config.seed = seed;
  const TrainResult result = train(ds.graph, ds.splits, config);
  const EvalReport report = evaluate(OperatorSet(ds.graph), result.best, ds.splits.test, {1, 3, 10});
  return {seed, report.mrr, report.hit_at.at(3), seconds_since(start), result.log.size()};
}

Outcome training(const std::string& dataset, double min_mrr, std::optional<double> min_hit3) {
  const auto ds = try_load(dataset);
  if (!ds) return skip("dataset '" + dataset + "' not found under " + data_root().string());
  std::vector<RunMetrics> runs;
  for (std::uint64_t seed : {0, 1, 2}) runs.push_back(train_and_test(*ds, seed));
  const RunMetrics best = *std::max_element(runs.begin(), runs.end(),
                                            [](const RunMetrics& a, const RunMetrics& b) { return a.mrr < b.mrr; });
  bool in_time = true;
  std::ostringstream d;
  d << dataset << " best seed " << best.seed << " MRR " << fmt(best.mrr) << " (need >= " << fmt(min_mrr, 2) << ")";
  if (min_hit3) d << ", Hit@3 " << fmt(best.hit3) << " (need >= " << fmt(*min_hit3, 2) << ")";
  d << "; runs:";
  for (const auto& r : runs) {
    in_time = in_time && r.seconds <= 1800.0;
    d << " seed " << r.seed << " MRR " << fmt(r.mrr) << " Hit@3 " << fmt(r.hit3) << " " << r.epochs << " epochs "
      << fmt(r.seconds, 0) << " s;";
  }
  const bool ok = best.mrr >= min_mrr && (!min_hit3 || best.hit3 >= *min_hit3) && in_time;
  return verdict(ok, d.str());
}

Outcome family_rules() {
  const auto ds = try_load("family");
  if (!ds) return skip("dataset 'family' not found under " + data_root().string());
  const KnowledgeGraph& kg = ds->graph;
  const std::map<std::string, std::vector<std::vector<std::string>>> blocks = {
      {"wifeOf", {{"motherOf", "daughterOf"}, {"motherOf", "sonOf"}}},
      {"motherOf", {{"wifeOf", "fatherOf"}, {"motherOf", "sisterOf"}, {"wifeOf", "wifeOf"}, {"motherOf", "brotherOf"}}},
      {"uncleOf",
       {{"brotherOf", "fatherOf"},
        {"uncleOf", "brotherOf"},
        {"brotherOf", "motherOf"},
        {"motherOf", "brotherOf"},
        {"sisterOf", "brotherOf"},
        {"uncleOf", "sisterOf"}}},
  };
  TrainConfig config;
  const TrainResult result = train(kg, ds->splits, config);
  bool ok = true;
  std::ostringstream d;
  for (const auto& [q, printed] : blocks) {
    std::set<std::vector<PredicateId>> expected;
    for (const auto& names : printed) {
      std::vector<PredicateId> hops;
      for (const auto& n : names) hops.push_back(kg.predicates().at(n));
      expected.insert(hops);
    }
    std::size_t shared = 0;
    const auto rules = extract_rules(result.best, kg.predicates().at(q), 4);
    for (const auto& r : rules) shared += expected.count(r.hops.hops);
    ok = ok && shared >= 2;
    d << q << " " << shared << "/4; ";
  }
  return verdict(ok, d.str() + "seed " + std::to_string(config.seed));
}

Outcome determinism() {
  auto ds = try_load("umls");
  std::string source = "umls";
  if (!ds) {
    // Falls back to a synthetic graph so the property is still exercised.
    const KnowledgeGraph kg = random_kg(77, 40, 5, 0.01);
    Dataset synthetic{kg, {}, {}};
    for (std::size_t i = 0; i < kg.triples().size(); ++i) {
      (i % 10 < 8 ? synthetic.splits.train : i % 10 == 8 ? synthetic.splits.valid : synthetic.splits.test)
          .push_back(kg.triples()[i]);
    }
    ds = std::move(synthetic);
    source = "synthetic";
  }
  TrainConfig config;
  config.max_epochs = 2;
  config.seed = 5;
  auto run_once = [&] {
    const TrainResult result = train(ds->graph, ds->splits, config);
    const EvalReport report = evaluate(OperatorSet(ds->graph), result.best, ds->splits.test);
    std::ostringstream eval, rules;
    write_eval_tsv(eval, ds->graph, report);
    write_eval_summary(eval, ds->graph, report);
    for (PredicateId q = 0; q < ds->graph.num_predicates(); ++q) {
      write_rules_table(rules, ds->graph, extract_rules(result.best, q, 10));
    }
    return std::pair{eval.str(), rules.str()};
  };
  const auto a = run_once(), b = run_once();
  return verdict(a == b, source + ": eval report " + (a.first == b.first ? "identical" : "differs") +
                             ", rule tables " + (a.second == b.second ? "identical" : "differs"));
}

struct Criterion {
  std::string id, name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"1", "tensorlog-example", tensorlog_example},
      {"2", "toy-bifurcation", toy_bifurcation},
      {"3", "family-saturation", [] { return saturation_table("family", family_saturation_rows(), 600.0); }},
      {"4", "family-bifurcation", family_bifurcation},
      {"5", "umls-saturation", [] { return saturation_table("umls", umls_saturation_rows(), 300.0); }},
      {"6", "hit-upper-bound", hit_bound},
      {"7", "oracle-equivalence", oracle_equivalence},
      {"8", "gradient-check", gradient},
      {"9", "loss-stability", loss_stability},
      {"10-family", "training-family", [] { return training("family", 0.55, 0.60); }},
      {"10-kinship", "training-kinship", [] { return training("kinship", 0.26, std::nullopt); }},
      {"10-umls", "training-umls", [] { return training("umls", 0.30, std::nullopt); }},
      {"11", "family-rules", family_rules},
      {"12", "determinism", determinism},
  };
  return list;
}

int report(const Criterion& c) {
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {Status::Fail, std::string("error: ") + e.what()};
  }
  const char* word = o.status == Status::Pass ? "PASS" : o.status == Status::Skip ? "SKIP" : "FAIL";
  std::cout << "criterion " << c.id << " [" << c.name << "]: " << word << "  " << o.detail << std::endl;
  return o.status == Status::Pass ? 0 : o.status == Status::Skip ? 77 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<std::string> selected;
  app.add_option("--criterion", selected, "criterion id (1..12, 10-family, 10-kinship, 10-umls); default: all");
  CLI11_PARSE(app, argc, argv);

  int worst = 0;
  bool any = false;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    any = true;
    const int code = report(c);
    if (code == 1) worst = 1;
    if (code == 77 && worst == 0) worst = 77;
  }
  if (!any) {
    std::cerr << "no such criterion\n";
    return 2;
  }
  return worst;
}
