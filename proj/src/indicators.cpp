#include "mplr/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace mplr {

namespace {

// Sparse walk-count vector with O(touched) reset.
class Frontier {
 public:
  explicit Frontier(std::size_t n) : mass_(n, 0) {}

  void clear() {
    for (EntityId e : touched_) mass_[e] = 0;
    touched_.clear();
  }
  void add(EntityId e, std::uint64_t m) {
    if (mass_[e] == 0) touched_.push_back(e);
    mass_[e] += m;
  }
  void seed(EntityId e) {
    clear();
    add(e, 1);
  }
  bool empty() const noexcept { return touched_.empty(); }
  std::uint64_t operator[](EntityId e) const { return mass_[e]; }
  const std::vector<EntityId>& touched() const noexcept { return touched_; }

 private:
  std::vector<std::uint64_t> mass_;
  std::vector<EntityId> touched_;
};

constexpr OperatorIndex kAnyPredicate = ~OperatorIndex{0};

// out = in · M_op (or the union of all predicate operators), skipping the excluded labeled edge.
void step(const OperatorSet& ops, const Frontier& in, Frontier& out, OperatorIndex op,
          const std::optional<ExcludedEdge>& excluded) {
  out.clear();
  for (EntityId i : in.touched()) {
    const std::uint64_t m = in[i];
    const bool skip_row = excluded && excluded->head == i;
    if (op != kAnyPredicate) {
      for (EntityId j : ops.op(op).row(i)) {
        if (skip_row && op == excluded->op && j == excluded->tail) continue;
        out.add(j, m);
      }
    } else {
      for (const auto& e : ops.out_edges(i)) {
        if (skip_row && e.op == excluded->op && e.target == excluded->tail) continue;
        out.add(e.target, m);
      }
    }
  }
}

// Base-|P| pattern codes with a per-length offset so lengths never collide.
class PatternCodec {
 public:
  PatternCodec(std::size_t num_predicates, std::size_t max_len) : base_(num_predicates), offsets_(max_len + 2, 0) {
    std::uint64_t power = 1;
    for (std::size_t l = 1; l <= max_len + 1; ++l) {
      offsets_[l] = offsets_[l - 1] + (l == 1 ? 0 : power);
      power *= base_;
    }
  }

  std::uint64_t encode(std::span<const PredicateId> hops) const {
    std::uint64_t code = 0;
    for (PredicateId p : hops) code = code * base_ + p;
    return code + offsets_[hops.size()];
  }

  RulePattern decode(std::uint64_t code) const {
    std::size_t len = 1;
    while (len + 1 < offsets_.size() && offsets_[len + 1] <= code) ++len;
    code -= offsets_[len];
    RulePattern p{std::vector<PredicateId>(len)};
    for (std::size_t i = len; i-- > 0;) {
      p.hops[i] = static_cast<PredicateId>(code % base_);
      code /= base_;
    }
    return p;
  }

 private:
  std::uint64_t base_;
  std::vector<std::uint64_t> offsets_;
};

std::optional<ExcludedEdge> exclusion_for(const Triple& t, DirectEdge mode) {
  if (mode == DirectEdge::Include) return std::nullopt;
  return ExcludedEdge{t.head, operator_of(t.predicate), t.tail};
}

}  // namespace

SaturationEngine::SaturationEngine(const KnowledgeGraph& kg, DirectEdge direct_edge)
    : kg_(kg), ops_(kg), direct_edge_(direct_edge) {}

const std::vector<Triple>& SaturationEngine::nonempty(PredicateId q) const {
  const auto& edges = kg_.per_predicate(q);
  if (edges.empty()) throw EmptySubgraphError(kg_.predicates().name(q));
  return edges;
}

std::uint64_t SaturationEngine::pattern_paths(const Triple& triplet, const RulePattern& pattern) const {
  std::optional<Triple> excluded;
  if (direct_edge_ == DirectEdge::Exclude) excluded = triplet;
  return count_paths(ops_, triplet.head, pattern, triplet.tail, excluded);
}

std::uint64_t SaturationEngine::total_paths(const Triple& triplet, std::size_t max_len) const {
  const auto excluded = exclusion_for(triplet, direct_edge_);
  Frontier a(kg_.num_entities()), b(kg_.num_entities());
  a.seed(triplet.head);
  std::uint64_t total = 0;
  for (std::size_t depth = 1; depth <= max_len && !a.empty(); ++depth) {
    step(ops_, a, b, kAnyPredicate, excluded);
    std::swap(a, b);
    if (depth >= 2) total += a[triplet.tail];
  }
  return total;
}

double SaturationEngine::macro(const RulePattern& pattern, PredicateId q) const {
  const auto& edges = nonempty(q);
  std::size_t hit = 0;
  for (const auto& t : edges) hit += pattern_paths(t, pattern) > 0;
  return static_cast<double>(hit) / static_cast<double>(edges.size());
}

double SaturationEngine::micro(const RulePattern& pattern, PredicateId q, std::size_t max_len) const {
  if (pattern.hops.size() > max_len) throw std::invalid_argument("micro saturation: pattern longer than max_len");
  const auto& edges = nonempty(q);
  double sum = 0.0;
  for (const auto& t : edges) {
    const std::uint64_t own = pattern_paths(t, pattern);
    if (own == 0) continue;
    sum += static_cast<double>(own) / static_cast<double>(total_paths(t, max_len));
  }
  return sum / static_cast<double>(edges.size());
}

std::vector<SaturationRecord> SaturationEngine::all_patterns(PredicateId q, std::size_t max_len) const {
  if (max_len < 2) throw std::invalid_argument("saturation patterns need max_len >= 2");
  const auto& edges = nonempty(q);
  const std::size_t num_preds = kg_.num_predicates();
  const PatternCodec codec(num_preds, max_len);

  struct Accum {
    std::size_t hits = 0;
    double share = 0.0;
  };
  std::unordered_map<std::uint64_t, Accum> acc;
  std::vector<Frontier> levels(max_len + 1, Frontier(kg_.num_entities()));
  std::vector<PredicateId> hops;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> found;

  for (const auto& triplet : edges) {
    const auto excluded = exclusion_for(triplet, direct_edge_);
    found.clear();
    levels[0].seed(triplet.head);
    // Depth-first over the pattern prefix tree; each level holds the frontier after `depth` hops.
    auto visit = [&](auto&& self, std::size_t depth) -> void {
      for (PredicateId p = 0; p < num_preds; ++p) {
        step(ops_, levels[depth - 1], levels[depth], operator_of(p), excluded);
        if (levels[depth].empty()) continue;
        hops.push_back(p);
        if (depth >= 2) {
          if (const auto c = levels[depth][triplet.tail]; c > 0) found.emplace_back(codec.encode(hops), c);
        }
        if (depth < max_len) self(self, depth + 1);
        hops.pop_back();
      }
    };
    visit(visit, 1);

    std::uint64_t total = 0;
    for (const auto& [code, c] : found) total += c;
    for (const auto& [code, c] : found) {
      auto& a = acc[code];
      ++a.hits;
      a.share += static_cast<double>(c) / static_cast<double>(total);
    }
  }

  std::vector<std::uint64_t> codes;
  codes.reserve(acc.size());
  for (const auto& [code, a] : acc) codes.push_back(code);
  std::sort(codes.begin(), codes.end());

  const double n = static_cast<double>(edges.size());
  std::vector<SaturationRecord> out;
  out.reserve(codes.size());
  for (auto code : codes) {
    const auto& a = acc.at(code);
    SaturationRecord r{codec.decode(code), q, static_cast<double>(a.hits) / n, a.share / n, 0.0};
    r.eta = comprehensive_saturation(r.gamma, r.delta);
    out.push_back(std::move(r));
  }
  return out;
}

double macro_saturation(const KnowledgeGraph& kg, const RulePattern& pattern, PredicateId q, DirectEdge direct_edge) {
  return SaturationEngine(kg, direct_edge).macro(pattern, q);
}

double micro_saturation(const KnowledgeGraph& kg, const RulePattern& pattern, PredicateId q, std::size_t max_len,
                        DirectEdge direct_edge) {
  return SaturationEngine(kg, direct_edge).micro(pattern, q, max_len);
}

BifurcationRecord bifurcation(const std::vector<Triple>& triples, std::size_t num_entities, PredicateId q,
                              Direction direction, std::size_t lambda_max, const std::string& predicate_name) {
  if (lambda_max < 1) throw std::invalid_argument("bifurcation: lambda_max must be >= 1");
  std::vector<std::uint32_t> degree(num_entities, 0);
  std::size_t edges = 0;
  for (const auto& t : triples) {
    if (t.predicate != q) continue;
    ++edges;
    ++degree.at(direction == Direction::Forward ? t.head : t.tail);
  }
  if (edges == 0) throw EmptySubgraphError(predicate_name);

  std::size_t anchors = 0;
  std::vector<std::size_t> at_least(lambda_max + 1, 0);
  for (auto d : degree) {
    if (d == 0) continue;
    ++anchors;
    for (std::size_t l = 1; l <= std::min<std::size_t>(d, lambda_max); ++l) ++at_least[l];
  }
  BifurcationRecord r{q, direction, {}};
  r.proportions.reserve(lambda_max);
  for (std::size_t l = 1; l <= lambda_max; ++l) {
    r.proportions.push_back(static_cast<double>(at_least[l]) / static_cast<double>(anchors));
  }
  return r;
}

BifurcationRecord bifurcation(const KnowledgeGraph& kg, PredicateId q, Direction direction, std::size_t lambda_max) {
  return bifurcation(kg.per_predicate(q), kg.num_entities(), q, direction, lambda_max, kg.predicates().name(q));
}

KnowledgeGraph sample_subgraph(const KnowledgeGraph& kg, std::uint64_t seed, std::size_t target_triples) {
  const auto& all = kg.triples();
  if (target_triples > all.size()) throw std::invalid_argument("sample_subgraph: target exceeds triple count");
  std::vector<std::size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `target_triples` slots become the sample.
  for (std::size_t i = 0; i < target_triples; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(target_triples);
  std::sort(idx.begin(), idx.end());
  std::vector<Triple> sampled;
  sampled.reserve(target_triples);
  for (auto i : idx) sampled.push_back(all[i]);
  return KnowledgeGraph(kg.entities(), kg.predicates(), std::move(sampled));
}

double saturation_cost(const KnowledgeGraph& kg, std::size_t max_len) {
  return std::pow(static_cast<double>(kg.num_predicates()), static_cast<double>(max_len + 1)) *
         static_cast<double>(kg.triples().size());
}

SaturationReport saturation_report(const KnowledgeGraph& kg, std::size_t max_len, std::size_t top_n,
                                   DirectEdge direct_edge) {
  SaturationEngine engine(kg, direct_edge);
  SaturationReport report;
  for (PredicateId q = 0; q < kg.num_predicates(); ++q) {
    if (kg.per_predicate(q).empty()) {
      report.warnings.push_back("skipped predicate " + kg.predicates().name(q) + ": empty subgraph");
      continue;
    }
    auto rows = engine.all_patterns(q, max_len);
    if (rows.empty()) {
      report.warnings.push_back("no connecting paths of length 2.." + std::to_string(max_len) + " for predicate " +
                                kg.predicates().name(q));
      continue;
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.eta > b.eta; });
    if (top_n > 0 && rows.size() > top_n) rows.resize(top_n);
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }
  return report;
}

std::string format_pattern(const KnowledgeGraph& kg, const RulePattern& pattern, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < pattern.hops.size(); ++i) {
    if (i) s += sep;
    s += kg.predicates().name(pattern.hops[i]);
  }
  return s;
}

namespace {

std::string two_decimals(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string chain_text(const KnowledgeGraph& kg, const RulePattern& pattern) {
  static const char* kVars[] = {"Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7"};
  std::string s = "X";
  for (std::size_t i = 0; i < pattern.hops.size(); ++i) {
    s += " -" + kg.predicates().name(pattern.hops[i]) + "-> ";
    s += i + 1 == pattern.hops.size() ? "Y" : (pattern.hops.size() == 2 ? "Z" : kVars[i % 7]);
  }
  return s;
}

}  // namespace

void write_saturation_tsv(std::ostream& out, const KnowledgeGraph& kg, const SaturationReport& report) {
  out << "pattern\tpredicate\tgamma\tdelta\teta\n";
  out << std::setprecision(10);
  for (const auto& r : report.rows) {
    out << format_pattern(kg, r.pattern) << '\t' << kg.predicates().name(r.predicate) << '\t' << r.gamma << '\t'
        << r.delta << '\t' << r.eta << '\n';
  }
}

void write_saturation_table(std::ostream& out, const KnowledgeGraph& kg, const SaturationReport& report) {
  std::size_t rule_w = 4, pred_w = 9;
  for (const auto& r : report.rows) {
    rule_w = std::max(rule_w, chain_text(kg, r.pattern).size());
    pred_w = std::max(pred_w, kg.predicates().name(r.predicate).size());
  }
  out << std::left << std::setw(static_cast<int>(rule_w)) << "Rule" << "  =>  " << std::setw(static_cast<int>(pred_w))
      << "Predicate" << "  gamma  delta  eta\n";
  std::optional<PredicateId> last;
  for (const auto& r : report.rows) {
    const bool first = !last || *last != r.predicate;
    if (first && last) out << std::string(rule_w + pred_w + 27, '-') << '\n';
    out << std::left << std::setw(static_cast<int>(rule_w)) << chain_text(kg, r.pattern) << "  =>  "
        << std::setw(static_cast<int>(pred_w)) << (first ? kg.predicates().name(r.predicate) : "") << "  "
        << two_decimals(r.gamma) << "   " << two_decimals(r.delta) << "   " << two_decimals(r.eta) << '\n';
    last = r.predicate;
  }
  for (const auto& w : report.warnings) out << "# warning: " << w << '\n';
}

void write_bifurcation_tsv(std::ostream& out, const KnowledgeGraph& kg, const std::vector<BifurcationRecord>& records) {
  out << "predicate\tdirection\tlambda\tproportion\n";
  out << std::setprecision(10);
  for (const auto& r : records) {
    for (std::size_t l = 1; l <= r.proportions.size(); ++l) {
      out << kg.predicates().name(r.predicate) << '\t' << (r.direction == Direction::Forward ? "forward" : "backward")
          << '\t' << l << '\t' << r.at(l) << '\n';
    }
  }
}

void write_bifurcation_table(std::ostream& out, const KnowledgeGraph& kg,
                             const std::vector<BifurcationRecord>& records) {
  std::size_t w = 9;
  std::size_t lambda_max = 0;
  for (const auto& r : records) {
    w = std::max(w, kg.predicates().name(r.predicate).size());
    lambda_max = std::max(lambda_max, r.proportions.size());
  }
  out << std::left << std::setw(static_cast<int>(w)) << "predicate" << "  dir";
  for (std::size_t l = 2; l <= lambda_max; ++l) out << "  " << std::right << std::setw(3) << l;
  out << '\n';
  for (const auto& r : records) {
    out << std::left << std::setw(static_cast<int>(w)) << kg.predicates().name(r.predicate) << "  "
        << (r.direction == Direction::Forward ? "fw" : "bw");
    for (std::size_t l = 2; l <= r.proportions.size(); ++l) {
      out << "  " << std::right << std::setw(3) << std::lround(100.0 * r.at(l));
    }
    out << '\n';
  }
}

}  // namespace mplr
