#include "mplr/kg.hpp"

#include <fstream>
#include <ostream>
#include <unordered_set>

namespace mplr {

std::uint32_t Vocabulary::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Vocabulary::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw std::out_of_range("unknown name '" + std::string(name) + "'");
}

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary predicates, std::vector<Triple> triples)
    : entities_(std::move(entities)), predicates_(std::move(predicates)), per_predicate_(predicates_.size()) {
  triples_.reserve(triples.size());
  lookup_.reserve(triples.size());
  for (const auto& t : triples) {
    if (t.head >= entities_.size() || t.tail >= entities_.size() || t.predicate >= predicates_.size()) {
      throw std::out_of_range("triple index outside vocabulary bounds");
    }
    if (!lookup_.emplace(t, triples_.size()).second) {
      ++duplicates_;
      continue;
    }
    triples_.push_back(t);
    per_predicate_[t.predicate].push_back(t);
  }
}

namespace {

struct RawTriple {
  std::string head, relation, tail;
};

std::vector<RawTriple> read_raw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triple file: " + path.string());
  std::vector<RawTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t a = line.find('\t');
    std::size_t b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (a == std::string::npos || b == std::string::npos || line.find('\t', b + 1) != std::string::npos) {
      throw ParseError(path.string(), lineno, "expected exactly 3 TAB-separated fields");
    }
    RawTriple t{line.substr(0, a), line.substr(a + 1, b - a - 1), line.substr(b + 1)};
    if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
      throw ParseError(path.string(), lineno, "empty field");
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& train_path, const std::filesystem::path& valid_path,
                     const std::filesystem::path& test_path, const LoadOptions& options) {
  auto raw_train = read_raw(train_path);
  auto raw_valid = read_raw(valid_path);
  auto raw_test = read_raw(test_path);
  if (raw_train.empty()) throw std::runtime_error("train file is empty: " + train_path.string());

  Vocabulary entities, predicates;
  Dataset ds;
  std::unordered_set<Triple, TripleHash> seen;
  auto intern_split = [&](const std::vector<RawTriple>& raw, std::vector<Triple>& out) {
    for (const auto& r : raw) {
      Triple t{entities.intern(r.head), predicates.intern(r.relation), entities.intern(r.tail)};
      if (!seen.insert(t).second) {
        ++ds.summary.duplicates;
        continue;
      }
      out.push_back(t);
    }
  };
  intern_split(raw_train, ds.splits.train);
  intern_split(raw_valid, ds.splits.valid);
  intern_split(raw_test, ds.splits.test);

  std::vector<Triple> graph_triples;
  auto fold = [&](bool use, const std::vector<Triple>& split) {
    if (use) graph_triples.insert(graph_triples.end(), split.begin(), split.end());
  };
  fold(options.graph_from_train, ds.splits.train);
  fold(options.graph_from_valid, ds.splits.valid);
  fold(options.graph_from_test, ds.splits.test);

  if (options.add_inverse) {
    const auto base = static_cast<PredicateId>(predicates.size());
    for (PredicateId p = 0; p < base; ++p) predicates.intern("inv_" + predicates.name(p));
    const std::size_t n = graph_triples.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = graph_triples[i];
      graph_triples.push_back({t.tail, static_cast<PredicateId>(t.predicate + base), t.head});
    }
  }

  ds.graph = KnowledgeGraph(std::move(entities), std::move(predicates), std::move(graph_triples));
  ds.summary.entities = ds.graph.num_entities();
  ds.summary.predicates = ds.graph.num_predicates();
  ds.summary.graph_triples = ds.graph.triples().size();
  ds.summary.train = ds.splits.train.size();
  ds.summary.valid = ds.splits.valid.size();
  ds.summary.test = ds.splits.test.size();
  return ds;
}

Dataset load_dataset_dir(const std::filesystem::path& dir, const LoadOptions& options) {
  return load_dataset(dir / "train.txt", dir / "valid.txt", dir / "test.txt", options);
}

void write_triples(std::ostream& out, const KnowledgeGraph& kg, const std::vector<Triple>& triples) {
  for (const auto& t : triples) {
    out << kg.entities().name(t.head) << '\t' << kg.predicates().name(t.predicate) << '\t'
        << kg.entities().name(t.tail) << '\n';
  }
}

void write_load_summary(std::ostream& out, const LoadSummary& s) {
  out << "entities = " << s.entities << '\n'
      << "predicates = " << s.predicates << '\n'
      << "graph_triples = " << s.graph_triples << '\n'
      << "train = " << s.train << '\n'
      << "valid = " << s.valid << '\n'
      << "test = " << s.test << '\n'
      << "duplicates = " << s.duplicates << '\n';
}

std::size_t fw_degree(const KnowledgeGraph& kg, PredicateId q, EntityId v) {
  std::size_t n = 0;
  for (const auto& t : kg.per_predicate(q)) n += t.head == v;
  return n;
}

std::size_t bw_degree(const KnowledgeGraph& kg, PredicateId q, EntityId v) {
  std::size_t n = 0;
  for (const auto& t : kg.per_predicate(q)) n += t.tail == v;
  return n;
}

DegreeTable degree_table(const KnowledgeGraph& kg, PredicateId q) {
  DegreeTable d{std::vector<std::uint32_t>(kg.num_entities(), 0), std::vector<std::uint32_t>(kg.num_entities(), 0)};
  for (const auto& t : kg.per_predicate(q)) {
    ++d.forward[t.head];
    ++d.backward[t.tail];
  }
  return d;
}

std::vector<MultiTargetQuery> group_queries(const std::vector<Triple>& split) {
  std::vector<MultiTargetQuery> out;
  std::unordered_map<std::uint64_t, std::size_t> slot;
  std::unordered_set<Triple, TripleHash> seen;
  for (const auto& t : split) {
    if (!seen.insert(t).second) continue;
    const std::uint64_t key = (std::uint64_t{t.head} << 32) | t.predicate;
    auto [it, fresh] = slot.emplace(key, out.size());
    if (fresh) out.push_back({t.head, t.predicate, {}});
    out[it->second].targets.push_back(t.tail);
  }
  return out;
}

}  // namespace mplr
