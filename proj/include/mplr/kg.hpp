#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mplr {

using EntityId = std::uint32_t;
using PredicateId = std::uint32_t;

struct Triple {
  EntityId head = 0;
  PredicateId predicate = 0;
  EntityId tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t k = (std::uint64_t{t.head} << 40) ^ (std::uint64_t{t.predicate} << 20) ^ t.tail;
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

/// Thrown for malformed triple files; carries the offending location.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Insertion-ordered string interning. Ids are dense and assigned on first appearance.
class Vocabulary {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  std::uint32_t at(std::string_view name) const;  // throws std::out_of_range
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// An immutable labeled multigraph over interned entities and predicates.
///
/// `per_predicate(p)` is the subgraph G(p) as an edge list; its sizes sum to
/// `triples().size()`.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  /// Deduplicates `triples` (first occurrence wins) and validates ids against the vocabularies.
  KnowledgeGraph(Vocabulary entities, Vocabulary predicates, std::vector<Triple> triples);

  const Vocabulary& entities() const noexcept { return entities_; }
  const Vocabulary& predicates() const noexcept { return predicates_; }
  std::size_t num_entities() const noexcept { return entities_.size(); }
  std::size_t num_predicates() const noexcept { return predicates_.size(); }

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const std::vector<Triple>& per_predicate(PredicateId p) const { return per_predicate_.at(p); }
  bool contains(const Triple& t) const { return lookup_.contains(t); }

  /// Number of duplicate triples dropped at construction.
  std::size_t duplicates_dropped() const noexcept { return duplicates_; }

 private:
  Vocabulary entities_;
  Vocabulary predicates_;
  std::vector<Triple> triples_;
  std::vector<std::vector<Triple>> per_predicate_;
  std::unordered_map<Triple, std::size_t, TripleHash> lookup_;
  std::size_t duplicates_ = 0;
};

enum class Split { Train, Valid, Test };

struct DatasetSplits {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
};

struct LoadOptions {
  bool graph_from_train = true;
  bool graph_from_valid = true;
  bool graph_from_test = true;
  /// Adds an `inv_<p>` predicate with reversed edges for every predicate in the graph.
  bool add_inverse = false;
};

struct LoadSummary {
  std::size_t entities = 0;
  std::size_t predicates = 0;
  std::size_t graph_triples = 0;
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
  /// Repeated lines within a split plus triples of valid/test already present in an earlier split.
  std::size_t duplicates = 0;
};

struct Dataset {
  KnowledgeGraph graph;
  DatasetSplits splits;
  LoadSummary summary;
};

/// Loads three TAB-separated triple files (head, relation, tail).
///
/// Vocabularies cover the union of all splits in first-appearance order
/// (train, then valid, then test). Within each split duplicate lines are kept
/// once; a triple appearing in more than one split is kept only in the first,
/// so the splits stay pairwise disjoint. Throws ParseError on malformed lines and
/// std::runtime_error on an empty train file or an unreadable path.
Dataset load_dataset(const std::filesystem::path& train_path, const std::filesystem::path& valid_path,
                     const std::filesystem::path& test_path, const LoadOptions& options = {});

/// Convenience wrapper: `<dir>/train.txt`, `<dir>/valid.txt`, `<dir>/test.txt`.
Dataset load_dataset_dir(const std::filesystem::path& dir, const LoadOptions& options = {});

void write_triples(std::ostream& out, const KnowledgeGraph& kg, const std::vector<Triple>& triples);
void write_load_summary(std::ostream& out, const LoadSummary& summary);

/// |{u : (v, q, u) in G}|
std::size_t fw_degree(const KnowledgeGraph& kg, PredicateId q, EntityId v);
/// |{u : (u, q, v) in G}|
std::size_t bw_degree(const KnowledgeGraph& kg, PredicateId q, EntityId v);

/// Per-entity forward and backward degree tables for one predicate.
struct DegreeTable {
  std::vector<std::uint32_t> forward;
  std::vector<std::uint32_t> backward;
};
DegreeTable degree_table(const KnowledgeGraph& kg, PredicateId q);

struct MultiTargetQuery {
  EntityId head = 0;
  PredicateId query = 0;
  std::vector<EntityId> targets;
};

/// One query per distinct (head, predicate) pair, in first-appearance order.
std::vector<MultiTargetQuery> group_queries(const std::vector<Triple>& split);

}  // namespace mplr
