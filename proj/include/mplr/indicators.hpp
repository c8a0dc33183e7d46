#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mplr/kg.hpp"
#include "mplr/tensorlog.hpp"

namespace mplr {

class EmptySubgraphError : public std::runtime_error {
 public:
  explicit EmptySubgraphError(const std::string& predicate)
      : std::runtime_error("empty subgraph for predicate '" + predicate + "'") {}
};

/// Whether the triplet's own edge (h, q, t) may be walked when counting paths for it.
enum class DirectEdge { Exclude, Include };

struct SaturationRecord {
  RulePattern pattern;
  PredicateId predicate = 0;
  double gamma = 0.0;  // macro
  double delta = 0.0;  // micro
  double eta = 0.0;    // comprehensive
};

enum class Direction { Forward, Backward };

struct BifurcationRecord {
  PredicateId predicate = 0;
  Direction direction = Direction::Forward;
  /// proportions[λ - 1] for λ = 1..λ_max
  std::vector<double> proportions;

  double at(std::size_t lambda) const { return proportions.at(lambda - 1); }
};

/// Path statistics over one graph, shared by all saturation queries.
///
/// Paths are counted by frontier propagation through the predicate operators
/// (one sparse vector-matrix product per hop).
class SaturationEngine {
 public:
  explicit SaturationEngine(const KnowledgeGraph& kg, DirectEdge direct_edge = DirectEdge::Exclude);

  /// Fraction of (h, q, t) in G(q) connected by at least one walk following `pattern`.
  double macro(const RulePattern& pattern, PredicateId q) const;
  /// Mean over G(q) of (#walks following `pattern`) / (#walks of any pattern of length 2..max_len).
  double micro(const RulePattern& pattern, PredicateId q, std::size_t max_len) const;
  /// γ, δ, η for every pattern of length 2..max_len with at least one instance, unsorted.
  std::vector<SaturationRecord> all_patterns(PredicateId q, std::size_t max_len) const;

  /// Walks of every pattern with length in [2, max_len] from h to t, counted on the
  /// union multigraph (independent of the per-pattern enumeration).
  std::uint64_t total_paths(const Triple& triplet, std::size_t max_len) const;

  const KnowledgeGraph& graph() const noexcept { return kg_; }
  const OperatorSet& operators() const noexcept { return ops_; }
  DirectEdge direct_edge() const noexcept { return direct_edge_; }

 private:
  std::uint64_t pattern_paths(const Triple& triplet, const RulePattern& pattern) const;
  const std::vector<Triple>& nonempty(PredicateId q) const;

  const KnowledgeGraph& kg_;
  OperatorSet ops_;
  DirectEdge direct_edge_;
};

double macro_saturation(const KnowledgeGraph& kg, const RulePattern& pattern, PredicateId q,
                        DirectEdge direct_edge = DirectEdge::Exclude);
double micro_saturation(const KnowledgeGraph& kg, const RulePattern& pattern, PredicateId q, std::size_t max_len,
                        DirectEdge direct_edge = DirectEdge::Exclude);
inline double comprehensive_saturation(double gamma, double delta) { return gamma * delta; }

BifurcationRecord bifurcation(const KnowledgeGraph& kg, PredicateId q, Direction direction, std::size_t lambda_max);

/// Bifurcation of an arbitrary triple list (e.g. a test split) under predicate q.
BifurcationRecord bifurcation(const std::vector<Triple>& triples, std::size_t num_entities, PredicateId q,
                              Direction direction, std::size_t lambda_max, const std::string& predicate_name);

/// Uniform sample of `target_triples` triples without replacement; vocabularies are kept whole.
KnowledgeGraph sample_subgraph(const KnowledgeGraph& kg, std::uint64_t seed, std::size_t target_triples);

/// Rough work estimate |P|^(L+1) · |G| used to gate exhaustive saturation runs.
double saturation_cost(const KnowledgeGraph& kg, std::size_t max_len);

struct SaturationReport {
  /// Grouped by predicate id; within a group sorted by η descending.
  std::vector<SaturationRecord> rows;
  std::vector<std::string> warnings;
};

/// Keeps the top_n rows per predicate by η (0 keeps all).
SaturationReport saturation_report(const KnowledgeGraph& kg, std::size_t max_len, std::size_t top_n,
                                   DirectEdge direct_edge = DirectEdge::Exclude);

std::string format_pattern(const KnowledgeGraph& kg, const RulePattern& pattern, const char* sep = ",");

void write_saturation_tsv(std::ostream& out, const KnowledgeGraph& kg, const SaturationReport& report);
void write_saturation_table(std::ostream& out, const KnowledgeGraph& kg, const SaturationReport& report);
void write_bifurcation_tsv(std::ostream& out, const KnowledgeGraph& kg, const std::vector<BifurcationRecord>& records);
void write_bifurcation_table(std::ostream& out, const KnowledgeGraph& kg,
                             const std::vector<BifurcationRecord>& records);

}  // namespace mplr
