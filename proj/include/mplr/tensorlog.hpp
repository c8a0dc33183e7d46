#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mplr/kg.hpp"

namespace mplr {

/// Operator slot 0 is the identity; slot k >= 1 is predicate k - 1.
using OperatorIndex = std::uint32_t;
inline constexpr OperatorIndex kIdentityOperator = 0;
inline constexpr OperatorIndex operator_of(PredicateId p) noexcept { return p + 1; }

/// Dense length-|E| vector of non-negative path masses.
using StateVector = std::vector<double>;

StateVector one_hot(std::size_t size, EntityId e);

/// Sparse 0/1 adjacency matrix of one predicate, row-major with sorted columns.
class Operator {
 public:
  static Operator identity(std::size_t n);
  static Operator from_edges(std::size_t n, PredicateId predicate, const std::vector<Triple>& edges);

  OperatorIndex index() const noexcept { return index_; }
  bool is_identity() const noexcept { return index_ == kIdentityOperator; }
  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return is_identity() ? n_ : cols_.size(); }
  std::span<const EntityId> row(EntityId i) const;
  bool at(EntityId i, EntityId j) const;

 private:
  OperatorIndex index_ = kIdentityOperator;
  std::size_t n_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<EntityId> cols_;
  std::vector<EntityId> identity_cols_;
};

/// A labeled edge leaving some row entity.
struct OutEdge {
  EntityId target;
  OperatorIndex op;
};

/// Edge (head, op, tail) skipped during propagation.
struct ExcludedEdge {
  EntityId head;
  OperatorIndex op;
  EntityId tail;
};

/// All TensorLog operators of a graph plus a combined labeled adjacency used for
/// attention-weighted mixtures sum_k a_k M_k.
class OperatorSet {
 public:
  explicit OperatorSet(const KnowledgeGraph& kg);

  std::size_t num_entities() const noexcept { return n_; }
  /// |P| + 1, identity included.
  std::size_t num_operators() const noexcept { return ops_.size(); }
  const Operator& op(OperatorIndex k) const { return ops_.at(k); }
  const std::vector<Operator>& operators() const noexcept { return ops_; }
  std::span<const OutEdge> out_edges(EntityId i) const {
    return {edges_.data() + offsets_[i], edges_.data() + offsets_[i + 1]};
  }
  bool has_edge(const ExcludedEdge& e) const;

  /// out = stateᵀ · sum_k weights[k] M_k, optionally without one labeled edge.
  void propagate_mixture(std::span<const double> state, std::span<const double> weights, std::span<double> out,
                         const std::optional<ExcludedEdge>& excluded = std::nullopt) const;

  /// Reverse of propagate_mixture: adds ∂/∂state into grad_state and ∂/∂weights into grad_weights.
  void mixture_backward(std::span<const double> state, std::span<const double> weights,
                        std::span<const double> grad_out, std::span<double> grad_state,
                        std::span<double> grad_weights,
                        const std::optional<ExcludedEdge>& excluded = std::nullopt) const;

 private:
  std::size_t n_ = 0;
  std::vector<Operator> ops_;
  std::vector<std::uint32_t> offsets_;
  std::vector<OutEdge> edges_;
};

std::vector<Operator> build_operators(const KnowledgeGraph& kg);

/// stateᵀ · M
StateVector propagate(std::span<const double> state, const Operator& op);

/// Ordered predicate hops of a rule body.
struct RulePattern {
  std::vector<PredicateId> hops;
  friend bool operator==(const RulePattern&, const RulePattern&) = default;
  friend auto operator<=>(const RulePattern&, const RulePattern&) = default;
};

/// Number of distinct walks h -> ... -> t whose i-th edge is labeled hops[i].
/// With `excluded` set, walks traversing that labeled edge are not counted.
std::uint64_t count_paths(const OperatorSet& ops, EntityId h, const RulePattern& pattern, EntityId t,
                          const std::optional<Triple>& excluded = std::nullopt);

/// Dense |E|×|E| chain product prod_i M_{hops[i]}; meant for small graphs.
std::vector<std::vector<double>> chain_matrix(const OperatorSet& ops, const RulePattern& pattern);

/// Lexicographic stream over all patterns with min_len <= length <= max_len,
/// shorter lengths first.
class PatternStream {
 public:
  PatternStream(std::size_t num_predicates, std::size_t min_len, std::size_t max_len);

  std::optional<RulePattern> next();
  /// sum_{l=min..max} |P|^l
  std::uint64_t total() const noexcept { return total_; }

 private:
  std::size_t num_predicates_;
  std::size_t max_len_;
  std::vector<PredicateId> current_;
  bool done_;
  std::uint64_t total_ = 0;
};

std::vector<RulePattern> enumerate_patterns(std::size_t num_predicates, std::size_t min_len, std::size_t max_len);

}  // namespace mplr
