#include "mplr/tensorlog.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mplr {

StateVector one_hot(std::size_t size, EntityId e) {
  StateVector v(size, 0.0);
  v.at(e) = 1.0;
  return v;
}

Operator Operator::identity(std::size_t n) {
  Operator op;
  op.index_ = kIdentityOperator;
  op.n_ = n;
  op.identity_cols_.resize(n);
  std::iota(op.identity_cols_.begin(), op.identity_cols_.end(), EntityId{0});
  return op;
}

Operator Operator::from_edges(std::size_t n, PredicateId predicate, const std::vector<Triple>& edges) {
  Operator op;
  op.index_ = operator_of(predicate);
  op.n_ = n;
  op.offsets_.assign(n + 1, 0);
  for (const auto& t : edges) ++op.offsets_[t.head + 1];
  std::partial_sum(op.offsets_.begin(), op.offsets_.end(), op.offsets_.begin());
  op.cols_.resize(edges.size());
  std::vector<std::uint32_t> fill(op.offsets_.begin(), op.offsets_.end() - 1);
  for (const auto& t : edges) op.cols_[fill[t.head]++] = t.tail;
  for (std::size_t i = 0; i < n; ++i) std::sort(op.cols_.begin() + op.offsets_[i], op.cols_.begin() + op.offsets_[i + 1]);
  return op;
}

std::span<const EntityId> Operator::row(EntityId i) const {
  if (is_identity()) return {identity_cols_.data() + i, 1};
  return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
}

bool Operator::at(EntityId i, EntityId j) const {
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), j);
}

std::vector<Operator> build_operators(const KnowledgeGraph& kg) {
  std::vector<Operator> ops;
  ops.reserve(kg.num_predicates() + 1);
  ops.push_back(Operator::identity(kg.num_entities()));
  for (PredicateId p = 0; p < kg.num_predicates(); ++p) {
    ops.push_back(Operator::from_edges(kg.num_entities(), p, kg.per_predicate(p)));
  }
  return ops;
}

OperatorSet::OperatorSet(const KnowledgeGraph& kg) : n_(kg.num_entities()), ops_(build_operators(kg)) {
  offsets_.assign(n_ + 1, 0);
  for (const auto& t : kg.triples()) ++offsets_[t.head + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  edges_.resize(kg.triples().size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& t : kg.triples()) edges_[fill[t.head]++] = {t.tail, operator_of(t.predicate)};
  for (std::size_t i = 0; i < n_; ++i) {
    std::sort(edges_.begin() + offsets_[i], edges_.begin() + offsets_[i + 1], [](const OutEdge& a, const OutEdge& b) {
      return a.op != b.op ? a.op < b.op : a.target < b.target;
    });
  }
}

bool OperatorSet::has_edge(const ExcludedEdge& e) const {
  if (e.op == kIdentityOperator || e.op >= ops_.size() || e.head >= n_) return false;
  return ops_[e.op].at(e.head, e.tail);
}

void OperatorSet::propagate_mixture(std::span<const double> state, std::span<const double> weights,
                                    std::span<double> out, const std::optional<ExcludedEdge>& excluded) const {
  if (state.size() != n_ || out.size() != n_ || weights.size() != ops_.size()) {
    throw std::invalid_argument("propagate_mixture: shape mismatch");
  }
  const double w0 = weights[kIdentityOperator];
  for (std::size_t j = 0; j < n_; ++j) out[j] = w0 * state[j];
  for (std::size_t i = 0; i < n_; ++i) {
    const double x = state[i];
    if (x == 0.0) continue;
    const bool skip_row = excluded && excluded->head == i;
    for (const auto& e : out_edges(static_cast<EntityId>(i))) {
      if (skip_row && e.op == excluded->op && e.target == excluded->tail) continue;
      out[e.target] += x * weights[e.op];
    }
  }
}

void OperatorSet::mixture_backward(std::span<const double> state, std::span<const double> weights,
                                   std::span<const double> grad_out, std::span<double> grad_state,
                                   std::span<double> grad_weights, const std::optional<ExcludedEdge>& excluded) const {
  if (state.size() != n_ || grad_out.size() != n_ || grad_state.size() != n_ || weights.size() != ops_.size() ||
      grad_weights.size() != ops_.size()) {
    throw std::invalid_argument("mixture_backward: shape mismatch");
  }
  const double w0 = weights[kIdentityOperator];
  double g0 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double x = state[i];
    double gx = w0 * grad_out[i];
    g0 += x * grad_out[i];
    const bool skip_row = excluded && excluded->head == i;
    for (const auto& e : out_edges(static_cast<EntityId>(i))) {
      if (skip_row && e.op == excluded->op && e.target == excluded->tail) continue;
      const double g = grad_out[e.target];
      gx += weights[e.op] * g;
      grad_weights[e.op] += x * g;
    }
    grad_state[i] += gx;
  }
  grad_weights[kIdentityOperator] += g0;
}

StateVector propagate(std::span<const double> state, const Operator& op) {
  if (state.size() != op.size()) throw std::invalid_argument("propagate: shape mismatch");
  StateVector out(op.size(), 0.0);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 0.0) continue;
    for (EntityId j : op.row(static_cast<EntityId>(i))) out[j] += state[i];
  }
  return out;
}

std::uint64_t count_paths(const OperatorSet& ops, EntityId h, const RulePattern& pattern, EntityId t,
                          const std::optional<Triple>& excluded) {
  if (pattern.hops.empty()) throw std::invalid_argument("count_paths: empty pattern");
  const std::size_t n = ops.num_entities();
  std::vector<std::uint64_t> cur(n, 0), next(n, 0);
  cur.at(h) = 1;
  for (PredicateId p : pattern.hops) {
    const OperatorIndex k = operator_of(p);
    if (k >= ops.num_operators()) throw std::out_of_range("count_paths: predicate out of range");
    const Operator& m = ops.op(k);
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] == 0) continue;
      const bool skip_row = excluded && excluded->head == i && excluded->predicate == p;
      for (EntityId j : m.row(static_cast<EntityId>(i))) {
        if (skip_row && j == excluded->tail) continue;
        next[j] += cur[i];
      }
    }
    cur.swap(next);
  }
  return cur.at(t);
}

std::vector<std::vector<double>> chain_matrix(const OperatorSet& ops, const RulePattern& pattern) {
  const std::size_t n = ops.num_entities();
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    StateVector v = one_hot(n, static_cast<EntityId>(i));
    for (PredicateId p : pattern.hops) v = propagate(v, ops.op(operator_of(p)));
    rows.push_back(std::move(v));
  }
  return rows;
}

PatternStream::PatternStream(std::size_t num_predicates, std::size_t min_len, std::size_t max_len)
    : num_predicates_(num_predicates), max_len_(max_len), current_(min_len, 0) {
  if (min_len < 1 || min_len > max_len) throw std::invalid_argument("PatternStream: need 1 <= min_len <= max_len");
  done_ = num_predicates == 0;
  std::uint64_t power = 1;
  for (std::size_t l = 1; l <= max_len; ++l) {
    power *= num_predicates;
    if (l >= min_len) total_ += power;
  }
}

std::optional<RulePattern> PatternStream::next() {
  if (done_) return std::nullopt;
  RulePattern out{current_};
  std::size_t i = current_.size();
  while (i > 0) {
    --i;
    if (++current_[i] < num_predicates_) return out;
    current_[i] = 0;
  }
  // Rolled over every position: move to the next length.
  if (current_.size() == max_len_) {
    done_ = true;
  } else {
    current_.assign(current_.size() + 1, 0);
  }
  return out;
}

std::vector<RulePattern> enumerate_patterns(std::size_t num_predicates, std::size_t min_len, std::size_t max_len) {
  PatternStream stream(num_predicates, min_len, max_len);
  std::vector<RulePattern> out;
  out.reserve(stream.total());
  while (auto p = stream.next()) out.push_back(std::move(*p));
  return out;
}

}  // namespace mplr
