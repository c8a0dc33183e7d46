#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mplr/model.hpp"
#include "mplr/parallel.hpp"

namespace mplr {

namespace {

constexpr double kNormFloor = 1e-12;

std::optional<ExcludedEdge> to_excluded(const std::optional<Triple>& t) {
  if (!t) return std::nullopt;
  return ExcludedEdge{t->head, operator_of(t->predicate), t->tail};
}

void check_shapes(const OperatorSet& ops, const AttentionTensor& attention) {
  if (attention.operators() != ops.num_operators() || attention.rank() == 0 || attention.hops() == 0) {
    throw std::invalid_argument("attention shape does not match the operator set");
  }
}

// Scale applied to a rank's final state; `active` is false when the floor kicked in
// (or no normalization), in which case the scale is a constant.
struct Scale {
  double norm = 1.0;
  bool active = false;
};

Scale final_scale(std::span<const double> u, Normalization mode) {
  double n = 0.0;
  switch (mode) {
    case Normalization::None: return {};
    case Normalization::L1:
      for (double v : u) n += std::abs(v);
      break;
    case Normalization::L2:
      for (double v : u) n += v * v;
      n = std::sqrt(n);
      break;
  }
  if (n < kNormFloor) return {kNormFloor, false};
  return {n, true};
}

// Forward state of one rank: u_0..u_L and, per target, ε_0..ε_L.
struct RankTrace {
  std::vector<StateVector> u;
  std::vector<std::vector<StateVector>> eps;  // [target][layer]
  Scale scale;
};

EntityId injection_source(EpsilonMode mode, std::size_t layer, EntityId head, EntityId target) {
  return (mode == EpsilonMode::Corrected || layer == 1) ? head : target;
}

RankTrace forward_rank(const OperatorSet& ops, const AttentionTensor& attention, std::size_t r,
                       const MultiTargetQuery& query, const ScoreOptions& options) {
  const std::size_t n = ops.num_entities(), L = attention.hops();
  const OperatorIndex qk = operator_of(query.query);
  RankTrace tr;
  tr.u.assign(L + 1, StateVector(n, 0.0));
  tr.u[0].at(query.head) = 1.0;
  for (std::size_t l = 1; l <= L; ++l) ops.propagate_mixture(tr.u[l - 1], attention.slice(r, l - 1), tr.u[l]);

  tr.eps.resize(query.targets.size());
  for (std::size_t j = 0; j < query.targets.size(); ++j) {
    const EntityId t = query.targets[j];
    auto& eps = tr.eps[j];
    eps.assign(L + 1, StateVector(n, 0.0));
    for (std::size_t l = 1; l <= L; ++l) {
      const auto a = attention.slice(r, l - 1);
      if (l > 1) ops.propagate_mixture(eps[l - 1], a, eps[l]);
      eps[l][t] += a[qk] * tr.u[l - 1][injection_source(options.epsilon_mode, l, query.head, t)];
    }
  }
  tr.scale = final_scale(tr.u[L], options.normalization);
  return tr;
}

ScoreResult run_forward(const OperatorSet& ops, const AttentionTensor& attention, const MultiTargetQuery& query,
                        const ScoreOptions& options, std::vector<RankTrace>* traces) {
  check_shapes(ops, attention);
  if (query.targets.empty()) throw std::invalid_argument("score_query: query has no targets");
  const std::size_t n = ops.num_entities(), L = attention.hops();
  ScoreResult res;
  res.prediction.assign(n, 0.0);
  for (std::size_t r = 0; r < attention.rank(); ++r) {
    RankTrace tr = forward_rank(ops, attention, r, query, options);
    const double inv = 1.0 / tr.scale.norm;
    for (std::size_t i = 0; i < n; ++i) res.prediction[i] += tr.u[L][i] * inv;
    for (std::size_t j = 0; j < query.targets.size(); ++j) {
      const EntityId t = query.targets[j];
      const double corr = tr.eps[j][L][t] * inv;
      res.prediction[t] -= corr;
      res.per_target_corrections[t] += corr;
    }
    if (traces) traces->push_back(std::move(tr));
  }
  StateVector target(n, 0.0);
  for (EntityId t : query.targets) target.at(t) = 1.0;
  res.loss = logit_loss(res.prediction, target);
  return res;
}

}  // namespace

double logit_loss(std::span<const double> scores, std::span<const double> targets) {
  if (scores.size() != targets.size()) throw std::invalid_argument("logit_loss: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (!std::isfinite(s)) throw std::domain_error("logit_loss: non-finite score");
    total += std::max(s, 0.0) - targets[i] * s + std::log1p(std::exp(-std::abs(s)));
  }
  return total;
}

void logit_loss_gradient(std::span<const double> scores, std::span<const double> targets, std::span<double> grad) {
  if (scores.size() != targets.size() || grad.size() != scores.size()) {
    throw std::invalid_argument("logit_loss_gradient: length mismatch");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    const double sig = s >= 0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
    grad[i] = sig - targets[i];
  }
}

ScoreResult score_query(const OperatorSet& ops, const AttentionTensor& attention, const MultiTargetQuery& query,
                        const ScoreOptions& options) {
  return run_forward(ops, attention, query, options, nullptr);
}

ScoreResult score_query_backward(const OperatorSet& ops, const AttentionTensor& attention,
                                 const MultiTargetQuery& query, const ScoreOptions& options,
                                 AttentionTensor& grad_attention) {
  std::vector<RankTrace> traces;
  ScoreResult res = run_forward(ops, attention, query, options, &traces);
  const std::size_t n = ops.num_entities(), L = attention.hops();
  const OperatorIndex qk = operator_of(query.query);
  grad_attention = AttentionTensor(attention.rank(), L, attention.operators());

  StateVector target(n, 0.0), gs(n);
  for (EntityId t : query.targets) target[t] = 1.0;
  logit_loss_gradient(res.prediction, target, gs);

  for (std::size_t r = 0; r < attention.rank(); ++r) {
    const RankTrace& tr = traces[r];
    const double inv = 1.0 / tr.scale.norm;
    std::vector<StateVector> gu(L + 1, StateVector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) gu[L][i] = gs[i] * inv;
    if (tr.scale.active) {
      // c = u_L with target coordinates corrected; s_r = c / norm(u_L).
      double gc_dot_c = 0.0;
      for (std::size_t i = 0; i < n; ++i) gc_dot_c += gs[i] * tr.u[L][i];
      for (std::size_t j = 0; j < query.targets.size(); ++j) {
        const EntityId t = query.targets[j];
        gc_dot_c -= gs[t] * tr.eps[j][L][t];
      }
      const double gnorm = -gc_dot_c * inv * inv;
      for (std::size_t i = 0; i < n; ++i) {
        gu[L][i] += options.normalization == Normalization::L2 ? gnorm * tr.u[L][i] * inv
                                                               : gnorm * (tr.u[L][i] >= 0 ? 1.0 : -1.0);
      }
    }

    std::vector<std::vector<StateVector>> geps(query.targets.size());
    for (std::size_t j = 0; j < query.targets.size(); ++j) {
      geps[j].assign(L + 1, StateVector(n, 0.0));
      geps[j][L][query.targets[j]] = -gs[query.targets[j]] * inv;
    }

    for (std::size_t l = L; l >= 1; --l) {
      const auto a = attention.slice(r, l - 1);
      auto ga = grad_attention.slice(r, l - 1);
      for (std::size_t j = 0; j < query.targets.size(); ++j) {
        const EntityId t = query.targets[j];
        const EntityId src = injection_source(options.epsilon_mode, l, query.head, t);
        const double g = geps[j][l][t];
        ga[qk] += tr.u[l - 1][src] * g;
        gu[l - 1][src] += a[qk] * g;
        if (l > 1) ops.mixture_backward(tr.eps[j][l - 1], a, geps[j][l], geps[j][l - 1], ga);
      }
      ops.mixture_backward(tr.u[l - 1], a, gu[l], gu[l - 1], ga);
    }
  }
  return res;
}

double neural_lp_score(const OperatorSet& ops, const AttentionTensor& attention, EntityId head, EntityId tail,
                       const std::optional<Triple>& excluded) {
  return chain_scores(ops, attention, head, Normalization::None, excluded).at(tail);
}

StateVector chain_scores(const OperatorSet& ops, const AttentionTensor& attention, EntityId head,
                         Normalization normalization, const std::optional<Triple>& excluded) {
  check_shapes(ops, attention);
  const std::size_t n = ops.num_entities();
  const auto excl = to_excluded(excluded);
  StateVector total(n, 0.0), cur(n), next(n);
  for (std::size_t r = 0; r < attention.rank(); ++r) {
    std::fill(cur.begin(), cur.end(), 0.0);
    cur.at(head) = 1.0;
    for (std::size_t l = 0; l < attention.hops(); ++l) {
      ops.propagate_mixture(cur, attention.slice(r, l), next, excl);
      cur.swap(next);
    }
    const double inv = 1.0 / final_scale(cur, normalization).norm;
    for (std::size_t i = 0; i < n; ++i) total[i] += cur[i] * inv;
  }
  return total;
}

double backward(const OperatorSet& ops, const ModelParams& params, const MultiTargetQuery& query, ModelParams& grads) {
  AttentionTrace trace;
  const AttentionTensor attn = attention_forward(params, query.query, &trace);
  AttentionTensor grad_attn;
  const ScoreOptions options{params.config().normalization, params.config().epsilon_mode};
  const ScoreResult res = score_query_backward(ops, attn, query, options, grad_attn);
  attention_backward(params, trace, grad_attn, grads);
  return res.loss;
}

double batch_gradient(const OperatorSet& ops, const ModelParams& params, std::span<const MultiTargetQuery> batch,
                      ModelParams& grads, std::size_t threads) {
  grads.set_zero();
  if (batch.empty()) return 0.0;
  std::vector<PredicateId> preds;
  for (const auto& q : batch) preds.push_back(q.query);
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());

  std::vector<AttentionTrace> traces(preds.size());
  parallel_for(preds.size(), threads, [&](std::size_t i) { attention_forward(params, preds[i], &traces[i]); });
  auto slot_of = [&](PredicateId p) {
    return static_cast<std::size_t>(std::lower_bound(preds.begin(), preds.end(), p) - preds.begin());
  };

  const ScoreOptions options{params.config().normalization, params.config().epsilon_mode};
  std::vector<AttentionTensor> per_query(batch.size());
  std::vector<double> losses(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    const auto& attn = traces[slot_of(batch[i].query)].attention;
    losses[i] = score_query_backward(ops, attn, batch[i], options, per_query[i]).loss;
  });

  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<AttentionTensor> per_pred(preds.size());
  for (std::size_t s = 0; s < preds.size(); ++s) {
    const auto& a = traces[s].attention;
    per_pred[s] = AttentionTensor(a.rank(), a.hops(), a.operators());
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    loss += losses[i];
    auto dst = per_pred[slot_of(batch[i].query)].values();
    const auto src = per_query[i].values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k] * scale;
  }
  for (std::size_t s = 0; s < preds.size(); ++s) attention_backward(params, traces[s], per_pred[s], grads);
  return loss * scale;
}

}  // namespace mplr
