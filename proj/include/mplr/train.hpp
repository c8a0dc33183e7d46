#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mplr/indicators.hpp"
#include "mplr/kg.hpp"
#include "mplr/model.hpp"
#include "mplr/tensorlog.hpp"

namespace mplr {

struct TrainConfig {
  std::size_t max_rule_len = 2;
  std::size_t rank = 3;
  std::size_t hidden_dim = 128;
  std::size_t embedding_dim = 128;
  std::size_t batch_size = 128;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t max_epochs = 10;
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::L1;
  EpsilonMode epsilon_mode = EpsilonMode::Corrected;
  std::size_t threads = 1;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
  ModelConfig model_config(std::size_t num_predicates) const;
};

class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);
  std::uint64_t steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_mrr = 0.0;
};

struct TrainResult {
  ModelParams best;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_valid_mrr = -1.0;
};

/// Called after every epoch; used for progress output.
using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch Adam over multi-target training queries with early stopping on valid MRR.
/// An epoch is a new best when valid MRR rises, or ties with a lower training loss.
/// `graph` supplies the operators; its triples should be the training facts.
TrainResult train(const KnowledgeGraph& graph, const DatasetSplits& splits, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);

struct RankingMetrics {
  double mrr = 0.0;
  std::map<std::size_t, double> hit_at;
  std::size_t count = 0;
};

struct EvalReport {
  double mrr = 0.0;
  std::map<std::size_t, double> hit_at;
  std::map<PredicateId, RankingMetrics> per_predicate;
  std::size_t num_queries = 0;
};

/// 1 + #candidates scoring above the answer + #other candidates tied with it / 2.
/// `head` is not a candidate.
double tie_aware_rank(std::span<const double> scores, EntityId answer, EntityId head);

/// Ranks each (h, q, t) against all entities except h, with (h, q, t) excluded from propagation.
EvalReport evaluate(const OperatorSet& ops, const ModelParams& params, const std::vector<Triple>& split,
                    const std::vector<std::size_t>& ks = {1, 3, 10}, std::size_t threads = 1);

/// Overall row first, then one row per predicate.
void write_eval_tsv(std::ostream& out, const KnowledgeGraph& kg, const EvalReport& report);
/// `key = value` lines.
void write_eval_summary(std::ostream& out, const KnowledgeGraph& kg, const EvalReport& report);

/// Largest achievable Hit@k for a predicate given its target-multiplicity curve.
/// Needs proportions up to at least k + 1; throws on an increasing curve.
double hit_upper_bound(const BifurcationRecord& record, std::size_t k);

}  // namespace mplr
