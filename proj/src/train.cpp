#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "mplr/parallel.hpp"
#include "mplr/train.hpp"

namespace mplr {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("invalid training config: ") + field);
  };
  require(max_rule_len >= 1, "max_rule_len must be >= 1");
  require(rank >= 1, "rank must be >= 1");
  require(hidden_dim >= 1, "hidden_dim must be >= 1");
  require(embedding_dim >= 1, "embedding_dim must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate > 0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(beta1 >= 0 && beta1 < 1, "beta1 must lie in [0, 1)");
  require(beta2 >= 0 && beta2 < 1, "beta2 must lie in [0, 1)");
  require(adam_epsilon > 0, "adam_epsilon must be positive");
  require(max_epochs >= 1, "max_epochs must be >= 1");
  require(patience >= 1, "patience must be >= 1");
  require(threads >= 1, "threads must be >= 1");
}

ModelConfig TrainConfig::model_config(std::size_t num_predicates) const {
  ModelConfig c;
  c.num_predicates = num_predicates;
  c.embedding_dim = embedding_dim;
  c.hidden_dim = hidden_dim;
  c.rank = rank;
  c.max_rule_len = max_rule_len;
  c.normalization = normalization;
  c.epsilon_mode = epsilon_mode;
  c.seed = seed;
  return c;
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw std::invalid_argument("Adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

TrainResult train(const KnowledgeGraph& graph, const DatasetSplits& splits, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (splits.train.empty()) throw std::invalid_argument("train: empty training split");
  const OperatorSet ops(graph);
  const std::vector<MultiTargetQuery> queries = group_queries(splits.train);

  ModelParams params = ModelParams::initialize(config.model_config(graph.num_predicates()));
  ModelParams grads = params.zeros_like();
  Adam adam(params.size(), config.learning_rate, config.beta1, config.beta2, config.adam_epsilon);
  std::mt19937_64 rng(config.seed ^ 0x5eed5eedULL);

  TrainResult result;
  result.best = params;
  std::vector<std::size_t> order(queries.size());
  std::vector<MultiTargetQuery> batch;
  std::size_t stale = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
        batch.push_back(queries[order[i]]);
      }
      double loss = 0.0;
      try {
        loss = batch_gradient(ops, params, batch, grads, config.threads);
      } catch (const std::domain_error& e) {
        throw DivergenceError("training diverged in epoch " + std::to_string(epoch) + ": " + e.what());
      }
      const auto g = grads.values();
      if (!std::isfinite(loss) || !std::all_of(g.begin(), g.end(), [](double x) { return std::isfinite(x); })) {
        std::ostringstream msg;
        msg << "training diverged in epoch " << epoch << " batch " << batches << " (loss " << loss << ")";
        throw DivergenceError(msg.str());
      }
      adam.step(params.values(), g);
      loss_sum += loss;
      ++batches;
    }

    EpochLog entry{epoch, loss_sum / static_cast<double>(batches), 0.0};
    if (!splits.valid.empty()) entry.valid_mrr = evaluate(ops, params, splits.valid, {1}, config.threads).mrr;
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    // An exact MRR tie (common once a small valid set is solved) goes to the lower training loss.
    const bool better = entry.valid_mrr > result.best_valid_mrr ||
                        (entry.valid_mrr == result.best_valid_mrr && entry.train_loss < best_loss);
    if (splits.valid.empty() || better) {
      result.best = params;
      best_loss = entry.train_loss;
      result.best_epoch = epoch;
      result.best_valid_mrr = entry.valid_mrr;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch\ttrain_loss\tvalid_mrr\n";
  const auto flags = out.flags();
  const auto prec = out.precision(10);
  for (const auto& e : log) out << e.epoch << '\t' << e.train_loss << '\t' << e.valid_mrr << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace mplr
