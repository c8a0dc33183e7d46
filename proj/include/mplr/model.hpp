#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mplr/kg.hpp"
#include "mplr/tensorlog.hpp"

namespace mplr {

/// How the final per-rank state u_L is scaled before the loss.
enum class Normalization { None, L1, L2 };
/// How the direct-edge correction ε is injected at hops l >= 2.
///   Corrected: a_q^l · u_{l-1}[h] at coordinate t (mass leaving h through (h, q, t)).
///   Literal:   a_q^l · u_{l-1}[t] at coordinate t.
enum class EpsilonMode { Corrected, Literal };

const char* to_string(Normalization n);
const char* to_string(EpsilonMode m);
Normalization parse_normalization(const std::string& s);
EpsilonMode parse_epsilon_mode(const std::string& s);

struct ModelConfig {
  std::size_t num_predicates = 0;
  std::size_t embedding_dim = 128;
  std::size_t hidden_dim = 128;
  std::size_t rank = 3;
  std::size_t max_rule_len = 2;
  Normalization normalization = Normalization::L1;
  EpsilonMode epsilon_mode = EpsilonMode::Corrected;
  std::uint64_t seed = 0;

  std::size_t num_operators() const noexcept { return num_predicates + 1; }
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Weights of one direction of one recurrent cell. Gate rows are ordered
/// input, forget, candidate, output; each block has hidden_dim rows.
struct CellView {
  std::span<double> input_weights;      // 4H × E, row-major
  std::span<double> recurrent_weights;  // 4H × H, row-major
  std::span<double> bias;               // 4H
};

struct ConstCellView {
  std::span<const double> input_weights;
  std::span<const double> recurrent_weights;
  std::span<const double> bias;
};

/// A named contiguous range of the parameter vector.
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// All trainable state in one flat vector; accessors hand out views by role.
/// The same type doubles as a gradient buffer.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(const ModelConfig& config);  // zero-filled

  /// Seeded initialization: uniform(±1/sqrt(fan_in)) weights, unit-range embeddings,
  /// zero biases except forget-gate bias 1.
  static ModelParams initialize(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> embedding(PredicateId q);
  std::span<const double> embedding(PredicateId q) const;
  CellView cell(std::size_t r, bool backward);
  ConstCellView cell(std::size_t r, bool backward) const;
  std::span<double> projection_weights();  // (|P|+1) × 2H, row-major
  std::span<const double> projection_weights() const;
  std::span<double> projection_bias();
  std::span<const double> projection_bias() const;

  /// Named blocks covering every parameter, split by role and gate.
  std::vector<ParamBlock> blocks() const;

  void set_zero();
  ModelParams zeros_like() const { return ModelParams(config_); }

 private:
  std::size_t cell_offset(std::size_t r, bool backward) const;

  ModelConfig config_;
  std::vector<double> values_;
  std::size_t proj_offset_ = 0;
};

/// Per-rank, per-hop distributions over the |P|+1 operators (slot 0 = identity).
class AttentionTensor {
 public:
  AttentionTensor() = default;
  AttentionTensor(std::size_t rank, std::size_t hops, std::size_t operators)
      : rank_(rank), hops_(hops), ops_(operators), w_(rank * hops * operators, 0.0) {}

  std::size_t rank() const noexcept { return rank_; }
  std::size_t hops() const noexcept { return hops_; }
  std::size_t operators() const noexcept { return ops_; }

  std::span<double> slice(std::size_t r, std::size_t hop) { return {w_.data() + (r * hops_ + hop) * ops_, ops_}; }
  std::span<const double> slice(std::size_t r, std::size_t hop) const {
    return {w_.data() + (r * hops_ + hop) * ops_, ops_};
  }
  double& at(std::size_t r, std::size_t hop, std::size_t k) { return w_[(r * hops_ + hop) * ops_ + k]; }
  double at(std::size_t r, std::size_t hop, std::size_t k) const { return w_[(r * hops_ + hop) * ops_ + k]; }
  std::span<double> values() noexcept { return w_; }
  std::span<const double> values() const noexcept { return w_; }

  friend bool operator==(const AttentionTensor&, const AttentionTensor&) = default;

 private:
  std::size_t rank_ = 0, hops_ = 0, ops_ = 0;
  std::vector<double> w_;
};

/// Intermediate values of one attention forward pass, kept for the backward pass.
struct AttentionTrace {
  struct Step {
    std::vector<double> gates;  // activated i, f, g, o (4H)
    std::vector<double> cell;   // c
    std::vector<double> hidden; // h
  };
  PredicateId query = 0;
  // [rank][direction][position]; the backward direction is indexed by sequence position.
  std::vector<std::array<std::vector<Step>, 2>> steps;
  AttentionTensor attention;
};

AttentionTensor attention_forward(const ModelParams& params, PredicateId q, AttentionTrace* trace = nullptr);

/// Accumulates ∂loss/∂params into `grads` given ∂loss/∂attention.
void attention_backward(const ModelParams& params, const AttentionTrace& trace, const AttentionTensor& grad_attention,
                        ModelParams& grads);

struct ScoreOptions {
  Normalization normalization = Normalization::L1;
  EpsilonMode epsilon_mode = EpsilonMode::Corrected;
};

struct ScoreResult {
  StateVector prediction;
  /// Per target t, the total subtracted at coordinate t (rank-summed, after scaling).
  std::map<EntityId, double> per_target_corrections;
  double loss = 0.0;
};

/// Multi-target score with direct-edge correction, summed over ranks.
ScoreResult score_query(const OperatorSet& ops, const AttentionTensor& attention, const MultiTargetQuery& query,
                        const ScoreOptions& options = {});

/// Same as score_query, and fills `grad_attention` with ∂loss/∂attention.
ScoreResult score_query_backward(const OperatorSet& ops, const AttentionTensor& attention,
                                 const MultiTargetQuery& query, const ScoreOptions& options,
                                 AttentionTensor& grad_attention);

/// Uncorrected chain score (v_hᵀ prod_l sum_k a_k^l M_k) · v_t, summed over ranks.
double neural_lp_score(const OperatorSet& ops, const AttentionTensor& attention, EntityId head, EntityId tail,
                       const std::optional<Triple>& excluded = std::nullopt);

/// Uncorrected rank-summed score vector from `head`, each rank scaled per `normalization`.
StateVector chain_scores(const OperatorSet& ops, const AttentionTensor& attention, EntityId head,
                         Normalization normalization, const std::optional<Triple>& excluded = std::nullopt);

/// sum_i max(s_i, 0) - y_i s_i + log(1 + exp(-|s_i|)); throws on non-finite scores.
double logit_loss(std::span<const double> scores, std::span<const double> targets);
/// ∂loss/∂s_i = sigmoid(s_i) - y_i
void logit_loss_gradient(std::span<const double> scores, std::span<const double> targets, std::span<double> grad);

/// Loss and full parameter gradient for one query.
double backward(const OperatorSet& ops, const ModelParams& params, const MultiTargetQuery& query, ModelParams& grads);

/// Mean loss over a batch; `grads` receives the mean gradient. Attention is computed
/// once per distinct predicate; per-query work is reduced in index order.
double batch_gradient(const OperatorSet& ops, const ModelParams& params, std::span<const MultiTargetQuery> batch,
                      ModelParams& grads, std::size_t threads = 1);

struct ExtractedRule {
  RulePattern hops;
  double confidence = 0.0;
  PredicateId predicate = 0;
};

/// Enumerates all (|P|+1)^L operator sequences, scores each by sum_r prod_l a[r][l][k_l],
/// collapses identity hops, merges equal rules, drops zero-confidence ones, and returns the top_n by confidence.
std::vector<ExtractedRule> extract_rules(const AttentionTensor& attention, PredicateId q, std::size_t top_n,
                                         std::uint64_t enumeration_budget = 10'000'000);
std::vector<ExtractedRule> extract_rules(const ModelParams& params, PredicateId q, std::size_t top_n);

void write_rules_table(std::ostream& out, const KnowledgeGraph& kg, const std::vector<ExtractedRule>& rules);

/// Text container: header lines (shapes, seed, options, free-form metadata) then every
/// parameter as a hex float, so a reload is bit-identical.
void save_checkpoint(std::ostream& out, const ModelParams& params,
                     const std::map<std::string, std::string>& metadata = {});
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const std::map<std::string, std::string>& metadata = {});
ModelParams load_checkpoint(std::istream& in, std::map<std::string, std::string>* metadata = nullptr);
ModelParams load_checkpoint(const std::filesystem::path& path, std::map<std::string, std::string>* metadata = nullptr);

}  // namespace mplr
