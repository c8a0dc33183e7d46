#include <cmath>
#include <random>
#include <stdexcept>

#include "mplr/model.hpp"

namespace mplr {

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::L1: return "l1";
    case Normalization::L2: return "l2";
  }
  return "?";
}

const char* to_string(EpsilonMode m) { return m == EpsilonMode::Corrected ? "corrected" : "literal"; }

Normalization parse_normalization(const std::string& s) {
  if (s == "none" || s == "off") return Normalization::None;
  if (s == "l1") return Normalization::L1;
  if (s == "l2") return Normalization::L2;
  throw std::invalid_argument("unknown normalization '" + s + "' (expected none|l1|l2)");
}

EpsilonMode parse_epsilon_mode(const std::string& s) {
  if (s == "corrected") return EpsilonMode::Corrected;
  if (s == "literal") return EpsilonMode::Literal;
  throw std::invalid_argument("unknown epsilon mode '" + s + "' (expected corrected|literal)");
}

namespace {

std::size_t cell_size(const ModelConfig& c) {
  return 4 * c.hidden_dim * (c.embedding_dim + c.hidden_dim + 1);
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config) : config_(config) {
  if (config.num_predicates == 0 || config.embedding_dim == 0 || config.hidden_dim == 0 || config.rank == 0 ||
      config.max_rule_len == 0) {
    throw std::invalid_argument("ModelConfig: all dimensions must be positive");
  }
  const std::size_t emb = config.num_predicates * config.embedding_dim;
  proj_offset_ = emb + 2 * config.rank * cell_size(config);
  const std::size_t proj = config.num_operators() * (2 * config.hidden_dim + 1);
  values_.assign(proj_offset_ + proj, 0.0);
}

ModelParams ModelParams::initialize(const ModelConfig& config) {
  ModelParams p(config);
  std::mt19937_64 rng(config.seed);
  auto fill = [&rng](std::span<double> v, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (auto& x : v) x = u(rng);
  };
  // An embedding lookup has a single active input, so its fan-in bound is 1.
  fill(std::span<double>(p.values_).first(config.num_predicates * config.embedding_dim), 1.0);
  const double cell_bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_dim));
  const std::size_t h = config.hidden_dim;
  for (std::size_t r = 0; r < config.rank; ++r) {
    for (bool backward : {false, true}) {
      auto c = p.cell(r, backward);
      fill(c.input_weights, cell_bound);
      fill(c.recurrent_weights, cell_bound);
      std::fill(c.bias.begin(), c.bias.end(), 0.0);
      std::fill(c.bias.begin() + static_cast<std::ptrdiff_t>(h), c.bias.begin() + static_cast<std::ptrdiff_t>(2 * h),
                1.0);
    }
  }
  fill(p.projection_weights(), 1.0 / std::sqrt(static_cast<double>(2 * h)));
  return p;
}

std::span<double> ModelParams::embedding(PredicateId q) {
  if (q >= config_.num_predicates) throw std::out_of_range("embedding: predicate out of range");
  return std::span<double>(values_).subspan(q * config_.embedding_dim, config_.embedding_dim);
}

std::span<const double> ModelParams::embedding(PredicateId q) const {
  if (q >= config_.num_predicates) throw std::out_of_range("embedding: predicate out of range");
  return std::span<const double>(values_).subspan(q * config_.embedding_dim, config_.embedding_dim);
}

std::size_t ModelParams::cell_offset(std::size_t r, bool backward) const {
  if (r >= config_.rank) throw std::out_of_range("cell: rank out of range");
  return config_.num_predicates * config_.embedding_dim + (2 * r + (backward ? 1 : 0)) * cell_size(config_);
}

CellView ModelParams::cell(std::size_t r, bool backward) {
  const std::size_t h4 = 4 * config_.hidden_dim;
  auto base = std::span<double>(values_).subspan(cell_offset(r, backward), cell_size(config_));
  return {base.subspan(0, h4 * config_.embedding_dim), base.subspan(h4 * config_.embedding_dim, h4 * config_.hidden_dim),
          base.subspan(h4 * (config_.embedding_dim + config_.hidden_dim), h4)};
}

ConstCellView ModelParams::cell(std::size_t r, bool backward) const {
  const std::size_t h4 = 4 * config_.hidden_dim;
  auto base = std::span<const double>(values_).subspan(cell_offset(r, backward), cell_size(config_));
  return {base.subspan(0, h4 * config_.embedding_dim), base.subspan(h4 * config_.embedding_dim, h4 * config_.hidden_dim),
          base.subspan(h4 * (config_.embedding_dim + config_.hidden_dim), h4)};
}

std::span<double> ModelParams::projection_weights() {
  return std::span<double>(values_).subspan(proj_offset_, config_.num_operators() * 2 * config_.hidden_dim);
}

std::span<const double> ModelParams::projection_weights() const {
  return std::span<const double>(values_).subspan(proj_offset_, config_.num_operators() * 2 * config_.hidden_dim);
}

std::span<double> ModelParams::projection_bias() {
  return std::span<double>(values_).subspan(proj_offset_ + config_.num_operators() * 2 * config_.hidden_dim,
                                            config_.num_operators());
}

std::span<const double> ModelParams::projection_bias() const {
  return std::span<const double>(values_).subspan(proj_offset_ + config_.num_operators() * 2 * config_.hidden_dim,
                                                  config_.num_operators());
}

std::vector<ParamBlock> ModelParams::blocks() const {
  static const char* kGates[] = {"input", "forget", "candidate", "output"};
  const std::size_t e = config_.embedding_dim, h = config_.hidden_dim;
  std::vector<ParamBlock> out;
  out.push_back({"embedding", 0, config_.num_predicates * e});
  for (std::size_t r = 0; r < config_.rank; ++r) {
    for (bool backward : {false, true}) {
      const std::string prefix = "cell" + std::to_string(r) + (backward ? ".bw." : ".fw.");
      const std::size_t base = cell_offset(r, backward);
      for (std::size_t g = 0; g < 4; ++g) {
        out.push_back({prefix + "input_weights." + kGates[g], base + g * h * e, h * e});
        out.push_back({prefix + "recurrent_weights." + kGates[g], base + 4 * h * e + g * h * h, h * h});
        out.push_back({prefix + "bias." + kGates[g], base + 4 * h * (e + h) + g * h, h});
      }
    }
  }
  out.push_back({"projection.weights", proj_offset_, config_.num_operators() * 2 * h});
  out.push_back({"projection.bias", proj_offset_ + config_.num_operators() * 2 * h, config_.num_operators()});
  return out;
}

void ModelParams::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

}  // namespace mplr
