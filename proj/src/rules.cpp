#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>

#include "mplr/model.hpp"

namespace mplr {

std::vector<ExtractedRule> extract_rules(const AttentionTensor& attention, PredicateId q, std::size_t top_n,
                                         std::uint64_t enumeration_budget) {
  const std::size_t K = attention.operators(), L = attention.hops();
  if (K == 0 || L == 0) return {};
  std::uint64_t total = 1;
  for (std::size_t l = 0; l < L; ++l) {
    if (total > enumeration_budget / K) {
      throw std::length_error("extract_rules: " + std::to_string(K) + "^" + std::to_string(L) +
                              " operator sequences exceed the enumeration budget; a beam search is required");
    }
    total *= K;
  }

  std::map<RulePattern, double> merged;
  std::vector<std::size_t> seq(L, 0);
  for (std::uint64_t i = 0; i < total; ++i) {
    double confidence = 0.0;
    for (std::size_t r = 0; r < attention.rank(); ++r) {
      double prod = 1.0;
      for (std::size_t l = 0; l < L && prod != 0.0; ++l) prod *= attention.at(r, l, seq[l]);
      confidence += prod;
    }
    RulePattern rule;
    for (auto k : seq) {
      if (k != kIdentityOperator) rule.hops.push_back(static_cast<PredicateId>(k - 1));
    }
    if (!rule.hops.empty() && confidence > 0.0) merged[rule] += confidence;
    for (std::size_t l = L; l-- > 0;) {
      if (++seq[l] < K) break;
      seq[l] = 0;
    }
  }

  std::vector<ExtractedRule> rules;
  rules.reserve(merged.size());
  for (auto& [hops, conf] : merged) rules.push_back({hops, conf, q});
  // Ties keep the pattern order of the map, so output is deterministic.
  std::stable_sort(rules.begin(), rules.end(),
                   [](const ExtractedRule& a, const ExtractedRule& b) { return a.confidence > b.confidence; });
  if (rules.size() > top_n) rules.resize(top_n);
  return rules;
}

std::vector<ExtractedRule> extract_rules(const ModelParams& params, PredicateId q, std::size_t top_n) {
  return extract_rules(attention_forward(params, q), q, top_n);
}

void write_rules_table(std::ostream& out, const KnowledgeGraph& kg, const std::vector<ExtractedRule>& rules) {
  out << "confidence\trule\n";
  for (const auto& rule : rules) {
    out << std::fixed << std::setprecision(6) << rule.confidence << '\t' << kg.predicates().name(rule.predicate)
        << "(X,Y) <- ";
    const std::size_t n = rule.hops.hops.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::string from = i == 0 ? "X" : "Z" + std::to_string(i);
      const std::string to = i + 1 == n ? "Y" : "Z" + std::to_string(i + 1);
      if (i) out << ", ";
      out << kg.predicates().name(rule.hops.hops[i]) << '(' << from << ',' << to << ')';
    }
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace mplr
