#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "mplr/parallel.hpp"
#include "mplr/train.hpp"

namespace mplr {

double tie_aware_rank(std::span<const double> scores, EntityId answer, EntityId head) {
  const double s = scores[answer];
  std::size_t greater = 0, ties = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == head || i == answer) continue;
    if (scores[i] > s) ++greater;
    else if (scores[i] == s) ++ties;
  }
  return 1.0 + static_cast<double>(greater) + static_cast<double>(ties) / 2.0;
}

namespace {

// Hit@k uses the mean rank, so a tied block straddling k counts only if its mean is <= k.
void accumulate(RankingMetrics& m, double rank, const std::vector<std::size_t>& ks) {
  m.mrr += 1.0 / rank;
  for (auto k : ks) m.hit_at[k] += rank <= static_cast<double>(k) ? 1.0 : 0.0;
  ++m.count;
}

void finish(RankingMetrics& m) {
  if (m.count == 0) return;
  const double n = static_cast<double>(m.count);
  m.mrr /= n;
  for (auto& [k, v] : m.hit_at) v /= n;
}

}  // namespace

EvalReport evaluate(const OperatorSet& ops, const ModelParams& params, const std::vector<Triple>& split,
                    const std::vector<std::size_t>& ks, std::size_t threads) {
  std::vector<PredicateId> preds;
  for (const auto& t : split) preds.push_back(t.predicate);
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  std::vector<AttentionTensor> attention(preds.size());
  parallel_for(preds.size(), threads, [&](std::size_t i) { attention[i] = attention_forward(params, preds[i]); });

  std::vector<double> ranks(split.size());
  const Normalization norm = params.config().normalization;
  parallel_for(split.size(), threads, [&](std::size_t i) {
    const Triple& t = split[i];
    const auto slot = std::lower_bound(preds.begin(), preds.end(), t.predicate) - preds.begin();
    const StateVector scores = chain_scores(ops, attention[static_cast<std::size_t>(slot)], t.head, norm, t);
    ranks[i] = tie_aware_rank(scores, t.tail, t.head);
  });

  EvalReport report;
  RankingMetrics overall;
  for (auto k : ks) overall.hit_at[k] = 0.0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    auto& pm = report.per_predicate[split[i].predicate];
    if (pm.count == 0) {
      for (auto k : ks) pm.hit_at[k] = 0.0;
    }
    accumulate(pm, ranks[i], ks);
    accumulate(overall, ranks[i], ks);
  }
  finish(overall);
  for (auto& [p, m] : report.per_predicate) finish(m);
  report.mrr = overall.mrr;
  report.hit_at = overall.hit_at;
  report.num_queries = split.size();
  return report;
}

void write_eval_tsv(std::ostream& out, const KnowledgeGraph& kg, const EvalReport& report) {
  out << "# ranking: all entities except the head; ties take the mean rank of the tied block\n";
  out << "predicate\tqueries\tmrr";
  for (const auto& [k, v] : report.hit_at) out << "\thit@" << k;
  out << '\n' << std::fixed << std::setprecision(6);
  auto row = [&](const std::string& name, std::size_t n, double mrr, const std::map<std::size_t, double>& hits) {
    out << name << '\t' << n << '\t' << mrr;
    for (const auto& [k, v] : hits) out << '\t' << v;
    out << '\n';
  };
  row("ALL", report.num_queries, report.mrr, report.hit_at);
  for (const auto& [p, m] : report.per_predicate) row(kg.predicates().name(p), m.count, m.mrr, m.hit_at);
  out.unsetf(std::ios::floatfield);
}

void write_eval_summary(std::ostream& out, const KnowledgeGraph& kg, const EvalReport& report) {
  out << std::setprecision(10);
  out << "tie_rule = mean\n";
  out << "candidates = all_entities_except_head\n";
  out << "num_queries = " << report.num_queries << '\n';
  out << "mrr = " << report.mrr << '\n';
  for (const auto& [k, v] : report.hit_at) out << "hit@" << k << " = " << v << '\n';
  for (const auto& [p, m] : report.per_predicate) {
    const std::string& name = kg.predicates().name(p);
    out << name << ".queries = " << m.count << '\n' << name << ".mrr = " << m.mrr << '\n';
    for (const auto& [k, v] : m.hit_at) out << name << ".hit@" << k << " = " << v << '\n';
  }
}

double hit_upper_bound(const BifurcationRecord& record, std::size_t k) {
  const auto& p = record.proportions;
  if (k == 0) throw std::invalid_argument("hit_upper_bound: k must be >= 1");
  if (p.size() < k + 1) throw std::invalid_argument("hit_upper_bound: curve must extend to lambda = k + 1");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || p[i] > 1.0 || (i > 0 && p[i] > p[i - 1])) {
      throw std::invalid_argument("hit_upper_bound: bifurcation curve must be non-increasing within [0, 1]");
    }
  }
  // p_d = bif(d) - bif(d + 1); the last bucket holds every head with >= lambda_max targets.
  double bound = 0.0;
  for (std::size_t d = 1; d <= p.size(); ++d) {
    const double share = d < p.size() ? p[d - 1] - p[d] : p[d - 1];
    bound += share * static_cast<double>(std::min(d, k)) / static_cast<double>(d);
  }
  return bound;
}

}  // namespace mplr
