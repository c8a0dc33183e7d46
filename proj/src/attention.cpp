#include <Eigen/Dense>
#include <cmath>

#include "mplr/model.hpp"

namespace mplr {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct CellMaps {
  ConstMatrixMap wx, wh;
  ConstVectorMap b;

  CellMaps(const ConstCellView& c, std::size_t e, std::size_t h)
      : wx(c.input_weights.data(), 4 * h, e), wh(c.recurrent_weights.data(), 4 * h, h), b(c.bias.data(), 4 * h) {}
};

// Runs one direction over `positions` (in processing order), storing steps by position.
void run_cell(const CellMaps& m, const Eigen::VectorXd& x, std::size_t h, const std::vector<std::size_t>& positions,
              std::vector<AttentionTrace::Step>& steps) {
  const Eigen::VectorXd input_part = m.wx * x + m.b;
  Eigen::VectorXd hidden = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  Eigen::VectorXd cell = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  const auto H = static_cast<Eigen::Index>(h);
  for (auto pos : positions) {
    Eigen::VectorXd z = input_part + m.wh * hidden;
    auto& s = steps[pos];
    s.gates.resize(4 * h);
    for (Eigen::Index k = 0; k < H; ++k) {
      s.gates[k] = sigmoid(z[k]);
      s.gates[H + k] = sigmoid(z[H + k]);
      s.gates[2 * H + k] = std::tanh(z[2 * H + k]);
      s.gates[3 * H + k] = sigmoid(z[3 * H + k]);
    }
    s.cell.resize(h);
    s.hidden.resize(h);
    for (Eigen::Index k = 0; k < H; ++k) {
      cell[k] = s.gates[H + k] * cell[k] + s.gates[k] * s.gates[2 * H + k];
      hidden[k] = s.gates[3 * H + k] * std::tanh(cell[k]);
      s.cell[k] = cell[k];
      s.hidden[k] = hidden[k];
    }
  }
}

}  // namespace

AttentionTensor attention_forward(const ModelParams& params, PredicateId q, AttentionTrace* trace) {
  const auto& cfg = params.config();
  const std::size_t e = cfg.embedding_dim, h = cfg.hidden_dim, L = cfg.max_rule_len, K = cfg.num_operators();
  const auto emb = params.embedding(q);
  const Eigen::VectorXd x = ConstVectorMap(emb.data(), static_cast<Eigen::Index>(e));
  const ConstMatrixMap proj(params.projection_weights().data(), K, 2 * h);
  const ConstVectorMap proj_b(params.projection_bias().data(), K);

  std::vector<std::size_t> forward_order(L), backward_order(L);
  for (std::size_t i = 0; i < L; ++i) {
    forward_order[i] = i;
    backward_order[i] = L - 1 - i;
  }

  AttentionTrace local;
  AttentionTrace& tr = trace ? *trace : local;
  tr.query = q;
  tr.steps.assign(cfg.rank, {});
  tr.attention = AttentionTensor(cfg.rank, L, K);

  Eigen::VectorXd concat(2 * h);
  for (std::size_t r = 0; r < cfg.rank; ++r) {
    for (int dir = 0; dir < 2; ++dir) {
      tr.steps[r][dir].resize(L);
      run_cell(CellMaps(params.cell(r, dir == 1), e, h), x, h, dir == 0 ? forward_order : backward_order,
               tr.steps[r][dir]);
    }
    for (std::size_t i = 0; i < L; ++i) {
      concat.head(h) = ConstVectorMap(tr.steps[r][0][i].hidden.data(), h);
      concat.tail(h) = ConstVectorMap(tr.steps[r][1][i].hidden.data(), h);
      Eigen::VectorXd logits = proj * concat + proj_b;
      const double mx = logits.maxCoeff();
      logits = (logits.array() - mx).exp();
      logits /= logits.sum();
      auto slice = tr.attention.slice(r, i);
      for (std::size_t k = 0; k < K; ++k) slice[k] = logits[static_cast<Eigen::Index>(k)];
    }
  }
  return tr.attention;
}

void attention_backward(const ModelParams& params, const AttentionTrace& trace, const AttentionTensor& grad_attention,
                        ModelParams& grads) {
  const auto& cfg = params.config();
  const std::size_t e = cfg.embedding_dim, h = cfg.hidden_dim, L = cfg.max_rule_len, K = cfg.num_operators();
  const auto H = static_cast<Eigen::Index>(h);
  const ConstMatrixMap proj(params.projection_weights().data(), K, 2 * h);
  MatrixMap grad_proj(grads.projection_weights().data(), K, 2 * h);
  VectorMap grad_proj_b(grads.projection_bias().data(), K);
  const auto emb = params.embedding(trace.query);
  const ConstVectorMap x(emb.data(), static_cast<Eigen::Index>(e));
  auto grad_emb_span = grads.embedding(trace.query);
  VectorMap grad_x(grad_emb_span.data(), static_cast<Eigen::Index>(e));

  Eigen::VectorXd concat(2 * h), dlogit(K);
  for (std::size_t r = 0; r < cfg.rank; ++r) {
    // ∂loss/∂hidden at each position, per direction, from the projection.
    std::array<std::vector<Eigen::VectorXd>, 2> dhidden;
    dhidden[0].assign(L, Eigen::VectorXd::Zero(H));
    dhidden[1].assign(L, Eigen::VectorXd::Zero(H));
    for (std::size_t i = 0; i < L; ++i) {
      const auto a = trace.attention.slice(r, i);
      const auto ga = grad_attention.slice(r, i);
      double dot = 0.0;
      for (std::size_t k = 0; k < K; ++k) dot += a[k] * ga[k];
      for (std::size_t k = 0; k < K; ++k) dlogit[static_cast<Eigen::Index>(k)] = a[k] * (ga[k] - dot);
      concat.head(h) = ConstVectorMap(trace.steps[r][0][i].hidden.data(), H);
      concat.tail(h) = ConstVectorMap(trace.steps[r][1][i].hidden.data(), H);
      grad_proj.noalias() += dlogit * concat.transpose();
      grad_proj_b += dlogit;
      const Eigen::VectorXd dconcat = proj.transpose() * dlogit;
      dhidden[0][i] = dconcat.head(h);
      dhidden[1][i] = dconcat.tail(h);
    }

    for (int dir = 0; dir < 2; ++dir) {
      const CellMaps m(params.cell(r, dir == 1), e, h);
      auto gc = grads.cell(r, dir == 1);
      MatrixMap gwx(gc.input_weights.data(), 4 * h, e);
      MatrixMap gwh(gc.recurrent_weights.data(), 4 * h, h);
      VectorMap gb(gc.bias.data(), 4 * h);
      const auto& steps = trace.steps[r][dir];
      // Processing order of this direction; walk it in reverse.
      std::vector<std::size_t> order(L);
      for (std::size_t i = 0; i < L; ++i) order[i] = dir == 0 ? i : L - 1 - i;

      Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H), dc_next = Eigen::VectorXd::Zero(H);
      Eigen::VectorXd dz(4 * h), dx_total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e));
      for (std::size_t t = L; t-- > 0;) {
        const auto& s = steps[order[t]];
        const double* prev_c = t > 0 ? steps[order[t - 1]].cell.data() : nullptr;
        const double* prev_h = t > 0 ? steps[order[t - 1]].hidden.data() : nullptr;
        const Eigen::VectorXd dh = dhidden[dir][order[t]] + dh_next;
        for (Eigen::Index k = 0; k < H; ++k) {
          const double i_g = s.gates[k], f_g = s.gates[H + k], g_g = s.gates[2 * H + k], o_g = s.gates[3 * H + k];
          const double tc = std::tanh(s.cell[k]);
          const double dc = dc_next[k] + dh[k] * o_g * (1.0 - tc * tc);
          const double c_prev = prev_c ? prev_c[k] : 0.0;
          dz[k] = dc * g_g * i_g * (1.0 - i_g);
          dz[H + k] = dc * c_prev * f_g * (1.0 - f_g);
          dz[2 * H + k] = dc * i_g * (1.0 - g_g * g_g);
          dz[3 * H + k] = dh[k] * tc * o_g * (1.0 - o_g);
          dc_next[k] = dc * f_g;
        }
        gb += dz;
        gwx.noalias() += dz * x.transpose();
        if (prev_h) gwh.noalias() += dz * ConstVectorMap(prev_h, H).transpose();
        dx_total.noalias() += m.wx.transpose() * dz;
        dh_next = m.wh.transpose() * dz;
      }
      grad_x += dx_total;
    }
  }
}

}  // namespace mplr
