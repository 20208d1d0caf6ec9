#include "chartag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chartag/error.hpp"

namespace chartag {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw DimError(msg);
}

}  // namespace

void Graph::check_id(NodeId id, const char* who) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw DimError(std::string(who) + ": node id " + std::to_string(id) + " not in graph");
  }
}

const Graph::Node& Graph::node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

const Tensor& Graph::value(NodeId id) const {
  check_id(id, "value");
  return node(id).val;
}

bool Graph::any_needs_grad(const std::vector<NodeId>& ids) const {
  for (NodeId id : ids) {
    if (node(id).needs_grad) return true;
  }
  return false;
}

NodeId Graph::push(Node n) {
  n.val.check_finite("graph primitive");
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::input(Tensor t) {
  Node n;
  n.op = Op::kInput;
  n.val = std::move(t);
  return push(std::move(n));
}

NodeId Graph::param(const std::string& name, const Tensor& t) {
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) {
    if (!node(it->second).val.same_shape(t)) {
      throw DimError("param '" + name + "' rebound with shape " + t.shape_str() +
                     ", previously " + node(it->second).val.shape_str());
    }
    return it->second;
  }
  Node n;
  n.op = Op::kParam;
  n.val = t;
  n.name = name;
  n.needs_grad = true;
  NodeId id = push(std::move(n));
  param_nodes_.emplace(name, id);
  return id;
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  check_id(a, "matmul");
  check_id(b, "matmul");
  const Tensor& A = node(a).val;
  const Tensor& B = node(b).val;
  require(A.rank() == 2 && B.rank() == 2 && A.shape[1] == B.shape[0],
          "matmul: incompatible shapes " + A.shape_str() + " and " + B.shape_str());
  int m = A.shape[0], k = A.shape[1], n = B.shape[1];
  Node out;
  out.op = Op::kMatMul;
  out.in = {a, b};
  out.val = Tensor::zeros({m, n});
  out.needs_grad = any_needs_grad(out.in);
  for (int i = 0; i < m; ++i) {
    const double* arow = A.data.data() + static_cast<std::size_t>(i) * k;
    double* crow = out.val.data.data() + static_cast<std::size_t>(i) * n;
    for (int kk = 0; kk < k; ++kk) {
      double aik = arow[kk];
      const double* brow = B.data.data() + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return push(std::move(out));
}

NodeId Graph::matvec(NodeId w, NodeId x) {
  check_id(w, "matvec");
  check_id(x, "matvec");
  const Tensor& W = node(w).val;
  const Tensor& X = node(x).val;
  require(W.rank() == 2 && X.rank() == 1 && W.shape[1] == X.shape[0],
          "matvec: incompatible shapes " + W.shape_str() + " and " + X.shape_str());
  int m = W.shape[0], n = W.shape[1];
  Node out;
  out.op = Op::kMatVec;
  out.in = {w, x};
  out.val = Tensor::zeros({m});
  out.needs_grad = any_needs_grad(out.in);
  for (int i = 0; i < m; ++i) {
    const double* wrow = W.data.data() + static_cast<std::size_t>(i) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += wrow[j] * X.data[static_cast<std::size_t>(j)];
    out.val.data[static_cast<std::size_t>(i)] = s;
  }
  return push(std::move(out));
}

NodeId Graph::add(NodeId a, NodeId b) {
  check_id(a, "add");
  check_id(b, "add");
  const Tensor& A = node(a).val;
  const Tensor& B = node(b).val;
  require(A.same_shape(B), "add: shape mismatch " + A.shape_str() + " vs " + B.shape_str());
  Node out;
  out.op = Op::kAdd;
  out.in = {a, b};
  out.val = A;
  out.needs_grad = any_needs_grad(out.in);
  for (std::size_t i = 0; i < out.val.data.size(); ++i) out.val.data[i] += B.data[i];
  return push(std::move(out));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  check_id(a, "mul");
  check_id(b, "mul");
  const Tensor& A = node(a).val;
  const Tensor& B = node(b).val;
  require(A.same_shape(B), "mul: shape mismatch " + A.shape_str() + " vs " + B.shape_str());
  Node out;
  out.op = Op::kMul;
  out.in = {a, b};
  out.val = A;
  out.needs_grad = any_needs_grad(out.in);
  for (std::size_t i = 0; i < out.val.data.size(); ++i) out.val.data[i] *= B.data[i];
  return push(std::move(out));
}

NodeId Graph::scale(NodeId a, double c) {
  check_id(a, "scale");
  Node out;
  out.op = Op::kScale;
  out.in = {a};
  out.c = c;
  out.val = node(a).val;
  out.needs_grad = any_needs_grad(out.in);
  for (double& x : out.val.data) x *= c;
  return push(std::move(out));
}

NodeId Graph::tanh(NodeId a) {
  check_id(a, "tanh");
  Node out;
  out.op = Op::kTanh;
  out.in = {a};
  out.val = node(a).val;
  out.needs_grad = any_needs_grad(out.in);
  for (double& x : out.val.data) x = std::tanh(x);
  return push(std::move(out));
}

NodeId Graph::sigmoid(NodeId a) {
  check_id(a, "sigmoid");
  Node out;
  out.op = Op::kSigmoid;
  out.in = {a};
  out.val = node(a).val;
  out.needs_grad = any_needs_grad(out.in);
  for (double& x : out.val.data) x = stable_sigmoid(x);
  return push(std::move(out));
}

NodeId Graph::relu(NodeId a) {
  check_id(a, "relu");
  Node out;
  out.op = Op::kRelu;
  out.in = {a};
  out.val = node(a).val;
  out.needs_grad = any_needs_grad(out.in);
  for (double& x : out.val.data) x = x > 0.0 ? x : 0.0;
  return push(std::move(out));
}

NodeId Graph::logsumexp(NodeId v) {
  check_id(v, "logsumexp");
  const Tensor& V = node(v).val;
  require(V.rank() == 1, "logsumexp: expected a vector, got " + V.shape_str());
  if (V.shape[0] < 1) throw DimError("logsumexp: empty input");
  double mx = *std::max_element(V.data.begin(), V.data.end());
  double s = 0.0;
  for (double x : V.data) s += std::exp(x - mx);
  Node out;
  out.op = Op::kLogSumExp;
  out.in = {v};
  out.val = Tensor::scalar(mx + std::log(s));
  out.needs_grad = any_needs_grad(out.in);
  return push(std::move(out));
}

NodeId Graph::lse_rows(NodeId m) {
  check_id(m, "lse_rows");
  const Tensor& M = node(m).val;
  require(M.rank() == 2 && M.shape[0] >= 1 && M.shape[1] >= 1,
          "lse_rows: expected a non-empty matrix, got " + M.shape_str());
  int n = M.shape[0], cols = M.shape[1];
  Node out;
  out.op = Op::kLseRows;
  out.in = {m};
  out.val = Tensor::zeros({n});
  out.needs_grad = any_needs_grad(out.in);
  for (int i = 0; i < n; ++i) {
    const double* row = M.data.data() + static_cast<std::size_t>(i) * cols;
    double mx = row[0];
    for (int j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
    double s = 0.0;
    for (int j = 0; j < cols; ++j) s += std::exp(row[j] - mx);
    out.val.data[static_cast<std::size_t>(i)] = mx + std::log(s);
  }
  return push(std::move(out));
}

NodeId Graph::conv1d_same(NodeId x, NodeId w, NodeId b) {
  check_id(x, "conv1d_same");
  check_id(w, "conv1d_same");
  check_id(b, "conv1d_same");
  const Tensor& X = node(x).val;
  const Tensor& W = node(w).val;
  const Tensor& B = node(b).val;
  require(X.rank() == 2 && W.rank() == 3 && B.rank() == 1,
          "conv1d_same: expected x[TxCin], w[WxCinxCout], b[Cout]");
  int T = X.shape[0], cin = X.shape[1];
  int win = W.shape[0], wcin = W.shape[1], cout = W.shape[2];
  if (win % 2 == 0) throw DimError("conv1d_same: window size must be odd, got " + std::to_string(win));
  require(T >= 1, "conv1d_same: empty time axis");
  require(wcin == cin, "conv1d_same: channel mismatch, x has " + std::to_string(cin) +
                           " input channels but kernel expects " + std::to_string(wcin));
  require(B.shape[0] == cout, "conv1d_same: bias length " + B.shape_str() +
                                  " does not match kernel output channels " + std::to_string(cout));
  int half = (win - 1) / 2;
  Node out;
  out.op = Op::kConv1dSame;
  out.in = {x, w, b};
  out.val = Tensor::zeros({T, cout});
  out.needs_grad = any_needs_grad(out.in);
  for (int t = 0; t < T; ++t) {
    double* yrow = out.val.data.data() + static_cast<std::size_t>(t) * cout;
    for (int o = 0; o < cout; ++o) yrow[o] = B.data[static_cast<std::size_t>(o)];
    for (int d = 0; d < win; ++d) {
      int s = t + d - half;
      if (s < 0 || s >= T) continue;  // zero padding
      const double* xrow = X.data.data() + static_cast<std::size_t>(s) * cin;
      for (int c = 0; c < cin; ++c) {
        double xv = xrow[c];
        const double* wrow = W.data.data() + (static_cast<std::size_t>(d) * cin + c) * cout;
        for (int o = 0; o < cout; ++o) yrow[o] += xv * wrow[o];
      }
    }
  }
  return push(std::move(out));
}

NodeId Graph::max_over_time(NodeId x) {
  check_id(x, "max_over_time");
  const Tensor& X = node(x).val;
  require(X.rank() == 2, "max_over_time: expected a matrix, got " + X.shape_str());
  int T = X.shape[0], C = X.shape[1];
  if (T < 1) throw DimError("max_over_time: empty time axis");
  Node out;
  out.op = Op::kMaxOverTime;
  out.in = {x};
  out.val = Tensor::zeros({C});
  out.aux.assign(static_cast<std::size_t>(C), 0);
  out.needs_grad = any_needs_grad(out.in);
  for (int c = 0; c < C; ++c) {
    double best = X.at(0, c);
    int arg = 0;
    for (int t = 1; t < T; ++t) {
      if (X.at(t, c) > best) {  // strict: ties keep the earliest position
        best = X.at(t, c);
        arg = t;
      }
    }
    out.val.data[static_cast<std::size_t>(c)] = best;
    out.aux[static_cast<std::size_t>(c)] = arg;
  }
  return push(std::move(out));
}

NodeId Graph::rows(NodeId table, std::vector<int> ids) {
  check_id(table, "rows");
  const Tensor& Tbl = node(table).val;
  require(Tbl.rank() == 2, "rows: expected a matrix table, got " + Tbl.shape_str());
  int V = Tbl.shape[0], D = Tbl.shape[1];
  for (int id : ids) {
    if (id < 0 || id >= V) {
      throw DimError("rows: id " + std::to_string(id) + " out of range for table with " +
                     std::to_string(V) + " rows");
    }
  }
  Node out;
  out.op = Op::kRows;
  out.in = {table};
  out.val = Tensor::zeros({static_cast<int>(ids.size()), D});
  out.needs_grad = any_needs_grad(out.in);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const double* src = Tbl.data.data() + static_cast<std::size_t>(ids[r]) * D;
    std::copy(src, src + D, out.val.data.data() + r * static_cast<std::size_t>(D));
  }
  out.aux.assign(ids.begin(), ids.end());
  return push(std::move(out));
}

NodeId Graph::row(NodeId m, int i) {
  check_id(m, "row");
  const Tensor& M = node(m).val;
  require(M.rank() == 2, "row: expected a matrix, got " + M.shape_str());
  require(i >= 0 && i < M.shape[0], "row: index " + std::to_string(i) + " out of range for " + M.shape_str());
  int D = M.shape[1];
  Node out;
  out.op = Op::kRow;
  out.in = {m};
  out.aux = {i};
  out.val = Tensor::zeros({D});
  out.needs_grad = any_needs_grad(out.in);
  const double* src = M.data.data() + static_cast<std::size_t>(i) * D;
  std::copy(src, src + D, out.val.data.begin());
  return push(std::move(out));
}

NodeId Graph::slice(NodeId v, int begin, int end) {
  check_id(v, "slice");
  const Tensor& V = node(v).val;
  require(V.rank() == 1, "slice: expected a vector, got " + V.shape_str());
  require(begin >= 0 && begin < end && end <= V.shape[0],
          "slice: bounds [" + std::to_string(begin) + "," + std::to_string(end) +
              ") invalid for length " + std::to_string(V.shape[0]));
  Node out;
  out.op = Op::kSlice;
  out.in = {v};
  out.aux = {begin, end};
  out.val = Tensor::zeros({end - begin});
  out.needs_grad = any_needs_grad(out.in);
  std::copy(V.data.begin() + begin, V.data.begin() + end, out.val.data.begin());
  return push(std::move(out));
}

NodeId Graph::concat(const std::vector<NodeId>& vs) {
  require(!vs.empty(), "concat: no inputs");
  int total = 0;
  for (NodeId id : vs) {
    check_id(id, "concat");
    const Tensor& V = node(id).val;
    require(V.rank() == 1, "concat: expected vectors, got " + V.shape_str());
    total += V.shape[0];
  }
  Node out;
  out.op = Op::kConcat;
  out.in = vs;
  out.val = Tensor::zeros({total});
  out.needs_grad = any_needs_grad(out.in);
  std::size_t off = 0;
  for (NodeId id : vs) {
    const Tensor& V = node(id).val;
    std::copy(V.data.begin(), V.data.end(), out.val.data.begin() + static_cast<long>(off));
    off += V.data.size();
  }
  return push(std::move(out));
}

NodeId Graph::stack_rows(const std::vector<NodeId>& vs) {
  require(!vs.empty(), "stack_rows: no inputs");
  check_id(vs[0], "stack_rows");
  int D = node(vs[0]).val.rank() == 1 ? node(vs[0]).val.shape[0] : -1;
  require(D >= 0, "stack_rows: expected vectors");
  for (NodeId id : vs) {
    check_id(id, "stack_rows");
    const Tensor& V = node(id).val;
    require(V.rank() == 1 && V.shape[0] == D,
            "stack_rows: all vectors must have length " + std::to_string(D) + ", got " + V.shape_str());
  }
  Node out;
  out.op = Op::kStackRows;
  out.in = vs;
  out.val = Tensor::zeros({static_cast<int>(vs.size()), D});
  out.needs_grad = any_needs_grad(out.in);
  for (std::size_t r = 0; r < vs.size(); ++r) {
    const Tensor& V = node(vs[r]).val;
    std::copy(V.data.begin(), V.data.end(), out.val.data.begin() + static_cast<long>(r * static_cast<std::size_t>(D)));
  }
  return push(std::move(out));
}

NodeId Graph::transpose(NodeId m) {
  check_id(m, "transpose");
  const Tensor& M = node(m).val;
  require(M.rank() == 2, "transpose: expected a matrix, got " + M.shape_str());
  int r = M.shape[0], c = M.shape[1];
  Node out;
  out.op = Op::kTranspose;
  out.in = {m};
  out.val = Tensor::zeros({c, r});
  out.needs_grad = any_needs_grad(out.in);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) out.val.at(j, i) = M.at(i, j);
  }
  return push(std::move(out));
}

NodeId Graph::add_rowvec(NodeId m, NodeId v) {
  check_id(m, "add_rowvec");
  check_id(v, "add_rowvec");
  const Tensor& M = node(m).val;
  const Tensor& V = node(v).val;
  require(M.rank() == 2 && V.rank() == 1 && M.shape[1] == V.shape[0],
          "add_rowvec: shapes " + M.shape_str() + " and " + V.shape_str() + " incompatible");
  Node out;
  out.op = Op::kAddRowVec;
  out.in = {m, v};
  out.val = M;
  out.needs_grad = any_needs_grad(out.in);
  int rowsn = M.shape[0], cols = M.shape[1];
  for (int i = 0; i < rowsn; ++i) {
    double* dst = out.val.data.data() + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) dst[j] += V.data[static_cast<std::size_t>(j)];
  }
  return push(std::move(out));
}

NodeId Graph::select_entries(NodeId m, const std::vector<std::pair<int, int>>& coords) {
  check_id(m, "select_entries");
  const Tensor& M = node(m).val;
  require(M.rank() == 2, "select_entries: expected a matrix, got " + M.shape_str());
  require(!coords.empty(), "select_entries: no coordinates");
  Node out;
  out.op = Op::kSelectEntries;
  out.in = {m};
  out.val = Tensor::zeros({static_cast<int>(coords.size())});
  out.needs_grad = any_needs_grad(out.in);
  out.aux.reserve(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    auto [i, j] = coords[k];
    require(i >= 0 && i < M.shape[0] && j >= 0 && j < M.shape[1],
            "select_entries: (" + std::to_string(i) + "," + std::to_string(j) +
                ") out of range for " + M.shape_str());
    out.aux.push_back(i * M.shape[1] + j);
    out.val.data[k] = M.data[static_cast<std::size_t>(i) * M.shape[1] + j];
  }
  return push(std::move(out));
}

NodeId Graph::pick(NodeId v, int i) {
  check_id(v, "pick");
  const Tensor& V = node(v).val;
  require(V.rank() == 1, "pick: expected a vector, got " + V.shape_str());
  require(i >= 0 && i < V.shape[0], "pick: index " + std::to_string(i) + " out of range for " + V.shape_str());
  Node out;
  out.op = Op::kPick;
  out.in = {v};
  out.aux = {i};
  out.val = Tensor::scalar(V.data[static_cast<std::size_t>(i)]);
  out.needs_grad = any_needs_grad(out.in);
  return push(std::move(out));
}

NodeId Graph::sum(NodeId x) {
  check_id(x, "sum");
  const Tensor& X = node(x).val;
  double s = 0.0;
  for (double v : X.data) s += v;
  Node out;
  out.op = Op::kSum;
  out.in = {x};
  out.val = Tensor::scalar(s);
  out.needs_grad = any_needs_grad(out.in);
  return push(std::move(out));
}

Gradients Graph::backward(NodeId loss) const {
  check_id(loss, "backward");
  const Node& ln = node(loss);
  if (ln.val.numel() != 1) {
    throw DimError("backward: loss must be a scalar, got shape " + ln.val.shape_str());
  }

  Gradients out;
  for (const auto& [name, id] : param_nodes_) out.emplace(name, Tensor::zeros(node(id).val.shape));

  if (!ln.needs_grad) return out;  // no parameter on any path

  std::vector<Tensor> grad(nodes_.size());
  auto touched = [&](NodeId id) -> bool { return !grad[static_cast<std::size_t>(id)].data.empty(); };
  auto acc = [&](NodeId id) -> Tensor& {
    Tensor& g = grad[static_cast<std::size_t>(id)];
    if (g.data.empty()) g = Tensor::zeros(node(id).val.shape);
    return g;
  };
  auto wants = [&](NodeId id) -> bool { return node(id).needs_grad; };

  acc(loss).data[0] = 1.0;

  for (NodeId i = loss; i >= 0; --i) {
    const Node& n = node(i);
    if (!n.needs_grad || !touched(i)) continue;
    const Tensor& g = grad[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::kInput:
      case Op::kParam:
        break;
      case Op::kMatMul: {
        const Tensor& A = node(n.in[0]).val;
        const Tensor& B = node(n.in[1]).val;
        int m = A.shape[0], k = A.shape[1], nn = B.shape[1];
        if (wants(n.in[0])) {
          Tensor& dA = acc(n.in[0]);
          for (int i2 = 0; i2 < m; ++i2) {
            const double* grow = g.data.data() + static_cast<std::size_t>(i2) * nn;
            double* darow = dA.data.data() + static_cast<std::size_t>(i2) * k;
            for (int kk = 0; kk < k; ++kk) {
              const double* brow = B.data.data() + static_cast<std::size_t>(kk) * nn;
              double s = 0.0;
              for (int j = 0; j < nn; ++j) s += grow[j] * brow[j];
              darow[kk] += s;
            }
          }
        }
        if (wants(n.in[1])) {
          Tensor& dB = acc(n.in[1]);
          for (int i2 = 0; i2 < m; ++i2) {
            const double* arow = A.data.data() + static_cast<std::size_t>(i2) * k;
            const double* grow = g.data.data() + static_cast<std::size_t>(i2) * nn;
            for (int kk = 0; kk < k; ++kk) {
              double aik = arow[kk];
              double* dbrow = dB.data.data() + static_cast<std::size_t>(kk) * nn;
              for (int j = 0; j < nn; ++j) dbrow[j] += aik * grow[j];
            }
          }
        }
        break;
      }
      case Op::kMatVec: {
        const Tensor& W = node(n.in[0]).val;
        const Tensor& X = node(n.in[1]).val;
        int m = W.shape[0], nn = W.shape[1];
        bool dw = wants(n.in[0]), dx = wants(n.in[1]);
        Tensor* dW = dw ? &acc(n.in[0]) : nullptr;
        Tensor* dX = dx ? &acc(n.in[1]) : nullptr;
        for (int i2 = 0; i2 < m; ++i2) {
          double gi = g.data[static_cast<std::size_t>(i2)];
          if (gi == 0.0) continue;
          const double* wrow = W.data.data() + static_cast<std::size_t>(i2) * nn;
          double* dwrow = dw ? dW->data.data() + static_cast<std::size_t>(i2) * nn : nullptr;
          for (int j = 0; j < nn; ++j) {
            if (dw) dwrow[j] += gi * X.data[static_cast<std::size_t>(j)];
            if (dx) dX->data[static_cast<std::size_t>(j)] += gi * wrow[j];
          }
        }
        break;
      }
      case Op::kAdd: {
        for (int s = 0; s < 2; ++s) {
          if (!wants(n.in[static_cast<std::size_t>(s)])) continue;
          Tensor& d = acc(n.in[static_cast<std::size_t>(s)]);
          for (std::size_t j = 0; j < g.data.size(); ++j) d.data[j] += g.data[j];
        }
        break;
      }
      case Op::kMul: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          const Tensor& other = node(n.in[1]).val;
          for (std::size_t j = 0; j < g.data.size(); ++j) d.data[j] += g.data[j] * other.data[j];
        }
        if (wants(n.in[1])) {
          Tensor& d = acc(n.in[1]);
          const Tensor& other = node(n.in[0]).val;
          for (std::size_t j = 0; j < g.data.size(); ++j) d.data[j] += g.data[j] * other.data[j];
        }
        break;
      }
      case Op::kScale: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          for (std::size_t j = 0; j < g.data.size(); ++j) d.data[j] += n.c * g.data[j];
        }
        break;
      }
      case Op::kTanh: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            double y = n.val.data[j];
            d.data[j] += g.data[j] * (1.0 - y * y);
          }
        }
        break;
      }
      case Op::kSigmoid: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            double y = n.val.data[j];
            d.data[j] += g.data[j] * y * (1.0 - y);
          }
        }
        break;
      }
      case Op::kRelu: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          const Tensor& x = node(n.in[0]).val;
          for (std::size_t j = 0; j < g.data.size(); ++j) {
            if (x.data[j] > 0.0) d.data[j] += g.data[j];
          }
        }
        break;
      }
      case Op::kLogSumExp: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          const Tensor& v = node(n.in[0]).val;
          double y = n.val.data[0], g0 = g.data[0];
          for (std::size_t j = 0; j < v.data.size(); ++j) d.data[j] += g0 * std::exp(v.data[j] - y);
        }
        break;
      }
      case Op::kLseRows: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          const Tensor& M = node(n.in[0]).val;
          int rowsn = M.shape[0], cols = M.shape[1];
          for (int i2 = 0; i2 < rowsn; ++i2) {
            double gi = g.data[static_cast<std::size_t>(i2)];
            if (gi == 0.0) continue;
            double yi = n.val.data[static_cast<std::size_t>(i2)];
            const double* mrow = M.data.data() + static_cast<std::size_t>(i2) * cols;
            double* drow = d.data.data() + static_cast<std::size_t>(i2) * cols;
            for (int j = 0; j < cols; ++j) drow[j] += gi * std::exp(mrow[j] - yi);
          }
        }
        break;
      }
      case Op::kConv1dSame: {
        const Tensor& X = node(n.in[0]).val;
        const Tensor& W = node(n.in[1]).val;
        int T = X.shape[0], cin = X.shape[1];
        int win = W.shape[0], cout = W.shape[2];
        int half = (win - 1) / 2;
        bool dxw = wants(n.in[0]), dww = wants(n.in[1]), dbw = wants(n.in[2]);
        Tensor* dX = dxw ? &acc(n.in[0]) : nullptr;
        Tensor* dW = dww ? &acc(n.in[1]) : nullptr;
        Tensor* dB = dbw ? &acc(n.in[2]) : nullptr;
        for (int t = 0; t < T; ++t) {
          const double* grow = g.data.data() + static_cast<std::size_t>(t) * cout;
          if (dbw) {
            for (int o = 0; o < cout; ++o) dB->data[static_cast<std::size_t>(o)] += grow[o];
          }
          for (int d2 = 0; d2 < win; ++d2) {
            int s = t + d2 - half;
            if (s < 0 || s >= T) continue;
            const double* xrow = X.data.data() + static_cast<std::size_t>(s) * cin;
            for (int c = 0; c < cin; ++c) {
              const double* wrow = W.data.data() + (static_cast<std::size_t>(d2) * cin + c) * cout;
              double* dwrow = dww ? dW->data.data() + (static_cast<std::size_t>(d2) * cin + c) * cout : nullptr;
              double sgx = 0.0;
              for (int o = 0; o < cout; ++o) {
                if (dww) dwrow[o] += xrow[c] * grow[o];
                sgx += wrow[o] * grow[o];
              }
              if (dxw) dX->data[static_cast<std::size_t>(s) * cin + c] += sgx;
            }
          }
        }
        break;
      }
      case Op::kMaxOverTime: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          int C = n.val.shape[0];
          int cols = node(n.in[0]).val.shape[1];
          for (int c = 0; c < C; ++c) {
            int arg = n.aux[static_cast<std::size_t>(c)];
            d.data[static_cast<std::size_t>(arg) * cols + c] += g.data[static_cast<std::size_t>(c)];
          }
        }
        break;
      }
      case Op::kRows: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          int D = n.val.shape[1];
          for (std::size_t r = 0; r < n.aux.size(); ++r) {
            double* drow = d.data.data() + static_cast<std::size_t>(n.aux[r]) * D;
            const double* grow = g.data.data() + r * static_cast<std::size_t>(D);
            for (int j = 0; j < D; ++j) drow[j] += grow[j];
          }
        }
        break;
      }
      case Op::kRow: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          int D = n.val.shape[0];
          double* drow = d.data.data() + static_cast<std::size_t>(n.aux[0]) * D;
          for (int j = 0; j < D; ++j) drow[j] += g.data[static_cast<std::size_t>(j)];
        }
        break;
      }
      case Op::kSlice: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          int b = n.aux[0];
          for (std::size_t j = 0; j < g.data.size(); ++j) d.data[static_cast<std::size_t>(b) + j] += g.data[j];
        }
        break;
      }
      case Op::kConcat: {
        std::size_t off = 0;
        for (NodeId src : n.in) {
          std::size_t len = node(src).val.data.size();
          if (wants(src)) {
            Tensor& d = acc(src);
            for (std::size_t j = 0; j < len; ++j) d.data[j] += g.data[off + j];
          }
          off += len;
        }
        break;
      }
      case Op::kStackRows: {
        std::size_t D = static_cast<std::size_t>(n.val.shape[1]);
        for (std::size_t r = 0; r < n.in.size(); ++r) {
          if (!wants(n.in[r])) continue;
          Tensor& d = acc(n.in[r]);
          const double* grow = g.data.data() + r * D;
          for (std::size_t j = 0; j < D; ++j) d.data[j] += grow[j];
        }
        break;
      }
      case Op::kTranspose: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          int r = node(n.in[0]).val.shape[0], c = node(n.in[0]).val.shape[1];
          for (int i2 = 0; i2 < r; ++i2) {
            for (int j = 0; j < c; ++j) d.at(i2, j) += g.at(j, i2);
          }
        }
        break;
      }
      case Op::kAddRowVec: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          for (std::size_t j = 0; j < g.data.size(); ++j) d.data[j] += g.data[j];
        }
        if (wants(n.in[1])) {
          Tensor& d = acc(n.in[1]);
          int rowsn = n.val.shape[0], cols = n.val.shape[1];
          for (int i2 = 0; i2 < rowsn; ++i2) {
            const double* grow = g.data.data() + static_cast<std::size_t>(i2) * cols;
            for (int j = 0; j < cols; ++j) d.data[static_cast<std::size_t>(j)] += grow[j];
          }
        }
        break;
      }
      case Op::kSelectEntries: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          for (std::size_t k = 0; k < n.aux.size(); ++k) {
            d.data[static_cast<std::size_t>(n.aux[k])] += g.data[k];
          }
        }
        break;
      }
      case Op::kPick: {
        if (wants(n.in[0])) acc(n.in[0]).data[static_cast<std::size_t>(n.aux[0])] += g.data[0];
        break;
      }
      case Op::kSum: {
        if (wants(n.in[0])) {
          Tensor& d = acc(n.in[0]);
          double g0 = g.data[0];
          for (double& x : d.data) x += g0;
        }
        break;
      }
    }
  }

  for (const auto& [name, id] : param_nodes_) {
    if (touched(id)) out[name] = std::move(grad[static_cast<std::size_t>(id)]);
  }
  return out;
}

}  // namespace chartag
