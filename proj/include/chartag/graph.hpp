#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chartag/tensor.hpp"

namespace chartag {

using NodeId = std::int32_t;

// Gradient of the loss with respect to each named parameter.
using Gradients = std::map<std::string, Tensor>;

enum class Op : std::uint8_t {
  kInput,
  kParam,
  kMatMul,
  kMatVec,
  kAdd,
  kMul,
  kScale,
  kTanh,
  kSigmoid,
  kRelu,
  kLogSumExp,
  kLseRows,
  kConv1dSame,
  kMaxOverTime,
  kRows,
  kRow,
  kSlice,
  kConcat,
  kStackRows,
  kTranspose,
  kAddRowVec,
  kSelectEntries,
  kPick,
  kSum,
};

// Append-only tape of primitive applications. Node inputs always reference
// earlier nodes, so the tape is topologically ordered by construction.
// A Graph is confined to one thread while it is being built or
// differentiated; read access to values is safe afterwards.
class Graph {
 public:
  // Leaf that never receives a gradient entry.
  NodeId input(Tensor t);

  // Named learnable leaf. Binding the same name twice returns the first
  // node (the tensor is assumed identical within one graph).
  NodeId param(const std::string& name, const Tensor& t);

  // a[m x k] * b[k x n] -> [m x n]
  NodeId matmul(NodeId a, NodeId b);
  // w[m x n] * x[n] -> [m]
  NodeId matvec(NodeId w, NodeId x);

  // Elementwise; binary ops require identical shapes.
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId relu(NodeId a);

  // log sum exp of a vector, computed with max subtraction. -> [1]
  NodeId logsumexp(NodeId v);
  // Per-row log sum exp of a matrix [n x m] -> [n].
  NodeId lse_rows(NodeId m);

  // Same-length 1-D convolution with zero padding.
  // x[T x Cin], w[W x Cin x Cout] with odd W, b[Cout] -> [T x Cout]
  NodeId conv1d_same(NodeId x, NodeId w, NodeId b);

  // Per-channel max over the time axis of x[T x C] -> [C]. Gradient flows
  // to the earliest maximal position of each channel.
  NodeId max_over_time(NodeId x);

  // Gathers rows of a [V x D] table -> [k x D]. Backward scatter-adds, so
  // repeated ids accumulate.
  NodeId rows(NodeId table, std::vector<int> ids);
  // Row i of a matrix -> vector.
  NodeId row(NodeId m, int i);
  // v[begin..end) -> [end-begin]
  NodeId slice(NodeId v, int begin, int end);
  // Concatenation of vectors -> vector.
  NodeId concat(const std::vector<NodeId>& vs);
  // k equal-length vectors stacked as rows -> [k x D]
  NodeId stack_rows(const std::vector<NodeId>& vs);
  NodeId transpose(NodeId m);
  // m[n x k] + v[k] broadcast along the last axis.
  NodeId add_rowvec(NodeId m, NodeId v);
  // Entries m[i,j] for each (i,j) -> [k]
  NodeId select_entries(NodeId m, const std::vector<std::pair<int, int>>& coords);
  // v[i] -> [1]
  NodeId pick(NodeId v, int i);
  // Sum of all entries -> [1]
  NodeId sum(NodeId x);

  const Tensor& value(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }

  // Exact reverse-mode gradients of a scalar loss node for every parameter
  // bound to this graph. Parameters off the loss path get zero tensors;
  // non-parameter leaves get no entry.
  Gradients backward(NodeId loss) const;

 private:
  struct Node {
    Op op;
    std::vector<NodeId> in;
    Tensor val;
    std::vector<int> aux;  // op-specific: gather ids, argmax, slice bounds
    double c = 0.0;        // scale factor
    std::string name;      // parameter name
    bool needs_grad = false;
  };

  NodeId push(Node n);
  const Node& node(NodeId id) const;
  void check_id(NodeId id, const char* who) const;
  bool any_needs_grad(const std::vector<NodeId>& ids) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> param_nodes_;
};

}  // namespace chartag
