#pragma once

#include <vector>

#include "chartag/graph.hpp"
#include "chartag/tensor.hpp"

namespace chartag {

// Linear-chain CRF over emissions [T x L] with transition matrix
// trans[i][j] = score of label i followed by label j, plus start[j] and
// end[i] boundary scores. All scoring runs in log space.

// Unnormalized score of one label path:
//   start[y0] + sum_t emissions[t][y_t] + sum_t trans[y_{t-1}][y_t] + end[y_{T-1}]
NodeId crf_path_score(Graph& g, NodeId emissions, NodeId trans, NodeId start,
                      NodeId end, const std::vector<int>& labels);

// log of the partition function via the forward (alpha) recursion.
NodeId crf_log_partition(Graph& g, NodeId emissions, NodeId trans, NodeId start,
                         NodeId end);

// Negative log likelihood of the gold path: logZ - path_score.
NodeId crf_nll(Graph& g, NodeId emissions, NodeId trans, NodeId start,
               NodeId end, const std::vector<int>& labels);

// Per-position cross entropy, summed over positions:
//   sum_t [ logsumexp(emissions[t]) - emissions[t][y_t] ]
NodeId softmax_nll(Graph& g, NodeId emissions, const std::vector<int>& labels);

struct ViterbiResult {
  std::vector<int> labels;
  double score = 0.0;  // unnormalized score of the returned path
};

// Exact best path by max-product dynamic programming over plain tensors.
// Score ties resolve to the lowest label id at every argmax.
ViterbiResult viterbi_decode(const Tensor& emissions, const Tensor& trans,
                             const Tensor& start, const Tensor& end);

// Per-position argmax of the emission rows; ties pick the lowest label id.
std::vector<int> softmax_decode(const Tensor& emissions);

}  // namespace chartag
