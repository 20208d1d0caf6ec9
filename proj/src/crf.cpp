#include "chartag/crf.hpp"

#include <string>

#include "chartag/error.hpp"

namespace chartag {

namespace {

// Validates the shared shape contract and returns (T, L).
std::pair<int, int> check_crf_shapes(const Graph& g, NodeId emissions, NodeId trans,
                                     NodeId start, NodeId end) {
  const Tensor& E = g.value(emissions);
  if (E.rank() != 2 || E.shape[0] < 1 || E.shape[1] < 1) {
    throw DimError("crf: emissions must be a non-empty [T x L] matrix, got " + E.shape_str());
  }
  int L = E.shape[1];
  const Tensor& Tr = g.value(trans);
  if (Tr.rank() != 2 || Tr.shape[0] != L || Tr.shape[1] != L) {
    throw DimError("crf: transitions must be [" + std::to_string(L) + " x " +
                   std::to_string(L) + "], got " + Tr.shape_str());
  }
  const Tensor& S = g.value(start);
  const Tensor& En = g.value(end);
  if (S.rank() != 1 || S.shape[0] != L || En.rank() != 1 || En.shape[0] != L) {
    throw DimError("crf: start/end must be [" + std::to_string(L) + "] vectors, got " +
                   S.shape_str() + " and " + En.shape_str());
  }
  return {E.shape[0], L};
}

void check_labels(const std::vector<int>& labels, int T, int L) {
  if (static_cast<int>(labels.size()) != T) {
    throw DimError("crf: expected " + std::to_string(T) + " labels, got " +
                   std::to_string(labels.size()));
  }
  for (int y : labels) {
    if (y < 0 || y >= L) {
      throw DimError("crf: label id " + std::to_string(y) + " out of range [0," +
                     std::to_string(L) + ")");
    }
  }
}

}  // namespace

NodeId crf_path_score(Graph& g, NodeId emissions, NodeId trans, NodeId start,
                      NodeId end, const std::vector<int>& labels) {
  auto [T, L] = check_crf_shapes(g, emissions, trans, start, end);
  check_labels(labels, T, L);

  std::vector<std::pair<int, int>> emit_coords;
  emit_coords.reserve(labels.size());
  for (int t = 0; t < T; ++t) emit_coords.emplace_back(t, labels[static_cast<std::size_t>(t)]);
  NodeId score = g.sum(g.select_entries(emissions, emit_coords));

  if (T > 1) {
    std::vector<std::pair<int, int>> moves;
    moves.reserve(labels.size() - 1);
    for (int t = 1; t < T; ++t) {
      moves.emplace_back(labels[static_cast<std::size_t>(t - 1)], labels[static_cast<std::size_t>(t)]);
    }
    score = g.add(score, g.sum(g.select_entries(trans, moves)));
  }

  score = g.add(score, g.pick(start, labels.front()));
  score = g.add(score, g.pick(end, labels.back()));
  return score;
}

NodeId crf_log_partition(Graph& g, NodeId emissions, NodeId trans, NodeId start,
                         NodeId end) {
  auto [T, L] = check_crf_shapes(g, emissions, trans, start, end);
  (void)L;

  NodeId alpha = g.add(start, g.row(emissions, 0));
  if (T > 1) {
    NodeId trans_t = g.transpose(trans);  // [to x from]
    for (int t = 1; t < T; ++t) {
      NodeId scores = g.add_rowvec(trans_t, alpha);   // [to x from]
      alpha = g.add(g.lse_rows(scores), g.row(emissions, t));
    }
  }
  return g.logsumexp(g.add(alpha, end));
}

NodeId crf_nll(Graph& g, NodeId emissions, NodeId trans, NodeId start,
               NodeId end, const std::vector<int>& labels) {
  NodeId log_z = crf_log_partition(g, emissions, trans, start, end);
  NodeId path = crf_path_score(g, emissions, trans, start, end, labels);
  return g.add(log_z, g.scale(path, -1.0));
}

NodeId softmax_nll(Graph& g, NodeId emissions, const std::vector<int>& labels) {
  const Tensor& E = g.value(emissions);
  if (E.rank() != 2 || E.shape[0] < 1 || E.shape[1] < 1) {
    throw DimError("softmax_nll: emissions must be a non-empty [T x L] matrix, got " + E.shape_str());
  }
  check_labels(labels, E.shape[0], E.shape[1]);

  std::vector<std::pair<int, int>> gold;
  gold.reserve(labels.size());
  for (int t = 0; t < E.shape[0]; ++t) gold.emplace_back(t, labels[static_cast<std::size_t>(t)]);
  NodeId gold_sum = g.sum(g.select_entries(emissions, gold));
  NodeId lse_sum = g.sum(g.lse_rows(emissions));
  return g.add(lse_sum, g.scale(gold_sum, -1.0));
}

ViterbiResult viterbi_decode(const Tensor& emissions, const Tensor& trans,
                             const Tensor& start, const Tensor& end) {
  if (emissions.rank() != 2 || emissions.shape[0] < 1 || emissions.shape[1] < 1) {
    throw DimError("viterbi_decode: emissions must be non-empty [T x L], got " + emissions.shape_str());
  }
  int T = emissions.shape[0], L = emissions.shape[1];
  if (trans.rank() != 2 || trans.shape[0] != L || trans.shape[1] != L ||
      start.rank() != 1 || start.shape[0] != L || end.rank() != 1 || end.shape[0] != L) {
    throw DimError("viterbi_decode: parameter shapes do not match " + std::to_string(L) + " labels");
  }

  std::vector<double> delta(static_cast<std::size_t>(L));
  std::vector<std::vector<int>> back(static_cast<std::size_t>(T), std::vector<int>(static_cast<std::size_t>(L), 0));
  for (int j = 0; j < L; ++j) delta[static_cast<std::size_t>(j)] = start.at(j) + emissions.at(0, j);

  std::vector<double> next(static_cast<std::size_t>(L));
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < L; ++j) {
      double best = delta[0] + trans.at(0, j);
      int arg = 0;
      for (int i = 1; i < L; ++i) {
        double s = delta[static_cast<std::size_t>(i)] + trans.at(i, j);
        if (s > best) {  // ties keep the lowest previous label id
          best = s;
          arg = i;
        }
      }
      next[static_cast<std::size_t>(j)] = best + emissions.at(t, j);
      back[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = arg;
    }
    delta.swap(next);
  }

  double best = delta[0] + end.at(0);
  int arg = 0;
  for (int j = 1; j < L; ++j) {
    double s = delta[static_cast<std::size_t>(j)] + end.at(j);
    if (s > best) {
      best = s;
      arg = j;
    }
  }

  ViterbiResult r;
  r.score = best;
  r.labels.assign(static_cast<std::size_t>(T), 0);
  r.labels[static_cast<std::size_t>(T - 1)] = arg;
  for (int t = T - 1; t > 0; --t) {
    arg = back[static_cast<std::size_t>(t)][static_cast<std::size_t>(arg)];
    r.labels[static_cast<std::size_t>(t - 1)] = arg;
  }
  return r;
}

std::vector<int> softmax_decode(const Tensor& emissions) {
  if (emissions.rank() != 2 || emissions.shape[0] < 1 || emissions.shape[1] < 1) {
    throw DimError("softmax_decode: emissions must be non-empty [T x L], got " + emissions.shape_str());
  }
  int T = emissions.shape[0], L = emissions.shape[1];
  std::vector<int> out(static_cast<std::size_t>(T), 0);
  for (int t = 0; t < T; ++t) {
    double best = emissions.at(t, 0);
    int arg = 0;
    for (int j = 1; j < L; ++j) {
      if (emissions.at(t, j) > best) {
        best = emissions.at(t, j);
        arg = j;
      }
    }
    out[static_cast<std::size_t>(t)] = arg;
  }
  return out;
}

}  // namespace chartag
