#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "chartag/crf.hpp"
#include "chartag/error.hpp"
#include "test_support.hpp"

using namespace chartag;
using namespace chartag::testing;

namespace {

struct Instance {
  Tensor e, trans, start, end;
  int T, L;
};

Instance random_instance(Rng& rng, int T, int L) {
  Instance in;
  in.T = T;
  in.L = L;
  in.e = random_tensor({T, L}, rng, -2.0, 2.0);
  in.trans = random_tensor({L, L}, rng, -1.5, 1.5);
  in.start = random_tensor({L}, rng, -1.0, 1.0);
  in.end = random_tensor({L}, rng, -1.0, 1.0);
  return in;
}

double ref_path_score(const Instance& in, const std::vector<int>& ys) {
  double s = in.start.at(ys[0]) + in.e.at(0, ys[0]);
  for (int t = 1; t < in.T; ++t) s += in.trans.at(ys[t - 1], ys[t]) + in.e.at(t, ys[t]);
  return s + in.end.at(ys[static_cast<std::size_t>(in.T) - 1]);
}

// Visits every label path of length T by odometer.
template <class F>
void for_each_path(int T, int L, F&& f) {
  std::vector<int> ys(static_cast<std::size_t>(T), 0);
  while (true) {
    f(ys);
    int t = T - 1;
    while (t >= 0 && ys[static_cast<std::size_t>(t)] == L - 1) ys[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) return;
    ++ys[static_cast<std::size_t>(t)];
  }
}

double brute_log_partition(const Instance& in) {
  std::vector<double> scores;
  for_each_path(in.T, in.L, [&](const std::vector<int>& ys) {
    scores.push_back(ref_path_score(in, ys));
  });
  double mx = *std::max_element(scores.begin(), scores.end());
  double s = 0.0;
  for (double x : scores) s += std::exp(x - mx);
  return mx + std::log(s);
}

double brute_best_score(const Instance& in) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_path(in.T, in.L, [&](const std::vector<int>& ys) {
    best = std::max(best, ref_path_score(in, ys));
  });
  return best;
}

// Marginal P(y_t = j) by full enumeration.
Tensor brute_marginals(const Instance& in) {
  double logZ = brute_log_partition(in);
  Tensor m = Tensor::zeros({in.T, in.L});
  for_each_path(in.T, in.L, [&](const std::vector<int>& ys) {
    double p = std::exp(ref_path_score(in, ys) - logZ);
    for (int t = 0; t < in.T; ++t) m.at(t, ys[static_cast<std::size_t>(t)]) += p;
  });
  return m;
}

NodeId bind_nll(Graph& g, const Instance& in, const std::vector<int>& ys) {
  return crf_nll(g, g.input(in.e), g.input(in.trans), g.input(in.start),
                 g.input(in.end), ys);
}

}  // namespace

TEST_CASE("log partition matches enumeration on 1000 random instances") {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    int T = 1 + rng.below(5);
    int L = 2 + rng.below(3);
    Instance in = random_instance(rng, T, L);
    Graph g;
    double logZ = g.value(crf_log_partition(g, g.input(in.e), g.input(in.trans),
                                            g.input(in.start), g.input(in.end)))
                      .item();
    REQUIRE(std::abs(logZ - brute_log_partition(in)) <= 1e-9);
  }
}

TEST_CASE("path score and nll match enumeration on random instances") {
  Rng rng(102);
  for (int i = 0; i < 300; ++i) {
    int T = 1 + rng.below(5);
    int L = 2 + rng.below(3);
    Instance in = random_instance(rng, T, L);
    std::vector<int> ys(static_cast<std::size_t>(T));
    for (auto& y : ys) y = rng.below(L);
    Graph g;
    double ps = g.value(crf_path_score(g, g.input(in.e), g.input(in.trans),
                                       g.input(in.start), g.input(in.end), ys))
                    .item();
    REQUIRE(ps == doctest::Approx(ref_path_score(in, ys)).epsilon(1e-12));
    Graph g2;
    double nll = g2.value(bind_nll(g2, in, ys)).item();
    double ref = brute_log_partition(in) - ref_path_score(in, ys);
    REQUIRE(std::abs(nll - ref) <= 1e-9);
    REQUIRE(nll >= -1e-12);  // logZ dominates any single path
  }
}

TEST_CASE("viterbi equals exhaustive argmax on random instances") {
  Rng rng(103);
  for (int i = 0; i < 300; ++i) {
    int T = 1 + rng.below(5);
    int L = 2 + rng.below(3);
    Instance in = random_instance(rng, T, L);
    ViterbiResult vr = viterbi_decode(in.e, in.trans, in.start, in.end);
    REQUIRE(vr.labels.size() == static_cast<std::size_t>(T));
    REQUIRE(std::abs(vr.score - brute_best_score(in)) <= 1e-9);
    // the returned path itself attains the reported score
    REQUIRE(ref_path_score(in, vr.labels) == doctest::Approx(vr.score).epsilon(1e-12));
  }
}

TEST_CASE("all-zero parameters give logZ = T ln L and the all-zeros path") {
  for (int T : {1, 3, 5}) {
    for (int L : {2, 4}) {
      Instance in{Tensor::zeros({T, L}), Tensor::zeros({L, L}), Tensor::zeros({L}),
                  Tensor::zeros({L}), T, L};
      Graph g;
      double logZ = g.value(crf_log_partition(g, g.input(in.e), g.input(in.trans),
                                              g.input(in.start), g.input(in.end)))
                        .item();
      CHECK(logZ == doctest::Approx(T * std::log(double(L))).epsilon(1e-12));
      ViterbiResult vr = viterbi_decode(in.e, in.trans, in.start, in.end);
      CHECK(vr.score == 0.0);
      for (int y : vr.labels) CHECK(y == 0);  // every path ties; lowest ids win
    }
  }
}

TEST_CASE("viterbi ties resolve to the lowest label id") {
  // labels 1 and 2 tie at every step, strictly above label 0
  Instance in{Tensor::mat({{0.0, 5.0, 5.0}, {0.0, 5.0, 5.0}}), Tensor::zeros({3, 3}),
              Tensor::zeros({3}), Tensor::zeros({3}), 2, 3};
  ViterbiResult vr = viterbi_decode(in.e, in.trans, in.start, in.end);
  CHECK(vr.labels == std::vector<int>{1, 1});
  CHECK(vr.score == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("adding a constant to one emission row leaves the nll unchanged") {
  Rng rng(104);
  for (int i = 0; i < 50; ++i) {
    Instance in = random_instance(rng, 4, 3);
    std::vector<int> ys{2, 0, 1, 1};
    Graph g;
    double nll = g.value(bind_nll(g, in, ys)).item();
    Instance shifted = in;
    int row = rng.below(4);
    double c = rng.uniform(-3.0, 3.0);
    for (int j = 0; j < 3; ++j) shifted.e.at(row, j) += c;
    Graph g2;
    double nll2 = g2.value(bind_nll(g2, shifted, ys)).item();
    REQUIRE(std::abs(nll - nll2) <= 1e-9);
  }
}

TEST_CASE("a -1e9 transition score forbids the transition in decode") {
  // emissions strongly prefer label 2 everywhere, but label 2 is walled off
  Tensor e = Tensor::mat({{0.0, 1.0, 50.0}, {0.0, 1.0, 50.0}, {0.0, 1.0, 50.0}});
  Tensor trans = Tensor::zeros({3, 3});
  for (int i = 0; i < 3; ++i) trans.at(i, 2) = -1e9;
  Tensor start = Tensor::zeros({3});
  start.at(2) = -1e9;
  ViterbiResult vr =
      viterbi_decode(e, Tensor::zeros({3, 3}), Tensor::zeros({3}), Tensor::zeros({3}));
  CHECK(vr.labels == std::vector<int>{2, 2, 2});  // unconstrained baseline
  ViterbiResult walled = viterbi_decode(e, trans, start, Tensor::zeros({3}));
  CHECK(walled.labels == std::vector<int>{1, 1, 1});
}

TEST_CASE("nll gradient wrt emissions equals marginals minus gold indicators") {
  Rng rng(105);
  for (int i = 0; i < 30; ++i) {
    int T = 1 + rng.below(4);
    int L = 2 + rng.below(3);
    Instance in = random_instance(rng, T, L);
    std::vector<int> ys(static_cast<std::size_t>(T));
    for (auto& y : ys) y = rng.below(L);
    Graph g;
    NodeId e = g.param("e", in.e);
    NodeId loss = crf_nll(g, e, g.input(in.trans), g.input(in.start), g.input(in.end), ys);
    Gradients grads = g.backward(loss);
    Tensor marg = brute_marginals(in);
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < L; ++j) {
        double want = marg.at(t, j) - (ys[static_cast<std::size_t>(t)] == j ? 1.0 : 0.0);
        REQUIRE(grads.at("e").at(t, j) == doctest::Approx(want).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("nll gradients for all crf parameters pass finite differences") {
  Rng rng(106);
  Instance in = random_instance(rng, 4, 3);
  std::vector<int> ys{0, 2, 1, 2};
  Params p{{"e", in.e}, {"trans", in.trans}, {"start", in.start}, {"end", in.end}};
  auto build = [&ys](Graph& g, const Params& q) {
    return crf_nll(g, g.param("e", q.at("e")), g.param("trans", q.at("trans")),
                   g.param("start", q.at("start")), g.param("end", q.at("end")), ys);
  };
  CHECK(max_grad_rel_err(build, p) < 2e-6);
}

TEST_CASE("softmax nll matches the naive per-position sum") {
  Rng rng(107);
  for (int i = 0; i < 100; ++i) {
    int T = 1 + rng.below(5);
    int L = 2 + rng.below(3);
    Tensor e = random_tensor({T, L}, rng, -2.0, 2.0);
    std::vector<int> ys(static_cast<std::size_t>(T));
    for (auto& y : ys) y = rng.below(L);
    Graph g;
    double nll = g.value(softmax_nll(g, g.input(e), ys)).item();
    double ref = 0.0;
    for (int t = 0; t < T; ++t) {
      double mx = e.at(t, 0);
      for (int j = 1; j < L; ++j) mx = std::max(mx, e.at(t, j));
      double s = 0.0;
      for (int j = 0; j < L; ++j) s += std::exp(e.at(t, j) - mx);
      ref += mx + std::log(s) - e.at(t, ys[static_cast<std::size_t>(t)]);
    }
    REQUIRE(nll == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("softmax decode takes per-row argmax with lowest-id ties") {
  Tensor e = Tensor::mat({{1.0, 3.0, 3.0}, {0.5, 0.1, 0.2}, {-1.0, -1.0, -1.0}});
  CHECK(softmax_decode(e) == std::vector<int>{1, 0, 0});
}

TEST_CASE("crf shape and label validation") {
  Graph g;
  NodeId e = g.input(Tensor::zeros({3, 4}));
  NodeId trans = g.input(Tensor::zeros({4, 4}));
  NodeId start = g.input(Tensor::zeros({4}));
  NodeId end = g.input(Tensor::zeros({4}));
  CHECK_THROWS_AS(crf_log_partition(g, e, g.input(Tensor::zeros({3, 4})), start, end), DimError);
  CHECK_THROWS_AS(crf_log_partition(g, e, trans, g.input(Tensor::zeros({3})), end), DimError);
  CHECK_THROWS_AS(crf_path_score(g, e, trans, start, end, {0, 1}), DimError);      // wrong T
  CHECK_THROWS_AS(crf_path_score(g, e, trans, start, end, {0, 1, 4}), DimError);   // label >= L
  CHECK_THROWS_AS(crf_path_score(g, e, trans, start, end, {0, 1, -1}), DimError);  // negative
  CHECK_THROWS_AS(viterbi_decode(Tensor::zeros({0, 4}), Tensor::zeros({4, 4}),
                                 Tensor::zeros({4}), Tensor::zeros({4})),
                  DimError);
  CHECK_THROWS_AS(softmax_nll(g, e, {0, 1}), DimError);
  CHECK_NOTHROW(crf_nll(g, e, trans, start, end, {0, 1, 3}));
}
