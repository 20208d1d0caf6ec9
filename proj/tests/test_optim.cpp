#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chartag/error.hpp"
#include "chartag/optim.hpp"
#include "test_support.hpp"

using namespace chartag;
using namespace chartag::testing;

TEST_CASE("clip_by_norm scales only above the threshold") {
  Tensor g = Tensor::vec({2.0, 0.0});
  clip_by_norm(g, 1.0);
  CHECK(g.at(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.at(1) == 0.0);

  Tensor small = Tensor::vec({0.3, 0.4});  // norm 0.5
  Tensor before = small;
  clip_by_norm(small, 1.0);
  CHECK(small.data == before.data);  // bitwise untouched

  Tensor exact = Tensor::vec({1.0, 0.0});  // norm exactly tau
  clip_by_norm(exact, 1.0);
  CHECK(exact.data == std::vector<double>{1.0, 0.0});
}

TEST_CASE("clipping twice equals clipping once") {
  Rng rng(5);
  Tensor g = random_tensor({20}, rng, -3.0, 3.0);
  clip_by_norm(g, 1.0);
  Tensor once = g;
  clip_by_norm(g, 1.0);
  CHECK(g.data == once.data);
  CHECK(g.l2_norm() <= 1.0 + 1e-12);
}

TEST_CASE("clip_by_norm over a gradient map clips per tensor") {
  Gradients grads;
  grads["a"] = Tensor::vec({3.0, 4.0});  // norm 5
  grads["b"] = Tensor::vec({0.1, 0.1});
  clip_by_norm(grads, 1.0);
  CHECK(grads.at("a").l2_norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(grads.at("a").at(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(grads.at("b").data == std::vector<double>{0.1, 0.1});
}

TEST_CASE("clip_by_norm rejects a non-positive threshold") {
  Tensor g = Tensor::vec({1.0});
  CHECK_THROWS_AS(clip_by_norm(g, 0.0), DimError);
  CHECK_THROWS_AS(clip_by_norm(g, -1.0), DimError);
}

TEST_CASE("nadam first step matches the hand-derived value") {
  // p = 1, g = 1, defaults: mu_1 = 0.9(1 - 0.5*0.96^0.004),
  // mu_2 = 0.9(1 - 0.5*0.96^0.008), m = 0.1, v = 0.001, vhat = 1,
  // update = lr*(mu_2*m/(1-mu_1*mu_2) + (1-mu_1)/(1-mu_1))/(1+eps).
  std::map<std::string, Tensor> params{{"p", Tensor::vec({1.0})}};
  Gradients grads{{"p", Tensor::vec({1.0})}};
  NadamState st;
  nadam_step(params, grads, st, NadamConfig{});
  CHECK(params.at("p").at(0) == doctest::Approx(0.9978870964644183).epsilon(1e-12));
  CHECK(st.step == 1);
  double mu1 = 0.9 * (1.0 - 0.5 * std::pow(0.96, 0.004));
  CHECK(st.mu_product == doctest::Approx(mu1).epsilon(1e-15));
  CHECK(st.m.at("p").at(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(st.v.at("p").at(0) == doctest::Approx(0.001).epsilon(1e-15));
}

TEST_CASE("zero gradient leaves the parameter unchanged") {
  std::map<std::string, Tensor> params{{"p", Tensor::vec({0.7, -0.3})}};
  Gradients grads{{"p", Tensor::zeros({2})}};
  NadamState st;
  NadamConfig cfg;
  for (int i = 0; i < 5; ++i) nadam_step(params, grads, st, cfg);
  CHECK(params.at("p").at(0) == 0.7);
  CHECK(params.at("p").at(1) == -0.3);
  CHECK(st.step == 5);
}

TEST_CASE("nadam drives a quadratic to its minimum") {
  std::map<std::string, Tensor> params{{"p", Tensor::vec({1.0})}};
  NadamState st;
  NadamConfig cfg;
  for (int i = 0; i < 2000; ++i) {
    Gradients grads{{"p", Tensor::vec({2.0 * params.at("p").at(0)})}};
    nadam_step(params, grads, st, cfg);
  }
  CHECK(std::abs(params.at("p").at(0)) < 0.1);
  CHECK(std::isfinite(params.at("p").at(0)));
}

TEST_CASE("beta1 = 0 reduces to bias-corrected RMSProp") {
  NadamConfig cfg;
  cfg.beta1 = 0.0;
  std::map<std::string, Tensor> params{{"p", Tensor::vec({2.0})}};
  NadamState st;
  double ref_p = 2.0, ref_v = 0.0;
  Rng rng(9);
  for (int t = 1; t <= 20; ++t) {
    double g = rng.uniform(-1.0, 1.0);
    Gradients grads{{"p", Tensor::vec({g})}};
    nadam_step(params, grads, st, cfg);
    ref_v = cfg.beta2 * ref_v + (1.0 - cfg.beta2) * g * g;
    double vhat = ref_v / (1.0 - std::pow(cfg.beta2, t));
    ref_p -= cfg.lr * g / (std::sqrt(vhat) + cfg.eps);
    CHECK(params.at("p").at(0) == doctest::Approx(ref_p).epsilon(1e-13));
  }
}

TEST_CASE("nadam validates gradient names and shapes") {
  std::map<std::string, Tensor> params{{"p", Tensor::vec({1.0, 2.0})}};
  NadamState st;
  NadamConfig cfg;
  Gradients unknown{{"q", Tensor::vec({1.0})}};
  CHECK_THROWS_AS(nadam_step(params, unknown, st, cfg), DimError);
  Gradients bad_shape{{"p", Tensor::vec({1.0})}};
  CHECK_THROWS_AS(nadam_step(params, bad_shape, st, cfg), DimError);
}

TEST_CASE("parameters without a gradient entry are not updated") {
  std::map<std::string, Tensor> params{{"a", Tensor::vec({1.0})},
                                       {"b", Tensor::vec({2.0})}};
  Gradients grads{{"a", Tensor::vec({1.0})}};
  NadamState st;
  nadam_step(params, grads, st, NadamConfig{});
  CHECK(params.at("a").at(0) < 1.0);
  CHECK(params.at("b").at(0) == 2.0);
  CHECK(st.m.count("b") == 0);
}
