#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "chartag/graph.hpp"
#include "chartag/tensor.hpp"

namespace chartag {

// Scales g down to L2 norm tau when it exceeds tau; below the threshold the
// tensor is untouched, so clipping twice equals clipping once.
void clip_by_norm(Tensor& g, double tau);
void clip_by_norm(Gradients& grads, double tau);

struct NadamConfig {
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double schedule_decay = 0.004;
};

// First/second moment estimates plus the running product of momentum
// schedule values. Slots appear the first time a parameter is updated.
struct NadamState {
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
  std::int64_t step = 0;
  double mu_product = 1.0;
};

// One Nadam update (Adam with Nesterov momentum and the 0.96^(t*psi)
// momentum schedule). Every gradient entry must name an existing parameter
// of matching shape. With beta1 = 0 this reduces to bias-corrected RMSProp.
void nadam_step(std::map<std::string, Tensor>& params, const Gradients& grads,
                NadamState& state, const NadamConfig& cfg);

}  // namespace chartag
