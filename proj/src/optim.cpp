#include "chartag/optim.hpp"

#include <cmath>

#include "chartag/error.hpp"

namespace chartag {

void clip_by_norm(Tensor& g, double tau) {
  if (tau <= 0.0) throw DimError("clip_by_norm: tau must be positive");
  double norm = g.l2_norm();
  if (norm <= tau) return;
  double s = tau / norm;
  for (double& x : g.data) x *= s;
}

void clip_by_norm(Gradients& grads, double tau) {
  for (auto& [name, g] : grads) clip_by_norm(g, tau);
}

void nadam_step(std::map<std::string, Tensor>& params, const Gradients& grads,
                NadamState& state, const NadamConfig& cfg) {
  std::int64_t t = state.step + 1;
  double mu_t = cfg.beta1 * (1.0 - 0.5 * std::pow(0.96, static_cast<double>(t) * cfg.schedule_decay));
  double mu_next = cfg.beta1 * (1.0 - 0.5 * std::pow(0.96, static_cast<double>(t + 1) * cfg.schedule_decay));
  double mu_prod = state.mu_product * mu_t;
  double mu_prod_next = mu_prod * mu_next;
  double v_corr = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

  for (const auto& [name, g] : grads) {
    auto pit = params.find(name);
    if (pit == params.end()) throw DimError("nadam_step: gradient for unknown parameter '" + name + "'");
    Tensor& p = pit->second;
    if (!p.same_shape(g)) {
      throw DimError("nadam_step: parameter '" + name + "' has shape " + p.shape_str() +
                     " but gradient has " + g.shape_str());
    }
    auto mit = state.m.find(name);
    if (mit == state.m.end()) mit = state.m.emplace(name, Tensor::zeros(g.shape)).first;
    auto vit = state.v.find(name);
    if (vit == state.v.end()) vit = state.v.emplace(name, Tensor::zeros(g.shape)).first;
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    if (!m.same_shape(g) || !v.same_shape(g)) {
      throw DimError("nadam_step: stale state shape for parameter '" + name + "'");
    }

    for (std::size_t i = 0; i < g.data.size(); ++i) {
      double gi = g.data[i];
      m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * gi;
      v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * gi * gi;
      double g_hat = gi / (1.0 - mu_prod);
      double m_hat = m.data[i] / (1.0 - mu_prod_next);
      double v_hat = v.data[i] / v_corr;
      p.data[i] -= cfg.lr * (mu_next * m_hat + (1.0 - mu_t) * g_hat) / (std::sqrt(v_hat) + cfg.eps);
    }
    p.check_finite("nadam_step");
  }

  state.step = t;
  state.mu_product = mu_prod;
}

}  // namespace chartag
