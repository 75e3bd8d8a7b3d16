#pragma once

#include "pmp/net/mlp.hpp"

namespace pmp::net {

/// Adam with bias correction. Moments live alongside the step count so the
/// whole optimizer state can be checkpointed.
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  Gradients m;  // first moments
  Gradients v;  // second moments

  static Adam make(const Mlp& net, double lr) {
    Adam a;
    a.lr = lr;
    a.m = Gradients::zeros_like(net);
    a.v = Gradients::zeros_like(net);
    return a;
  }

  void step(Mlp& net, const Gradients& g) {
    if (!g.finite()) throw ConfigError("adam: non-finite gradient");
    ++step_count;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (std::size_t l = 0; l < net.w.size(); ++l) {
      m.w[l] = beta1 * m.w[l] + (1.0 - beta1) * g.w[l];
      v.w[l] = beta2 * v.w[l] + (1.0 - beta2) * g.w[l].cwiseProduct(g.w[l]);
      net.w[l] -= lr * (m.w[l] / c1).cwiseQuotient(((v.w[l] / c2).cwiseSqrt().array() + eps).matrix());
      m.b[l] = beta1 * m.b[l] + (1.0 - beta1) * g.b[l];
      v.b[l] = beta2 * v.b[l] + (1.0 - beta2) * g.b[l].cwiseProduct(g.b[l]);
      net.b[l] -= lr * (m.b[l] / c1).cwiseQuotient(((v.b[l] / c2).cwiseSqrt().array() + eps).matrix());
    }
  }
};

/// Same update rule for a free parameter vector (e.g. policy log-std).
struct AdamVec {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  VectorXd m;
  VectorXd v;

  static AdamVec make(int dim, double lr) {
    AdamVec a;
    a.lr = lr;
    a.m = VectorXd::Zero(dim);
    a.v = VectorXd::Zero(dim);
    return a;
  }

  void step(VectorXd& p, const VectorXd& g) {
    if (!all_finite(g)) throw ConfigError("adam: non-finite gradient");
    ++step_count;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    p -= lr * (m / c1).cwiseQuotient(((v / c2).cwiseSqrt().array() + eps).matrix());
  }
};

}  // namespace pmp::net
