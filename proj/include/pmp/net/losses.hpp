#pragma once

#include "pmp/net/mlp.hpp"

namespace pmp::net {

/// Registered scalar losses for param_gradients. All are means over the batch.
struct LossSpec {
  enum class Kind {
    Mse,             // mean squared error against `targets`
    BceWithLogits,   // binary cross entropy; `labels` in {0,1} per sample
    MeanOutput,      // mean of the (scalar) output, useful in tests
  };
  Kind kind = Kind::Mse;
  MatrixXd targets;  // Mse: output_dim x N
  VectorXd labels;   // BceWithLogits: N
};

inline double bce_with_logits(double logit, double label) {
  // -label*log(sigmoid) - (1-label)*log(1-sigmoid), in the stable form.
  const double m = std::max(logit, 0.0);
  return m - logit * label + std::log(std::exp(-m) + std::exp(logit - m));
}

inline double loss_value(const Mlp& net, const LossSpec& spec, const MatrixXd& x) {
  const MatrixXd y = net.forward_batch(x);
  const int n = static_cast<int>(x.cols());
  switch (spec.kind) {
    case LossSpec::Kind::Mse:
      return (y - spec.targets).squaredNorm() / n;
    case LossSpec::Kind::BceWithLogits: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += bce_with_logits(y(0, i), spec.labels[i]);
      return s / n;
    }
    case LossSpec::Kind::MeanOutput:
      return y.sum() / n;
  }
  return 0.0;
}

struct LossGradients {
  double value = 0.0;
  Gradients grads;
};

/// Gradients of the mean batch loss w.r.t. every parameter.
inline LossGradients param_gradients(const Mlp& net, const LossSpec& spec, const MatrixXd& x) {
  ForwardTrace t = forward_trace(net, x);
  const MatrixXd& y = t.a.back();
  const int n = static_cast<int>(x.cols());
  MatrixXd out_grad(y.rows(), y.cols());
  LossGradients res;
  switch (spec.kind) {
    case LossSpec::Kind::Mse:
      res.value = (y - spec.targets).squaredNorm() / n;
      out_grad = 2.0 / n * (y - spec.targets);
      break;
    case LossSpec::Kind::BceWithLogits: {
      if (net.output_dim() != 1 || net.output != Activation::Identity)
        throw ConfigError("BceWithLogits needs a scalar raw-logit head");
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double logit = y(0, i);
        s += bce_with_logits(logit, spec.labels[i]);
        out_grad(0, i) = (act_eval(Activation::Sigmoid, logit) - spec.labels[i]) / n;
      }
      res.value = s / n;
      break;
    }
    case LossSpec::Kind::MeanOutput:
      res.value = y.sum() / n;
      out_grad.setConstant(1.0 / n);
      break;
  }
  if (!std::isfinite(res.value)) throw ConfigError("param_gradients: non-finite loss");
  res.grads = backprop(net, t, out_grad);
  return res;
}

/// Squared norm of the weight matrices (biases excluded).
inline double weight_squared_norm(const Mlp& net) {
  double s = 0.0;
  for (const auto& w : net.w) s += w.squaredNorm();
  return s;
}

inline Gradients weight_squared_norm_gradients(const Mlp& net) {
  Gradients g = Gradients::zeros_like(net);
  for (std::size_t l = 0; l < net.w.size(); ++l) g.w[l] = 2.0 * net.w[l];
  return g;
}

}  // namespace pmp::net
