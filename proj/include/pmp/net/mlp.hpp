#pragma once

#include "pmp/common.hpp"

namespace pmp::net {

enum class Activation { Identity, Tanh, Relu, Sigmoid };

inline double act_eval(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::Identity: default: return z;
  }
}

// First/second derivatives expressed through the activation value where
// possible; relu'' is taken as 0 everywhere.
inline double act_d1(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::Identity: default: return 1.0;
  }
}

inline double act_d2(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    case Activation::Relu: return 0.0;
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case Activation::Identity: default: return 0.0;
  }
}

/// Fully connected network. Weights w[l] map layer l to l+1; batches are
/// stored column-wise (one sample per column).
struct Mlp {
  std::vector<int> widths;
  std::vector<MatrixXd> w;
  std::vector<VectorXd> b;
  Activation hidden = Activation::Tanh;
  Activation output = Activation::Identity;

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int layer_count() const { return static_cast<int>(w.size()); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < w.size(); ++l) n += w[l].size() + b[l].size();
    return n;
  }

  bool finite() const {
    for (std::size_t l = 0; l < w.size(); ++l)
      if (!w[l].allFinite() || !b[l].allFinite()) return false;
    return true;
  }

  /// Xavier-uniform init; final_scale shrinks the last layer (useful for
  /// policy heads that should start near the reference pose).
  static Mlp make(std::vector<int> widths, Activation hidden, Activation output,
                  Rng& rng, double final_scale = 1.0) {
    if (widths.size() < 2) throw ConfigError("Mlp needs at least two layer widths");
    Mlp net;
    net.widths = std::move(widths);
    net.hidden = hidden;
    net.output = output;
    const int layers = static_cast<int>(net.widths.size()) - 1;
    net.w.resize(layers);
    net.b.resize(layers);
    for (int l = 0; l < layers; ++l) {
      const int fan_in = net.widths[l], fan_out = net.widths[l + 1];
      if (fan_in <= 0 || fan_out <= 0) throw ConfigError("Mlp widths must be positive");
      double a = std::sqrt(6.0 / (fan_in + fan_out));
      if (l == layers - 1) a *= final_scale;
      net.w[l].resize(fan_out, fan_in);
      for (int i = 0; i < fan_out; ++i)
        for (int j = 0; j < fan_in; ++j) net.w[l](i, j) = rng.uniform(-a, a);
      net.b[l] = VectorXd::Zero(fan_out);
    }
    return net;
  }

  MatrixXd forward_batch(const MatrixXd& x) const {
    if (x.rows() != input_dim())
      throw ConfigError("Mlp forward: input dim " + std::to_string(x.rows()) +
                        " != " + std::to_string(input_dim()));
    MatrixXd a = x;
    for (int l = 0; l < layer_count(); ++l) {
      MatrixXd z = (w[l] * a).colwise() + b[l];
      const Activation act = l + 1 == layer_count() ? output : hidden;
      a = z.unaryExpr([act](double v) { return act_eval(act, v); });
    }
    return a;
  }

  VectorXd forward(const VectorXd& x) const { return forward_batch(x); }
};

/// Per-layer parameter gradients, shaped like the network.
struct Gradients {
  std::vector<MatrixXd> w;
  std::vector<VectorXd> b;

  static Gradients zeros_like(const Mlp& net) {
    Gradients g;
    g.w.reserve(net.w.size());
    g.b.reserve(net.b.size());
    for (std::size_t l = 0; l < net.w.size(); ++l) {
      g.w.push_back(MatrixXd::Zero(net.w[l].rows(), net.w[l].cols()));
      g.b.push_back(VectorXd::Zero(net.b[l].size()));
    }
    return g;
  }

  void add_scaled(const Gradients& other, double s) {
    for (std::size_t l = 0; l < w.size(); ++l) {
      w[l] += s * other.w[l];
      b[l] += s * other.b[l];
    }
  }

  bool finite() const {
    for (std::size_t l = 0; l < w.size(); ++l)
      if (!w[l].allFinite() || !b[l].allFinite()) return false;
    return true;
  }
};

/// Cached layer inputs/pre-activations from one batched forward pass.
struct ForwardTrace {
  std::vector<MatrixXd> a;  // a[0] = input, a[l] = activation of layer l
  std::vector<MatrixXd> z;  // z[l] = pre-activation of layer l; z[0] unused
};

inline ForwardTrace forward_trace(const Mlp& net, const MatrixXd& x) {
  if (x.rows() != net.input_dim()) throw ConfigError("forward_trace: input dim mismatch");
  ForwardTrace t;
  const int layers = net.layer_count();
  t.a.resize(layers + 1);
  t.z.resize(layers + 1);
  t.a[0] = x;
  for (int l = 0; l < layers; ++l) {
    t.z[l + 1] = (net.w[l] * t.a[l]).colwise() + net.b[l];
    const Activation act = l + 1 == layers ? net.output : net.hidden;
    t.a[l + 1] = t.z[l + 1].unaryExpr([act](double v) { return act_eval(act, v); });
  }
  return t;
}

/// Backpropagates d(loss)/d(output) through the trace. `out_grad` must have
/// one column per sample and already carry any 1/N factor of a mean loss.
inline Gradients backprop(const Mlp& net, const ForwardTrace& t, const MatrixXd& out_grad,
                          MatrixXd* input_grad = nullptr) {
  const int layers = net.layer_count();
  Gradients g = Gradients::zeros_like(net);
  MatrixXd adj = out_grad;  // d loss / d a_l
  for (int l = layers; l >= 1; --l) {
    const Activation act = l == layers ? net.output : net.hidden;
    MatrixXd dz =
        adj.cwiseProduct(t.z[l].unaryExpr([act](double v) { return act_d1(act, v); }));
    g.w[l - 1] = dz * t.a[l - 1].transpose();
    g.b[l - 1] = dz.rowwise().sum();
    adj = net.w[l - 1].transpose() * dz;
  }
  if (input_grad) *input_grad = adj;
  return g;
}

/// d(output)/d(input) for a scalar-output network, one gradient per column.
/// When `through_sigmoid` is set the derivative is taken of sigmoid(logit),
/// matching the probability read by the reward path.
inline MatrixXd input_gradient_batch(const Mlp& net, const MatrixXd& x,
                                     bool through_sigmoid = false) {
  if (net.output_dim() != 1) throw ConfigError("input_gradient: output must be scalar");
  ForwardTrace t = forward_trace(net, x);
  MatrixXd seed(1, x.cols());
  if (through_sigmoid) {
    for (int i = 0; i < x.cols(); ++i) seed(0, i) = act_d1(Activation::Sigmoid, t.z.back()(0, i));
  } else {
    seed.setOnes();
  }
  // With identity output act_d1=1, so the seed is exactly d(out)/d(z_L).
  MatrixXd input_grad;
  backprop(net, t, seed, &input_grad);
  return input_grad;
}

inline VectorXd input_gradient(const Mlp& net, const VectorXd& x) {
  return input_gradient_batch(net, x);
}

/// Mean squared input-gradient norm of sigmoid(logit) over the batch, plus
/// its parameter gradients via a forward-over-reverse sweep.
struct PenaltyResult {
  double value = 0.0;
  Gradients grads;
};

inline double input_gradient_penalty_value(const Mlp& net, const MatrixXd& x) {
  MatrixXd g = input_gradient_batch(net, x, /*through_sigmoid=*/true);
  return g.colwise().squaredNorm().mean();
}

inline PenaltyResult input_gradient_penalty(const Mlp& net, const MatrixXd& x) {
  if (net.output_dim() != 1) throw ConfigError("gradient penalty: output must be scalar");
  if (net.output != Activation::Identity)
    throw ConfigError("gradient penalty expects a raw-logit head");
  const int layers = net.layer_count();
  const int n = static_cast<int>(x.cols());

  ForwardTrace t = forward_trace(net, x);

  // Reverse pass for g_i = d sigmoid(y_i) / d x_i, keeping per-layer duals.
  // dz[l] = d p / d z_l (as propagated), da[l] = d p / d a_l.
  std::vector<MatrixXd> dz(layers + 1), da(layers + 1);
  {
    MatrixXd seed(1, n);
    for (int i = 0; i < n; ++i) seed(0, i) = act_d1(Activation::Sigmoid, t.z[layers](0, i));
    da[layers] = seed;  // derivative of p wrt logit
    for (int l = layers; l >= 1; --l) {
      const Activation act = l == layers ? net.output : net.hidden;
      dz[l] = da[l].cwiseProduct(
          t.z[l].unaryExpr([act](double v) { return act_d1(act, v); }));
      da[l - 1] = net.w[l - 1].transpose() * dz[l];
    }
  }
  const MatrixXd& g = da[0];  // input gradient per column
  PenaltyResult res;
  res.value = g.colwise().squaredNorm().mean();

  // Forward tangent sweep seeded with v_i = (2/N) g_i: adot/zdot per layer,
  // and pdot_i = v_i . g_i. sum_i pdot_i has gradient equal to grad of value.
  std::vector<MatrixXd> adot(layers + 1), zdot(layers + 1);
  adot[0] = (2.0 / n) * g;
  for (int l = 1; l <= layers; ++l) {
    const Activation act = l == layers ? net.output : net.hidden;
    zdot[l] = net.w[l - 1] * adot[l - 1];
    adot[l] = zdot[l].cwiseProduct(
        t.z[l].unaryExpr([act](double v) { return act_d1(act, v); }));
  }

  // Reverse sweep over the dual graph. Adjoint of pdot seeds the logit pair:
  //   pdot = sig'(zL) * zdotL  ->  adj_zdotL = sig'(zL), adj_zL = sig''(zL)*zdotL.
  res.grads = Gradients::zeros_like(net);
  MatrixXd adj_a = MatrixXd::Zero(1, n);
  MatrixXd adj_adot(1, n);
  {
    MatrixXd sig1(1, n), sig2(1, n);
    for (int i = 0; i < n; ++i) {
      sig1(0, i) = act_d1(Activation::Sigmoid, t.z[layers](0, i));
      sig2(0, i) = act_d2(Activation::Sigmoid, t.z[layers](0, i));
    }
    adj_a = sig2.cwiseProduct(zdot[layers]);  // routed into adj of z_L below
    adj_adot = sig1;
  }
  // At the top, adj_a currently holds d/d z_L contributions (identity head) and
  // adj_adot holds d/d zdot_L; fold them through each layer down to the input.
  for (int l = layers; l >= 1; --l) {
    const Activation act = l == layers ? net.output : net.hidden;
    MatrixXd d1 = t.z[l].unaryExpr([act](double v) { return act_d1(act, v); });
    MatrixXd d2 = t.z[l].unaryExpr([act](double v) { return act_d2(act, v); });
    MatrixXd adj_z, adj_zdot;
    if (l == layers) {
      adj_z = adj_a;        // seeded above (includes sig'' term; identity head)
      adj_zdot = adj_adot;  // sig'
    } else {
      // a_l = h(z_l), adot_l = h'(z_l) .* zdot_l
      adj_z = adj_a.cwiseProduct(d1) + adj_adot.cwiseProduct(d2).cwiseProduct(zdot[l]);
      adj_zdot = adj_adot.cwiseProduct(d1);
    }
    res.grads.w[l - 1] = adj_z * t.a[l - 1].transpose() + adj_zdot * adot[l - 1].transpose();
    res.grads.b[l - 1] = adj_z.rowwise().sum();
    adj_a = net.w[l - 1].transpose() * adj_z;
    adj_adot = net.w[l - 1].transpose() * adj_zdot;
  }
  return res;
}

}  // namespace pmp::net
