#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mvf/core.hpp"

namespace mvf::nn {

// Dense layer, weights row-major [out x in].
struct Dense {
  int in = 0;
  int out = 0;
  std::vector<double> w;
  std::vector<double> b;

  // Uniform in [-1/sqrt(in), +1/sqrt(in)].
  void init(int in_dim, int out_dim, std::mt19937_64& rng);

  void forward(const std::vector<double>& x, std::vector<double>& y) const;

  // Accumulates gw/gb; writes dL/dx into dx (sized by caller or resized here).
  void backward(const std::vector<double>& x, const std::vector<double>& dy,
                std::vector<double>& gw, std::vector<double>& gb,
                std::vector<double>& dx) const;
};

void relu_in_place(std::vector<double>& v);

// act is the post-ReLU activation; zeroes dy where act == 0.
void relu_backward_in_place(const std::vector<double>& act,
                            std::vector<double>& dy);

// Max-subtracted softmax.
ProbVector softmax(const std::vector<double>& logits);

// Cross-entropy via log-sum-exp: lse(z) - z[label].
double cross_entropy(const std::vector<double>& logits, int label);

// d(loss)/d(logits) = softmax(z) - onehot(label).
std::vector<double> cross_entropy_grad(const std::vector<double>& logits,
                                       int label);

// Feed-forward stack: ReLU after every hidden layer; the last layer emits raw
// logits unless relu_output is set (used for fusion trunks).
struct Mlp {
  std::vector<int> dims;
  std::vector<Dense> layers;
  bool relu_output = false;

  void init(const std::vector<int>& layer_dims, std::mt19937_64& rng,
            bool relu_out = false);

  struct Trace {
    // acts[0] = input copy; acts[i] = output of layer i (post-activation).
    std::vector<std::vector<double>> acts;
  };

  struct Grads {
    std::vector<std::vector<double>> gw;
    std::vector<std::vector<double>> gb;

    void init_like(const Mlp& m);
    void zero();
    void scale(double s);
  };

  // Returns the final output; fills trace when given.
  std::vector<double> forward(const std::vector<double>& x,
                              Trace* trace = nullptr) const;

  // dout = gradient w.r.t. the final output (post-activation). Accumulates
  // into g; returns gradient w.r.t. the input.
  std::vector<double> backward(const Trace& trace, std::vector<double> dout,
                               Grads& g) const;

  void sgd_step(const Grads& g, double lr);

  // Flat parameter view, layer-major (w then b per layer).
  std::size_t param_count() const;
  double get_param(std::size_t i) const;
  void set_param(std::size_t i, double v);
  double get_grad(const Grads& g, std::size_t i) const;
};

// Shared flat-vector helpers for finite differencing over multiple nets.
std::size_t dense_param_count(const Dense& d);

}  // namespace mvf::nn
