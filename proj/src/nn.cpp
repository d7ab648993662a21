#include "mvf/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvf::nn {

void Dense::init(int in_dim, int out_dim, std::mt19937_64& rng) {
  in = in_dim;
  out = out_dim;
  double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  w.resize(static_cast<size_t>(in) * out);
  b.resize(out);
  for (double& x : w) x = dist(rng);
  for (double& x : b) x = dist(rng);
}

void Dense::forward(const std::vector<double>& x,
                    std::vector<double>& y) const {
  if (static_cast<int>(x.size()) != in)
    throw std::invalid_argument("Dense::forward: dimension mismatch");
  y.assign(out, 0.0);
  const double* wp = w.data();
  for (int o = 0; o < out; ++o) {
    double acc = b[o];
    const double* row = wp + static_cast<size_t>(o) * in;
    for (int i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

void Dense::backward(const std::vector<double>& x,
                     const std::vector<double>& dy, std::vector<double>& gw,
                     std::vector<double>& gb, std::vector<double>& dx) const {
  dx.assign(in, 0.0);
  for (int o = 0; o < out; ++o) {
    double g = dy[o];
    gb[o] += g;
    double* grow = gw.data() + static_cast<size_t>(o) * in;
    const double* wrow = w.data() + static_cast<size_t>(o) * in;
    for (int i = 0; i < in; ++i) {
      grow[i] += g * x[i];
      dx[i] += g * wrow[i];
    }
  }
}

void relu_in_place(std::vector<double>& v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

void relu_backward_in_place(const std::vector<double>& act,
                            std::vector<double>& dy) {
  for (size_t i = 0; i < act.size(); ++i) {
    if (act[i] <= 0.0) dy[i] = 0.0;
  }
}

ProbVector softmax(const std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  ProbVector p(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double cross_entropy(const std::vector<double>& logits, int label) {
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return mx + std::log(sum) - logits[label];
}

std::vector<double> cross_entropy_grad(const std::vector<double>& logits,
                                       int label) {
  std::vector<double> g = softmax(logits);
  g[label] -= 1.0;
  return g;
}

void Mlp::init(const std::vector<int>& layer_dims, std::mt19937_64& rng,
               bool relu_out) {
  if (layer_dims.size() < 2)
    throw std::invalid_argument("Mlp::init: need at least input and output");
  dims = layer_dims;
  relu_output = relu_out;
  layers.clear();
  for (size_t i = 1; i < dims.size(); ++i) {
    Dense d;
    d.init(dims[i - 1], dims[i], rng);
    layers.push_back(std::move(d));
  }
}

void Mlp::Grads::init_like(const Mlp& m) {
  gw.resize(m.layers.size());
  gb.resize(m.layers.size());
  for (size_t i = 0; i < m.layers.size(); ++i) {
    gw[i].assign(m.layers[i].w.size(), 0.0);
    gb[i].assign(m.layers[i].b.size(), 0.0);
  }
}

void Mlp::Grads::zero() {
  for (auto& v : gw) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : gb) std::fill(v.begin(), v.end(), 0.0);
}

void Mlp::Grads::scale(double s) {
  for (auto& v : gw)
    for (double& x : v) x *= s;
  for (auto& v : gb)
    for (double& x : v) x *= s;
}

std::vector<double> Mlp::forward(const std::vector<double>& x,
                                 Trace* trace) const {
  std::vector<double> cur = x;
  if (trace) {
    trace->acts.clear();
    trace->acts.push_back(cur);
  }
  std::vector<double> next;
  for (size_t i = 0; i < layers.size(); ++i) {
    layers[i].forward(cur, next);
    bool relu = (i + 1 < layers.size()) || relu_output;
    if (relu) relu_in_place(next);
    cur = next;
    if (trace) trace->acts.push_back(cur);
  }
  return cur;
}

std::vector<double> Mlp::backward(const Trace& trace, std::vector<double> dout,
                                  Grads& g) const {
  std::vector<double> dx;
  for (size_t li = layers.size(); li-- > 0;) {
    bool relu = (li + 1 < layers.size()) || relu_output;
    if (relu) relu_backward_in_place(trace.acts[li + 1], dout);
    layers[li].backward(trace.acts[li], dout, g.gw[li], g.gb[li], dx);
    dout = dx;
  }
  return dout;
}

void Mlp::sgd_step(const Grads& g, double lr) {
  for (size_t i = 0; i < layers.size(); ++i) {
    Dense& d = layers[i];
    for (size_t j = 0; j < d.w.size(); ++j) d.w[j] -= lr * g.gw[i][j];
    for (size_t j = 0; j < d.b.size(); ++j) d.b[j] -= lr * g.gb[i][j];
  }
}

std::size_t dense_param_count(const Dense& d) {
  return d.w.size() + d.b.size();
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const Dense& d : layers) n += dense_param_count(d);
  return n;
}

double Mlp::get_param(std::size_t i) const {
  for (const Dense& d : layers) {
    if (i < d.w.size()) return d.w[i];
    i -= d.w.size();
    if (i < d.b.size()) return d.b[i];
    i -= d.b.size();
  }
  throw std::out_of_range("Mlp::get_param");
}

void Mlp::set_param(std::size_t i, double v) {
  for (Dense& d : layers) {
    if (i < d.w.size()) {
      d.w[i] = v;
      return;
    }
    i -= d.w.size();
    if (i < d.b.size()) {
      d.b[i] = v;
      return;
    }
    i -= d.b.size();
  }
  throw std::out_of_range("Mlp::set_param");
}

double Mlp::get_grad(const Grads& g, std::size_t i) const {
  for (size_t li = 0; li < layers.size(); ++li) {
    if (i < g.gw[li].size()) return g.gw[li][i];
    i -= g.gw[li].size();
    if (i < g.gb[li].size()) return g.gb[li][i];
    i -= g.gb[li].size();
  }
  throw std::out_of_range("Mlp::get_grad");
}

}  // namespace mvf::nn
