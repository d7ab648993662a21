#include "mvf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "checkpoint_util.hpp"
#include "json.hpp"

namespace mvf {

void FusionModel::init(int n_views, int feature_dim, Task t,
                       const FusionArch& a, std::mt19937_64& rng) {
  num_views = n_views;
  task = t;
  arch = a;
  view_nets.clear();
  std::vector<int> dims;
  dims.push_back(feature_dim);
  dims.insert(dims.end(), a.trunk_hidden.begin(), a.trunk_hidden.end());
  dims.push_back(a.per_view_width);
  for (int v = 0; v < n_views; ++v) {
    nn::Mlp net;
    net.init(dims, rng, /*relu_out=*/true);
    view_nets.push_back(std::move(net));
  }
  fusion_layer.init(n_views * a.per_view_width, a.fusion_width, rng);
  head.init(a.fusion_width, task_spec(t).num_classes(), rng);
}

namespace {

struct FusionTrace {
  std::vector<nn::Mlp::Trace> view_traces;
  std::vector<double> concat;
  std::vector<double> fused_act;  // post-ReLU output of the fusion layer
  std::vector<double> logits;
};

std::vector<double> fusion_forward_logits(const FusionModel& m,
                                          const Collection& c,
                                          FusionTrace* trace) {
  if (static_cast<int>(c.views.size()) != m.num_views)
    throw std::invalid_argument("fusion: view count mismatch");
  if (trace) trace->view_traces.resize(m.num_views);
  std::vector<double> concat;
  concat.reserve(static_cast<size_t>(m.num_views) * m.arch.per_view_width);
  for (int v = 0; v < m.num_views; ++v) {
    std::vector<double> feat = m.view_nets[v].forward(
        c.views[v].features, trace ? &trace->view_traces[v] : nullptr);
    concat.insert(concat.end(), feat.begin(), feat.end());
  }
  std::vector<double> fused;
  m.fusion_layer.forward(concat, fused);
  nn::relu_in_place(fused);
  std::vector<double> logits;
  m.head.forward(fused, logits);
  if (trace) {
    trace->concat = std::move(concat);
    trace->fused_act = fused;
    trace->logits = logits;
  }
  return logits;
}

void fusion_backward(const FusionModel& m, const FusionTrace& trace,
                     std::vector<double> dlogits, FusionGrads& g) {
  std::vector<double> d_fused;
  m.head.backward(trace.fused_act, dlogits, g.g_head_w, g.g_head_b, d_fused);
  nn::relu_backward_in_place(trace.fused_act, d_fused);
  std::vector<double> d_concat;
  m.fusion_layer.backward(trace.concat, d_fused, g.g_fusion_w, g.g_fusion_b,
                          d_concat);
  int f = m.arch.per_view_width;
  for (int v = 0; v < m.num_views; ++v) {
    std::vector<double> dv(d_concat.begin() + static_cast<size_t>(v) * f,
                           d_concat.begin() + static_cast<size_t>(v + 1) * f);
    m.view_nets[v].backward(trace.view_traces[v], std::move(dv),
                            g.view_grads[v]);
  }
}

}  // namespace

ProbVector FusionModel::forward(const Collection& c) const {
  return nn::softmax(fusion_forward_logits(*this, c, nullptr));
}

std::size_t FusionModel::param_count() const {
  std::size_t n = 0;
  for (const nn::Mlp& net : view_nets) n += net.param_count();
  return n + nn::dense_param_count(fusion_layer) + nn::dense_param_count(head);
}

double FusionModel::get_param(std::size_t i) const {
  for (const nn::Mlp& net : view_nets) {
    if (i < net.param_count()) return net.get_param(i);
    i -= net.param_count();
  }
  if (i < fusion_layer.w.size()) return fusion_layer.w[i];
  i -= fusion_layer.w.size();
  if (i < fusion_layer.b.size()) return fusion_layer.b[i];
  i -= fusion_layer.b.size();
  if (i < head.w.size()) return head.w[i];
  i -= head.w.size();
  return head.b.at(i);
}

void FusionModel::set_param(std::size_t i, double v) {
  for (nn::Mlp& net : view_nets) {
    if (i < net.param_count()) {
      net.set_param(i, v);
      return;
    }
    i -= net.param_count();
  }
  if (i < fusion_layer.w.size()) {
    fusion_layer.w[i] = v;
    return;
  }
  i -= fusion_layer.w.size();
  if (i < fusion_layer.b.size()) {
    fusion_layer.b[i] = v;
    return;
  }
  i -= fusion_layer.b.size();
  if (i < head.w.size()) {
    head.w[i] = v;
    return;
  }
  i -= head.w.size();
  head.b.at(i) = v;
}

void FusionGrads::init_like(const FusionModel& m) {
  view_grads.resize(m.view_nets.size());
  for (size_t v = 0; v < m.view_nets.size(); ++v)
    view_grads[v].init_like(m.view_nets[v]);
  g_fusion_w.assign(m.fusion_layer.w.size(), 0.0);
  g_fusion_b.assign(m.fusion_layer.b.size(), 0.0);
  g_head_w.assign(m.head.w.size(), 0.0);
  g_head_b.assign(m.head.b.size(), 0.0);
}

void FusionGrads::zero() {
  for (auto& g : view_grads) g.zero();
  std::fill(g_fusion_w.begin(), g_fusion_w.end(), 0.0);
  std::fill(g_fusion_b.begin(), g_fusion_b.end(), 0.0);
  std::fill(g_head_w.begin(), g_head_w.end(), 0.0);
  std::fill(g_head_b.begin(), g_head_b.end(), 0.0);
}

void FusionGrads::scale(double s) {
  for (auto& g : view_grads) g.scale(s);
  for (double& x : g_fusion_w) x *= s;
  for (double& x : g_fusion_b) x *= s;
  for (double& x : g_head_w) x *= s;
  for (double& x : g_head_b) x *= s;
}

double FusionGrads::flat(const FusionModel& m, std::size_t i) const {
  for (size_t v = 0; v < view_grads.size(); ++v) {
    std::size_t n = m.view_nets[v].param_count();
    if (i < n) return m.view_nets[v].get_grad(view_grads[v], i);
    i -= n;
  }
  if (i < g_fusion_w.size()) return g_fusion_w[i];
  i -= g_fusion_w.size();
  if (i < g_fusion_b.size()) return g_fusion_b[i];
  i -= g_fusion_b.size();
  if (i < g_head_w.size()) return g_head_w[i];
  i -= g_head_w.size();
  return g_head_b.at(i);
}

double fusion_loss_and_gradient(const FusionModel& m,
                                const std::vector<const Collection*>& batch,
                                FusionGrads& grads) {
  if (batch.empty())
    throw std::invalid_argument("fusion_loss_and_gradient: empty batch");
  double loss = 0.0;
  FusionTrace trace;
  const int label_idx = static_cast<int>(m.task);
  for (const Collection* c : batch) {
    std::vector<double> logits = fusion_forward_logits(m, *c, &trace);
    int label = c->labels[label_idx];
    loss += nn::cross_entropy(logits, label);
    fusion_backward(m, trace, nn::cross_entropy_grad(logits, label), grads);
  }
  double inv = 1.0 / static_cast<double>(batch.size());
  grads.scale(inv);
  return loss * inv;
}

namespace {

double fusion_mean_loss(const FusionModel& m,
                        const std::vector<const Collection*>& set) {
  double total = 0.0;
  const int label_idx = static_cast<int>(m.task);
  for (const Collection* c : set)
    total += nn::cross_entropy(fusion_forward_logits(m, *c, nullptr),
                               c->labels[label_idx]);
  return total / static_cast<double>(set.size());
}

void apply_sgd(FusionModel& m, const FusionGrads& g, double lr) {
  for (size_t v = 0; v < m.view_nets.size(); ++v)
    m.view_nets[v].sgd_step(g.view_grads[v], lr);
  for (size_t i = 0; i < m.fusion_layer.w.size(); ++i)
    m.fusion_layer.w[i] -= lr * g.g_fusion_w[i];
  for (size_t i = 0; i < m.fusion_layer.b.size(); ++i)
    m.fusion_layer.b[i] -= lr * g.g_fusion_b[i];
  for (size_t i = 0; i < m.head.w.size(); ++i)
    m.head.w[i] -= lr * g.g_head_w[i];
  for (size_t i = 0; i < m.head.b.size(); ++i)
    m.head.b[i] -= lr * g.g_head_b[i];
}

struct FusionSnapshot {
  std::vector<double> params;
  void capture(const FusionModel& m) {
    params.resize(m.param_count());
    for (size_t i = 0; i < params.size(); ++i) params[i] = m.get_param(i);
  }
  void restore(FusionModel& m) const {
    for (size_t i = 0; i < params.size(); ++i) m.set_param(i, params[i]);
  }
};

}  // namespace

FusionModel train_fusion(const Dataset& data, Task task,
                         const TrainConfig& cfg, const FusionArch& arch,
                         std::vector<EpochStat>* curve) {
  cfg.validate();
  std::vector<const Collection*> train = data.tagged(Split::Train);
  if (train.empty())
    throw std::invalid_argument("train_fusion: no train-tagged collections");

  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  size_t holdout_n = std::max<size_t>(
      1, static_cast<size_t>(train.size() * cfg.early_stop_fraction));
  if (holdout_n >= train.size()) holdout_n = train.size() / 2;
  std::vector<const Collection*> fit, holdout;
  for (size_t i = 0; i < order.size(); ++i)
    (i < holdout_n ? holdout : fit).push_back(train[order[i]]);
  if (fit.empty())
    throw std::invalid_argument("train_fusion: train split too small");

  FusionModel model;
  model.init(data.num_views, data.feature_dim, task, arch, rng);

  FusionGrads grads;
  grads.init_like(model);
  FusionSnapshot best;
  best.capture(model);
  double best_loss = holdout.empty() ? 0.0 : fusion_mean_loss(model, holdout);
  int stale = 0;

  std::vector<size_t> idx(fit.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<const Collection*> batch;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < idx.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      size_t stop = std::min(idx.size(), start + cfg.batch_size);
      batch.clear();
      for (size_t i = start; i < stop; ++i) batch.push_back(fit[idx[i]]);
      grads.zero();
      double batch_loss = fusion_loss_and_gradient(model, batch, grads);
      apply_sgd(model, grads, cfg.learning_rate);
      epoch_loss += batch_loss * static_cast<double>(batch.size());
    }
    epoch_loss /= static_cast<double>(fit.size());

    double hold_loss =
        holdout.empty() ? epoch_loss : fusion_mean_loss(model, holdout);
    if (curve) curve->push_back({epoch, epoch_loss, hold_loss});
    if (hold_loss < best_loss) {
      best_loss = hold_loss;
      best.capture(model);
      stale = 0;
    } else if (++stale > cfg.early_stop_patience) {
      break;
    }
  }
  best.restore(model);
  return model;
}

double fusion_gradient_check(FusionModel& m,
                             const std::vector<const Collection*>& batch,
                             double step) {
  FusionGrads grads;
  grads.init_like(m);
  fusion_loss_and_gradient(m, batch, grads);

  double max_rel = 0.0;
  std::size_t n = m.param_count();
  for (std::size_t i = 0; i < n; ++i) {
    double orig = m.get_param(i);
    m.set_param(i, orig + step);
    double lp = 0.0, lm = 0.0;
    {
      FusionGrads scratch;
      scratch.init_like(m);
      lp = fusion_loss_and_gradient(m, batch, scratch);
      m.set_param(i, orig - step);
      scratch.zero();
      lm = fusion_loss_and_gradient(m, batch, scratch);
    }
    m.set_param(i, orig);
    double numeric = (lp - lm) / (2.0 * step);
    double analytic = grads.flat(m, i);
    double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
    max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
  }
  return max_rel;
}

void save_fusion(const FusionModel& m, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["task"] = task_key(m.task);
  j["num_views"] = m.num_views;
  j["arch"] = {{"trunk_hidden", m.arch.trunk_hidden},
               {"per_view_width", m.arch.per_view_width},
               {"fusion_width", m.arch.fusion_width}};
  nlohmann::json views = nlohmann::json::array();
  for (const nn::Mlp& net : m.view_nets)
    views.push_back(detail::net_to_json(net));
  j["view_nets"] = views;
  j["fusion_layer"] = detail::dense_to_json(m.fusion_layer);
  j["head"] = detail::dense_to_json(m.head);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
}

FusionModel load_fusion(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  FusionModel m;
  auto t = task_from_key(j.at("task").get<std::string>());
  if (!t) throw std::runtime_error("checkpoint: bad task key");
  m.task = *t;
  m.num_views = j.at("num_views").get<int>();
  m.arch.trunk_hidden = j["arch"].at("trunk_hidden").get<std::vector<int>>();
  m.arch.per_view_width = j["arch"].at("per_view_width").get<int>();
  m.arch.fusion_width = j["arch"].at("fusion_width").get<int>();
  for (const nlohmann::json& jv : j.at("view_nets")) {
    nn::Mlp net;
    detail::net_from_json(jv, net, /*relu_out=*/true);
    m.view_nets.push_back(std::move(net));
  }
  detail::dense_from_json(j.at("fusion_layer"), m.fusion_layer);
  detail::dense_from_json(j.at("head"), m.head);
  return m;
}

}  // namespace mvf
