#include "mvf/inducer.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "checkpoint_util.hpp"
#include "json.hpp"

namespace mvf {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (batch_size <= 0)
    throw std::invalid_argument("TrainConfig: batch_size must be > 0");
  if (max_epochs <= 0)
    throw std::invalid_argument("TrainConfig: max_epochs must be > 0");
  if (!(early_stop_fraction > 0.0 && early_stop_fraction < 0.5))
    throw std::invalid_argument(
        "TrainConfig: early_stop_fraction must be in (0, 0.5)");
}

InducerModel::Output InducerModel::forward(
    const std::vector<double>& features) const {
  nn::Mlp::Trace trace;
  std::vector<double> logits = net.forward(features, &trace);
  Output out;
  out.hidden = trace.acts[trace.acts.size() - 2];
  out.probs = nn::softmax(logits);
  return out;
}

ProbVector InducerModel::predict(const Collection& c) const {
  return nn::softmax(net.forward(c.views.at(view_id).features));
}

LossGrads loss_and_gradient(const InducerModel& model,
                            const std::vector<LabeledSample>& batch) {
  if (batch.empty())
    throw std::invalid_argument("loss_and_gradient: empty batch");
  LossGrads out;
  out.grads.init_like(model.net);
  nn::Mlp::Trace trace;
  for (const auto& [features, label] : batch) {
    std::vector<double> logits = model.net.forward(*features, &trace);
    out.loss += nn::cross_entropy(logits, label);
    model.net.backward(trace, nn::cross_entropy_grad(logits, label),
                       out.grads);
  }
  double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  out.grads.scale(inv);
  return out;
}

namespace {

double mean_loss(const nn::Mlp& net, const std::vector<LabeledSample>& set) {
  double total = 0.0;
  for (const auto& [features, label] : set)
    total += nn::cross_entropy(net.forward(*features), label);
  return total / static_cast<double>(set.size());
}

struct MlpSnapshot {
  std::vector<std::vector<double>> w, b;
  void capture(const nn::Mlp& net) {
    w.clear();
    b.clear();
    for (const nn::Dense& d : net.layers) {
      w.push_back(d.w);
      b.push_back(d.b);
    }
  }
  void restore(nn::Mlp& net) const {
    for (size_t i = 0; i < net.layers.size(); ++i) {
      net.layers[i].w = w[i];
      net.layers[i].b = b[i];
    }
  }
};

}  // namespace

InducerModel train_inducer(const Dataset& data, int view_id, Task task,
                           const TrainConfig& cfg,
                           const std::vector<int>& hidden,
                           std::vector<EpochStat>* curve) {
  cfg.validate();
  std::vector<const Collection*> train = data.tagged(Split::Train);
  if (train.empty())
    throw std::invalid_argument("train_inducer: no train-tagged collections");
  if (view_id < 0 || view_id >= data.num_views)
    throw std::invalid_argument("train_inducer: bad view_id");

  const int label_idx = static_cast<int>(task);
  std::vector<LabeledSample> samples;
  samples.reserve(train.size());
  for (const Collection* c : train)
    samples.emplace_back(&c->views[view_id].features, c->labels[label_idx]);

  std::mt19937_64 rng(cfg.rng_seed);

  // Internal early-stop holdout carved from the train split.
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  size_t holdout_n = std::max<size_t>(
      1, static_cast<size_t>(samples.size() * cfg.early_stop_fraction));
  if (holdout_n >= samples.size()) holdout_n = samples.size() / 2;
  std::vector<LabeledSample> fit, holdout;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < holdout_n ? holdout : fit).push_back(samples[order[i]]);
  }
  if (fit.empty()) throw std::invalid_argument("train_inducer: train split too small");

  InducerModel model;
  model.view_id = view_id;
  model.task = task;
  std::vector<int> dims;
  dims.push_back(data.feature_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(task_spec(task).num_classes());
  model.net.init(dims, rng);

  nn::Mlp::Grads grads;
  grads.init_like(model.net);
  MlpSnapshot best;
  best.capture(model.net);
  double best_loss = holdout.empty() ? 0.0 : mean_loss(model.net, holdout);
  int stale = 0;

  std::vector<size_t> idx(fit.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<LabeledSample> batch;
  nn::Mlp::Trace trace;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < idx.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      size_t stop = std::min(idx.size(), start + cfg.batch_size);
      grads.zero();
      double batch_loss = 0.0;
      for (size_t i = start; i < stop; ++i) {
        const auto& [features, label] = fit[idx[i]];
        std::vector<double> logits = model.net.forward(*features, &trace);
        batch_loss += nn::cross_entropy(logits, label);
        model.net.backward(trace, nn::cross_entropy_grad(logits, label),
                           grads);
      }
      double inv = 1.0 / static_cast<double>(stop - start);
      grads.scale(inv);
      model.net.sgd_step(grads, cfg.learning_rate);
      epoch_loss += batch_loss;
    }
    epoch_loss /= static_cast<double>(fit.size());

    double hold_loss = holdout.empty() ? epoch_loss : mean_loss(model.net, holdout);
    if (curve) curve->push_back({epoch, epoch_loss, hold_loss});
    if (hold_loss < best_loss) {
      best_loss = hold_loss;
      best.capture(model.net);
      stale = 0;
    } else if (++stale > cfg.early_stop_patience) {
      break;
    }
  }
  best.restore(model.net);
  return model;
}

void save_inducer(const InducerModel& m, const std::string& path) {
  nlohmann::json j = detail::net_to_json(m.net);
  j["version"] = 1;
  j["view"] = m.view_id;
  j["task"] = task_key(m.task);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
}

InducerModel load_inducer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  InducerModel m;
  m.view_id = j.at("view").get<int>();
  auto t = task_from_key(j.at("task").get<std::string>());
  if (!t) throw std::runtime_error("checkpoint: bad task key");
  m.task = *t;
  detail::net_from_json(j, m.net, false);
  return m;
}

}  // namespace mvf
