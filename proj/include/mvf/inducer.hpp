#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvf/core.hpp"
#include "mvf/nn.hpp"

namespace mvf {

struct TrainConfig {
  double learning_rate = 0.1;
  int batch_size = 32;
  int max_epochs = 80;
  int early_stop_patience = 10;
  double early_stop_fraction = 0.1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// One row per epoch of the training curve.
struct EpochStat {
  int epoch = 0;
  double train_loss = 0.0;
  double holdout_loss = 0.0;
};

// Per-view classifier: MLP trunk with a softmax head. The final hidden
// activation is exposed as the per-view feature for downstream fusion.
struct InducerModel {
  int view_id = 0;
  Task task = Task::LeftHandLocation;
  nn::Mlp net;

  struct Output {
    std::vector<double> hidden;
    ProbVector probs;
  };

  Output forward(const std::vector<double>& features) const;

  // Probability vector for this model's view of the collection. The
  // collection must satisfy the zero-features-when-missing invariant.
  ProbVector predict(const Collection& c) const;
};

// One training sample: borrowed feature vector + label.
using LabeledSample = std::pair<const std::vector<double>*, int>;

// Mean cross-entropy over the batch and its exact analytic gradient.
struct LossGrads {
  double loss = 0.0;
  nn::Mlp::Grads grads;
};
LossGrads loss_and_gradient(const InducerModel& model,
                            const std::vector<LabeledSample>& batch);

inline const std::vector<int> kDefaultHidden{32, 32};

// Trains on all train-tagged collections of one view (missing views enter as
// their zero imputation). Early stopping holds out early_stop_fraction of the
// train split; best-holdout weights are restored.
InducerModel train_inducer(const Dataset& data, int view_id, Task task,
                           const TrainConfig& cfg,
                           const std::vector<int>& hidden = kDefaultHidden,
                           std::vector<EpochStat>* curve = nullptr);

void save_inducer(const InducerModel& m, const std::string& path);
InducerModel load_inducer(const std::string& path);

}  // namespace mvf
