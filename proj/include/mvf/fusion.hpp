#pragma once

#include <string>
#include <vector>

#include "mvf/core.hpp"
#include "mvf/inducer.hpp"
#include "mvf/nn.hpp"

namespace mvf {

struct FusionArch {
  std::vector<int> trunk_hidden{32};
  int per_view_width = 32;   // F: per-view fully-connected width
  int fusion_width = 128;    // G: width of the joint layer

  static FusionArch desk() { return {}; }
  static FusionArch paper_scale() { return {{32}, 512, 2048}; }
};

// Late-fusion network: N parallel trunks (ReLU throughout) whose per-view
// outputs are concatenated in view_id order into one joint ReLU layer, then a
// softmax head for the task.
struct FusionModel {
  int num_views = 0;
  Task task = Task::LeftHandLocation;
  FusionArch arch;
  std::vector<nn::Mlp> view_nets;  // [D, trunk_hidden..., F], relu_output
  nn::Dense fusion_layer;          // N*F -> G
  nn::Dense head;                  // G -> M

  void init(int n_views, int feature_dim, Task t, const FusionArch& a,
            std::mt19937_64& rng);

  ProbVector forward(const Collection& c) const;

  std::size_t param_count() const;
  double get_param(std::size_t i) const;
  void set_param(std::size_t i, double v);
};

struct FusionGrads {
  std::vector<nn::Mlp::Grads> view_grads;
  std::vector<double> g_fusion_w, g_fusion_b, g_head_w, g_head_b;

  void init_like(const FusionModel& m);
  void zero();
  void scale(double s);
  double flat(const FusionModel& m, std::size_t i) const;
};

// Mean cross-entropy over a batch of collections with exact gradients.
double fusion_loss_and_gradient(const FusionModel& m,
                                const std::vector<const Collection*>& batch,
                                FusionGrads& grads);

FusionModel train_fusion(const Dataset& data, Task task,
                         const TrainConfig& cfg,
                         const FusionArch& arch = FusionArch::desk(),
                         std::vector<EpochStat>* curve = nullptr);

// Max relative error between analytic and central finite differences
// (step 1e-5) across every parameter.
double fusion_gradient_check(FusionModel& m,
                             const std::vector<const Collection*>& batch,
                             double step = 1e-5);

void save_fusion(const FusionModel& m, const std::string& path);
FusionModel load_fusion(const std::string& path);

}  // namespace mvf
