#pragma once

#include <vector>

#include "mvf/core.hpp"
#include "mvf/inducer.hpp"

namespace mvf {

struct VoteResult {
  int cls = 0;
  ProbVector fused;
};

// Equal-vote average of the N probability vectors.
VoteResult naive_vote(const std::vector<ProbVector>& probs);

// Per-model discounts from validation mistake counts:
// d_i = 1 - m_i / sum(m). All ones when no model made a mistake.
struct DiscountWeights {
  std::vector<double> d;
  std::vector<long> mistakes;
};

DiscountWeights fit_discounts(const std::vector<InducerModel>& models,
                              const std::vector<const Collection*>& validation,
                              Task task);

VoteResult wmv(const std::vector<ProbVector>& probs,
               const DiscountWeights& d);

// Availability weights: zero for absent views, uniform over the rest.
// Degenerate all-absent mask falls back to uniform 1/N.
struct AvailabilityWeights {
  std::vector<double> p;
};

AvailabilityWeights bmc_weights(const std::vector<bool>& mask);

VoteResult bmc(const std::vector<ProbVector>& probs,
               const AvailabilityWeights& weights);

// Both weightings applied at once: score_i = sum_j d_j * P_j * p_ij.
VoteResult wmv_bmc(const std::vector<ProbVector>& probs,
                   const DiscountWeights& d,
                   const AvailabilityWeights& weights);

}  // namespace mvf
