#include "mvf/combiner.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mvf {

namespace {

// Weighted sum of the model probability vectors; argmax taken before the
// display normalization (positive scaling cannot change it).
VoteResult weighted_vote(const std::vector<ProbVector>& probs,
                         const std::vector<double>& weights) {
  if (probs.empty()) throw std::invalid_argument("combiner: empty model list");
  if (probs.size() != weights.size())
    throw std::invalid_argument("combiner: weight count mismatch");
  size_t m = probs[0].size();
  VoteResult out;
  out.fused.assign(m, 0.0);
  for (size_t j = 0; j < probs.size(); ++j) {
    if (probs[j].size() != m)
      throw std::invalid_argument("combiner: class count mismatch");
    for (size_t i = 0; i < m; ++i) out.fused[i] += weights[j] * probs[j][i];
  }
  out.cls = argmax_class(out.fused);
  double sum = std::accumulate(out.fused.begin(), out.fused.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : out.fused) v /= sum;
  }
  return out;
}

}  // namespace

VoteResult naive_vote(const std::vector<ProbVector>& probs) {
  std::vector<double> weights(probs.size(),
                              1.0 / static_cast<double>(probs.size()));
  if (probs.empty()) throw std::invalid_argument("naive_vote: empty model list");
  return weighted_vote(probs, weights);
}

DiscountWeights fit_discounts(const std::vector<InducerModel>& models,
                              const std::vector<const Collection*>& validation,
                              Task task) {
  if (validation.empty())
    throw std::invalid_argument("fit_discounts: empty validation set");
  DiscountWeights out;
  out.mistakes.assign(models.size(), 0);
  for (size_t j = 0; j < models.size(); ++j) {
    for (const Collection* c : validation) {
      if (argmax_class(models[j].predict(*c)) != c->label(task))
        ++out.mistakes[j];
    }
  }
  long total = std::accumulate(out.mistakes.begin(), out.mistakes.end(), 0L);
  out.d.assign(models.size(), 1.0);
  if (total > 0) {
    for (size_t j = 0; j < models.size(); ++j)
      out.d[j] = 1.0 - static_cast<double>(out.mistakes[j]) /
                           static_cast<double>(total);
  }
  return out;
}

VoteResult wmv(const std::vector<ProbVector>& probs,
               const DiscountWeights& d) {
  return weighted_vote(probs, d.d);
}

AvailabilityWeights bmc_weights(const std::vector<bool>& mask) {
  if (mask.empty()) throw std::invalid_argument("bmc_weights: empty mask");
  size_t n_present =
      static_cast<size_t>(std::count(mask.begin(), mask.end(), true));
  AvailabilityWeights out;
  if (n_present == 0) {
    // All views absent: uniform fallback so the imputed priors still vote.
    out.p.assign(mask.size(), 1.0 / static_cast<double>(mask.size()));
    return out;
  }
  out.p.assign(mask.size(), 0.0);
  double w = 1.0 / static_cast<double>(n_present);
  for (size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.p[i] = w;
  }
  return out;
}

VoteResult bmc(const std::vector<ProbVector>& probs,
               const AvailabilityWeights& weights) {
  return weighted_vote(probs, weights.p);
}

VoteResult wmv_bmc(const std::vector<ProbVector>& probs,
                   const DiscountWeights& d,
                   const AvailabilityWeights& weights) {
  if (d.d.size() != weights.p.size())
    throw std::invalid_argument("wmv_bmc: weight length mismatch");
  std::vector<double> w(d.d.size());
  for (size_t j = 0; j < w.size(); ++j) w[j] = d.d[j] * weights.p[j];
  return weighted_vote(probs, w);
}

}  // namespace mvf
