#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvf/core.hpp"

namespace mvf {

// Synthetic multi-view scenario: per-(task, class) embeddings in per-task
// feature subspaces, per-view informativeness scaling, occlusion conditioned
// on the right-hand location class, sequential visibility anti-correlation,
// additive per-subject signatures, isotropic Gaussian noise.
//
// Signal structure per view: an unsigned class embedding (readable from the
// view alone) plus a sign-modulated antipodal pair embedding whose sign is a
// per-collection latent, carried by designated reference views in a separate
// feature block. Views holding only the signed component cannot separate
// paired classes on their own; joint (feature-level) readers can.
struct GenConfig {
  int num_subjects = 12;
  int collections_per_subject = 900;
  int num_views = 4;
  int feature_dim = 16;

  // [view][task] unsigned signal scale in [0,1].
  std::vector<std::vector<double>> view_informativeness;
  // [view][task] sign-modulated signal scale in [0,1].
  std::vector<std::vector<double>> signed_informativeness;
  // Per-view strength of the sign-carrier component.
  std::vector<double> carrier_strength;
  // [view][rh_loc class] base missing probability.
  std::vector<std::vector<double>> occlusion;
  // Each already-missing view scales later views' missing odds by (1 - this).
  double visibility_anticorrelation = 0.60;
  double subject_signature_scale = 0.3;
  double noise_sigma = 0.22;
  std::uint64_t rng_seed = 42;

  // Class priors, uniform with a wheel / empty-hand bias.
  std::vector<std::vector<double>> class_priors;

  static GenConfig defaults();
  void validate() const;
};

Dataset generate(const GenConfig& cfg);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Seeded shuffle, tags by fraction.
void split_random(Dataset& data, const SplitFractions& f, std::uint64_t seed);

// All of one subject's collections become test; the rest split train/val.
void split_by_subject(Dataset& data, int left_out_subject,
                      double val_fraction, std::uint64_t seed);

// Plain-text key=value config (matrix rows ';'-separated, entries ','),
// e.g. "occlusion = 0.7,0.3,0.3,0.8,0.6; ...". Unknown keys are an error.
GenConfig load_genconfig(const std::string& path, GenConfig base = GenConfig::defaults());
void apply_genconfig_entry(GenConfig& cfg, const std::string& key,
                           const std::string& value);

}  // namespace mvf
