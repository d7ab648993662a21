#include "mvf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mvf {

GenConfig GenConfig::defaults() {
  GenConfig c;
  // Rows: views 0..3 (dash-center, dash-driver, steering, rearview).
  // Columns: tasks (lh_loc, rh_loc, lh_obj, rh_obj). Rearview strongest on
  // left-hand tasks, right-hand tasks more balanced.
  c.view_informativeness = {
      {0.00, 0.10, 0.05, 0.05},
      {0.30, 0.35, 0.30, 0.30},
      {0.25, 0.30, 0.20, 0.25},
      {0.18, 0.25, 0.10, 0.12},
  };
  // Dash views carry mostly sign-modulated signal; the rearview is the
  // strongest standalone reader for left-hand tasks.
  c.signed_informativeness = {
      {0.00, 0.00, 0.00, 0.00},
      {0.85, 0.90, 0.90, 0.85},
      {0.85, 0.90, 0.90, 0.85},
      {0.70, 0.85, 0.85, 0.85},
  };
  // View 0 alone carries the sign reference.
  c.carrier_strength = {1.00, 0.00, 0.00, 0.00};
  // Columns: rh_loc classes (SteeringWheel, Lap, Air, Radio, Cupholder).
  c.occlusion = {
      {0.01, 0.01, 0.02, 0.03, 0.02},
      {0.80, 0.55, 0.50, 0.80, 0.70},
      {0.60, 0.80, 0.70, 0.75, 0.65},
      {0.20, 0.12, 0.18, 0.25, 0.20},
  };
  c.class_priors = {
      {0.40, 0.30, 0.30},
      {0.36, 0.16, 0.16, 0.16, 0.16},
      {0.20, 0.20, 0.20, 0.40},
      {0.20, 0.20, 0.20, 0.40},
  };
  return c;
}

void GenConfig::validate() const {
  if (num_subjects <= 0 || collections_per_subject <= 0 || num_views <= 0 ||
      feature_dim < 2 * (kNumTasks + 1))
    throw std::invalid_argument("GenConfig: bad sizes");
  for (const auto* mat : {&view_informativeness, &signed_informativeness}) {
    if (static_cast<int>(mat->size()) != num_views)
      throw std::invalid_argument("GenConfig: informativeness rows != N");
    for (const auto& row : *mat) {
      if (static_cast<int>(row.size()) != kNumTasks)
        throw std::invalid_argument("GenConfig: informativeness cols != 4");
      for (double v : row)
        if (v < 0.0 || v > 1.0)
          throw std::invalid_argument(
              "GenConfig: informativeness outside [0,1]");
    }
  }
  if (static_cast<int>(carrier_strength.size()) != num_views)
    throw std::invalid_argument("GenConfig: carrier_strength length != N");
  int n_loc = task_spec(Task::RightHandLocation).num_classes();
  if (static_cast<int>(occlusion.size()) != num_views)
    throw std::invalid_argument("GenConfig: occlusion rows != N");
  for (const auto& row : occlusion) {
    if (static_cast<int>(row.size()) != n_loc)
      throw std::invalid_argument("GenConfig: occlusion cols != rh_loc classes");
    for (double v : row)
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("GenConfig: occlusion outside [0,1]");
  }
  if (visibility_anticorrelation < 0.0 || visibility_anticorrelation > 1.0)
    throw std::invalid_argument("GenConfig: anticorrelation outside [0,1]");
  if (subject_signature_scale < 0.0)
    throw std::invalid_argument("GenConfig: negative signature scale");
  if (noise_sigma <= 0.0)
    throw std::invalid_argument("GenConfig: noise_sigma must be > 0");
  if (static_cast<int>(class_priors.size()) != kNumTasks)
    throw std::invalid_argument("GenConfig: need priors per task");
  for (Task t : kAllTasks) {
    const auto& p = class_priors[static_cast<int>(t)];
    if (static_cast<int>(p.size()) != task_spec(t).num_classes())
      throw std::invalid_argument("GenConfig: prior length mismatch");
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("GenConfig: priors must sum to 1");
  }
}

namespace {

// Class pairs sharing an antipodal signed embedding (f(second) = -f(first)).
// Classes not listed keep an unambiguous signed direction of their own.
const std::array<std::vector<std::pair<int, int>>, kNumTasks> kSignedPairs = {{
    {{1, 2}},          // lh_loc: Lap / Air
    {{1, 2}, {3, 4}},  // rh_loc: Lap / Air, Radio / Cupholder
    {{0, 1}, {2, 3}},  // lh_obj: Phone / Beverage, Tablet / None
    {{0, 1}, {2, 3}},  // rh_obj
}};

// Embeddings live in disjoint per-task blocks of the feature space so the
// four tasks do not interfere; the trailing block is reserved for the sign
// carrier. Classes are random unit vectors in their block.
struct Embeddings {
  // [task][class] = feature-dim vectors (zero outside the task's block).
  std::vector<std::vector<std::vector<double>>> unsigned_e;
  std::vector<std::vector<std::vector<double>>> signed_e;
  std::vector<double> carrier;  // unit vector in the carrier block

  static std::vector<double> block_unit(int feature_dim, int lo, int len,
                                        std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(feature_dim, 0.0);
    double norm2 = 0.0;
    for (int d = 0; d < len; ++d) {
      v[lo + d] = gauss(rng);
      norm2 += v[lo + d] * v[lo + d];
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (int d = 0; d < len; ++d) v[lo + d] *= inv;
    return v;
  }

  void build(int feature_dim, std::mt19937_64& rng) {
    int block = feature_dim / (kNumTasks + 1);
    unsigned_e.resize(kNumTasks);
    signed_e.resize(kNumTasks);
    for (Task t : kAllTasks) {
      int ti = static_cast<int>(t);
      int lo = ti * block;
      int m = task_spec(t).num_classes();
      unsigned_e[ti].clear();
      for (int c = 0; c < m; ++c)
        unsigned_e[ti].push_back(block_unit(feature_dim, lo, block, rng));
      signed_e[ti].assign(m, {});
      for (const auto& [a, b] : kSignedPairs[ti]) {
        signed_e[ti][a] = block_unit(feature_dim, lo, block, rng);
        signed_e[ti][b].assign(feature_dim, 0.0);
        for (int d = 0; d < feature_dim; ++d)
          signed_e[ti][b][d] = -signed_e[ti][a][d];
      }
      for (int c = 0; c < m; ++c) {
        if (signed_e[ti][c].empty())
          signed_e[ti][c] = block_unit(feature_dim, lo, block, rng);
      }
    }
    int carrier_lo = kNumTasks * block;
    carrier = block_unit(feature_dim, carrier_lo, feature_dim - carrier_lo, rng);
  }
};

int sample_class(const std::vector<double>& prior, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < prior.size(); ++i) {
    acc += prior[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(prior.size()) - 1;
}

}  // namespace

Dataset generate(const GenConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Embeddings emb;
  emb.build(cfg.feature_dim, rng);

  std::vector<std::vector<double>> signatures(cfg.num_subjects);
  for (auto& sig : signatures) {
    sig.resize(cfg.feature_dim);
    for (double& v : sig) v = cfg.subject_signature_scale * gauss(rng);
  }

  Dataset data;
  data.num_views = cfg.num_views;
  data.feature_dim = cfg.feature_dim;
  for (int s = 0; s < cfg.num_subjects; ++s) data.subjects.push_back(s);

  std::int64_t next_id = 0;
  for (int s = 0; s < cfg.num_subjects; ++s) {
    for (int k = 0; k < cfg.collections_per_subject; ++k) {
      Collection c;
      c.id = next_id;
      c.timestamp = next_id;
      ++next_id;
      c.subject = s;
      for (Task t : kAllTasks) {
        int ti = static_cast<int>(t);
        c.labels[ti] = sample_class(cfg.class_priors[ti], unif(rng));
      }
      int rh_loc = c.labels[static_cast<int>(Task::RightHandLocation)];
      double sign = unif(rng) < 0.5 ? -1.0 : 1.0;

      // Sequential visibility: each earlier missing view shrinks the next
      // view's missing odds by (1 - anticorrelation).
      int missing_so_far = 0;
      std::vector<bool> present(cfg.num_views);
      for (int v = 0; v < cfg.num_views; ++v) {
        double q = cfg.occlusion[v][rh_loc] *
                   std::pow(1.0 - cfg.visibility_anticorrelation,
                            missing_so_far);
        bool miss = unif(rng) < q;
        present[v] = !miss;
        if (miss) ++missing_so_far;
      }

      for (int v = 0; v < cfg.num_views; ++v) {
        ViewObservation obs;
        obs.view_id = v;
        obs.present = present[v];
        obs.features.assign(cfg.feature_dim, 0.0);
        if (present[v]) {
          for (Task t : kAllTasks) {
            int ti = static_cast<int>(t);
            double u_scale = cfg.view_informativeness[v][ti];
            double s_scale = cfg.signed_informativeness[v][ti] * sign;
            const std::vector<double>& ue = emb.unsigned_e[ti][c.labels[ti]];
            const std::vector<double>& se = emb.signed_e[ti][c.labels[ti]];
            for (int d = 0; d < cfg.feature_dim; ++d)
              obs.features[d] += u_scale * ue[d] + s_scale * se[d];
          }
          double cs = cfg.carrier_strength[v] * sign;
          for (int d = 0; d < cfg.feature_dim; ++d)
            obs.features[d] += cs * emb.carrier[d] + signatures[s][d] +
                               cfg.noise_sigma * gauss(rng);
        }
        c.views.push_back(std::move(obs));
      }
      data.collections.push_back(std::move(c));
    }
  }
  data.validate();
  return data;
}

void split_random(Dataset& data, const SplitFractions& f, std::uint64_t seed) {
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
    throw std::invalid_argument("split_random: fractions must sum to 1");
  std::vector<std::int64_t> ids;
  ids.reserve(data.collections.size());
  for (const Collection& c : data.collections) ids.push_back(c.id);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  size_t n = ids.size();
  size_t n_train = static_cast<size_t>(std::llround(f.train * n));
  size_t n_val = static_cast<size_t>(std::llround(f.val * n));
  data.split_tags.clear();
  for (size_t i = 0; i < n; ++i) {
    Split s = i < n_train          ? Split::Train
              : i < n_train + n_val ? Split::Val
                                    : Split::Test;
    data.split_tags[ids[i]] = s;
  }
}

void split_by_subject(Dataset& data, int left_out_subject, double val_fraction,
                      std::uint64_t seed) {
  if (std::find(data.subjects.begin(), data.subjects.end(), left_out_subject) ==
      data.subjects.end())
    throw std::invalid_argument("split_by_subject: unknown subject " +
                                std::to_string(left_out_subject));
  std::vector<std::int64_t> rest;
  data.split_tags.clear();
  for (const Collection& c : data.collections) {
    if (c.subject == left_out_subject)
      data.split_tags[c.id] = Split::Test;
    else
      rest.push_back(c.id);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(rest.begin(), rest.end(), rng);
  size_t n_val = static_cast<size_t>(std::llround(val_fraction * rest.size()));
  for (size_t i = 0; i < rest.size(); ++i)
    data.split_tags[rest[i]] = i < n_val ? Split::Val : Split::Train;
}

namespace {

std::vector<double> parse_row(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& s) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) out.push_back(parse_row(row));
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void apply_genconfig_entry(GenConfig& cfg, const std::string& key,
                           const std::string& value) {
  if (key == "num_subjects") cfg.num_subjects = std::stoi(value);
  else if (key == "collections_per_subject")
    cfg.collections_per_subject = std::stoi(value);
  else if (key == "num_views") cfg.num_views = std::stoi(value);
  else if (key == "feature_dim") cfg.feature_dim = std::stoi(value);
  else if (key == "view_informativeness")
    cfg.view_informativeness = parse_matrix(value);
  else if (key == "signed_informativeness")
    cfg.signed_informativeness = parse_matrix(value);
  else if (key == "carrier_strength") cfg.carrier_strength = parse_row(value);
  else if (key == "occlusion") cfg.occlusion = parse_matrix(value);
  else if (key == "visibility_anticorrelation")
    cfg.visibility_anticorrelation = std::stod(value);
  else if (key == "subject_signature_scale")
    cfg.subject_signature_scale = std::stod(value);
  else if (key == "noise_sigma") cfg.noise_sigma = std::stod(value);
  else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
  else if (key == "class_priors") cfg.class_priors = parse_matrix(value);
  else
    throw std::invalid_argument("unknown generator config key: " + key);
}

GenConfig load_genconfig(const std::string& path, GenConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line without '=': " + line);
    apply_genconfig_entry(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return base;
}

}  // namespace mvf
