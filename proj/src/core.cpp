#include "mvf/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace mvf {

namespace {

const std::array<TaskSpec, kNumTasks> kSpecs = {{
    {Task::LeftHandLocation, {"SteeringWheel", "Lap", "Air"}},
    {Task::RightHandLocation,
     {"SteeringWheel", "Lap", "Air", "Radio", "Cupholder"}},
    {Task::LeftHandObject, {"Phone", "Beverage", "Tablet", "None"}},
    {Task::RightHandObject, {"Phone", "Beverage", "Tablet", "None"}},
}};

const std::array<const char*, kNumTasks> kTaskKeys = {"lh_loc", "rh_loc",
                                                      "lh_obj", "rh_obj"};

}  // namespace

const TaskSpec& task_spec(Task t) { return kSpecs[static_cast<int>(t)]; }

const char* task_key(Task t) { return kTaskKeys[static_cast<int>(t)]; }

std::optional<Task> task_from_key(std::string_view key) {
  for (int i = 0; i < kNumTasks; ++i) {
    if (key == kTaskKeys[i]) return static_cast<Task>(i);
  }
  return std::nullopt;
}

bool is_prob_vector(const ProbVector& p, double tol) {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

int argmax_class(const ProbVector& p) {
  if (p.empty()) throw std::invalid_argument("argmax_class: empty vector");
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

bool complete(const Collection& c) {
  return std::all_of(c.views.begin(), c.views.end(),
                     [](const ViewObservation& v) { return v.present; });
}

std::vector<bool> availability_mask(const Collection& c) {
  std::vector<bool> mask(c.views.size());
  for (size_t i = 0; i < c.views.size(); ++i) mask[i] = c.views[i].present;
  return mask;
}

const char* split_key(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<Split> split_from_key(std::string_view key) {
  if (key == "train") return Split::Train;
  if (key == "val") return Split::Val;
  if (key == "test") return Split::Test;
  return std::nullopt;
}

std::vector<const Collection*> Dataset::tagged(Split s) const {
  std::vector<const Collection*> out;
  for (const Collection& c : collections) {
    auto it = split_tags.find(c.id);
    if (it != split_tags.end() && it->second == s) out.push_back(&c);
  }
  return out;
}

double Dataset::complete_fraction() const {
  if (collections.empty()) return 0.0;
  size_t n = std::count_if(collections.begin(), collections.end(),
                           [](const Collection& c) { return complete(c); });
  return static_cast<double>(n) / static_cast<double>(collections.size());
}

void Dataset::validate() const {
  std::set<int> subject_set(subjects.begin(), subjects.end());
  std::set<std::int64_t> ids;
  for (const Collection& c : collections) {
    if (!ids.insert(c.id).second)
      throw std::runtime_error("dataset: duplicate collection id " +
                               std::to_string(c.id));
    if (!subject_set.count(c.subject))
      throw std::runtime_error("dataset: unknown subject " +
                               std::to_string(c.subject));
    if (static_cast<int>(c.views.size()) != num_views)
      throw std::runtime_error("dataset: wrong view count in collection " +
                               std::to_string(c.id));
    for (int v = 0; v < num_views; ++v) {
      const ViewObservation& obs = c.views[v];
      if (obs.view_id != v)
        throw std::runtime_error("dataset: view_id out of order");
      if (static_cast<int>(obs.features.size()) != feature_dim)
        throw std::runtime_error("dataset: wrong feature dim");
      if (!obs.present) {
        for (double f : obs.features) {
          if (f != 0.0)
            throw std::runtime_error(
                "dataset: missing view with nonzero features in collection " +
                std::to_string(c.id));
        }
      }
    }
    for (Task t : kAllTasks) {
      int lbl = c.label(t);
      if (lbl < 0 || lbl >= task_spec(t).num_classes())
        throw std::runtime_error("dataset: label out of range");
    }
  }
  if (!split_tags.empty()) {
    if (split_tags.size() != collections.size())
      throw std::runtime_error("dataset: split tags do not cover collections");
    for (const auto& [id, tag] : split_tags) {
      (void)tag;
      if (!ids.count(id))
        throw std::runtime_error("dataset: split tag for unknown id");
    }
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("dataset file empty: " + path);
  nlohmann::json header = nlohmann::json::parse(line);
  Dataset d;
  d.num_views = header.at("num_views").get<int>();
  d.feature_dim = header.at("feature_dim").get<int>();
  if (header.at("version").get<int>() != 1)
    throw std::runtime_error("unsupported dataset version");
  std::set<int> subject_set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Collection c;
    c.id = j.at("id").get<std::int64_t>();
    c.subject = j.at("subject").get<int>();
    c.timestamp = j.value("t", static_cast<std::int64_t>(d.collections.size()));
    const nlohmann::json& labels = j.at("labels");
    for (Task t : kAllTasks)
      c.labels[static_cast<int>(t)] = labels.at(task_key(t)).get<int>();
    const nlohmann::json& views = j.at("views");
    int vid = 0;
    for (const nlohmann::json& jv : views) {
      ViewObservation obs;
      obs.view_id = vid++;
      obs.present = jv.at("present").get<bool>();
      obs.features = jv.at("f").get<std::vector<double>>();
      c.views.push_back(std::move(obs));
    }
    if (j.contains("split")) {
      auto s = split_from_key(j["split"].get<std::string>());
      if (!s) throw std::runtime_error("bad split tag in dataset");
      d.split_tags[c.id] = *s;
    }
    subject_set.insert(c.subject);
    d.collections.push_back(std::move(c));
  }
  d.subjects.assign(subject_set.begin(), subject_set.end());
  d.validate();
  return d;
}

void write_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  nlohmann::json header = {
      {"num_views", d.num_views}, {"feature_dim", d.feature_dim}, {"version", 1}};
  out << header.dump() << "\n";
  for (const Collection& c : d.collections) {
    nlohmann::json j;
    j["id"] = c.id;
    j["subject"] = c.subject;
    j["t"] = c.timestamp;
    nlohmann::json labels;
    for (Task t : kAllTasks) labels[task_key(t)] = c.label(t);
    j["labels"] = labels;
    nlohmann::json views = nlohmann::json::array();
    for (const ViewObservation& v : c.views) {
      views.push_back({{"present", v.present}, {"f", v.features}});
    }
    j["views"] = views;
    auto it = d.split_tags.find(c.id);
    if (it != d.split_tags.end()) j["split"] = split_key(it->second);
    out << j.dump() << "\n";
  }
}

}  // namespace mvf
