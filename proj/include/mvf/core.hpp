#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mvf {

// The four classification tasks. Class order is fixed and part of the spec;
// probability vectors index classes in this order.
enum class Task : int {
  LeftHandLocation = 0,
  RightHandLocation = 1,
  LeftHandObject = 2,
  RightHandObject = 3,
};

inline constexpr int kNumTasks = 4;
inline constexpr std::array<Task, kNumTasks> kAllTasks{
    Task::LeftHandLocation, Task::RightHandLocation, Task::LeftHandObject,
    Task::RightHandObject};

struct TaskSpec {
  Task id;
  std::vector<std::string> classes;
  int num_classes() const { return static_cast<int>(classes.size()); }
};

// Static specs: LH location {SteeringWheel, Lap, Air}; RH location adds
// Radio and Cupholder (right hand only); both object tasks share
// {Phone, Beverage, Tablet, None}.
const TaskSpec& task_spec(Task t);
const char* task_key(Task t);  // "lh_loc", "rh_loc", "lh_obj", "rh_obj"
std::optional<Task> task_from_key(std::string_view key);

using ProbVector = std::vector<double>;

bool is_prob_vector(const ProbVector& p, double tol = 1e-6);

// Lowest index wins ties.
int argmax_class(const ProbVector& p);

struct ViewObservation {
  int view_id = 0;
  std::vector<double> features;
  bool present = false;
};

struct Collection {
  std::int64_t id = 0;
  int subject = 0;
  std::vector<ViewObservation> views;
  std::array<int, kNumTasks> labels{};
  std::int64_t timestamp = 0;

  int label(Task t) const { return labels[static_cast<int>(t)]; }
};

// True iff every view slot is present.
bool complete(const Collection& c);

std::vector<bool> availability_mask(const Collection& c);

enum class Split { Train, Val, Test };

const char* split_key(Split s);
std::optional<Split> split_from_key(std::string_view key);

struct Dataset {
  std::vector<Collection> collections;
  int num_views = 0;
  int feature_dim = 0;
  std::vector<int> subjects;
  std::map<std::int64_t, Split> split_tags;

  // Collections carrying the given tag, in file order.
  std::vector<const Collection*> tagged(Split s) const;

  double complete_fraction() const;

  // Throws std::runtime_error on any violated structural invariant.
  void validate() const;
};

// JSON Lines, header first:
//   {"num_views":N,"feature_dim":D,"version":1}
//   {"id":..,"subject":..,"labels":{...},"views":[{"present":..,"f":[..]},..]}
// Split tags, when assigned, ride along as a "split" key per line.
Dataset read_dataset(const std::string& path);
void write_dataset(const Dataset& d, const std::string& path);

}  // namespace mvf
