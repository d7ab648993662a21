#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "mvf/core.hpp"

namespace mvf {

struct StreamConfig {
  int window = 5;                      // W, moving-average width in frames
  std::set<int> distraction_classes;   // per-task class indices that alert
  int sustain = 15;                    // T, consecutive frames before alert
  bool cascade_enabled = false;

  void validate() const;
};

struct AlertEvent {
  std::int64_t frame = 0;
  Task task = Task::LeftHandLocation;
  int cls = 0;
  int sustained_frames = 0;
};

// Moving average over the last min(t+1, W) vectors; warm-up frames average
// the available prefix so output starts at frame 0.
class LowpassFilter {
 public:
  explicit LowpassFilter(int window);
  ProbVector push(const ProbVector& p);

 private:
  int window_;
  std::deque<ProbVector> buf_;
  std::vector<double> sum_;
};

std::vector<ProbVector> lowpass(const std::vector<ProbVector>& stream,
                                int window);

// Emits one alert when a distraction class has held the argmax for T
// consecutive frames; re-arms after any non-distraction frame.
class AlertDetector {
 public:
  AlertDetector(const StreamConfig& cfg, Task task);
  std::optional<AlertEvent> push(std::int64_t frame, int cls);

 private:
  StreamConfig cfg_;
  Task task_;
  int run_ = 0;
  bool armed_ = true;
};

std::vector<AlertEvent> threshold_alerts(const std::vector<int>& classes,
                                         const StreamConfig& cfg, Task task);

struct CascadeResult {
  int object = 0;
  std::optional<int> location;
};

// Held-object model first; the location model runs only when no object is
// held (object == none_class).
CascadeResult cascade(
    const Collection& c,
    const std::function<ProbVector(const Collection&)>& object_model,
    const std::function<ProbVector(const Collection&)>& location_model,
    int none_class);

}  // namespace mvf
