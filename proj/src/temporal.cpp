#include "mvf/temporal.hpp"

#include <stdexcept>

namespace mvf {

void StreamConfig::validate() const {
  if (window < 1) throw std::invalid_argument("StreamConfig: window < 1");
  if (sustain < 1) throw std::invalid_argument("StreamConfig: sustain < 1");
}

LowpassFilter::LowpassFilter(int window) : window_(window) {
  if (window < 1) throw std::invalid_argument("LowpassFilter: window < 1");
}

ProbVector LowpassFilter::push(const ProbVector& p) {
  if (sum_.empty()) sum_.assign(p.size(), 0.0);
  if (p.size() != sum_.size())
    throw std::invalid_argument("LowpassFilter: vector size changed");
  buf_.push_back(p);
  for (size_t i = 0; i < p.size(); ++i) sum_[i] += p[i];
  if (static_cast<int>(buf_.size()) > window_) {
    for (size_t i = 0; i < p.size(); ++i) sum_[i] -= buf_.front()[i];
    buf_.pop_front();
  }
  ProbVector out(p.size());
  double inv = 1.0 / static_cast<double>(buf_.size());
  for (size_t i = 0; i < p.size(); ++i) out[i] = sum_[i] * inv;
  return out;
}

std::vector<ProbVector> lowpass(const std::vector<ProbVector>& stream,
                                int window) {
  LowpassFilter f(window);
  std::vector<ProbVector> out;
  out.reserve(stream.size());
  for (const ProbVector& p : stream) out.push_back(f.push(p));
  return out;
}

AlertDetector::AlertDetector(const StreamConfig& cfg, Task task)
    : cfg_(cfg), task_(task) {
  cfg.validate();
}

std::optional<AlertEvent> AlertDetector::push(std::int64_t frame, int cls) {
  if (!cfg_.distraction_classes.count(cls)) {
    run_ = 0;
    armed_ = true;
    return std::nullopt;
  }
  ++run_;
  if (armed_ && run_ >= cfg_.sustain) {
    armed_ = false;
    return AlertEvent{frame, task_, cls, run_};
  }
  return std::nullopt;
}

std::vector<AlertEvent> threshold_alerts(const std::vector<int>& classes,
                                         const StreamConfig& cfg, Task task) {
  AlertDetector det(cfg, task);
  std::vector<AlertEvent> out;
  for (size_t i = 0; i < classes.size(); ++i) {
    auto ev = det.push(static_cast<std::int64_t>(i), classes[i]);
    if (ev) out.push_back(*ev);
  }
  return out;
}

CascadeResult cascade(
    const Collection& c,
    const std::function<ProbVector(const Collection&)>& object_model,
    const std::function<ProbVector(const Collection&)>& location_model,
    int none_class) {
  CascadeResult out;
  out.object = argmax_class(object_model(c));
  if (out.object == none_class) out.location = argmax_class(location_model(c));
  return out;
}

}  // namespace mvf
