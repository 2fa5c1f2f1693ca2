#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "streamhm/event.hpp"
#include "streamhm/hm.hpp"

namespace streamhm {

/// Sliding window of the latest x events used as evaluation ground truth.
class EvalWindow {
 public:
  explicit EvalWindow(std::size_t capacity);

  void push(const Event& e);

  std::size_t size() const { return events_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Event>& events() const { return events_; }

  /// Adjacent same-case activity pairs, one per succession occurrence,
  /// in window order.
  std::vector<ActivityPair> case_pairs() const;

 private:
  std::size_t capacity_;
  std::deque<Event> events_;
};

/// Fraction of the window's successions the model can replay: a pair
/// (a, b) is covered by edge a->b, or by a self-loop when a equals b.
/// A window without successions scores 1.
double window_fitness(const CausalModel& model, const EvalWindow& window);

/// Fraction of the model's edges exercised by at least one succession in
/// the window. An edge-free model scores 1.
double window_precision(const CausalModel& model, const EvalWindow& window);

/// One evaluation sample, taken at a mining trigger.
struct MetricPoint {
  std::uint64_t seq_no = 0;
  double fitness = 0.0;
  double precision = 0.0;
  double alpha = 1.0;  // 1.0 for miners without weight decay
  std::uint64_t entries = 0;
  double micros_per_event = 0.0;
};

struct MetricSeries {
  std::vector<MetricPoint> points;
};

/// CSV with header seq_no,fitness,precision,alpha,entries,micros_per_event;
/// '.' decimal separator, LF line endings. Round-trips exactly.
std::string metrics_to_csv(const MetricSeries& series);
MetricSeries metrics_from_csv(const std::string& csv);

void write_metrics_csv(const MetricSeries& series, const std::string& path);
MetricSeries read_metrics_csv(const std::string& path);

}  // namespace streamhm
