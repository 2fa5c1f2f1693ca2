#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "streamhm/event.hpp"

namespace streamhm {

/// Block-structured process description used to synthesize traces:
/// single activities composed by sequence, weighted exclusive choice,
/// interleaved parallelism, and probabilistic repetition.
class ProcessSpec {
 public:
  enum class Kind { kActivity, kSequence, kXor, kParallel, kLoop };

  static ProcessSpec activity(std::string name);
  static ProcessSpec sequence(std::vector<ProcessSpec> children);
  /// Empty weights mean equal weights.
  static ProcessSpec exclusive(std::vector<ProcessSpec> children,
                               std::vector<double> weights = {});
  static ProcessSpec parallel(std::vector<ProcessSpec> children);
  static ProcessSpec loop(ProcessSpec body, double repeat);

  /// Grammar: "A" | {"seq":[...]} | {"xor":[...],"weights":[...]} |
  /// {"and":[...]} | {"loop":block,"repeat":p}
  static ProcessSpec from_json(const std::string& text);
  std::string to_json() const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<ProcessSpec>& children() const { return children_; }
  const std::vector<double>& weights() const { return weights_; }
  double repeat() const { return repeat_; }

  /// Draws one trace; parallel blocks interleave uniformly at random.
  std::vector<std::string> sample_trace(std::mt19937_64& rng) const;
  void append_trace(std::vector<std::string>& out, std::mt19937_64& rng) const;

 private:
  ProcessSpec() = default;

  Kind kind_ = Kind::kActivity;
  std::string name_;
  std::vector<ProcessSpec> children_;
  std::vector<double> weights_;  // xor only
  double repeat_ = 0.0;          // loop only
};

/// One homogeneous stretch of the stream: `cases` instances of one spec.
struct StreamSegment {
  ProcessSpec spec;
  std::size_t cases = 0;
};

/// Deterministic stream recipe. Segment boundaries are hard shifts: all
/// cases of a segment finish before the next segment starts.
struct StreamPlan {
  std::vector<StreamSegment> segments;
  std::size_t max_concurrent = 1;
  std::uint64_t seed = 0;

  static StreamPlan from_json(const std::string& text);
  std::string to_json() const;
};

/// Expands a plan into an event stream with seq_no 0..n-1. Case ids are
/// assigned in start order; the scheduler draws the next emitting case
/// uniformly from the active set.
std::vector<Event> generate_stream(const StreamPlan& plan);

}  // namespace streamhm
