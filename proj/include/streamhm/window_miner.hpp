#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "streamhm/event.hpp"
#include "streamhm/hm.hpp"

namespace streamhm {

/// Baseline streaming miner: keeps a bounded event buffer and re-runs the
/// batch miner over it at a fixed event cadence. The buffer policy picks
/// between periodic resets and a sliding window.
class WindowMiner {
 public:
  struct Config {
    std::size_t capacity = 100;
    BufferPolicy policy = BufferPolicy::kShift;
    std::uint64_t mine_every = 50;  // 0 disables periodic mining
    Thresholds thresholds;
    std::function<bool(const Event&)> analyze;  // unset accepts every event
  };

  explicit WindowMiner(Config config);

  /// Feeds one event; returns a fresh model when the mining cadence fires.
  std::optional<CausalModel> observe(const Event& e);

  /// Batch model of the current buffer contents.
  CausalModel current_model() const;

  std::uint64_t events_observed() const { return events_observed_; }
  std::uint64_t entries_retained() const { return buffer_.size(); }
  const ObservationPeriod& buffer() const { return buffer_; }

 private:
  Config config_;
  ObservationPeriod buffer_;
  std::uint64_t events_observed_ = 0;
};

}  // namespace streamhm
