#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <list>
#include <map>
#include <optional>
#include <string>

#include "streamhm/errors.hpp"
#include "streamhm/event.hpp"
#include "streamhm/hm.hpp"

namespace streamhm {

inline constexpr std::size_t kUnboundedQueue = std::numeric_limits<std::size_t>::max();

/// Bounded most-recently-used queue. The front is the most recent entry;
/// eviction removes the back. Lookup is by key, order by recency.
template <typename Key, typename Value>
class MruQueue {
 public:
  explicit MruQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidArgument("queue capacity must be positive");
  }

  /// Removes the entry for key and returns its value, if present.
  std::optional<Value> take(const Key& key) {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    Value value = std::move(it->second->second);
    entries_.erase(it->second);
    index_.erase(it);
    return value;
  }

  void push_front(Key key, Value value) {
    entries_.emplace_front(std::move(key), std::move(value));
    index_[entries_.front().first] = entries_.begin();
  }

  void evict_back() {
    index_.erase(entries_.back().first);
    entries_.pop_back();
  }

  bool contains(const Key& key) const { return index_.count(key) != 0; }
  bool full() const { return entries_.size() >= capacity_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

  Value& front_value() { return entries_.front().second; }

  /// Most-recent-first iteration.
  const std::list<std::pair<Key, Value>>& entries() const { return entries_; }

  template <typename Fn>
  void for_each_value(Fn&& fn) {
    for (auto& [key, value] : entries_) fn(value);
  }

  std::map<Key, Value> snapshot() const {
    return std::map<Key, Value>(entries_.begin(), entries_.end());
  }

 private:
  std::size_t capacity_;
  std::list<std::pair<Key, Value>> entries_;
  std::map<Key, typename std::list<std::pair<Key, Value>>::iterator> index_;
};

enum class WeightPolicy {
  kStationary,    // weights are plain counters
  kAging,         // every weight decays by alpha per update round
  kSelfAdapting,  // aging with alpha steered by fitness trend
};

struct AlphaAdaptation {
  double step_down = 0.02;
  double step_up = 0.005;
  double tolerance = 0.01;
};

/// One fitness-trend adjustment step: a drop beyond tolerance pulls alpha
/// down hard, anything else nudges it back up. Result stays in [0, 1].
double adapt_alpha(double alpha, double fitness_now, double fitness_previous,
                   const AlphaAdaptation& adaptation = {});

/// Budget-bounded online miner. Three MRU queues hold the hottest
/// activities, cases, and direct successions; weights grow on observation
/// and, under the aging policies, decay everywhere else.
class OnlineMiner {
 public:
  struct Config {
    std::size_t max_qa = 100;
    std::size_t max_qc = 100;
    std::size_t max_qr = 100;
    WeightPolicy policy = WeightPolicy::kStationary;
    double alpha = 1.0;  // initial alpha for the aging policies
    AlphaAdaptation adaptation;
    std::uint64_t mine_every = 50;  // 0 disables periodic mining
    Thresholds thresholds;
    std::function<bool(const Event&)> analyze;  // unset accepts every event
  };

  explicit OnlineMiner(Config config);

  /// Feeds one event; returns a fresh model when the mining cadence fires.
  std::optional<CausalModel> observe(const Event& e);

  CausalModel current_model() const;

  /// Applies one alpha adaptation step (self-adapting policy only).
  void adapt(double fitness_now, double fitness_previous);

  double alpha() const { return alpha_; }
  std::uint64_t events_observed() const { return events_observed_; }
  /// Count of events whose case was not in the case queue, i.e. cases started.
  std::uint64_t cases_started() const { return cases_started_; }
  std::uint64_t entries_retained() const {
    return activities_.size() + cases_.size() + relations_.size();
  }
  std::uint64_t peak_entries() const { return peak_entries_; }

  ActivityCounts activity_weights() const { return activities_.snapshot(); }
  PairCounts relation_weights() const { return relations_.snapshot(); }
  const MruQueue<std::string, std::string>& case_queue() const { return cases_; }

 private:
  Config config_;
  double alpha_;
  MruQueue<std::string, double> activities_;
  MruQueue<std::string, std::string> cases_;  // case -> last activity
  MruQueue<ActivityPair, double> relations_;
  std::uint64_t events_observed_ = 0;
  std::uint64_t cases_started_ = 0;
  std::uint64_t peak_entries_ = 0;
};

}  // namespace streamhm
