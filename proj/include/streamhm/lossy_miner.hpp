#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streamhm/event.hpp"
#include "streamhm/hm.hpp"

namespace streamhm {

/// Approximate frequency miner with the lossy-counting deletion rule.
///
/// Three tables track activities, live cases, and direct successions as
/// (frequency f, allowance delta) entries. Every width = ceil(1/epsilon)
/// events, entries with f + delta <= current bucket are dropped. Retained
/// frequencies never overcount and undercount by at most epsilon * N.
class LossyMiner {
 public:
  struct Config {
    double epsilon = 0.01;
    std::size_t max_entries = 0;  // 0: no hard cap beyond the deletion rule
    std::uint64_t mine_every = 50;  // 0 disables periodic mining
    Thresholds thresholds;
  };

  struct Entry {
    std::uint64_t f = 0;
    std::uint64_t delta = 0;
  };
  struct CaseEntry {
    std::string last_activity;
    std::uint64_t f = 0;
    std::uint64_t delta = 0;
  };

  explicit LossyMiner(Config config);

  /// Feeds one event; returns a fresh model when the mining cadence fires.
  std::optional<CausalModel> observe(const Event& e);

  CausalModel current_model() const;

  double epsilon() const { return config_.epsilon; }
  std::uint64_t width() const { return width_; }
  std::uint64_t bucket() const { return (counter_ + width_ - 1) / width_; }
  std::uint64_t events_processed() const { return counter_ - 1; }
  std::uint64_t cleanups_run() const { return cleanups_run_; }
  bool cleanup_ran_last_observe() const { return cleanup_ran_last_observe_; }
  std::uint64_t entries_retained() const {
    return activities_.size() + cases_.size() + relations_.size();
  }
  std::uint64_t peak_entries() const { return peak_entries_; }

  const std::map<std::string, Entry>& activity_table() const { return activities_; }
  const std::map<std::string, CaseEntry>& case_table() const { return cases_; }
  const std::map<ActivityPair, Entry>& relation_table() const { return relations_; }

 private:
  void cleanup(std::uint64_t bucket);
  void enforce_cap();

  Config config_;
  std::uint64_t width_;
  std::uint64_t counter_ = 1;  // next round number; events seen = counter_ - 1
  std::uint64_t cleanups_run_ = 0;
  bool cleanup_ran_last_observe_ = false;
  std::uint64_t peak_entries_ = 0;
  std::map<std::string, Entry> activities_;
  std::map<std::string, CaseEntry> cases_;
  std::map<ActivityPair, Entry> relations_;
};

/// Reference counter with unbounded memory, used to audit the miner's
/// approximation guarantee.
class ExactCounts {
 public:
  void add(const Event& e);

  const std::map<std::string, std::uint64_t>& activities() const { return activities_; }
  const std::map<std::string, std::uint64_t>& cases() const { return cases_; }
  const std::map<ActivityPair, std::uint64_t>& relations() const { return relations_; }

 private:
  std::map<std::string, std::uint64_t> activities_;
  std::map<std::string, std::uint64_t> cases_;  // events per case
  std::map<ActivityPair, std::uint64_t> relations_;
  std::map<std::string, std::string> last_activity_;
};

struct GuaranteeReport {
  bool ok = true;
  std::uint64_t keys_checked = 0;
  std::vector<std::string> violations;
};

/// Checks, for every retained key, that f never exceeds the true count and
/// undershoots it by at most epsilon * N.
GuaranteeReport frequency_guarantee_check(const LossyMiner& miner,
                                          const ExactCounts& exact);

}  // namespace streamhm
