#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "streamhm/event.hpp"

namespace streamhm {

using ActivityPair = std::pair<std::string, std::string>;
using ActivityCounts = std::map<std::string, double>;
using PairCounts = std::map<ActivityPair, double>;

/// Succession statistics of an event log.
///
/// direct    counts a immediately followed by b within a case.
/// two_step  counts a followed by b with exactly a in between (a b a).
/// indirect  counts a eventually followed by b with no further a or b
///           in between (includes direct successions).
struct SuccessionCounts {
  ActivityCounts activity_count;
  PairCounts direct;
  PairCounts two_step;
  PairCounts indirect;
  std::uint64_t num_cases = 0;
};

SuccessionCounts count_log(const std::vector<Event>& log);
SuccessionCounts count_log(const ObservationPeriod& buffer);

// --- measures -------------------------------------------------------------
//
// All measures are smoothed by +1 in the denominator, so they stay defined
// for unseen behaviour and approach 1 only with growing support.

/// (|a>b| - |b>a|) / (|a>b| + |b>a| + 1), in (-1, 1).
double dependency_measure(const PairCounts& direct, const std::string& a,
                          const std::string& b);

/// (|b>c| + |c>b|) / (|a>b| + |a>c| + 1): concurrency of b and c after a.
double and_measure(const PairCounts& direct, const std::string& a,
                   const std::string& b, const std::string& c);

/// |a>>b| / (|b| + 1): eventual succession relative to b's frequency.
double long_distance_measure(const PairCounts& indirect,
                             const ActivityCounts& activity_count,
                             const std::string& a, const std::string& b);

/// {length-one, length-two} loop measures for (a, b).
std::pair<double, double> loop_measures(const PairCounts& direct,
                                        const PairCounts& two_step,
                                        const std::string& a, const std::string& b);

// --- model ----------------------------------------------------------------

struct Thresholds {
  double dependency = 0.9;
  double and_threshold = 0.1;
  double long_distance = 0.9;
  double loop_one = 0.9;
  double loop_two = 0.9;
  double relative_to_best = 0.0;  // 0 disables relative pruning
};

/// Causal net mined from succession counts. Split/join groups partition the
/// successors/predecessors of an activity; members of one group are
/// concurrent (AND), distinct groups are alternatives (XOR).
struct CausalModel {
  ActivityCounts activities;
  PairCounts edges;  // (a, b) -> dependency value
  std::map<std::string, std::vector<std::vector<std::string>>> splits;
  std::map<std::string, std::vector<std::vector<std::string>>> joins;
  std::set<std::string> self_loops;
  std::set<ActivityPair> two_loops;   // unordered, stored with first <= second
  std::set<ActivityPair> long_edges;  // only pairs without a direct edge requirement

  bool has_edge(const std::string& a, const std::string& b) const {
    return edges.count({a, b}) != 0;
  }
  std::set<ActivityPair> edge_set() const;
};

/// Optional batch-only inputs; streaming miners leave them unset and the
/// resulting model carries no two_loops/long_edges.
struct ModelExtras {
  const PairCounts* two_step = nullptr;
  const PairCounts* indirect = nullptr;
};

CausalModel generate_model(const ActivityCounts& activity_count,
                           const PairCounts& direct, const Thresholds& thresholds,
                           const ModelExtras& extras = {});

/// Batch miner: count the whole buffer, then build the model with loop and
/// long-distance analysis enabled.
CausalModel mine_log(const std::vector<Event>& log, const Thresholds& thresholds);
CausalModel mine_log(const ObservationPeriod& buffer, const Thresholds& thresholds);

/// Graphviz rendering with deterministic ordering; split kind is shown as
/// an AND/XOR label on outgoing edges of branching activities.
std::string export_dot(const CausalModel& model);

/// JSON rendering with sorted keys, stable across runs.
std::string export_model_json(const CausalModel& model);

}  // namespace streamhm
