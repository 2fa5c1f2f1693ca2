#pragma once

// Shared test helpers. The counting oracle here is deliberately naive
// (quadratic/cubic scans over whole traces) so it shares no logic with the
// single-pass counters it is used to check.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <system_error>
#include <vector>

#include "streamhm/event.hpp"
#include "streamhm/hm.hpp"
#include "streamhm/synth_gen.hpp"

#include <unistd.h>

namespace testutil {

// Concatenates traces into a log with case ids c0, c1, ... and seq 0..n-1.
inline std::vector<streamhm::Event> log_from_traces(
    const std::vector<std::vector<std::string>>& traces) {
  std::vector<streamhm::Event> log;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (const auto& activity : traces[i]) {
      log.push_back({seq++, "c" + std::to_string(i), activity});
    }
  }
  return log;
}

// Ten cases: five of <A,B1,B2,C,D> and five of <A,B2,B1,C,D>.
inline std::vector<streamhm::Event> running_example_log() {
  std::vector<std::vector<std::string>> traces;
  for (int i = 0; i < 5; ++i) traces.push_back({"A", "B1", "B2", "C", "D"});
  for (int i = 0; i < 5; ++i) traces.push_back({"A", "B2", "B1", "C", "D"});
  return log_from_traces(traces);
}

// Reference counter: reassembles whole traces, then scans each trace with
// nested loops straight from the relation definitions.
inline streamhm::SuccessionCounts brute_force_counts(
    const std::vector<streamhm::Event>& log) {
  std::map<std::string, std::vector<std::string>> traces;
  for (const auto& event : log) traces[event.case_id].push_back(event.activity);

  streamhm::SuccessionCounts counts;
  counts.num_cases = traces.size();
  for (const auto& [case_id, trace] : traces) {
    (void)case_id;
    const std::size_t n = trace.size();
    for (std::size_t i = 0; i < n; ++i) {
      counts.activity_count[trace[i]] += 1;
      if (i + 1 < n) counts.direct[{trace[i], trace[i + 1]}] += 1;
      if (i + 2 < n && trace[i] == trace[i + 2]) {
        counts.two_step[{trace[i], trace[i + 1]}] += 1;
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        bool interrupted = false;
        for (std::size_t k = i + 1; k < j; ++k) {
          if (trace[k] == trace[i] || trace[k] == trace[j]) {
            interrupted = true;
            break;
          }
        }
        if (!interrupted) counts.indirect[{trace[i], trace[j]}] += 1;
      }
    }
  }
  return counts;
}

// Random process tree over activities A..H, bounded depth.
inline streamhm::ProcessSpec random_spec(std::mt19937_64& rng, int depth = 0) {
  using streamhm::ProcessSpec;
  auto leaf = [&rng] {
    return ProcessSpec::activity(std::string(1, static_cast<char>('A' + rng() % 8)));
  };
  if (depth >= 3) return leaf();
  const std::uint64_t roll = rng() % (depth == 0 ? 4 : 6);
  switch (roll) {
    case 0: {
      std::vector<ProcessSpec> children;
      const std::size_t n = 2 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) children.push_back(random_spec(rng, depth + 1));
      return ProcessSpec::sequence(std::move(children));
    }
    case 1: {
      std::vector<ProcessSpec> children;
      std::vector<double> weights;
      const std::size_t n = 2 + rng() % 2;
      for (std::size_t i = 0; i < n; ++i) {
        children.push_back(random_spec(rng, depth + 1));
        weights.push_back(1.0 + static_cast<double>(rng() % 3));
      }
      return ProcessSpec::exclusive(std::move(children), std::move(weights));
    }
    case 2: {
      std::vector<ProcessSpec> children;
      children.push_back(random_spec(rng, depth + 1));
      children.push_back(random_spec(rng, depth + 1));
      return ProcessSpec::parallel(std::move(children));
    }
    case 3:
      return ProcessSpec::loop(random_spec(rng, depth + 1),
                               static_cast<double>(rng() % 50) / 100.0);
    default:
      return leaf();
  }
}

inline streamhm::StreamPlan random_plan(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  streamhm::StreamPlan plan;
  const std::size_t segments = 1 + rng() % 2;
  for (std::size_t i = 0; i < segments; ++i) {
    auto spec = random_spec(rng);
    plan.segments.push_back({std::move(spec), 5 + rng() % 16});
  }
  plan.max_concurrent = 1 + rng() % 4;
  plan.seed = rng();
  return plan;
}

inline bool models_equal(const streamhm::CausalModel& a, const streamhm::CausalModel& b) {
  return a.activities == b.activities && a.edges == b.edges && a.splits == b.splits &&
         a.joins == b.joins && a.self_loops == b.self_loops &&
         a.two_loops == b.two_loops && a.long_edges == b.long_edges;
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("streamhm_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testutil
