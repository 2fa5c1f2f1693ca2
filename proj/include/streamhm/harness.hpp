#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "streamhm/evaluation.hpp"
#include "streamhm/event.hpp"
#include "streamhm/hm.hpp"
#include "streamhm/stream_net.hpp"

namespace streamhm {

enum class MinerKind {
  kWindow,        // sliding buffer, batch re-mine
  kReset,         // resetting buffer, batch re-mine
  kOnline,        // MRU queues, stationary weights
  kAging,         // MRU queues, exponential decay
  kSelfAdapting,  // MRU queues, fitness-steered decay
  kLossy,         // lossy-counting tables
};

MinerKind miner_kind_from_name(const std::string& name);
const char* miner_kind_name(MinerKind kind);

struct MinerConfig {
  MinerKind kind = MinerKind::kOnline;
  std::size_t capacity = 100;  // window buffer size and queue default
  // Queue overrides: unset falls back to capacity, 0 means unbounded.
  std::optional<std::size_t> max_qa;
  std::optional<std::size_t> max_qc;
  std::optional<std::size_t> max_qr;
  double epsilon = 0.01;
  std::size_t max_entries = 0;
  double alpha = 0.997;       // aging
  double alpha0 = 1.0;        // self-adapting start
  double step_down = 0.02;
  double step_up = 0.005;
  double tolerance = 0.01;
  std::uint64_t trigger = 50;  // mining cadence in events; 0 disables
  Thresholds thresholds;
};

/// Uniform driver interface over the miner variants.
class AnyMiner {
 public:
  virtual ~AnyMiner() = default;
  virtual std::optional<CausalModel> observe(const Event& e) = 0;
  virtual CausalModel current_model() const = 0;
  virtual std::uint64_t entries_retained() const = 0;
  virtual double alpha() const { return 1.0; }
  virtual void adapt(double /*fitness_now*/, double /*fitness_previous*/) {}
};

std::unique_ptr<AnyMiner> make_miner(const MinerConfig& config);

/// Parses the miner-related keys of a configuration object; unknown keys
/// are ignored so a full run configuration is accepted as well.
MinerConfig miner_config_from_json(const std::string& text);

struct RunConfig {
  MinerConfig miner;
  std::size_t eval_window = 200;

  std::string input_path;  // line-protocol log file, or
  std::string connect_host;  // network source
  std::uint16_t connect_port = 0;
  Codec codec = Codec::kLine;
  DecodeErrorPolicy on_decode_error = DecodeErrorPolicy::kAbort;

  std::string out_dir;  // empty: keep results in memory only
  std::uint64_t snapshot_every = 0;  // model snapshot every k-th trigger
  bool timing = true;  // false zeroes the timing column for reproducible output

  static RunConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct RunResult {
  MetricSeries metrics;
  CausalModel final_model;
  std::uint64_t events = 0;
  std::uint64_t triggers = 0;
  std::uint64_t peak_entries = 0;  // miner tables plus evaluation window
  double micros_per_event = 0.0;
  double alpha_final = 1.0;
  std::uint64_t decode_warnings = 0;
};

/// Feeds the configured source through the miner, sampling fitness and
/// precision at every mining trigger; events are numbered by arrival.
/// With out_dir set, writes metrics.csv, model.json, model.dot and
/// summary.json (plus snapshots/) into it.
RunResult run(const RunConfig& config);

/// Aggregates metrics.csv across run directories: runs of the same miner
/// kind are joined on seq_no and reduced to mean and population variance.
/// Returns CSV with header
/// miner,seq_no,fitness_mean,fitness_var,precision_mean,precision_var,runs.
std::string compare_runs(const std::vector<std::string>& run_dirs);

}  // namespace streamhm
