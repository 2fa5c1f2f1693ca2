#include "streamhm/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "streamhm/errors.hpp"
#include "streamhm/lossy_miner.hpp"
#include "streamhm/online_miner.hpp"
#include "streamhm/window_miner.hpp"

namespace streamhm {

namespace fs = std::filesystem;
using nlohmann::json;

MinerKind miner_kind_from_name(const std::string& name) {
  if (name == "window" || name == "shift") return MinerKind::kWindow;
  if (name == "reset") return MinerKind::kReset;
  if (name == "online" || name == "stationary") return MinerKind::kOnline;
  if (name == "aging") return MinerKind::kAging;
  if (name == "self_adapting" || name == "self-adapting") return MinerKind::kSelfAdapting;
  if (name == "lossy") return MinerKind::kLossy;
  throw InvalidArgument("unknown miner '" + name + "'");
}

const char* miner_kind_name(MinerKind kind) {
  switch (kind) {
    case MinerKind::kWindow: return "window";
    case MinerKind::kReset: return "reset";
    case MinerKind::kOnline: return "online";
    case MinerKind::kAging: return "aging";
    case MinerKind::kSelfAdapting: return "self_adapting";
    case MinerKind::kLossy: return "lossy";
  }
  return "unknown";
}

namespace {

std::size_t queue_bound(const std::optional<std::size_t>& override_value,
                        std::size_t capacity) {
  if (!override_value) return capacity;
  return *override_value == 0 ? kUnboundedQueue : *override_value;
}

class WindowAdapter : public AnyMiner {
 public:
  explicit WindowAdapter(const MinerConfig& config, BufferPolicy policy)
      : miner_({config.capacity, policy, config.trigger, config.thresholds, nullptr}) {}

  std::optional<CausalModel> observe(const Event& e) override { return miner_.observe(e); }
  CausalModel current_model() const override { return miner_.current_model(); }
  std::uint64_t entries_retained() const override { return miner_.entries_retained(); }

 private:
  WindowMiner miner_;
};

class OnlineAdapter : public AnyMiner {
 public:
  explicit OnlineAdapter(const MinerConfig& config, WeightPolicy policy) {
    OnlineMiner::Config c;
    c.max_qa = queue_bound(config.max_qa, config.capacity);
    c.max_qc = queue_bound(config.max_qc, config.capacity);
    c.max_qr = queue_bound(config.max_qr, config.capacity);
    c.policy = policy;
    c.alpha = policy == WeightPolicy::kSelfAdapting ? config.alpha0
              : policy == WeightPolicy::kAging      ? config.alpha
                                                    : 1.0;
    c.adaptation = {config.step_down, config.step_up, config.tolerance};
    c.mine_every = config.trigger;
    c.thresholds = config.thresholds;
    miner_ = std::make_unique<OnlineMiner>(std::move(c));
  }

  std::optional<CausalModel> observe(const Event& e) override { return miner_->observe(e); }
  CausalModel current_model() const override { return miner_->current_model(); }
  std::uint64_t entries_retained() const override { return miner_->entries_retained(); }
  double alpha() const override { return miner_->alpha(); }
  void adapt(double fitness_now, double fitness_previous) override {
    miner_->adapt(fitness_now, fitness_previous);
  }

 private:
  std::unique_ptr<OnlineMiner> miner_;
};

class LossyAdapter : public AnyMiner {
 public:
  explicit LossyAdapter(const MinerConfig& config)
      : miner_({config.epsilon, config.max_entries, config.trigger, config.thresholds}) {}

  std::optional<CausalModel> observe(const Event& e) override { return miner_.observe(e); }
  CausalModel current_model() const override { return miner_.current_model(); }
  std::uint64_t entries_retained() const override { return miner_.entries_retained(); }

 private:
  LossyMiner miner_;
};

}  // namespace

std::unique_ptr<AnyMiner> make_miner(const MinerConfig& config) {
  switch (config.kind) {
    case MinerKind::kWindow:
      return std::make_unique<WindowAdapter>(config, BufferPolicy::kShift);
    case MinerKind::kReset:
      return std::make_unique<WindowAdapter>(config, BufferPolicy::kReset);
    case MinerKind::kOnline:
      return std::make_unique<OnlineAdapter>(config, WeightPolicy::kStationary);
    case MinerKind::kAging:
      return std::make_unique<OnlineAdapter>(config, WeightPolicy::kAging);
    case MinerKind::kSelfAdapting:
      return std::make_unique<OnlineAdapter>(config, WeightPolicy::kSelfAdapting);
    case MinerKind::kLossy:
      return std::make_unique<LossyAdapter>(config);
  }
  throw InvalidArgument("unknown miner kind");
}

// --- configuration ----------------------------------------------------------

namespace {

Thresholds thresholds_from_json(const json& j) {
  Thresholds t;
  t.dependency = j.value("dependency", t.dependency);
  t.and_threshold = j.value("and", t.and_threshold);
  t.long_distance = j.value("long_distance", t.long_distance);
  t.loop_one = j.value("loop_one", t.loop_one);
  t.loop_two = j.value("loop_two", t.loop_two);
  t.relative_to_best = j.value("relative_to_best", t.relative_to_best);
  return t;
}

json thresholds_to_json(const Thresholds& t) {
  return json{{"dependency", t.dependency},       {"and", t.and_threshold},
              {"long_distance", t.long_distance}, {"loop_one", t.loop_one},
              {"loop_two", t.loop_two},           {"relative_to_best", t.relative_to_best}};
}

MinerConfig parse_miner_config(const json& j) {
  MinerConfig c;
  c.kind = miner_kind_from_name(j.value("miner", "online"));
  c.capacity = j.value("capacity", c.capacity);
  if (j.contains("max_qa")) c.max_qa = j["max_qa"].get<std::size_t>();
  if (j.contains("max_qc")) c.max_qc = j["max_qc"].get<std::size_t>();
  if (j.contains("max_qr")) c.max_qr = j["max_qr"].get<std::size_t>();
  c.epsilon = j.value("epsilon", c.epsilon);
  c.max_entries = j.value("max_entries", c.max_entries);
  c.alpha = j.value("alpha", c.alpha);
  c.alpha0 = j.value("alpha0", c.alpha0);
  c.step_down = j.value("step_down", c.step_down);
  c.step_up = j.value("step_up", c.step_up);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.trigger = j.value("trigger", c.trigger);
  if (j.contains("thresholds")) c.thresholds = thresholds_from_json(j["thresholds"]);
  return c;
}

json miner_config_to_json(const MinerConfig& c) {
  json j;
  j["miner"] = miner_kind_name(c.kind);
  j["capacity"] = c.capacity;
  if (c.max_qa) j["max_qa"] = *c.max_qa;
  if (c.max_qc) j["max_qc"] = *c.max_qc;
  if (c.max_qr) j["max_qr"] = *c.max_qr;
  j["epsilon"] = c.epsilon;
  j["max_entries"] = c.max_entries;
  j["alpha"] = c.alpha;
  j["alpha0"] = c.alpha0;
  j["step_down"] = c.step_down;
  j["step_up"] = c.step_up;
  j["tolerance"] = c.tolerance;
  j["trigger"] = c.trigger;
  j["thresholds"] = thresholds_to_json(c.thresholds);
  return j;
}

}  // namespace

MinerConfig miner_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad miner config: ") + e.what());
  }
  try {
    return parse_miner_config(j);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad miner config: ") + e.what());
  }
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad run config: ") + e.what());
  }
  RunConfig c;
  try {
    c.miner = parse_miner_config(j);
    c.eval_window = j.value("eval_window", c.eval_window);
    c.input_path = j.value("input", "");
    if (j.contains("connect")) {
      c.connect_host = j["connect"].value("host", "127.0.0.1");
      c.connect_port = j["connect"].value("port", std::uint16_t{0});
    }
    c.codec = codec_from_name(j.value("codec", "line"));
    std::string on_error = j.value("on_decode_error", "abort");
    if (on_error == "abort") c.on_decode_error = DecodeErrorPolicy::kAbort;
    else if (on_error == "skip") c.on_decode_error = DecodeErrorPolicy::kSkip;
    else throw InvalidArgument("on_decode_error must be abort or skip");
    c.out_dir = j.value("out_dir", "");
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
    c.timing = j.value("timing", c.timing);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad run config: ") + e.what());
  }
  if (c.input_path.empty() && c.connect_host.empty())
    throw InvalidArgument("run config needs input or connect");
  if (!c.input_path.empty() && !c.connect_host.empty())
    throw InvalidArgument("run config cannot have both input and connect");
  return c;
}

std::string RunConfig::to_json() const {
  json j = miner_config_to_json(miner);
  j["eval_window"] = eval_window;
  if (!input_path.empty()) j["input"] = input_path;
  if (!connect_host.empty())
    j["connect"] = {{"host", connect_host}, {"port", connect_port}};
  j["codec"] = codec_name(codec);
  j["on_decode_error"] = on_decode_error == DecodeErrorPolicy::kAbort ? "abort" : "skip";
  if (!out_dir.empty()) j["out_dir"] = out_dir;
  j["snapshot_every"] = snapshot_every;
  j["timing"] = timing;
  return j.dump(2) + "\n";
}

// --- run ----------------------------------------------------------------------

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

RunResult run(const RunConfig& config) {
  std::unique_ptr<AnyMiner> miner = make_miner(config.miner);
  EvalWindow window(config.eval_window);

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    if (config.snapshot_every > 0) fs::create_directories(config.out_dir + "/snapshots");
  }

  std::vector<Event> file_events;
  std::size_t file_pos = 0;
  std::unique_ptr<StreamReader> reader;
  if (!config.input_path.empty()) {
    file_events = read_log_file(config.input_path);
  } else {
    reader = std::make_unique<StreamReader>(
        config.connect_host, config.connect_port,
        ReaderOptions{config.codec, config.on_decode_error});
  }
  auto next_event = [&]() -> std::optional<Event> {
    if (reader) return reader->next();
    if (file_pos >= file_events.size()) return std::nullopt;
    return file_events[file_pos++];
  };

  RunResult result;
  double prev_fitness = 0.0;
  bool have_prev_fitness = false;
  double total_micros = 0.0;
  double interval_micros = 0.0;
  std::uint64_t interval_events = 0;
  std::uint64_t index = 0;

  while (std::optional<Event> e = next_event()) {
    e->seq_no = index;  // number by arrival so sources behave identically

    auto start = std::chrono::steady_clock::now();
    window.push(*e);
    std::optional<CausalModel> model = miner->observe(*e);
    if (config.timing) {
      auto end = std::chrono::steady_clock::now();
      double micros =
          std::chrono::duration<double, std::micro>(end - start).count();
      total_micros += micros;
      interval_micros += micros;
    }
    ++interval_events;

    result.peak_entries =
        std::max(result.peak_entries, miner->entries_retained() + window.size());

    if (model) {
      ++result.triggers;
      MetricPoint p;
      p.seq_no = index;
      p.fitness = window_fitness(*model, window);
      p.precision = window_precision(*model, window);
      p.alpha = miner->alpha();
      p.entries = miner->entries_retained();
      p.micros_per_event =
          config.timing && interval_events > 0
              ? interval_micros / static_cast<double>(interval_events)
              : 0.0;
      result.metrics.points.push_back(p);
      interval_micros = 0.0;
      interval_events = 0;

      if (have_prev_fitness) miner->adapt(p.fitness, prev_fitness);
      prev_fitness = p.fitness;
      have_prev_fitness = true;

      if (!config.out_dir.empty() && config.snapshot_every > 0 &&
          result.triggers % config.snapshot_every == 0) {
        write_text_file(config.out_dir + "/snapshots/model_" + std::to_string(index) +
                            ".json",
                        export_model_json(*model));
      }
    }
    ++index;
  }

  result.events = index;
  result.final_model = miner->current_model();
  result.micros_per_event =
      config.timing && index > 0 ? total_micros / static_cast<double>(index) : 0.0;
  result.alpha_final = miner->alpha();
  if (reader) result.decode_warnings = reader->warnings();

  if (!config.out_dir.empty()) {
    write_text_file(config.out_dir + "/metrics.csv", metrics_to_csv(result.metrics));
    write_text_file(config.out_dir + "/model.json", export_model_json(result.final_model));
    write_text_file(config.out_dir + "/model.dot", export_dot(result.final_model));
    json summary;
    summary["miner"] = miner_kind_name(config.miner.kind);
    summary["events"] = result.events;
    summary["triggers"] = result.triggers;
    summary["peak_entries"] = result.peak_entries;
    summary["micros_per_event"] = result.micros_per_event;
    summary["alpha_final"] = result.alpha_final;
    summary["decode_warnings"] = result.decode_warnings;
    summary["eval_window"] = config.eval_window;
    summary["trigger"] = config.miner.trigger;
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");
  }
  return result;
}

// --- comparison -----------------------------------------------------------------

std::string compare_runs(const std::vector<std::string>& run_dirs) {
  if (run_dirs.empty()) throw InvalidArgument("compare needs at least one run directory");

  std::map<std::string, std::vector<MetricSeries>> by_kind;
  for (const std::string& dir : run_dirs) {
    std::ifstream in(dir + "/summary.json", std::ios::binary);
    if (!in) throw IoError("cannot open '" + dir + "/summary.json'");
    json summary;
    try {
      in >> summary;
    } catch (const json::exception& e) {
      throw IoError("bad summary in '" + dir + "': " + e.what());
    }
    std::string kind = summary.value("miner", "unknown");
    by_kind[kind].push_back(read_metrics_csv(dir + "/metrics.csv"));
  }

  std::string out = "miner,seq_no,fitness_mean,fitness_var,precision_mean,precision_var,runs\n";
  char buf[160];
  for (const auto& [kind, series_list] : by_kind) {
    // Join on seq_no: keep rows present in every run of this kind.
    std::map<std::uint64_t, std::vector<const MetricPoint*>> rows;
    for (const MetricSeries& series : series_list)
      for (const MetricPoint& p : series.points) rows[p.seq_no].push_back(&p);
    for (const auto& [seq_no, points] : rows) {
      if (points.size() != series_list.size()) continue;
      double n = static_cast<double>(points.size());
      double fit_mean = 0.0, prec_mean = 0.0;
      for (const MetricPoint* p : points) {
        fit_mean += p->fitness;
        prec_mean += p->precision;
      }
      fit_mean /= n;
      prec_mean /= n;
      double fit_var = 0.0, prec_var = 0.0;
      for (const MetricPoint* p : points) {
        fit_var += (p->fitness - fit_mean) * (p->fitness - fit_mean);
        prec_var += (p->precision - prec_mean) * (p->precision - prec_mean);
      }
      fit_var /= n;
      prec_var /= n;
      std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.17g,%.17g,%.17g,%zu\n",
                    kind.c_str(), static_cast<unsigned long long>(seq_no), fit_mean,
                    fit_var, prec_mean, prec_var, points.size());
      out += buf;
    }
  }
  return out;
}

}  // namespace streamhm
