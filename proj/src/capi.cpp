#include "streamhm/streamhm.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "streamhm/bounds.hpp"
#include "streamhm/errors.hpp"
#include "streamhm/harness.hpp"
#include "streamhm/stream_net.hpp"
#include "streamhm/synth_gen.hpp"

namespace {

thread_local std::string g_last_error = "no error";

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

shm_status fail(shm_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <typename Fn>
shm_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return SHM_OK;
  } catch (const streamhm::InvalidArgument& e) {
    return fail(SHM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const streamhm::DecodeError& e) {
    return fail(SHM_ERR_DECODE, e.what());
  } catch (const streamhm::NotFoundError& e) {
    return fail(SHM_ERR_NOT_FOUND, e.what());
  } catch (const streamhm::IoError& e) {
    return fail(SHM_ERR_IO, e.what());
  } catch (const streamhm::NetworkError& e) {
    return fail(SHM_ERR_NETWORK, e.what());
  } catch (const std::exception& e) {
    return fail(SHM_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(SHM_ERR_RUNTIME, "unknown error");
  }
}

shm_status require(bool ok, const char* what) {
  return ok ? SHM_OK : fail(SHM_ERR_INVALID_ARGUMENT, what);
}

}  // namespace

struct shm_miner {
  std::unique_ptr<streamhm::AnyMiner> impl;
};

struct shm_server {
  std::unique_ptr<streamhm::StreamServer> impl;
};

extern "C" {

const char* shm_version(void) { return "1.0.0"; }

const char* shm_last_error(void) { return g_last_error.c_str(); }

void shm_string_free(char* s) { std::free(s); }

// --- event codecs ----------------------------------------------------------

shm_status shm_encode_line(uint64_t seq_no, const char* case_id, const char* activity,
                           char** out_line) {
  if (shm_status s = require(case_id && activity && out_line, "null argument")) return s;
  return guarded([&] {
    *out_line = copy_string(streamhm::encode_line({seq_no, case_id, activity}));
  });
}

shm_status shm_decode_line(const char* line, uint64_t* out_seq_no, char** out_case_id,
                           char** out_activity) {
  if (shm_status s =
          require(line && out_seq_no && out_case_id && out_activity, "null argument"))
    return s;
  return guarded([&] {
    streamhm::Event e = streamhm::decode_line(line);
    *out_seq_no = e.seq_no;
    *out_case_id = copy_string(e.case_id);
    *out_activity = copy_string(e.activity);
  });
}

shm_status shm_decode_xes_fragment(const char* fragment, char** out_case_id,
                                   char** out_activity) {
  if (shm_status s = require(fragment && out_case_id && out_activity, "null argument"))
    return s;
  return guarded([&] {
    streamhm::Event e = streamhm::decode_xes_fragment(fragment);
    *out_case_id = copy_string(e.case_id);
    *out_activity = copy_string(e.activity);
  });
}

// --- miners ------------------------------------------------------------------

shm_status shm_miner_create(const char* config_json, shm_miner** out_miner) {
  if (shm_status s = require(config_json && out_miner, "null argument")) return s;
  return guarded([&] {
    streamhm::MinerConfig config = streamhm::miner_config_from_json(config_json);
    auto miner = std::make_unique<shm_miner>();
    miner->impl = streamhm::make_miner(config);
    *out_miner = miner.release();
  });
}

void shm_miner_free(shm_miner* miner) { delete miner; }

shm_status shm_miner_observe(shm_miner* miner, uint64_t seq_no, const char* case_id,
                             const char* activity, char** out_model_json) {
  if (shm_status s = require(miner && case_id && activity, "null argument")) return s;
  return guarded([&] {
    if (out_model_json) *out_model_json = nullptr;
    std::optional<streamhm::CausalModel> model =
        miner->impl->observe({seq_no, case_id, activity});
    if (model && out_model_json)
      *out_model_json = copy_string(streamhm::export_model_json(*model));
  });
}

shm_status shm_miner_model_json(const shm_miner* miner, char** out_json) {
  if (shm_status s = require(miner && out_json, "null argument")) return s;
  return guarded([&] {
    *out_json = copy_string(streamhm::export_model_json(miner->impl->current_model()));
  });
}

shm_status shm_miner_model_dot(const shm_miner* miner, char** out_dot) {
  if (shm_status s = require(miner && out_dot, "null argument")) return s;
  return guarded([&] {
    *out_dot = copy_string(streamhm::export_dot(miner->impl->current_model()));
  });
}

shm_status shm_miner_entries(const shm_miner* miner, uint64_t* out_entries) {
  if (shm_status s = require(miner && out_entries, "null argument")) return s;
  return guarded([&] { *out_entries = miner->impl->entries_retained(); });
}

shm_status shm_miner_alpha(const shm_miner* miner, double* out_alpha) {
  if (shm_status s = require(miner && out_alpha, "null argument")) return s;
  return guarded([&] { *out_alpha = miner->impl->alpha(); });
}

shm_status shm_miner_adapt(shm_miner* miner, double fitness_now,
                           double fitness_previous) {
  if (shm_status s = require(miner != nullptr, "null argument")) return s;
  return guarded([&] { miner->impl->adapt(fitness_now, fitness_previous); });
}

// --- confidence bounds --------------------------------------------------------

shm_status shm_epsilon_pair(double xi_ab, double xi_ba, double delta, uint64_t nc,
                            double* out_epsilon) {
  if (shm_status s = require(out_epsilon != nullptr, "null argument")) return s;
  return guarded([&] { *out_epsilon = streamhm::epsilon_pair(xi_ab, xi_ba, delta, nc); });
}

shm_status shm_epsilon_triple(double xi_ab, double xi_ac, double delta, uint64_t nc,
                              double* out_epsilon) {
  if (shm_status s = require(out_epsilon != nullptr, "null argument")) return s;
  return guarded(
      [&] { *out_epsilon = streamhm::epsilon_triple(xi_ab, xi_ac, delta, nc); });
}

shm_status shm_dependency_bounds(double rho_ab, double rho_ba, double xi_ab,
                                 double xi_ba, double delta, uint64_t nc,
                                 double* out_lower, double* out_upper) {
  if (shm_status s = require(out_lower && out_upper, "null argument")) return s;
  return guarded([&] {
    streamhm::Interval interval =
        streamhm::dependency_bounds(rho_ab, rho_ba, xi_ab, xi_ba, delta, nc);
    *out_lower = interval.lower;
    *out_upper = interval.upper;
  });
}

shm_status shm_and_bounds(double rho_bc, double rho_cb, double rho_ab, double rho_ac,
                          double xi_bc, double xi_cb, double xi_ab, double xi_ac,
                          double delta, uint64_t nc, double* out_lower,
                          double* out_upper) {
  if (shm_status s = require(out_lower && out_upper, "null argument")) return s;
  return guarded([&] {
    streamhm::Interval interval = streamhm::and_bounds(
        rho_bc, rho_cb, rho_ab, rho_ac, xi_bc, xi_cb, xi_ab, xi_ac, delta, nc);
    *out_lower = interval.lower;
    *out_upper = interval.upper;
  });
}

// --- synthetic streams and merging ---------------------------------------------

shm_status shm_generate(const char* plan_json, const char* out_path) {
  if (shm_status s = require(plan_json && out_path, "null argument")) return s;
  return guarded([&] {
    streamhm::StreamPlan plan = streamhm::StreamPlan::from_json(plan_json);
    streamhm::write_log_file(streamhm::generate_stream(plan), out_path);
  });
}

shm_status shm_merge(const char* const* input_paths, size_t n_inputs,
                     const double* overlaps, size_t n_overlaps, const char* out_path) {
  if (shm_status s = require(input_paths && out_path, "null argument")) return s;
  if (shm_status s = require(n_overlaps == 0 || overlaps != nullptr, "null overlaps"))
    return s;
  return guarded([&] {
    streamhm::MergeSpec spec;
    for (size_t i = 0; i < n_inputs; ++i) {
      if (input_paths[i] == nullptr) throw streamhm::InvalidArgument("null input path");
      spec.segments.push_back(streamhm::read_log_file(input_paths[i]));
    }
    spec.overlaps.assign(overlaps, overlaps + n_overlaps);
    streamhm::write_log_file(streamhm::merge_logs(spec), out_path);
  });
}

// --- network source --------------------------------------------------------------

shm_status shm_serve(const char* log_path, const char* options_json,
                     shm_server** out_server) {
  if (shm_status s = require(log_path && out_server, "null argument")) return s;
  return guarded([&] {
    streamhm::ServeOptions options;
    if (options_json != nullptr && options_json[0] != '\0') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(options_json);
      } catch (const nlohmann::json::exception& e) {
        throw streamhm::InvalidArgument(std::string("bad serve options: ") + e.what());
      }
      options.host = j.value("host", options.host);
      options.port = j.value("port", options.port);
      options.codec = streamhm::codec_from_name(j.value("codec", "line"));
      options.inter_event_delay = std::chrono::microseconds(j.value("delay_us", 0));
      options.loop = j.value("loop", false);
    }
    auto server = std::make_unique<shm_server>();
    server->impl = std::make_unique<streamhm::StreamServer>(
        streamhm::read_log_file(log_path), options);
    *out_server = server.release();
  });
}

shm_status shm_server_port(const shm_server* server, uint16_t* out_port) {
  if (shm_status s = require(server && out_port, "null argument")) return s;
  return guarded([&] { *out_port = server->impl->port(); });
}

shm_status shm_server_stop(shm_server* server) {
  if (shm_status s = require(server != nullptr, "null argument")) return s;
  return guarded([&] { server->impl->stop(); });
}

void shm_server_free(shm_server* server) { delete server; }

// --- whole runs --------------------------------------------------------------------

shm_status shm_run(const char* run_config_json, char** out_summary_json) {
  if (shm_status s = require(run_config_json != nullptr, "null argument")) return s;
  return guarded([&] {
    streamhm::RunConfig config = streamhm::RunConfig::from_json(run_config_json);
    streamhm::RunResult result = streamhm::run(config);
    if (out_summary_json != nullptr) {
      nlohmann::json summary;
      summary["miner"] = streamhm::miner_kind_name(config.miner.kind);
      summary["events"] = result.events;
      summary["triggers"] = result.triggers;
      summary["peak_entries"] = result.peak_entries;
      summary["micros_per_event"] = result.micros_per_event;
      summary["alpha_final"] = result.alpha_final;
      summary["decode_warnings"] = result.decode_warnings;
      *out_summary_json = copy_string(summary.dump(2) + "\n");
    }
  });
}

shm_status shm_compare(const char* const* run_dirs, size_t n_dirs, char** out_csv) {
  if (shm_status s = require(run_dirs && out_csv, "null argument")) return s;
  return guarded([&] {
    std::vector<std::string> dirs;
    for (size_t i = 0; i < n_dirs; ++i) {
      if (run_dirs[i] == nullptr) throw streamhm::InvalidArgument("null run directory");
      dirs.emplace_back(run_dirs[i]);
    }
    *out_csv = copy_string(streamhm::compare_runs(dirs));
  });
}

}  // extern "C"
