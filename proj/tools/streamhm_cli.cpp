// Command-line front end. All engine work goes through the C API in
// streamhm/streamhm.h; this file only parses arguments, assembles JSON
// configurations, and shuttles files.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamhm/streamhm.h"

namespace {

using nlohmann::json;

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted = true; }

[[noreturn]] void die(const char* verb) {
  std::cerr << "error: " << verb << ": " << shm_last_error() << "\n";
  std::exit(1);
}

std::string owned(char* s) {
  std::string out = s == nullptr ? "" : s;
  shm_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    std::exit(1);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Bare relative output paths land in $STREAMHM_OUT_DIR when it is set.
std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("STREAMHM_OUT_DIR");
  if (dir == nullptr || dir[0] == '\0' || path.empty() || path[0] == '/')
    return path;
  return std::string(dir) + "/" + path;
}

struct MineOptions {
  std::string config_path;
  std::string input;
  std::string connect;
  std::string miner = "online";
  std::string codec = "line";
  std::string out_dir;
  std::size_t capacity = 100;
  std::int64_t max_qa = -1;  // -1: follow capacity, 0: unbounded
  std::int64_t max_qc = -1;
  std::int64_t max_qr = -1;
  double epsilon = 0.01;
  std::size_t max_entries = 0;
  double alpha = 0.997;
  double alpha0 = 1.0;
  double step_down = 0.02;
  double step_up = 0.005;
  double tolerance = 0.01;
  std::uint64_t trigger = 50;
  std::size_t eval_window = 200;
  std::uint64_t snapshot_every = 0;
  bool skip_bad = false;
  bool no_timing = false;
  double dependency = 0.9;
  double and_threshold = 0.1;
  double long_distance = 0.9;
  double loop_one = 0.9;
  double loop_two = 0.9;
  double relative_to_best = 0.0;
};

json build_run_config(const MineOptions& opt, const CLI::App& cmd) {
  json config = json::object();
  if (!opt.config_path.empty()) {
    try {
      config = json::parse(read_file(opt.config_path));
    } catch (const json::exception& e) {
      std::cerr << "error: bad config file: " << e.what() << "\n";
      std::exit(1);
    }
  }
  auto given = [&](const std::string& flag) { return cmd.count(flag) > 0; };

  if (given("--input")) config["input"] = opt.input;
  if (given("--connect")) {
    std::size_t colon = opt.connect.rfind(':');
    if (colon == std::string::npos) {
      std::cerr << "error: --connect expects host:port\n";
      std::exit(1);
    }
    config["connect"] = {{"host", opt.connect.substr(0, colon)},
                         {"port", std::stoi(opt.connect.substr(colon + 1))}};
  }
  if (given("--miner") || !config.contains("miner")) config["miner"] = opt.miner;
  if (given("--codec") || !config.contains("codec")) config["codec"] = opt.codec;
  if (given("--out-dir")) config["out_dir"] = resolve_output(opt.out_dir);
  if (given("--capacity")) config["capacity"] = opt.capacity;
  if (given("--max-qa")) config["max_qa"] = opt.max_qa;
  if (given("--max-qc")) config["max_qc"] = opt.max_qc;
  if (given("--max-qr")) config["max_qr"] = opt.max_qr;
  if (given("--epsilon")) config["epsilon"] = opt.epsilon;
  if (given("--max-entries")) config["max_entries"] = opt.max_entries;
  if (given("--alpha")) config["alpha"] = opt.alpha;
  if (given("--alpha0")) config["alpha0"] = opt.alpha0;
  if (given("--step-down")) config["step_down"] = opt.step_down;
  if (given("--step-up")) config["step_up"] = opt.step_up;
  if (given("--adapt-tolerance")) config["tolerance"] = opt.tolerance;
  if (given("--trigger")) config["trigger"] = opt.trigger;
  if (given("--eval-window")) config["eval_window"] = opt.eval_window;
  if (given("--snapshot-every")) config["snapshot_every"] = opt.snapshot_every;
  if (given("--skip-bad")) config["on_decode_error"] = "skip";
  if (given("--no-timing")) config["timing"] = false;

  json thresholds =
      config.contains("thresholds") ? config["thresholds"] : json::object();
  if (given("--dependency") || !thresholds.contains("dependency"))
    thresholds["dependency"] = opt.dependency;
  if (given("--and") || !thresholds.contains("and"))
    thresholds["and"] = opt.and_threshold;
  if (given("--long-distance") || !thresholds.contains("long_distance"))
    thresholds["long_distance"] = opt.long_distance;
  if (given("--loop-one") || !thresholds.contains("loop_one"))
    thresholds["loop_one"] = opt.loop_one;
  if (given("--loop-two") || !thresholds.contains("loop_two"))
    thresholds["loop_two"] = opt.loop_two;
  if (given("--relative-to-best") || !thresholds.contains("relative_to_best"))
    thresholds["relative_to_best"] = opt.relative_to_best;
  config["thresholds"] = thresholds;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-memory process discovery over event streams"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Expand a stream plan into a log file");
  std::string plan_path;
  std::string generate_out = "stream.log";
  generate->add_option("--plan", plan_path, "Stream plan JSON file")->required();
  generate->add_option("--out", generate_out, "Output log file (default stream.log)");

  // merge
  auto* merge = app.add_subcommand("merge", "Merge log files into one drifting stream");
  std::vector<std::string> merge_inputs;
  std::vector<double> merge_overlaps;
  std::string merge_out = "merged.log";
  merge->add_option("inputs", merge_inputs, "Input log files in segment order")
      ->required()
      ->expected(-1);
  merge->add_option("--overlap", merge_overlaps,
                    "Overlap fraction per boundary (one value applies to all)");
  merge->add_option("--out", merge_out, "Output log file (default merged.log)");

  // serve
  auto* serve = app.add_subcommand("serve", "Replay a log file over TCP");
  std::string serve_log;
  std::string serve_host = "0.0.0.0";
  std::uint16_t serve_port = 0;
  std::string serve_codec = "line";
  std::uint64_t serve_delay_us = 0;
  bool serve_loop = false;
  serve->add_option("--log", serve_log, "Log file to replay")->required();
  serve->add_option("--host", serve_host, "Bind address (default 0.0.0.0)");
  serve->add_option("--port", serve_port, "Port (default 0: ephemeral)");
  serve->add_option("--codec", serve_codec, "Wire codec: line or xes");
  serve->add_option("--delay-us", serve_delay_us, "Delay between events in microseconds");
  serve->add_flag("--loop", serve_loop, "Restart the log after the last event");

  // mine
  auto* mine = app.add_subcommand("mine", "Run a streaming miner over a log or socket");
  MineOptions opt;
  mine->add_option("--config", opt.config_path, "Run configuration JSON file");
  mine->add_option("--input", opt.input, "Line-protocol log file");
  mine->add_option("--connect", opt.connect, "host:port of a stream source");
  mine->add_option("--miner", opt.miner,
                   "window | reset | online | aging | self_adapting | lossy");
  mine->add_option("--codec", opt.codec, "Wire codec for --connect: line or xes");
  mine->add_option("--out-dir", opt.out_dir, "Directory for metrics and models");
  mine->add_option("--capacity", opt.capacity, "Buffer size / queue default (100)");
  mine->add_option("--max-qa", opt.max_qa, "Activity queue bound (0: unbounded)");
  mine->add_option("--max-qc", opt.max_qc, "Case queue bound (0: unbounded)");
  mine->add_option("--max-qr", opt.max_qr, "Relation queue bound (0: unbounded)");
  mine->add_option("--epsilon", opt.epsilon, "Lossy counting error bound (0.01)");
  mine->add_option("--max-entries", opt.max_entries, "Lossy hard entry cap (0: off)");
  mine->add_option("--alpha", opt.alpha, "Aging factor (0.997)");
  mine->add_option("--alpha0", opt.alpha0, "Self-adapting start alpha (1.0)");
  mine->add_option("--step-down", opt.step_down, "Self-adapting decrement (0.02)");
  mine->add_option("--step-up", opt.step_up, "Self-adapting increment (0.005)");
  mine->add_option("--adapt-tolerance", opt.tolerance, "Fitness drop tolerance (0.01)");
  mine->add_option("--trigger", opt.trigger, "Mine every n events (50)");
  mine->add_option("--eval-window", opt.eval_window, "Evaluation window size (200)");
  mine->add_option("--snapshot-every", opt.snapshot_every,
                   "Dump a model snapshot every k triggers (0: off)");
  mine->add_flag("--skip-bad", opt.skip_bad, "Skip undecodable stream payloads");
  mine->add_flag("--no-timing", opt.no_timing,
                 "Zero the timing column for byte-reproducible output");
  mine->add_option("--dependency", opt.dependency, "Dependency threshold (0.9)");
  mine->add_option("--and", opt.and_threshold, "AND threshold (0.1)");
  mine->add_option("--long-distance", opt.long_distance, "Long-distance threshold (0.9)");
  mine->add_option("--loop-one", opt.loop_one, "Length-one loop threshold (0.9)");
  mine->add_option("--loop-two", opt.loop_two, "Length-two loop threshold (0.9)");
  mine->add_option("--relative-to-best", opt.relative_to_best,
                   "Relative-to-best pruning margin (0: off)");

  // compare
  auto* compare = app.add_subcommand("compare", "Aggregate metrics across run dirs");
  std::vector<std::string> compare_dirs;
  std::string compare_out;
  compare->add_option("dirs", compare_dirs, "Run directories")->required()->expected(-1);
  compare->add_option("--out", compare_out, "Output CSV (default stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Confidence bounds for mined measures");
  std::string bounds_kind = "pair";
  double delta = 0.05;
  std::uint64_t nc = 0;
  double rho_ab = 0, rho_ba = 0, rho_ac = 0, rho_bc = 0, rho_cb = 0;
  double xi_ab = 1, xi_ba = 1, xi_ac = 1, xi_bc = 1, xi_cb = 1;
  bounds->add_option("--kind", bounds_kind, "pair (dependency) or and (split)");
  bounds->add_option("--delta", delta, "Confidence parameter (0.05)");
  bounds->add_option("--nc", nc, "Observed cases")->required();
  bounds->add_option("--rho-ab", rho_ab, "Mean per-case a>b successions");
  bounds->add_option("--rho-ba", rho_ba, "Mean per-case b>a successions");
  bounds->add_option("--rho-ac", rho_ac, "Mean per-case a>c successions");
  bounds->add_option("--rho-bc", rho_bc, "Mean per-case b>c successions");
  bounds->add_option("--rho-cb", rho_cb, "Mean per-case c>b successions");
  bounds->add_option("--xi-ab", xi_ab, "Max per-case a>b successions (1)");
  bounds->add_option("--xi-ba", xi_ba, "Max per-case b>a successions (1)");
  bounds->add_option("--xi-ac", xi_ac, "Max per-case a>c successions (1)");
  bounds->add_option("--xi-bc", xi_bc, "Max per-case b>c successions (1)");
  bounds->add_option("--xi-cb", xi_cb, "Max per-case c>b successions (1)");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    std::string out_path = resolve_output(generate_out);
    if (shm_generate(read_file(plan_path).c_str(), out_path.c_str()) != SHM_OK)
      die("generate");
    std::cout << out_path << "\n";
    return 0;
  }

  if (merge->parsed()) {
    std::vector<const char*> inputs;
    for (const std::string& path : merge_inputs) inputs.push_back(path.c_str());
    std::string out_path = resolve_output(merge_out);
    if (shm_merge(inputs.data(), inputs.size(), merge_overlaps.data(),
                  merge_overlaps.size(), out_path.c_str()) != SHM_OK)
      die("merge");
    std::cout << out_path << "\n";
    return 0;
  }

  if (serve->parsed()) {
    json options = {{"host", serve_host},
                    {"port", serve_port},
                    {"codec", serve_codec},
                    {"delay_us", serve_delay_us},
                    {"loop", serve_loop}};
    shm_server* server = nullptr;
    if (shm_serve(serve_log.c_str(), options.dump().c_str(), &server) != SHM_OK)
      die("serve");
    std::uint16_t port = 0;
    shm_server_port(server, &port);
    std::cout << "listening on port " << port << "\n" << std::flush;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    shm_server_stop(server);
    shm_server_free(server);
    return 0;
  }

  if (mine->parsed()) {
    json config = build_run_config(opt, *mine);
    char* summary = nullptr;
    if (shm_run(config.dump().c_str(), &summary) != SHM_OK) die("mine");
    std::cout << owned(summary);
    return 0;
  }

  if (compare->parsed()) {
    std::vector<const char*> dirs;
    for (const std::string& dir : compare_dirs) dirs.push_back(dir.c_str());
    char* csv = nullptr;
    if (shm_compare(dirs.data(), dirs.size(), &csv) != SHM_OK) die("compare");
    std::string text = owned(csv);
    if (compare_out.empty()) {
      std::cout << text;
    } else {
      std::string out_path = resolve_output(compare_out);
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot open '" << out_path << "'\n";
        return 1;
      }
      out << text;
      std::cout << out_path << "\n";
    }
    return 0;
  }

  if (bounds->parsed()) {
    json result;
    if (bounds_kind == "pair") {
      double eps = 0, lower = 0, upper = 0;
      if (shm_epsilon_pair(xi_ab, xi_ba, delta, nc, &eps) != SHM_OK) die("bounds");
      if (shm_dependency_bounds(rho_ab, rho_ba, xi_ab, xi_ba, delta, nc, &lower,
                                &upper) != SHM_OK)
        die("bounds");
      result = {{"epsilon", eps}, {"lower", lower}, {"upper", upper}};
    } else if (bounds_kind == "and") {
      double eps_x = 0, eps_y = 0, lower = 0, upper = 0;
      if (shm_epsilon_pair(xi_bc, xi_cb, delta, nc, &eps_x) != SHM_OK) die("bounds");
      if (shm_epsilon_triple(xi_ab, xi_ac, delta, nc, &eps_y) != SHM_OK) die("bounds");
      if (shm_and_bounds(rho_bc, rho_cb, rho_ab, rho_ac, xi_bc, xi_cb, xi_ab, xi_ac,
                         delta, nc, &lower, &upper) != SHM_OK)
        die("bounds");
      result = {{"epsilon_numerator", eps_x},
                {"epsilon_denominator", eps_y},
                {"lower", lower},
                {"upper", upper}};
    } else {
      std::cerr << "error: --kind must be pair or and\n";
      return 1;
    }
    std::cout << result.dump(2) << "\n";
    return 0;
  }

  return 0;
}
