#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "streamhm/errors.hpp"
#include "streamhm/harness.hpp"
#include "streamhm/synth_gen.hpp"

using namespace streamhm;
using doctest::Approx;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

// 100 two-step cases, then 40 ten-step cases over a fresh alphabet: a sharp
// drift at event 200, fully deterministic at concurrency one.
std::vector<Event> make_drifting_log() {
  using PS = ProcessSpec;
  std::vector<PS> s1;
  s1.push_back(PS::activity("A"));
  s1.push_back(PS::activity("B"));
  std::vector<PS> s2;
  for (int i = 1; i <= 10; ++i) s2.push_back(PS::activity("X" + std::to_string(i)));

  StreamPlan plan;
  plan.segments.push_back({PS::sequence(std::move(s1)), 100});
  plan.segments.push_back({PS::sequence(std::move(s2)), 40});
  plan.max_concurrent = 1;
  plan.seed = 3;
  return generate_stream(plan);
}

RunConfig base_config(const std::string& input, MinerKind kind) {
  RunConfig config;
  config.miner.kind = kind;
  config.miner.capacity = 100;
  config.miner.trigger = 50;
  config.eval_window = 200;
  config.input_path = input;
  config.timing = false;  // reproducible byte-for-byte outputs
  return config;
}

}  // namespace

TEST_CASE("miner kind names round-trip, with aliases") {
  CHECK(miner_kind_from_name("window") == MinerKind::kWindow);
  CHECK(miner_kind_from_name("shift") == MinerKind::kWindow);
  CHECK(miner_kind_from_name("reset") == MinerKind::kReset);
  CHECK(miner_kind_from_name("online") == MinerKind::kOnline);
  CHECK(miner_kind_from_name("stationary") == MinerKind::kOnline);
  CHECK(miner_kind_from_name("aging") == MinerKind::kAging);
  CHECK(miner_kind_from_name("self_adapting") == MinerKind::kSelfAdapting);
  CHECK(miner_kind_from_name("self-adapting") == MinerKind::kSelfAdapting);
  CHECK(miner_kind_from_name("lossy") == MinerKind::kLossy);
  CHECK_THROWS_AS(miner_kind_from_name("magic"), InvalidArgument);

  for (MinerKind kind : {MinerKind::kWindow, MinerKind::kReset, MinerKind::kOnline,
                         MinerKind::kAging, MinerKind::kSelfAdapting, MinerKind::kLossy})
    CHECK(miner_kind_from_name(miner_kind_name(kind)) == kind);
}

TEST_CASE("every miner kind observes events and mines at the cadence") {
  const auto log = generate_stream(testutil::random_plan(8));
  for (MinerKind kind : {MinerKind::kWindow, MinerKind::kReset, MinerKind::kOnline,
                         MinerKind::kAging, MinerKind::kSelfAdapting, MinerKind::kLossy}) {
    CAPTURE(miner_kind_name(kind));
    MinerConfig config;
    config.kind = kind;
    config.capacity = 50;
    config.trigger = 25;
    auto miner = make_miner(config);

    std::uint64_t models = 0;
    for (const Event& e : log)
      if (miner->observe(e).has_value()) ++models;
    CHECK(models == log.size() / 25);
    miner->current_model();  // must not throw
    CHECK(miner->alpha() >= 0.0);
    CHECK(miner->alpha() <= 1.0);
  }
}

TEST_CASE("miner config json honours overrides and queue bound semantics") {
  const MinerConfig c = miner_config_from_json(R"({
    "miner": "aging",
    "capacity": 64,
    "max_qr": 0,
    "alpha": 0.9,
    "trigger": 10,
    "thresholds": {"dependency": 0.7, "and": 0.2}
  })");
  CHECK(c.kind == MinerKind::kAging);
  CHECK(c.capacity == 64);
  CHECK(!c.max_qa.has_value());
  REQUIRE(c.max_qr.has_value());
  CHECK(*c.max_qr == 0);  // zero selects an unbounded queue
  CHECK(c.alpha == 0.9);
  CHECK(c.trigger == 10);
  CHECK(c.thresholds.dependency == 0.7);
  CHECK(c.thresholds.and_threshold == 0.2);
  CHECK(c.thresholds.long_distance == 0.9);  // untouched default

  CHECK_THROWS_AS(miner_config_from_json("not json"), InvalidArgument);
  CHECK_THROWS_AS(miner_config_from_json("{\"miner\":\"bogus\"}"), InvalidArgument);
}

TEST_CASE("run config json round-trips and validates the source choice") {
  RunConfig config;
  config.miner.kind = MinerKind::kLossy;
  config.miner.epsilon = 0.05;
  config.miner.trigger = 25;
  config.eval_window = 64;
  config.input_path = "stream.log";
  config.snapshot_every = 2;
  config.timing = false;

  const RunConfig back = RunConfig::from_json(config.to_json());
  CHECK(back.miner.kind == MinerKind::kLossy);
  CHECK(back.miner.epsilon == 0.05);
  CHECK(back.miner.trigger == 25);
  CHECK(back.eval_window == 64);
  CHECK(back.input_path == "stream.log");
  CHECK(back.connect_host.empty());
  CHECK(back.snapshot_every == 2);
  CHECK(back.timing == false);

  CHECK_THROWS_AS(RunConfig::from_json("{}"), InvalidArgument);  // no source
  CHECK_THROWS_AS(RunConfig::from_json(
                      R"({"input": "a.log", "connect": {"port": 1}})"),
                  InvalidArgument);  // two sources
  CHECK_THROWS_AS(RunConfig::from_json(R"({"input": "a.log", "codec": "morse"})"),
                  InvalidArgument);
  CHECK_THROWS_AS(RunConfig::from_json(
                      R"({"input": "a.log", "on_decode_error": "explode"})"),
                  InvalidArgument);

  const RunConfig net = RunConfig::from_json(R"({"connect": {"port": 4711}})");
  CHECK(net.connect_host == "127.0.0.1");
  CHECK(net.connect_port == 4711);
}

TEST_CASE("a file run samples metrics at every trigger and writes its outputs") {
  testutil::TempDir dir;
  const auto log = make_drifting_log();
  REQUIRE(log.size() == 600);
  write_log_file(log, dir.file("stream.log"));

  RunConfig config = base_config(dir.file("stream.log"), MinerKind::kOnline);
  config.out_dir = dir.file("out");
  config.snapshot_every = 2;
  const RunResult result = run(config);

  CHECK(result.events == 600);
  CHECK(result.triggers == 12);
  REQUIRE(result.metrics.points.size() == 12);
  for (std::size_t i = 0; i < 12; ++i)
    CHECK(result.metrics.points[i].seq_no == 49 + 50 * i);
  for (const MetricPoint& p : result.metrics.points) {
    CHECK(p.micros_per_event == 0.0);  // timing disabled
    CHECK(p.entries <= 3 * 100);
  }
  CHECK(result.peak_entries <= 3 * 100 + 200);
  CHECK(result.decode_warnings == 0);

  const MetricSeries on_disk = read_metrics_csv(dir.file("out/metrics.csv"));
  CHECK(metrics_to_csv(on_disk) == metrics_to_csv(result.metrics));
  CHECK(slurp(dir.file("out/model.json")) == export_model_json(result.final_model));
  CHECK(slurp(dir.file("out/model.dot")) == export_dot(result.final_model));

  const std::string summary = slurp(dir.file("out/summary.json"));
  for (const char* key : {"miner", "events", "triggers", "peak_entries",
                          "micros_per_event", "alpha_final", "decode_warnings",
                          "eval_window", "trigger"})
    CHECK(summary.find(std::string("\"") + key + "\"") != std::string::npos);
  CHECK(summary.find("\"online\"") != std::string::npos);

  // snapshots at every second trigger: seq 99, 199, ..., 599
  for (int idx : {99, 199, 299, 399, 499, 599})
    CHECK(std::filesystem::exists(
        dir.file("out/snapshots/model_" + std::to_string(idx) + ".json")));
  CHECK(!std::filesystem::exists(dir.file("out/snapshots/model_49.json")));
}

TEST_CASE("identical configurations produce byte-identical outputs") {
  testutil::TempDir dir;
  write_log_file(make_drifting_log(), dir.file("stream.log"));

  RunConfig config = base_config(dir.file("stream.log"), MinerKind::kAging);
  config.out_dir = dir.file("run1");
  run(config);
  config.out_dir = dir.file("run2");
  run(config);

  CHECK(slurp(dir.file("run1/metrics.csv")) == slurp(dir.file("run2/metrics.csv")));
  CHECK(slurp(dir.file("run1/model.json")) == slurp(dir.file("run2/model.json")));
  CHECK(slurp(dir.file("run1/summary.json")) == slurp(dir.file("run2/summary.json")));
}

TEST_CASE("network and file sources drive the miner identically") {
  testutil::TempDir dir;
  const auto log = make_drifting_log();
  write_log_file(log, dir.file("stream.log"));

  RunConfig file_config = base_config(dir.file("stream.log"), MinerKind::kOnline);
  const RunResult from_file = run(file_config);

  StreamServer server(log, ServeOptions{});
  RunConfig net_config = base_config("", MinerKind::kOnline);
  net_config.connect_host = "127.0.0.1";
  net_config.connect_port = server.port();
  const RunResult from_net = run(net_config);
  server.stop();

  CHECK(metrics_to_csv(from_net.metrics) == metrics_to_csv(from_file.metrics));
  CHECK(export_model_json(from_net.final_model) ==
        export_model_json(from_file.final_model));
  CHECK(from_net.events == from_file.events);
}

TEST_CASE("the self-adapting miner reacts to a concept shift") {
  testutil::TempDir dir;
  write_log_file(make_drifting_log(), dir.file("stream.log"));

  RunConfig config = base_config(dir.file("stream.log"), MinerKind::kSelfAdapting);
  // a succession budget below the nine new pair types keeps the wider
  // post-shift process unlearnable, so the fitness drop is sharp and exact
  config.miner.max_qr = 4;
  const RunResult result = run(config);
  REQUIRE(result.metrics.points.size() == 12);

  auto row = [&](std::uint64_t seq) -> const MetricPoint& {
    for (const MetricPoint& p : result.metrics.points)
      if (p.seq_no == seq) return p;
    REQUIRE(false);
    return result.metrics.points[0];
  };

  // before the shift the two-step process is learned perfectly
  CHECK(row(199).fitness == Approx(1.0));
  CHECK(row(199).alpha == Approx(1.0));

  // first post-shift window: the old succession was evicted and no new
  // pair fits the budget, so nothing is covered any more
  CHECK(row(249).fitness == Approx(0.0));
  CHECK(row(249).alpha == Approx(1.0));  // recorded before the adjustment

  // the fitness drop pulled alpha down by one step ...
  CHECK(row(299).alpha == Approx(0.98));

  // ... and once fitness stops falling, alpha creeps back up per trigger
  CHECK(row(349).alpha == Approx(0.985));
  CHECK(row(399).alpha == Approx(0.99));
  CHECK(result.alpha_final == Approx(1.0));
}

TEST_CASE("a skipping network run counts decode warnings") {
  // tiny raw server: two good payloads around one undecodable line
  int listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(listen_fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::listen(listen_fd, 1) == 0);
  socklen_t len = sizeof addr;
  REQUIRE(::getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);

  std::thread sender([listen_fd] {
    int client = ::accept(listen_fd, nullptr, nullptr);
    if (client < 0) return;
    const std::string payload = "7,c,A\nbroken\n9,c,B\n";
    ::send(client, payload.data(), payload.size(), MSG_NOSIGNAL);
    ::close(client);
  });

  RunConfig config = base_config("", MinerKind::kOnline);
  config.connect_host = "127.0.0.1";
  config.connect_port = ntohs(addr.sin_port);
  config.on_decode_error = DecodeErrorPolicy::kSkip;
  const RunResult result = run(config);
  sender.join();
  ::close(listen_fd);

  CHECK(result.events == 2);
  CHECK(result.decode_warnings == 1);
}

TEST_CASE("comparison joins runs of one kind on seq_no") {
  testutil::TempDir dir;
  std::filesystem::create_directories(dir.file("r1"));
  std::filesystem::create_directories(dir.file("r2"));
  std::filesystem::create_directories(dir.file("r3"));

  const std::string header = "seq_no,fitness,precision,alpha,entries,micros_per_event\n";
  spit(dir.file("r1/metrics.csv"), header + "49,0.5,0.25,1,10,0\n");
  spit(dir.file("r1/summary.json"), "{\"miner\":\"online\"}\n");
  spit(dir.file("r2/metrics.csv"), header + "49,1,0.75,1,10,0\n99,1,1,1,10,0\n");
  spit(dir.file("r2/summary.json"), "{\"miner\":\"online\"}\n");
  spit(dir.file("r3/metrics.csv"), header + "49,0.25,0.5,1,10,0\n");
  spit(dir.file("r3/summary.json"), "{\"miner\":\"lossy\"}\n");

  const std::string csv = compare_runs({dir.file("r1"), dir.file("r2"), dir.file("r3")});
  CHECK(csv.rfind("miner,seq_no,fitness_mean,fitness_var,precision_mean,precision_var,runs\n",
                  0) == 0);
  // online group: mean 0.75 var 0.0625 / mean 0.5 var 0.0625 over 2 runs;
  // seq 99 is dropped because r1 lacks it
  CHECK(csv.find("online,49,0.75,0.0625,0.5,0.0625,2\n") != std::string::npos);
  CHECK(csv.find("online,99") == std::string::npos);
  CHECK(csv.find("lossy,49,0.25,0,0.5,0,1\n") != std::string::npos);

  CHECK_THROWS_AS(compare_runs({dir.file("absent")}), IoError);
  CHECK_THROWS_AS(compare_runs({}), InvalidArgument);
}
