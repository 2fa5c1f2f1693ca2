#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "streamhm/event.hpp"

namespace streamhm {

enum class Codec { kLine, kXes };

Codec codec_from_name(const std::string& name);
const char* codec_name(Codec codec);

// --- log files --------------------------------------------------------------

/// Line-protocol log file, one event per line, strict decoding.
std::vector<Event> read_log_file(const std::string& path);
void write_log_file(const std::vector<Event>& log, const std::string& path);

// --- log merging --------------------------------------------------------------

/// Stitches segments into one drifting stream. overlaps holds one fraction
/// per boundary (empty: hard shifts everywhere; a single value applies to
/// every boundary). With p > 0 the last floor(p*|k|) events of segment k
/// are round-robin interleaved, segment k first, with the first
/// floor(p*|k+1|) events of segment k+1. Case ids colliding with earlier
/// segments are renamed s<k>_<id>; seq_no is reassigned from 0.
struct MergeSpec {
  std::vector<std::vector<Event>> segments;
  std::vector<double> overlaps;
};

std::vector<Event> merge_logs(const MergeSpec& spec);

// --- network source -----------------------------------------------------------

struct ServeOptions {
  std::string host = "0.0.0.0";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  Codec codec = Codec::kLine;
  std::chrono::microseconds inter_event_delay{0};
  bool loop = false;  // restart from the beginning after the last event
};

/// TCP replay source. Every client receives the full log from the start in
/// order, paced by inter_event_delay between consecutive events; clients
/// are independent and served concurrently.
class StreamServer {
 public:
  StreamServer(std::vector<Event> log, ServeOptions options);
  ~StreamServer();

  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve_client(int fd);

  std::vector<Event> log_;
  ServeOptions options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  std::thread acceptor_;
  std::mutex clients_mutex_;
  std::vector<std::thread> clients_;
};

enum class DecodeErrorPolicy { kAbort, kSkip };

struct ReaderOptions {
  Codec codec = Codec::kLine;
  DecodeErrorPolicy on_decode_error = DecodeErrorPolicy::kAbort;
};

/// Client side of the stream source. Yields events in arrival order with
/// seq_no reassigned to the arrival index; wire framing is newline
/// delimited lines or blank-line delimited XES fragments.
class StreamReader {
 public:
  StreamReader(const std::string& host, std::uint16_t port, ReaderOptions options = {});
  ~StreamReader();

  StreamReader(const StreamReader&) = delete;
  StreamReader& operator=(const StreamReader&) = delete;

  /// Next decoded event, or nullopt once the source closes the stream.
  std::optional<Event> next();

  std::uint64_t events_read() const { return events_read_; }
  /// Malformed payloads skipped so far (skip policy only).
  std::uint64_t warnings() const { return warnings_; }

 private:
  std::optional<std::string> next_unit();

  int fd_ = -1;
  ReaderOptions options_;
  std::string buffer_;
  std::size_t head_ = 0;
  bool eof_ = false;
  std::uint64_t events_read_ = 0;
  std::uint64_t warnings_ = 0;
};

/// Drains a source into memory.
std::vector<Event> read_stream(const std::string& host, std::uint16_t port,
                               ReaderOptions options = {});

}  // namespace streamhm
