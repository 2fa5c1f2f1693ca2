#include "streamhm/stream_net.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "streamhm/errors.hpp"

namespace streamhm {

Codec codec_from_name(const std::string& name) {
  if (name == "line") return Codec::kLine;
  if (name == "xes") return Codec::kXes;
  throw InvalidArgument("unknown codec '" + name + "' (expected line or xes)");
}

const char* codec_name(Codec codec) {
  return codec == Codec::kLine ? "line" : "xes";
}

// --- log files --------------------------------------------------------------

std::vector<Event> read_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<Event> log;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    log.push_back(decode_line(line));
  }
  return log;
}

void write_log_file(const std::vector<Event>& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const Event& e : log) out << encode_line(e) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

// --- log merging --------------------------------------------------------------

namespace {

void append_riffle(std::vector<Event>& out, const std::vector<Event>& a,
                   const std::vector<Event>& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size()) out.push_back(a[i++]);
    if (j < b.size()) out.push_back(b[j++]);
  }
}

}  // namespace

std::vector<Event> merge_logs(const MergeSpec& spec) {
  if (spec.segments.empty()) throw InvalidArgument("merge needs at least one segment");
  const std::size_t boundaries = spec.segments.size() - 1;
  std::vector<double> overlaps(boundaries, 0.0);
  if (spec.overlaps.size() == 1) {
    overlaps.assign(boundaries, spec.overlaps[0]);
  } else if (!spec.overlaps.empty()) {
    if (spec.overlaps.size() != boundaries)
      throw InvalidArgument("need one overlap per segment boundary");
    overlaps = spec.overlaps;
  }
  for (double p : overlaps)
    if (!(p >= 0.0) || p >= 1.0) throw InvalidArgument("overlap must be in [0, 1)");

  // Rename case ids that collide with earlier segments.
  std::vector<std::vector<Event>> segments = spec.segments;
  std::set<std::string> used;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    std::map<std::string, std::string> renamed;
    for (Event& e : segments[k]) {
      auto it = renamed.find(e.case_id);
      if (it == renamed.end()) {
        std::string name = e.case_id;
        while (used.count(name) != 0) name = "s" + std::to_string(k) + "_" + name;
        used.insert(name);
        it = renamed.emplace(e.case_id, std::move(name)).first;
      }
      e.case_id = it->second;
    }
  }

  // Split each segment into head (overlaps previous), body, tail
  // (overlaps next); tails shrink if a short segment is claimed twice.
  std::vector<Event> out;
  std::vector<Event> pending_tail;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const std::vector<Event>& seg = segments[k];
    std::size_t head = k == 0 ? 0 : static_cast<std::size_t>(
                                        overlaps[k - 1] * static_cast<double>(seg.size()));
    head = std::min(head, seg.size());
    std::size_t tail = k == boundaries
                           ? 0
                           : static_cast<std::size_t>(overlaps[k] *
                                                      static_cast<double>(seg.size()));
    tail = std::min(tail, seg.size() - head);

    append_riffle(out, pending_tail,
                  std::vector<Event>(seg.begin(), seg.begin() + head));
    out.insert(out.end(), seg.begin() + head, seg.end() - tail);
    pending_tail.assign(seg.end() - tail, seg.end());
  }
  out.insert(out.end(), pending_tail.begin(), pending_tail.end());

  for (std::size_t i = 0; i < out.size(); ++i) out[i].seq_no = i;
  return out;
}

// --- network source -----------------------------------------------------------

namespace {

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

std::string encode_wire(const Event& e, Codec codec) {
  if (codec == Codec::kLine) return encode_line(e) + "\n";
  return encode_xes_fragment(e) + "\n";  // blank line terminates the fragment
}

bool all_whitespace(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

StreamServer::StreamServer(std::vector<Event> log, ServeOptions options)
    : log_(std::move(log)), options_(std::move(options)) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* result = nullptr;
  int rc = getaddrinfo(options_.host.c_str(), std::to_string(options_.port).c_str(),
                       &hints, &result);
  if (rc != 0)
    throw NetworkError("cannot resolve '" + options_.host + "': " + gai_strerror(rc));

  listen_fd_ = socket(result->ai_family, result->ai_socktype, result->ai_protocol);
  if (listen_fd_ < 0) {
    freeaddrinfo(result);
    throw NetworkError(errno_text("socket"));
  }
  int yes = 1;
  setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  if (bind(listen_fd_, result->ai_addr, result->ai_addrlen) < 0) {
    freeaddrinfo(result);
    close(listen_fd_);
    throw NetworkError(errno_text("bind"));
  }
  freeaddrinfo(result);
  if (listen(listen_fd_, 16) < 0) {
    close(listen_fd_);
    throw NetworkError(errno_text("listen"));
  }

  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  if (getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len) < 0) {
    close(listen_fd_);
    throw NetworkError(errno_text("getsockname"));
  }
  port_ = ntohs(bound.sin_port);

  acceptor_ = std::thread([this] { accept_loop(); });
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::stop() {
  bool was_running = running_.exchange(false);
  if (was_running && listen_fd_ >= 0) {
    shutdown(listen_fd_, SHUT_RDWR);
    close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> clients;
  {
    std::lock_guard<std::mutex> lock(clients_mutex_);
    clients.swap(clients_);
  }
  for (std::thread& t : clients) t.join();
}

void StreamServer::accept_loop() {
  while (running_) {
    int fd = accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (!running_) return;
      if (errno == EINTR) continue;
      return;
    }
    std::lock_guard<std::mutex> lock(clients_mutex_);
    clients_.emplace_back([this, fd] { serve_client(fd); });
  }
}

void StreamServer::serve_client(int fd) {
  bool first = true;
  do {
    for (const Event& e : log_) {
      if (!running_) break;
      if (!first && options_.inter_event_delay.count() > 0)
        std::this_thread::sleep_for(options_.inter_event_delay);
      first = false;
      std::string payload = encode_wire(e, options_.codec);
      std::size_t sent = 0;
      while (sent < payload.size()) {
        ssize_t n = send(fd, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
          close(fd);
          return;
        }
        sent += static_cast<std::size_t>(n);
      }
    }
  } while (options_.loop && running_);
  close(fd);
}

StreamReader::StreamReader(const std::string& host, std::uint16_t port,
                           ReaderOptions options)
    : options_(options) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  int rc = getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &result);
  if (rc != 0) throw NetworkError("cannot resolve '" + host + "': " + gai_strerror(rc));
  int last_errno = 0;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd_ = socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) {
      last_errno = errno;
      continue;
    }
    if (connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_errno = errno;
    close(fd_);
    fd_ = -1;
  }
  freeaddrinfo(result);
  if (fd_ < 0)
    throw NetworkError("cannot connect to " + host + ":" + std::to_string(port) + ": " +
                       std::strerror(last_errno));
}

StreamReader::~StreamReader() {
  if (fd_ >= 0) close(fd_);
}

std::optional<std::string> StreamReader::next_unit() {
  const std::string delim = options_.codec == Codec::kLine ? "\n" : "\n\n";
  while (true) {
    std::size_t at = buffer_.find(delim, head_);
    if (at != std::string::npos) {
      // Keep the final newline of an XES fragment, drop the line one.
      std::size_t keep = options_.codec == Codec::kLine ? at : at + 1;
      std::string unit = buffer_.substr(head_, keep - head_);
      head_ = at + delim.size();
      if (head_ > 1 << 16) {
        buffer_.erase(0, head_);
        head_ = 0;
      }
      if (!unit.empty() && unit.back() == '\r') unit.pop_back();
      if (all_whitespace(unit)) continue;
      return unit;
    }
    if (eof_) {
      std::string unit = buffer_.substr(head_);
      buffer_.clear();
      head_ = 0;
      if (all_whitespace(unit)) return std::nullopt;
      return unit;
    }
    char chunk[4096];
    ssize_t n = recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(errno_text("recv"));
    }
    if (n == 0) {
      eof_ = true;
      continue;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::optional<Event> StreamReader::next() {
  while (std::optional<std::string> unit = next_unit()) {
    try {
      Event e = options_.codec == Codec::kLine ? decode_line(*unit)
                                               : decode_xes_fragment(*unit);
      e.seq_no = events_read_++;
      return e;
    } catch (const DecodeError&) {
      if (options_.on_decode_error == DecodeErrorPolicy::kAbort) throw;
      ++warnings_;
    }
  }
  return std::nullopt;
}

std::vector<Event> read_stream(const std::string& host, std::uint16_t port,
                               ReaderOptions options) {
  StreamReader reader(host, port, options);
  std::vector<Event> out;
  while (std::optional<Event> e = reader.next()) out.push_back(std::move(*e));
  return out;
}

}  // namespace streamhm
