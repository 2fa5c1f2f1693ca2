#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

namespace streamhm {

/// One observed execution step of a process instance.
struct Event {
  std::uint64_t seq_no = 0;
  std::string case_id;
  std::string activity;

  bool operator==(const Event& other) const = default;
};

/// Eviction behaviour of a bounded event buffer when it is full.
enum class BufferPolicy {
  kReset,  // drop the whole buffer, then insert
  kShift,  // drop the oldest event, then insert
};

/// Bounded buffer of events in seq_no order.
///
/// Capacity is fixed at construction; push_bounded applies the given
/// policy before inserting when the buffer is full.
class ObservationPeriod {
 public:
  explicit ObservationPeriod(std::size_t capacity);

  void push_bounded(Event e, BufferPolicy policy);
  void clear();

  std::size_t size() const { return events_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return events_.empty(); }

  const std::deque<Event>& events() const { return events_; }

 private:
  std::size_t capacity_;
  std::deque<Event> events_;
};

/// First and last seq_no observed for a case.
/// Throws NotFoundError when the case has no events in the buffer.
std::pair<std::uint64_t, std::uint64_t> case_time_scope(
    const ObservationPeriod& buffer, const std::string& case_id);

// --- wire codecs ---------------------------------------------------------
//
// Line protocol: one event per line, "<seq_no>,<case_id>,<activity>".
// Ids are percent-encoded so that '%', ',' and '\n' cannot break framing;
// all other bytes pass through untouched.

std::string percent_encode(const std::string& raw);
std::string percent_decode(const std::string& encoded);

std::string encode_line(const Event& e);
Event decode_line(const std::string& line);

// XES fragment: a single-trace, single-event <log> document. Timestamps
// are emitted for interoperability but only ordering matters; decode
// ignores their value.

std::string encode_xes_fragment(const Event& e);
Event decode_xes_fragment(const std::string& fragment);

std::string xml_escape(const std::string& raw);
std::string xml_unescape(const std::string& escaped);

}  // namespace streamhm
