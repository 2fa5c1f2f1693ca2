#include "streamhm/event.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>

#include "streamhm/errors.hpp"

namespace streamhm {

ObservationPeriod::ObservationPeriod(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidArgument("buffer capacity must be positive");
}

void ObservationPeriod::push_bounded(Event e, BufferPolicy policy) {
  if (events_.size() >= capacity_) {
    if (policy == BufferPolicy::kReset) {
      events_.clear();
    } else {
      events_.pop_front();
    }
  }
  events_.push_back(std::move(e));
}

void ObservationPeriod::clear() { events_.clear(); }

std::pair<std::uint64_t, std::uint64_t> case_time_scope(
    const ObservationPeriod& buffer, const std::string& case_id) {
  bool seen = false;
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  for (const Event& e : buffer.events()) {
    if (e.case_id != case_id) continue;
    if (!seen) {
      first = e.seq_no;
      seen = true;
    }
    last = e.seq_no;
  }
  if (!seen) throw NotFoundError("no events for case '" + case_id + "'");
  return {first, last};
}

// --- line protocol --------------------------------------------------------

namespace {

constexpr char kHexDigits[] = "0123456789ABCDEF";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string percent_encode(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c == '%' || c == ',' || c == '\n') {
      out.push_back('%');
      out.push_back(kHexDigits[(static_cast<unsigned char>(c) >> 4) & 0xF]);
      out.push_back(kHexDigits[static_cast<unsigned char>(c) & 0xF]);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string percent_decode(const std::string& encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out.push_back(encoded[i]);
      continue;
    }
    if (i + 2 >= encoded.size()) throw DecodeError("truncated percent escape");
    int hi = hex_value(encoded[i + 1]);
    int lo = hex_value(encoded[i + 2]);
    if (hi < 0 || lo < 0) throw DecodeError("bad percent escape '" + encoded.substr(i, 3) + "'");
    out.push_back(static_cast<char>((hi << 4) | lo));
    i += 2;
  }
  return out;
}

std::string encode_line(const Event& e) {
  return std::to_string(e.seq_no) + ',' + percent_encode(e.case_id) + ',' +
         percent_encode(e.activity);
}

Event decode_line(const std::string& line) {
  std::size_t first = line.find(',');
  if (first == std::string::npos) throw DecodeError("line has no case_id field: '" + line + "'");
  std::size_t second = line.find(',', first + 1);
  if (second == std::string::npos) throw DecodeError("line has no activity field: '" + line + "'");
  if (line.find(',', second + 1) != std::string::npos)
    throw DecodeError("line has too many fields: '" + line + "'");

  Event e;
  const char* begin = line.data();
  const char* end = begin + first;
  auto [ptr, ec] = std::from_chars(begin, end, e.seq_no);
  if (ec != std::errc() || ptr != end || first == 0)
    throw DecodeError("bad seq_no '" + line.substr(0, first) + "'");

  e.case_id = percent_decode(line.substr(first + 1, second - first - 1));
  e.activity = percent_decode(line.substr(second + 1));
  if (e.case_id.empty()) throw DecodeError("empty case_id in line '" + line + "'");
  if (e.activity.empty()) throw DecodeError("empty activity in line '" + line + "'");
  return e;
}

// --- XES fragments --------------------------------------------------------

std::string xml_escape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(const std::string& escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '&') {
      out.push_back(escaped[i]);
      continue;
    }
    struct Entity { const char* name; char value; };
    static constexpr Entity kEntities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
    bool matched = false;
    for (const Entity& ent : kEntities) {
      std::size_t len = std::char_traits<char>::length(ent.name);
      if (escaped.compare(i, len, ent.name) == 0) {
        out.push_back(ent.value);
        i += len - 1;
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(escaped[i]);
  }
  return out;
}

namespace {

std::string format_timestamp(std::uint64_t seq_no) {
  // Synthetic clock: one second per event from a fixed origin. Only the
  // ordering of timestamps is meaningful to consumers.
  constexpr std::time_t kOrigin = 1577836800;  // 2020-01-01T00:00:00Z
  std::time_t t = kOrigin + static_cast<std::time_t>(seq_no);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.000+00:00",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                tm.tm_sec);
  return buf;
}

// Returns the value="..." attribute of the first tag in [from, to) that
// carries key="<key>", or npos-marked failure via the found flag.
std::string find_keyed_value(const std::string& doc, std::size_t from, std::size_t to,
                             const std::string& key, bool& found) {
  const std::string needle = "key=\"" + key + "\"";
  std::size_t at = doc.find(needle, from);
  found = false;
  if (at == std::string::npos || at >= to) return {};
  std::size_t tag_end = doc.find('>', at);
  if (tag_end == std::string::npos || tag_end >= to) return {};
  std::size_t val = doc.find("value=\"", at);
  if (val == std::string::npos || val >= tag_end) return {};
  val += 7;
  std::size_t val_end = doc.find('"', val);
  if (val_end == std::string::npos || val_end > tag_end) return {};
  found = true;
  return xml_unescape(doc.substr(val, val_end - val));
}

}  // namespace

std::string encode_xes_fragment(const Event& e) {
  std::string out;
  out += "<log xes.version=\"1.0\">\n";
  out += "\t<trace>\n";
  out += "\t\t<string key=\"concept:name\" value=\"" + xml_escape(e.case_id) + "\"/>\n";
  out += "\t\t<event>\n";
  out += "\t\t\t<string key=\"concept:name\" value=\"" + xml_escape(e.activity) + "\"/>\n";
  out += "\t\t\t<date key=\"time:timestamp\" value=\"" + format_timestamp(e.seq_no) + "\"/>\n";
  out += "\t\t</event>\n";
  out += "\t</trace>\n";
  out += "</log>\n";
  return out;
}

Event decode_xes_fragment(const std::string& fragment) {
  std::size_t trace = fragment.find("<trace");
  if (trace == std::string::npos) throw DecodeError("xes: missing <trace>");
  std::size_t event = fragment.find("<event", trace);
  if (event == std::string::npos) throw DecodeError("xes: missing <event>");
  std::size_t event_end = fragment.find("</event>", event);
  if (event_end == std::string::npos) throw DecodeError("xes: unterminated <event>");
  if (fragment.find("<event", event + 1) != std::string::npos)
    throw DecodeError("xes: fragment must hold exactly one event");

  bool found = false;
  Event e;
  e.case_id = find_keyed_value(fragment, trace, event, "concept:name", found);
  if (!found || e.case_id.empty()) throw DecodeError("xes: missing trace concept:name");
  e.activity = find_keyed_value(fragment, event, event_end, "concept:name", found);
  if (!found || e.activity.empty()) throw DecodeError("xes: missing event concept:name");
  return e;
}

}  // namespace streamhm
