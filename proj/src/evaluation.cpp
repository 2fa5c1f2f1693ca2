#include "streamhm/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "streamhm/errors.hpp"

namespace streamhm {

EvalWindow::EvalWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidArgument("evaluation window capacity must be positive");
}

void EvalWindow::push(const Event& e) {
  if (events_.size() >= capacity_) events_.pop_front();
  events_.push_back(e);
}

std::vector<ActivityPair> EvalWindow::case_pairs() const {
  std::vector<ActivityPair> pairs;
  std::map<std::string, std::string> last;
  for (const Event& e : events_) {
    auto it = last.find(e.case_id);
    if (it != last.end()) {
      pairs.emplace_back(it->second, e.activity);
      it->second = e.activity;
    } else {
      last.emplace(e.case_id, e.activity);
    }
  }
  return pairs;
}

namespace {

bool covers(const CausalModel& model, const ActivityPair& pair) {
  if (pair.first == pair.second && model.self_loops.count(pair.first) != 0) return true;
  return model.has_edge(pair.first, pair.second);
}

}  // namespace

double window_fitness(const CausalModel& model, const EvalWindow& window) {
  std::vector<ActivityPair> pairs = window.case_pairs();
  if (pairs.empty()) return 1.0;
  std::size_t covered = 0;
  for (const ActivityPair& pair : pairs)
    if (covers(model, pair)) ++covered;
  return static_cast<double>(covered) / static_cast<double>(pairs.size());
}

double window_precision(const CausalModel& model, const EvalWindow& window) {
  if (model.edges.empty()) return 1.0;
  std::set<ActivityPair> seen;
  for (const ActivityPair& pair : window.case_pairs()) seen.insert(pair);
  std::size_t exercised = 0;
  for (const auto& [pair, dep] : model.edges)
    if (seen.count(pair) != 0) ++exercised;
  return static_cast<double>(exercised) / static_cast<double>(model.edges.size());
}

namespace {

// %.17g keeps the exact double value across a write/read cycle.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string metrics_to_csv(const MetricSeries& series) {
  std::string out = "seq_no,fitness,precision,alpha,entries,micros_per_event\n";
  for (const MetricPoint& p : series.points) {
    out += std::to_string(p.seq_no) + ',' + format_double(p.fitness) + ',' +
           format_double(p.precision) + ',' + format_double(p.alpha) + ',' +
           std::to_string(p.entries) + ',' + format_double(p.micros_per_event) + '\n';
  }
  return out;
}

MetricSeries metrics_from_csv(const std::string& csv) {
  MetricSeries series;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != "seq_no,fitness,precision,alpha,entries,micros_per_event")
        throw DecodeError("unexpected metrics header '" + line + "'");
      header = false;
      continue;
    }
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 6) throw DecodeError("metrics row has wrong arity: '" + line + "'");
    MetricPoint p;
    try {
      p.seq_no = std::stoull(fields[0]);
      p.fitness = std::stod(fields[1]);
      p.precision = std::stod(fields[2]);
      p.alpha = std::stod(fields[3]);
      p.entries = std::stoull(fields[4]);
      p.micros_per_event = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw DecodeError("bad metrics row '" + line + "'");
    }
    series.points.push_back(p);
  }
  if (header) throw DecodeError("metrics csv is empty");
  return series;
}

void write_metrics_csv(const MetricSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << metrics_to_csv(series);
  if (!out) throw IoError("failed writing '" + path + "'");
}

MetricSeries read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return metrics_from_csv(buf.str());
}

}  // namespace streamhm
