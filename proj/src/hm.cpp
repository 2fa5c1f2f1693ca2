#include "streamhm/hm.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "streamhm/errors.hpp"

namespace streamhm {

namespace {

double get_count(const PairCounts& counts, const std::string& a, const std::string& b) {
  auto it = counts.find({a, b});
  return it == counts.end() ? 0.0 : it->second;
}

double get_count(const ActivityCounts& counts, const std::string& a) {
  auto it = counts.find(a);
  return it == counts.end() ? 0.0 : it->second;
}

// Per-case counting state. last_occ keeps, for every activity seen in the
// case, the position of its most recent occurrence; this is enough to
// decide eventual succession without storing the trace.
struct CaseState {
  std::map<std::string, std::size_t> last_occ;
  std::string last;
  std::string before_last;
  std::size_t length = 0;
};

}  // namespace

SuccessionCounts count_log(const std::vector<Event>& log) {
  SuccessionCounts counts;
  std::map<std::string, CaseState> cases;
  for (const Event& e : log) {
    CaseState& st = cases[e.case_id];
    counts.activity_count[e.activity] += 1.0;
    if (st.length >= 1) counts.direct[{st.last, e.activity}] += 1.0;
    if (st.length >= 2 && st.before_last == e.activity)
      counts.two_step[{e.activity, st.last}] += 1.0;

    // (a, e.activity) succeeds eventually unless another e.activity sits
    // between a's last occurrence and here.
    auto prev_self = st.last_occ.find(e.activity);
    for (const auto& [a, pos] : st.last_occ) {
      if (prev_self == st.last_occ.end() || prev_self->second <= pos)
        counts.indirect[{a, e.activity}] += 1.0;
    }

    st.last_occ[e.activity] = st.length;
    st.before_last = std::exchange(st.last, e.activity);
    ++st.length;
  }
  counts.num_cases = cases.size();
  return counts;
}

SuccessionCounts count_log(const ObservationPeriod& buffer) {
  return count_log(std::vector<Event>(buffer.events().begin(), buffer.events().end()));
}

double dependency_measure(const PairCounts& direct, const std::string& a,
                          const std::string& b) {
  double ab = get_count(direct, a, b);
  double ba = get_count(direct, b, a);
  return (ab - ba) / (ab + ba + 1.0);
}

double and_measure(const PairCounts& direct, const std::string& a,
                   const std::string& b, const std::string& c) {
  double bc = get_count(direct, b, c);
  double cb = get_count(direct, c, b);
  double ab = get_count(direct, a, b);
  double ac = get_count(direct, a, c);
  return (bc + cb) / (ab + ac + 1.0);
}

double long_distance_measure(const PairCounts& indirect,
                             const ActivityCounts& activity_count,
                             const std::string& a, const std::string& b) {
  return get_count(indirect, a, b) / (get_count(activity_count, b) + 1.0);
}

std::pair<double, double> loop_measures(const PairCounts& direct,
                                        const PairCounts& two_step,
                                        const std::string& a, const std::string& b) {
  double aa = get_count(direct, a, a);
  double one = aa / (aa + 1.0);
  double ab = get_count(two_step, a, b);
  double ba = get_count(two_step, b, a);
  double two = (ab + ba) / (ab + ba + 1.0);
  return {one, two};
}

std::set<ActivityPair> CausalModel::edge_set() const {
  std::set<ActivityPair> out;
  for (const auto& [pair, value] : edges) out.insert(pair);
  return out;
}

namespace {

// Greedy grouping of branch targets: a target joins the first group whose
// every member is pairwise concurrent with it, otherwise opens a new
// alternative. measure(x, y) must be symmetric.
template <typename Measure>
std::vector<std::vector<std::string>> group_branches(
    const std::vector<std::string>& targets, double threshold, Measure measure) {
  std::vector<std::vector<std::string>> groups;
  for (const std::string& t : targets) {
    bool placed = false;
    for (auto& group : groups) {
      bool concurrent_with_all = std::all_of(
          group.begin(), group.end(),
          [&](const std::string& u) { return measure(t, u) >= threshold; });
      if (concurrent_with_all) {
        group.push_back(t);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({t});
  }
  return groups;
}

}  // namespace

CausalModel generate_model(const ActivityCounts& activity_count,
                           const PairCounts& direct, const Thresholds& thresholds,
                           const ModelExtras& extras) {
  CausalModel model;
  model.activities = activity_count;
  auto ensure_activity = [&](const std::string& a) {
    model.activities.emplace(a, 0.0);
  };
  for (const auto& [pair, value] : direct) {
    ensure_activity(pair.first);
    ensure_activity(pair.second);
  }

  std::set<ActivityPair> candidates;
  for (const auto& [pair, value] : direct) {
    if (pair.first == pair.second) continue;
    candidates.insert(pair);
    candidates.insert({pair.second, pair.first});
  }
  for (const auto& [a, b] : candidates) {
    double dep = dependency_measure(direct, a, b);
    if (dep >= thresholds.dependency) model.edges[{a, b}] = dep;
  }

  if (thresholds.relative_to_best > 0.0) {
    std::map<std::string, double> best;
    for (const auto& [pair, dep] : model.edges) {
      auto [it, inserted] = best.emplace(pair.first, dep);
      if (!inserted) it->second = std::max(it->second, dep);
    }
    for (auto it = model.edges.begin(); it != model.edges.end();) {
      if (best[it->first.first] - it->second > thresholds.relative_to_best)
        it = model.edges.erase(it);
      else
        ++it;
    }
  }

  for (const auto& [pair, value] : direct) {
    if (pair.first != pair.second) continue;
    if (value / (value + 1.0) >= thresholds.loop_one) model.self_loops.insert(pair.first);
  }

  std::map<std::string, std::vector<std::string>> outgoing;
  std::map<std::string, std::vector<std::string>> incoming;
  for (const auto& [pair, dep] : model.edges) {
    outgoing[pair.first].push_back(pair.second);
    incoming[pair.second].push_back(pair.first);
  }
  for (const auto& [a, targets] : outgoing) {
    if (targets.size() < 2) continue;
    model.splits[a] = group_branches(targets, thresholds.and_threshold,
                                     [&](const std::string& b, const std::string& c) {
                                       return and_measure(direct, a, b, c);
                                     });
  }
  for (const auto& [b, sources] : incoming) {
    if (sources.size() < 2) continue;
    // Join concurrency mirrors the split measure on incoming successions.
    model.joins[b] = group_branches(
        sources, thresholds.and_threshold,
        [&](const std::string& s, const std::string& u) {
          double su = get_count(direct, s, u) + get_count(direct, u, s);
          return su / (get_count(direct, s, b) + get_count(direct, u, b) + 1.0);
        });
  }

  if (extras.two_step != nullptr) {
    std::set<ActivityPair> seen;
    for (const auto& [pair, value] : *extras.two_step) {
      if (pair.first == pair.second) continue;
      ActivityPair key = std::minmax(pair.first, pair.second);
      if (!seen.insert(key).second) continue;
      double s = get_count(*extras.two_step, key.first, key.second) +
                 get_count(*extras.two_step, key.second, key.first);
      if (s / (s + 1.0) >= thresholds.loop_two) {
        model.two_loops.insert(key);
        ensure_activity(key.first);
        ensure_activity(key.second);
      }
    }
  }

  if (extras.indirect != nullptr) {
    for (const auto& [pair, value] : *extras.indirect) {
      if (pair.first == pair.second) continue;
      double measure = value / (get_count(model.activities, pair.second) + 1.0);
      if (measure >= thresholds.long_distance) {
        model.long_edges.insert(pair);
        ensure_activity(pair.first);
        ensure_activity(pair.second);
      }
    }
  }

  return model;
}

CausalModel mine_log(const std::vector<Event>& log, const Thresholds& thresholds) {
  SuccessionCounts counts = count_log(log);
  ModelExtras extras;
  extras.two_step = &counts.two_step;
  extras.indirect = &counts.indirect;
  return generate_model(counts.activity_count, counts.direct, thresholds, extras);
}

CausalModel mine_log(const ObservationPeriod& buffer, const Thresholds& thresholds) {
  return mine_log(std::vector<Event>(buffer.events().begin(), buffer.events().end()),
                  thresholds);
}

namespace {

// Escapes only '"': backslashes must pass through so label line breaks
// written as \n reach Graphviz unmangled.
std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// "AND" when b shares its split group at a with another target, "XOR"
// when it stands alone among several branches.
const char* split_kind(const CausalModel& model, const std::string& a,
                       const std::string& b) {
  auto it = model.splits.find(a);
  if (it == model.splits.end()) return nullptr;
  for (const auto& group : it->second) {
    if (std::find(group.begin(), group.end(), b) != group.end())
      return group.size() >= 2 ? "AND" : "XOR";
  }
  return nullptr;
}

}  // namespace

std::string export_dot(const CausalModel& model) {
  std::string out = "digraph causal_net {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& [name, count] : model.activities) {
    out += "  " + dot_quote(name) + " [label=" +
           dot_quote(name + "\\n" + format_number(count, "%.6g")) + "];\n";
  }
  for (const auto& [pair, dep] : model.edges) {
    out += "  " + dot_quote(pair.first) + " -> " + dot_quote(pair.second);
    std::string label = format_number(dep, "%.3f");
    if (const char* kind = split_kind(model, pair.first, pair.second))
      label += std::string("\\n") + kind;
    out += " [label=" + dot_quote(label) + "];\n";
  }
  for (const std::string& a : model.self_loops)
    out += "  " + dot_quote(a) + " -> " + dot_quote(a) + " [label=\"loop\"];\n";
  for (const auto& [a, b] : model.two_loops)
    out += "  " + dot_quote(a) + " -> " + dot_quote(b) +
           " [dir=both, style=dotted, label=\"loop2\"];\n";
  for (const auto& [a, b] : model.long_edges)
    out += "  " + dot_quote(a) + " -> " + dot_quote(b) +
           " [style=dashed, label=\"long\"];\n";
  out += "}\n";
  return out;
}

std::string export_model_json(const CausalModel& model) {
  nlohmann::json j;
  j["activities"] = model.activities;
  j["edges"] = nlohmann::json::array();
  for (const auto& [pair, dep] : model.edges) {
    j["edges"].push_back(
        {{"from", pair.first}, {"to", pair.second}, {"dependency", dep}});
  }
  j["splits"] = nlohmann::json::object();
  for (const auto& [a, groups] : model.splits) j["splits"][a] = groups;
  j["joins"] = nlohmann::json::object();
  for (const auto& [b, groups] : model.joins) j["joins"][b] = groups;
  j["self_loops"] = model.self_loops;
  j["two_loops"] = nlohmann::json::array();
  for (const auto& [a, b] : model.two_loops) j["two_loops"].push_back({a, b});
  j["long_edges"] = nlohmann::json::array();
  for (const auto& [a, b] : model.long_edges) j["long_edges"].push_back({a, b});
  return j.dump(2) + "\n";
}

}  // namespace streamhm
