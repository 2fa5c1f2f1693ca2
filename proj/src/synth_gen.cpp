#include "streamhm/synth_gen.hpp"

#include <numeric>

#include <json.hpp>

#include "streamhm/errors.hpp"

namespace streamhm {

namespace {

// Uniform draw from [0, 1) using the top 53 bits of one engine output.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ProcessSpec ProcessSpec::activity(std::string name) {
  if (name.empty()) throw InvalidArgument("activity name must be non-empty");
  ProcessSpec spec;
  spec.kind_ = Kind::kActivity;
  spec.name_ = std::move(name);
  return spec;
}

ProcessSpec ProcessSpec::sequence(std::vector<ProcessSpec> children) {
  if (children.empty()) throw InvalidArgument("seq needs at least one block");
  ProcessSpec spec;
  spec.kind_ = Kind::kSequence;
  spec.children_ = std::move(children);
  return spec;
}

ProcessSpec ProcessSpec::exclusive(std::vector<ProcessSpec> children,
                                   std::vector<double> weights) {
  if (children.empty()) throw InvalidArgument("xor needs at least one block");
  if (weights.empty()) weights.assign(children.size(), 1.0);
  if (weights.size() != children.size())
    throw InvalidArgument("xor weights must match branch count");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidArgument("xor weights must be positive");
  ProcessSpec spec;
  spec.kind_ = Kind::kXor;
  spec.children_ = std::move(children);
  spec.weights_ = std::move(weights);
  return spec;
}

ProcessSpec ProcessSpec::parallel(std::vector<ProcessSpec> children) {
  if (children.empty()) throw InvalidArgument("and needs at least one block");
  ProcessSpec spec;
  spec.kind_ = Kind::kParallel;
  spec.children_ = std::move(children);
  return spec;
}

ProcessSpec ProcessSpec::loop(ProcessSpec body, double repeat) {
  if (!(repeat >= 0.0) || repeat >= 1.0)
    throw InvalidArgument("loop repeat probability must be in [0, 1)");
  ProcessSpec spec;
  spec.kind_ = Kind::kLoop;
  spec.children_.push_back(std::move(body));
  spec.repeat_ = repeat;
  return spec;
}

std::vector<std::string> ProcessSpec::sample_trace(std::mt19937_64& rng) const {
  std::vector<std::string> out;
  append_trace(out, rng);
  return out;
}

void ProcessSpec::append_trace(std::vector<std::string>& out, std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::kActivity:
      out.push_back(name_);
      return;
    case Kind::kSequence:
      for (const ProcessSpec& child : children_) child.append_trace(out, rng);
      return;
    case Kind::kXor: {
      double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
      double r = unit_draw(rng) * total;
      std::size_t pick = children_.size() - 1;
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (r < weights_[i]) {
          pick = i;
          break;
        }
        r -= weights_[i];
      }
      children_[pick].append_trace(out, rng);
      return;
    }
    case Kind::kParallel: {
      std::vector<std::vector<std::string>> traces;
      traces.reserve(children_.size());
      std::size_t total = 0;
      for (const ProcessSpec& child : children_) {
        traces.push_back(child.sample_trace(rng));
        total += traces.back().size();
      }
      // Picking a branch with probability proportional to its remaining
      // length makes every interleaving equally likely.
      std::vector<std::size_t> next(traces.size(), 0);
      while (total > 0) {
        std::uint64_t r = rng() % total;
        for (std::size_t i = 0; i < traces.size(); ++i) {
          std::size_t remaining = traces[i].size() - next[i];
          if (r < remaining) {
            out.push_back(traces[i][next[i]++]);
            break;
          }
          r -= remaining;
        }
        --total;
      }
      return;
    }
    case Kind::kLoop:
      children_[0].append_trace(out, rng);
      while (unit_draw(rng) < repeat_) children_[0].append_trace(out, rng);
      return;
  }
}

// --- JSON (de)serialization -------------------------------------------------

namespace {

using nlohmann::json;

ProcessSpec spec_from_json(const json& j);

std::vector<ProcessSpec> children_from_json(const json& j, const char* key) {
  if (!j.is_array()) throw InvalidArgument(std::string(key) + " must be an array");
  std::vector<ProcessSpec> children;
  children.reserve(j.size());
  for (const json& child : j) children.push_back(spec_from_json(child));
  return children;
}

ProcessSpec spec_from_json(const json& j) {
  if (j.is_string()) return ProcessSpec::activity(j.get<std::string>());
  if (!j.is_object()) throw InvalidArgument("block must be a string or an object");
  if (j.contains("seq")) return ProcessSpec::sequence(children_from_json(j["seq"], "seq"));
  if (j.contains("xor")) {
    std::vector<double> weights;
    if (j.contains("weights")) weights = j["weights"].get<std::vector<double>>();
    return ProcessSpec::exclusive(children_from_json(j["xor"], "xor"), std::move(weights));
  }
  if (j.contains("and")) return ProcessSpec::parallel(children_from_json(j["and"], "and"));
  if (j.contains("loop")) {
    if (!j.contains("repeat")) throw InvalidArgument("loop needs a repeat probability");
    return ProcessSpec::loop(spec_from_json(j["loop"]), j["repeat"].get<double>());
  }
  throw InvalidArgument("block object needs one of: seq, xor, and, loop");
}

json spec_to_json(const ProcessSpec& spec) {
  switch (spec.kind()) {
    case ProcessSpec::Kind::kActivity:
      return spec.name();
    case ProcessSpec::Kind::kSequence: {
      json arr = json::array();
      for (const ProcessSpec& child : spec.children()) arr.push_back(spec_to_json(child));
      return json{{"seq", arr}};
    }
    case ProcessSpec::Kind::kXor: {
      json arr = json::array();
      for (const ProcessSpec& child : spec.children()) arr.push_back(spec_to_json(child));
      return json{{"xor", arr}, {"weights", spec.weights()}};
    }
    case ProcessSpec::Kind::kParallel: {
      json arr = json::array();
      for (const ProcessSpec& child : spec.children()) arr.push_back(spec_to_json(child));
      return json{{"and", arr}};
    }
    case ProcessSpec::Kind::kLoop:
      return json{{"loop", spec_to_json(spec.children()[0])}, {"repeat", spec.repeat()}};
  }
  throw InvalidArgument("unreachable spec kind");
}

}  // namespace

ProcessSpec ProcessSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad spec json: ") + e.what());
  }
  try {
    return spec_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad spec json: ") + e.what());
  }
}

std::string ProcessSpec::to_json() const { return spec_to_json(*this).dump(); }

StreamPlan StreamPlan::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad plan json: ") + e.what());
  }
  StreamPlan plan;
  try {
    plan.seed = j.value("seed", 0ULL);
    plan.max_concurrent = j.value("max_concurrent", std::size_t{1});
    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
      throw InvalidArgument("plan needs a non-empty segments array");
    for (const json& seg : j["segments"]) {
      if (!seg.contains("cases") || !seg.contains("spec"))
        throw InvalidArgument("segment needs cases and spec");
      plan.segments.push_back(
          {spec_from_json(seg["spec"]), seg["cases"].get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad plan json: ") + e.what());
  }
  if (plan.max_concurrent == 0)
    throw InvalidArgument("max_concurrent must be positive");
  return plan;
}

std::string StreamPlan::to_json() const {
  json j;
  j["seed"] = seed;
  j["max_concurrent"] = max_concurrent;
  j["segments"] = json::array();
  for (const StreamSegment& seg : segments)
    j["segments"].push_back({{"cases", seg.cases}, {"spec", spec_to_json(seg.spec)}});
  return j.dump(2) + "\n";
}

std::vector<Event> generate_stream(const StreamPlan& plan) {
  if (plan.segments.empty()) throw InvalidArgument("plan needs at least one segment");
  if (plan.max_concurrent == 0) throw InvalidArgument("max_concurrent must be positive");

  std::mt19937_64 rng(plan.seed);
  std::vector<Event> out;
  std::uint64_t seq = 0;
  std::uint64_t case_counter = 0;

  struct Active {
    std::string case_id;
    std::vector<std::string> trace;
    std::size_t pos = 0;
  };

  for (const StreamSegment& segment : plan.segments) {
    std::size_t started = 0;
    std::vector<Active> active;
    while (started < segment.cases || !active.empty()) {
      while (active.size() < plan.max_concurrent && started < segment.cases) {
        Active a;
        a.case_id = "c" + std::to_string(case_counter++);
        a.trace = segment.spec.sample_trace(rng);
        active.push_back(std::move(a));
        ++started;
      }
      std::size_t i = rng() % active.size();
      Active& a = active[i];
      out.push_back({seq++, a.case_id, a.trace[a.pos++]});
      if (a.pos == a.trace.size()) active.erase(active.begin() + i);
    }
  }
  return out;
}

}  // namespace streamhm
