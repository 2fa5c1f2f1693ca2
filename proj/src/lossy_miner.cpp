#include "streamhm/lossy_miner.hpp"

#include <algorithm>
#include <cmath>

#include "streamhm/errors.hpp"

namespace streamhm {

LossyMiner::LossyMiner(Config config) : config_(std::move(config)) {
  if (!(config_.epsilon > 0.0) || config_.epsilon > 1.0)
    throw InvalidArgument("epsilon must be in (0, 1]");
  width_ = static_cast<std::uint64_t>(std::ceil(1.0 / config_.epsilon));
}

std::optional<CausalModel> LossyMiner::observe(const Event& e) {
  const std::uint64_t b_current = bucket();

  auto [act, act_inserted] = activities_.try_emplace(e.activity, Entry{1, b_current - 1});
  if (!act_inserted) act->second.f += 1;

  auto case_it = cases_.find(e.case_id);
  if (case_it != cases_.end()) {
    ActivityPair relation{case_it->second.last_activity, e.activity};
    auto [rel, rel_inserted] = relations_.try_emplace(relation, Entry{1, b_current - 1});
    if (!rel_inserted) rel->second.f += 1;
    case_it->second.last_activity = e.activity;
    case_it->second.f += 1;
  } else {
    cases_.emplace(e.case_id, CaseEntry{e.activity, 1, b_current - 1});
  }

  enforce_cap();
  peak_entries_ = std::max(peak_entries_, entries_retained());

  cleanup_ran_last_observe_ = counter_ % width_ == 0;
  if (cleanup_ran_last_observe_) cleanup(b_current);
  ++counter_;

  if (config_.mine_every != 0 && events_processed() % config_.mine_every == 0)
    return current_model();
  return std::nullopt;
}

void LossyMiner::cleanup(std::uint64_t bucket) {
  auto stale = [bucket](const auto& entry) { return entry.f + entry.delta <= bucket; };
  std::erase_if(activities_, [&](const auto& kv) { return stale(kv.second); });
  std::erase_if(cases_, [&](const auto& kv) { return stale(kv.second); });
  std::erase_if(relations_, [&](const auto& kv) { return stale(kv.second); });
  ++cleanups_run_;
}

void LossyMiner::enforce_cap() {
  if (config_.max_entries == 0) return;
  while (entries_retained() > config_.max_entries) {
    // Drop the entry closest to deletion; ties resolve by table then key
    // order so eviction stays deterministic.
    std::uint64_t best = UINT64_MAX;
    int table = -1;
    std::map<std::string, Entry>::iterator act_it;
    std::map<std::string, CaseEntry>::iterator case_it;
    std::map<ActivityPair, Entry>::iterator rel_it;
    for (auto it = activities_.begin(); it != activities_.end(); ++it) {
      if (it->second.f + it->second.delta < best) {
        best = it->second.f + it->second.delta;
        table = 0;
        act_it = it;
      }
    }
    for (auto it = cases_.begin(); it != cases_.end(); ++it) {
      if (it->second.f + it->second.delta < best) {
        best = it->second.f + it->second.delta;
        table = 1;
        case_it = it;
      }
    }
    for (auto it = relations_.begin(); it != relations_.end(); ++it) {
      if (it->second.f + it->second.delta < best) {
        best = it->second.f + it->second.delta;
        table = 2;
        rel_it = it;
      }
    }
    if (table == 0) activities_.erase(act_it);
    else if (table == 1) cases_.erase(case_it);
    else relations_.erase(rel_it);
  }
}

CausalModel LossyMiner::current_model() const {
  ActivityCounts activity_count;
  for (const auto& [name, entry] : activities_)
    activity_count[name] = static_cast<double>(entry.f);
  PairCounts direct;
  for (const auto& [pair, entry] : relations_)
    direct[pair] = static_cast<double>(entry.f);
  return generate_model(activity_count, direct, config_.thresholds);
}

void ExactCounts::add(const Event& e) {
  activities_[e.activity] += 1;
  cases_[e.case_id] += 1;
  auto it = last_activity_.find(e.case_id);
  if (it != last_activity_.end()) {
    relations_[{it->second, e.activity}] += 1;
    it->second = e.activity;
  } else {
    last_activity_.emplace(e.case_id, e.activity);
  }
}

namespace {

template <typename Map, typename ExactMap, typename KeyFormat>
void check_table(const Map& table, const ExactMap& exact, double bound,
                 const char* label, GuaranteeReport& report, KeyFormat format) {
  for (const auto& [key, entry] : table) {
    ++report.keys_checked;
    auto it = exact.find(key);
    std::uint64_t truth = it == exact.end() ? 0 : it->second;
    if (entry.f > truth) {
      report.ok = false;
      report.violations.push_back(std::string(label) + " " + format(key) +
                                  ": f=" + std::to_string(entry.f) + " exceeds true " +
                                  std::to_string(truth));
    } else if (static_cast<double>(truth - entry.f) > bound) {
      report.ok = false;
      report.violations.push_back(std::string(label) + " " + format(key) + ": true-f=" +
                                  std::to_string(truth - entry.f) + " exceeds bound " +
                                  std::to_string(bound));
    }
  }
}

}  // namespace

GuaranteeReport frequency_guarantee_check(const LossyMiner& miner,
                                          const ExactCounts& exact) {
  GuaranteeReport report;
  const double bound = miner.epsilon() * static_cast<double>(miner.events_processed());
  auto identity = [](const std::string& k) { return k; };
  auto pair_format = [](const ActivityPair& k) { return k.first + ">" + k.second; };
  check_table(miner.activity_table(), exact.activities(), bound, "activity", report,
              identity);
  check_table(miner.case_table(), exact.cases(), bound, "case", report, identity);
  check_table(miner.relation_table(), exact.relations(), bound, "relation", report,
              pair_format);
  return report;
}

}  // namespace streamhm
