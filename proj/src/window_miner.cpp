#include "streamhm/window_miner.hpp"

namespace streamhm {

WindowMiner::WindowMiner(Config config)
    : config_(std::move(config)), buffer_(config_.capacity) {}

std::optional<CausalModel> WindowMiner::observe(const Event& e) {
  if (config_.analyze && !config_.analyze(e)) return std::nullopt;
  buffer_.push_bounded(e, config_.policy);
  ++events_observed_;
  if (config_.mine_every != 0 && events_observed_ % config_.mine_every == 0)
    return current_model();
  return std::nullopt;
}

CausalModel WindowMiner::current_model() const {
  return mine_log(buffer_, config_.thresholds);
}

}  // namespace streamhm
