#include "streamhm/online_miner.hpp"

#include <algorithm>

namespace streamhm {

double adapt_alpha(double alpha, double fitness_now, double fitness_previous,
                   const AlphaAdaptation& adaptation) {
  if (fitness_now - fitness_previous < -adaptation.tolerance)
    return std::max(0.0, alpha - adaptation.step_down);
  return std::min(1.0, alpha + adaptation.step_up);
}

namespace {

// Moves key to the front of the weighted queue, keeping its weight when it
// was already present and evicting the least recent entry when a new key
// arrives at capacity. Then applies the weight update: the front entry is
// the one just observed.
template <typename Key>
void record_weighted(MruQueue<Key, double>& queue, const Key& key,
                     WeightPolicy policy, double alpha) {
  std::optional<double> weight = queue.take(key);
  if (!weight && queue.full()) queue.evict_back();
  queue.push_front(key, weight.value_or(0.0));
  if (policy != WeightPolicy::kStationary)
    queue.for_each_value([alpha](double& w) { w *= alpha; });
  queue.front_value() += 1.0;
}

}  // namespace

OnlineMiner::OnlineMiner(Config config)
    : config_(std::move(config)),
      alpha_(config_.alpha),
      activities_(config_.max_qa),
      cases_(config_.max_qc),
      relations_(config_.max_qr) {}

std::optional<CausalModel> OnlineMiner::observe(const Event& e) {
  if (config_.analyze && !config_.analyze(e)) return std::nullopt;

  record_weighted(activities_, e.activity, config_.policy, alpha_);

  std::optional<std::string> previous = cases_.take(e.case_id);
  if (previous) {
    record_weighted(relations_, ActivityPair{std::move(*previous), e.activity},
                    config_.policy, alpha_);
  } else {
    ++cases_started_;
    if (cases_.full()) cases_.evict_back();
  }
  cases_.push_front(e.case_id, e.activity);

  ++events_observed_;
  peak_entries_ = std::max(peak_entries_, entries_retained());
  if (config_.mine_every != 0 && events_observed_ % config_.mine_every == 0)
    return current_model();
  return std::nullopt;
}

CausalModel OnlineMiner::current_model() const {
  return generate_model(activities_.snapshot(), relations_.snapshot(),
                        config_.thresholds);
}

void OnlineMiner::adapt(double fitness_now, double fitness_previous) {
  if (config_.policy != WeightPolicy::kSelfAdapting) return;
  alpha_ = adapt_alpha(alpha_, fitness_now, fitness_previous, config_.adaptation);
}

}  // namespace streamhm
