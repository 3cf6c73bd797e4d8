#include "threatcrawl/bandit.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "threatcrawl/errors.h"

namespace threatcrawl {

double raw_reward(const PullResult& result, double domain_weight) {
  if (result.failed) return 0.0;
  const auto relevant = std::count_if(result.retrieved.begin(), result.retrieved.end(),
                                      [](const PageRecord& p) { return is_relevant(p.label); });
  const double r = domain_weight * static_cast<double>(result.new_domains.size()) +
                   static_cast<double>(relevant);
  return std::max(r, 0.0);
}

double normalized_reward(double raw, std::size_t retrieved_count, double domain_weight) {
  const double bound = static_cast<double>(std::max<std::size_t>(1, retrieved_count)) * (1.0 + domain_weight);
  return std::clamp(raw / bound, 0.0, 1.0);
}

std::string_view policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::kUcb1: return "ucb1";
    case PolicyKind::kEpsilonGreedy: return "eps";
    case PolicyKind::kRandom: return "random";
  }
  return "ucb1";
}

PolicyKind policy_from_name(std::string_view name) {
  if (name == "ucb1") return PolicyKind::kUcb1;
  if (name == "eps" || name == "epsilon-greedy") return PolicyKind::kEpsilonGreedy;
  if (name == "random") return PolicyKind::kRandom;
  throw ConstraintError("unknown policy '" + std::string(name) + "'");
}

BanditState::BanditState(std::span<const Action> actions, std::uint64_t rng_seed) : rng_(rng_seed) {
  for (const Action a : kAllActions) {
    if (std::find(actions.begin(), actions.end(), a) != actions.end()) {
      arms_.push_back(ArmStats{.action = a});
    }
  }
  if (arms_.empty()) throw ConstraintError("bandit needs at least one arm");
}

const ArmStats& BanditState::arm(Action a) const {
  for (const auto& s : arms_) {
    if (s.action == a) return s;
  }
  throw ConstraintError(std::string("action ") + action_code(a) + " is not enabled");
}

ArmStats& BanditState::mutable_arm(Action a) {
  return const_cast<ArmStats&>(static_cast<const BanditState*>(this)->arm(a));
}

bool BanditState::has_arm(Action a) const noexcept {
  return std::any_of(arms_.begin(), arms_.end(), [a](const ArmStats& s) { return s.action == a; });
}

bool BanditState::initialized() const noexcept {
  return std::all_of(arms_.begin(), arms_.end(), [](const ArmStats& s) { return s.pulls > 0; });
}

void BanditState::update(Action action, double reward, const PullResult& result) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw RewardOutOfRange("reward " + std::to_string(reward) + " outside [0, 1]");
  }
  ArmStats& s = mutable_arm(action);
  s.pulls += 1;
  total_pulls_ += 1;
  s.mean_reward += (reward - s.mean_reward) / static_cast<double>(s.pulls);
  for (const auto& page : result.retrieved) {
    if (page.similarity) {
      // Similarities can be negative; the column tracks their plain sum.
      s.cumulative_similarity += *page.similarity;
      s.pages_retrieved += 1;
    }
  }
}

double BanditState::next_unit() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::size_t BanditState::next_index(std::size_t n) {
  return static_cast<std::size_t>(rng_() % n);
}

std::string BanditState::rng_state() const {
  std::ostringstream out;
  out << rng_;
  return out.str();
}

void BanditState::set_rng_state(const std::string& state) {
  std::istringstream in(state);
  in >> rng_;
  if (!in) throw CorruptCheckpoint("unreadable generator state");
}

void BanditState::restore_arms(std::vector<ArmStats> arms) {
  if (arms.size() != arms_.size()) throw CorruptCheckpoint("arm count mismatch");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].action != arms_[i].action) throw CorruptCheckpoint("arm order mismatch");
    total += arms[i].pulls;
  }
  arms_ = std::move(arms);
  total_pulls_ = total;
}

double ucb1_index(const ArmStats& arm, std::uint64_t total_pulls) {
  return arm.mean_reward +
         std::sqrt(2.0 * std::log(static_cast<double>(total_pulls)) / static_cast<double>(arm.pulls));
}

Action select_arm(const BanditState& state) {
  if (!state.initialized()) throw NotInitialized("every arm must be pulled once before UCB1 selection");
  const auto& arms = state.arms();
  std::size_t best = 0;
  double best_index = ucb1_index(arms[0], state.total_pulls());
  for (std::size_t i = 1; i < arms.size(); ++i) {
    const double idx = ucb1_index(arms[i], state.total_pulls());
    if (idx > best_index) {
      best = i;
      best_index = idx;
    }
  }
  return arms[best].action;
}

namespace {

Action greedy(const BanditState& state) {
  const auto& arms = state.arms();
  std::size_t best = 0;
  for (std::size_t i = 1; i < arms.size(); ++i) {
    if (arms[i].mean_reward > arms[best].mean_reward) best = i;
  }
  return arms[best].action;
}

}  // namespace

Action select_arm(BanditState& state, PolicyKind policy, double epsilon) {
  switch (policy) {
    case PolicyKind::kUcb1:
      return select_arm(state);
    case PolicyKind::kEpsilonGreedy:
      if (state.next_unit() < epsilon) return state.arms()[state.next_index(state.arms().size())].action;
      return greedy(state);
    case PolicyKind::kRandom:
      return state.arms()[state.next_index(state.arms().size())].action;
  }
  return select_arm(state);
}

void update(BanditState& state, Action action, double reward, const PullResult& result) {
  state.update(action, reward, result);
}

BanditState init_discovery(std::span<const CanonicalUrl> seeds, std::span<const Action> actions,
                           double domain_weight, std::uint64_t rng_seed,
                           const PullExecutor& execute, const PullObserver& observe) {
  if (seeds.empty()) throw ConstraintError("discovery needs at least one seed");
  BanditState state(actions, rng_seed);
  // Arms are pulled in F, B, K order regardless of the order given.
  std::vector<Action> order;
  for (const auto& arm : state.arms()) order.push_back(arm.action);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const CanonicalUrl& subject = seeds[i % seeds.size()];
    PullResult result = [&] {
      try {
        return execute(order[i], subject);
      } catch (const std::exception& e) {
        return PullResult{.source_page = subject, .action = order[i], .failed = true, .error = e.what()};
      }
    }();
    const double raw = result.failed ? 0.0 : raw_reward(result, domain_weight);
    const double norm = normalized_reward(raw, result.retrieved.size(), domain_weight);
    state.update(order[i], norm, result);
    if (observe) observe(result, raw, norm);
  }
  return state;
}

}  // namespace threatcrawl
