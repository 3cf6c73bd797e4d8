#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "threatcrawl/config.h"
#include "threatcrawl/page.h"
#include "threatcrawl/url.h"

namespace threatcrawl {

// Outcome of executing one action on one subject page.
struct PullResult {
  CanonicalUrl source_page;
  Action action = Action::kForward;
  std::vector<PageRecord> retrieved;  // newly classified pages only
  std::set<Domain> new_domains;       // domains first seen in this pull
  bool failed = false;
  std::string error;
};

// delta * |new domains| + #relevant retrieved pages, floored at 0. A failed
// pull earns 0 whatever it retrieved.
double raw_reward(const PullResult& result, double domain_weight);

// raw / (max(1, retrieved) * (1 + delta)); lies in [0, 1] because both
// counts are bounded by the number of retrieved pages.
double normalized_reward(double raw, std::size_t retrieved_count, double domain_weight);

struct ArmStats {
  Action action = Action::kForward;
  std::uint64_t pulls = 0;
  double mean_reward = 0.0;
  double cumulative_similarity = 0.0;
  std::uint64_t pages_retrieved = 0;

  double average_similarity() const {
    return pages_retrieved == 0 ? 0.0 : cumulative_similarity / static_cast<double>(pages_retrieved);
  }
  bool operator==(const ArmStats&) const = default;
};

enum class PolicyKind : std::uint8_t { kUcb1, kEpsilonGreedy, kRandom };

std::string_view policy_name(PolicyKind p);
PolicyKind policy_from_name(std::string_view name);

// Per-arm statistics plus the seeded generator used by the randomized
// baseline policies.
class BanditState {
 public:
  BanditState(std::span<const Action> actions, std::uint64_t rng_seed);

  const std::vector<ArmStats>& arms() const noexcept { return arms_; }
  const ArmStats& arm(Action a) const;
  bool has_arm(Action a) const noexcept;
  std::uint64_t total_pulls() const noexcept { return total_pulls_; }
  bool initialized() const noexcept;

  // Running-mean update; throws RewardOutOfRange unless reward is in [0, 1].
  void update(Action action, double reward, const PullResult& result);

  // Uniform double in [0, 1) and uniform index in [0, n) from the state's
  // generator; both are platform independent.
  double next_unit();
  std::size_t next_index(std::size_t n);

  // Generator state as text, for checkpoints.
  std::string rng_state() const;
  void set_rng_state(const std::string& state);
  // Restores arm statistics from a checkpoint.
  void restore_arms(std::vector<ArmStats> arms);

  bool operator==(const BanditState& o) const {
    return arms_ == o.arms_ && total_pulls_ == o.total_pulls_ && rng_ == o.rng_;
  }

 private:
  ArmStats& mutable_arm(Action a);

  std::vector<ArmStats> arms_;
  std::uint64_t total_pulls_ = 0;
  std::mt19937_64 rng_;
};

// UCB1 index: mean + sqrt(2 ln t / n).
double ucb1_index(const ArmStats& arm, std::uint64_t total_pulls);

// argmax of the UCB1 index, ties broken in F, B, K order. Throws
// NotInitialized while any arm is unpulled.
Action select_arm(const BanditState& state);

// Dispatches to UCB1, epsilon-greedy or uniform random selection.
Action select_arm(BanditState& state, PolicyKind policy, double epsilon = 0.1);

// Free-function form of BanditState::update.
void update(BanditState& state, Action action, double reward, const PullResult& result);

// Executes one enabled action. May throw; a throwing pull is recorded as a
// failed pull with reward 0.
using PullExecutor = std::function<PullResult(Action action, const CanonicalUrl& subject)>;
// Observes every discovery pull after its update.
using PullObserver = std::function<void(const PullResult& result, double raw, double normalized)>;

// Pulls every enabled action exactly once, action i on seed i mod |seeds|.
BanditState init_discovery(std::span<const CanonicalUrl> seeds, std::span<const Action> actions,
                           double domain_weight, std::uint64_t rng_seed,
                           const PullExecutor& execute, const PullObserver& observe = {});

}  // namespace threatcrawl
