#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "threatcrawl/url.h"

namespace threatcrawl {

// Priority given to seed pages; above any cosine similarity.
inline constexpr double kSeedPriority = 2.0;

struct FrontierEntry {
  double priority = 0.0;
  std::uint64_t seq = 0;  // insertion order, breaks priority ties FIFO
  CanonicalUrl url;
};

// Max-priority queue of pages waiting to be the subject of a pull. A URL is
// accepted at most once over the frontier's lifetime.
class Frontier {
 public:
  // Returns false if url was pushed before. Throws PriorityOutOfRange
  // unless priority is in [-1, 2].
  bool push(const CanonicalUrl& url, double priority);

  // Highest priority first, FIFO among equal priorities. The URL moves to
  // the seen set.
  std::optional<FrontierEntry> pop_max();

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  bool seen(const CanonicalUrl& url) const { return seen_.contains(url); }
  bool enqueued(const CanonicalUrl& url) const { return enqueued_.contains(url); }
  std::size_t seen_count() const noexcept { return seen_.size(); }
  std::uint64_t next_seq() const noexcept { return next_seq_; }

  // Checkpoint support. Entries come back in heap order; seen URLs sorted.
  std::vector<FrontierEntry> entries() const { return heap_; }
  std::vector<CanonicalUrl> seen_urls() const;
  static Frontier restore(std::vector<FrontierEntry> entries, const std::vector<CanonicalUrl>& seen,
                          std::uint64_t next_seq);

 private:
  std::vector<FrontierEntry> heap_;
  std::unordered_set<CanonicalUrl> seen_;
  std::unordered_set<CanonicalUrl> enqueued_;
  std::uint64_t next_seq_ = 0;
};

struct StopState {
  std::int64_t steps_taken = 0;
  std::int64_t budget = 0;
  bool frontier_empty = false;
};

bool should_stop(const StopState& stop);

}  // namespace threatcrawl
