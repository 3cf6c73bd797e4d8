#include "threatcrawl/frontier.h"

#include <algorithm>

#include "threatcrawl/errors.h"

namespace threatcrawl {

namespace {

// std heap algorithms build a max-heap under "less"; an entry is lower when
// its priority is smaller or, on equal priority, when it was inserted later.
bool lower(const FrontierEntry& a, const FrontierEntry& b) {
  if (a.priority != b.priority) return a.priority < b.priority;
  return a.seq > b.seq;
}

}  // namespace

bool Frontier::push(const CanonicalUrl& url, double priority) {
  if (!(priority >= -1.0 && priority <= kSeedPriority)) {
    throw PriorityOutOfRange("priority " + std::to_string(priority) + " outside [-1, 2]");
  }
  if (seen_.contains(url) || enqueued_.contains(url)) return false;
  enqueued_.insert(url);
  heap_.push_back(FrontierEntry{priority, next_seq_++, url});
  std::push_heap(heap_.begin(), heap_.end(), lower);
  return true;
}

std::optional<FrontierEntry> Frontier::pop_max() {
  if (heap_.empty()) return std::nullopt;
  std::pop_heap(heap_.begin(), heap_.end(), lower);
  FrontierEntry top = std::move(heap_.back());
  heap_.pop_back();
  enqueued_.erase(top.url);
  seen_.insert(top.url);
  return top;
}

std::vector<CanonicalUrl> Frontier::seen_urls() const {
  std::vector<CanonicalUrl> out(seen_.begin(), seen_.end());
  std::sort(out.begin(), out.end());
  return out;
}

Frontier Frontier::restore(std::vector<FrontierEntry> entries, const std::vector<CanonicalUrl>& seen,
                           std::uint64_t next_seq) {
  Frontier f;
  f.seen_.insert(seen.begin(), seen.end());
  for (const auto& e : entries) {
    if (f.seen_.contains(e.url) || !f.enqueued_.insert(e.url).second || e.seq >= next_seq) {
      throw CorruptCheckpoint("inconsistent frontier entry " + e.url.str());
    }
  }
  f.heap_ = std::move(entries);
  std::make_heap(f.heap_.begin(), f.heap_.end(), lower);
  f.next_seq_ = next_seq;
  return f;
}

bool should_stop(const StopState& stop) {
  return stop.steps_taken >= stop.budget || stop.frontier_empty;
}

}  // namespace threatcrawl
