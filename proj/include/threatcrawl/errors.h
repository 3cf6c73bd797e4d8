#pragma once

#include <stdexcept>
#include <string>

namespace threatcrawl {

// Root of every error the engine raises. Per-URL and per-pull errors are
// caught by the crawl loop and recorded; only configuration and engine
// errors escape a run.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define THREATCRAWL_ERROR(Name)   \
  class Name : public Error {     \
   public:                        \
    using Error::Error;           \
  }

// core-model
THREATCRAWL_ERROR(MalformedUrl);
THREATCRAWL_ERROR(UnsupportedScheme);
THREATCRAWL_ERROR(ConstraintError);

class SchemaError : public Error {
 public:
  SchemaError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// relevance
THREATCRAWL_ERROR(EmptyDocument);
THREATCRAWL_ERROR(ProviderUnavailable);
THREATCRAWL_ERROR(DimensionMismatch);
THREATCRAWL_ERROR(ZeroVector);

// bandit
THREATCRAWL_ERROR(NotInitialized);
THREATCRAWL_ERROR(RewardOutOfRange);

// frontier
THREATCRAWL_ERROR(PriorityOutOfRange);

// actions
THREATCRAWL_ERROR(NoContent);
THREATCRAWL_ERROR(ClientError);

// fetcher
THREATCRAWL_ERROR(FetchError);
class RobotsDenied : public FetchError {
 public:
  using FetchError::FetchError;
};
class Blacklisted : public FetchError {
 public:
  using FetchError::FetchError;
};
class Timeout : public FetchError {
 public:
  using FetchError::FetchError;
};
class TooManyRedirects : public FetchError {
 public:
  using FetchError::FetchError;
};
class TransportError : public FetchError {
 public:
  using FetchError::FetchError;
};

// metrics-report
THREATCRAWL_ERROR(CountInconsistent);
THREATCRAWL_ERROR(CorruptCheckpoint);

// simharness
THREATCRAWL_ERROR(InvalidParams);

// Unrecoverable engine state, e.g. no seed could be fetched.
THREATCRAWL_ERROR(EngineError);

#undef THREATCRAWL_ERROR

}  // namespace threatcrawl
