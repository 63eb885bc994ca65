#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sweepsim {

/// A run exceeded its event cap. Carries the progress made so the caller can
/// report partial results instead of dropping them.
class EventCapExceeded : public std::runtime_error {
 public:
  EventCapExceeded(std::uint64_t events, std::uint64_t cap)
      : std::runtime_error("event cap exceeded: " + std::to_string(events) +
                           " events (cap " + std::to_string(cap) + ")"),
        events_(events),
        cap_(cap) {}
  std::uint64_t events() const { return events_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t events_;
  std::uint64_t cap_;
};

/// Rejection sampling ran out of attempts before collecting the requested
/// number of conditioned outcomes.
class AttemptCapExceeded : public std::runtime_error {
 public:
  AttemptCapExceeded(std::uint64_t attempts, std::uint64_t collected,
                     std::uint64_t requested)
      : std::runtime_error("attempt cap exceeded: " +
                           std::to_string(collected) + "/" +
                           std::to_string(requested) + " outcomes after " +
                           std::to_string(attempts) + " attempts"),
        attempts_(attempts),
        collected_(collected) {}
  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t collected() const { return collected_; }

 private:
  std::uint64_t attempts_;
  std::uint64_t collected_;
};

class SampleTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A class probability came out below -1e-12, i.e. the q inputs are mutually
/// inconsistent (e.g. q3 not computed from the same parameters).
class NegativeProbability : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The adaptive ODE controller could not meet its tolerance.
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A confirmation-window search hit its time cap without validating.
class NotReached : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file rejection; message carries the offending line number.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  ConfigError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg) {}
};

}  // namespace sweepsim
