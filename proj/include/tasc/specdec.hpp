#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tasc/drafter.hpp"

namespace tasc {

/// Raised when a target model returns an invalid next-token distribution.
class TargetError : public InputError {
 public:
  using InputError::InputError;
};

/// Next-token provider verified against. Must be deterministic for a fixed
/// context.
class TargetModel {
 public:
  virtual ~TargetModel() = default;
  virtual TokenDistribution next(std::span<const TokenId> context) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

/// Validated argmax (lowest id on ties) of the target's next distribution.
TokenId greedy_next(const TargetModel& target, std::span<const TokenId> context);

struct StepRecord {
  TokenSequence drafted;
  std::size_t accepted = 0;  // k, leading drafted tokens matching the target
  TokenId correction = 0;    // target's token after the accepted prefix
  std::size_t target_calls = 1;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Exact-match greedy verification. One call is one target pass: the pass
/// scores every drafted position plus the one after it.
StepRecord verify(const TargetModel& target, std::span<const TokenId> context, std::span<const TokenId> drafted);

struct StopCondition {
  std::optional<TokenId> stop_token;  // emitted, then generation ends
};

struct AccelerationReport {
  std::size_t gamma = 0;
  std::size_t total_tokens = 0;
  std::size_t target_passes = 0;
  std::size_t draft_calls = 0;  // drafted tokens, one drafter lookup each
  double tokens_per_pass = 0.0;
  std::vector<double> acceptance_by_position;  // positions 1..gamma
  double first_position_rate = 0.0;
};

struct Generation {
  TokenSequence tokens;  // generated continuation, prompt excluded
  AccelerationReport report;
  std::vector<StepRecord> steps;
};

/// rate[i] = fraction of steps with k >= i + 1.
std::vector<double> acceptance_by_position(std::span<const StepRecord> records, std::size_t gamma);

AccelerationReport make_report(std::span<const StepRecord> records, std::size_t total_tokens, std::size_t gamma);

/// Plain greedy decoding of the target alone.
TokenSequence greedy_decode(const TargetModel& target, std::span<const TokenId> prompt, std::size_t max_tokens,
                            const StopCondition& stop = {});

/// Draft, verify, emit (accepted ++ correction), let the drafter observe the
/// emitted tokens; repeat until `max_tokens` or the stop token. The returned
/// tokens equal greedy_decode(target, prompt, max_tokens, stop).
Generation generate(const TargetModel& target, Drafter& drafter, std::span<const TokenId> prompt,
                    std::size_t max_tokens, std::size_t gamma, const StopCondition& stop = {});

/// total_tokens * cost_target / (target_passes * cost_target + draft_calls * cost_draft).
/// Costs must be positive except that cost_draft may be 0.
double modeled_speedup(const AccelerationReport& report, double cost_target, double cost_draft);

/// Drafter that replays the target's own greedy continuation.
class GreedyOracleDrafter : public Drafter {
 public:
  explicit GreedyOracleDrafter(const TargetModel& target) : target_(target) {}
  TokenSequence draft(std::span<const TokenId> context, std::size_t gamma) const override;

 private:
  const TargetModel& target_;
};

/// Drafter whose first proposed token always differs from the target's.
class AdversarialDrafter : public Drafter {
 public:
  explicit AdversarialDrafter(const TargetModel& target) : target_(target) {}
  TokenSequence draft(std::span<const TokenId> context, std::size_t gamma) const override;

 private:
  const TargetModel& target_;
};

/// One JSON line per step: {"session", "step", "drafted", "k", "correction"}.
void write_trace(std::ostream& out, std::size_t session, std::span<const StepRecord> steps);

}  // namespace tasc
