#include "tasc/specdec.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"

namespace tasc {

TokenId greedy_next(const TargetModel& target, std::span<const TokenId> context) {
  const TokenDistribution dist = target.next(context);
  if (dist.empty()) throw TargetError("target returned an empty distribution");
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto [t, p] = dist[i];
    if (t >= target.vocab_size()) throw TargetError("target returned token " + std::to_string(t) + " outside its vocabulary");
    if (i > 0 && dist[i - 1].first >= t) throw TargetError("target distribution is not sorted by token id");
    if (!(p >= 0.0) || !std::isfinite(p)) throw TargetError("target returned a negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw TargetError("target distribution does not sum to 1");
  return argmax(dist);
}

StepRecord verify(const TargetModel& target, std::span<const TokenId> context, std::span<const TokenId> drafted) {
  if (drafted.empty()) throw std::invalid_argument("nothing to verify");
  StepRecord rec;
  rec.drafted.assign(drafted.begin(), drafted.end());
  TokenSequence work(context.begin(), context.end());
  work.reserve(context.size() + drafted.size());
  for (;;) {
    const TokenId expected = greedy_next(target, work);
    if (rec.accepted < drafted.size() && drafted[rec.accepted] == expected) {
      work.push_back(expected);
      ++rec.accepted;
      continue;
    }
    rec.correction = expected;
    break;
  }
  return rec;
}

std::vector<double> acceptance_by_position(std::span<const StepRecord> records, std::size_t gamma) {
  if (records.empty()) throw std::invalid_argument("no verification steps recorded");
  std::vector<double> rates(gamma, 0.0);
  for (const auto& r : records) {
    for (std::size_t i = 0; i < std::min(r.accepted, gamma); ++i) rates[i] += 1.0;
  }
  for (double& x : rates) x /= static_cast<double>(records.size());
  return rates;
}

AccelerationReport make_report(std::span<const StepRecord> records, std::size_t total_tokens, std::size_t gamma) {
  AccelerationReport r;
  r.gamma = gamma;
  r.total_tokens = total_tokens;
  for (const auto& s : records) {
    r.target_passes += s.target_calls;
    r.draft_calls += s.drafted.size();
  }
  r.tokens_per_pass = r.target_passes == 0 ? 0.0 : static_cast<double>(total_tokens) / static_cast<double>(r.target_passes);
  if (!records.empty()) {
    r.acceptance_by_position = acceptance_by_position(records, gamma);
    r.first_position_rate = r.acceptance_by_position.empty() ? 0.0 : r.acceptance_by_position.front();
  }
  return r;
}

TokenSequence greedy_decode(const TargetModel& target, std::span<const TokenId> prompt, std::size_t max_tokens,
                            const StopCondition& stop) {
  TokenSequence work(prompt.begin(), prompt.end());
  TokenSequence out;
  while (out.size() < max_tokens) {
    const TokenId t = greedy_next(target, work);
    out.push_back(t);
    work.push_back(t);
    if (stop.stop_token && t == *stop.stop_token) break;
  }
  return out;
}

Generation generate(const TargetModel& target, Drafter& drafter, std::span<const TokenId> prompt, std::size_t max_tokens,
                    std::size_t gamma, const StopCondition& stop) {
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be >= 1");
  if (gamma < 1) throw std::invalid_argument("gamma must be >= 1");
  Generation gen;
  TokenSequence context(prompt.begin(), prompt.end());
  bool stopped = false;
  while (!stopped && gen.tokens.size() < max_tokens) {
    const TokenSequence drafted = drafter.draft(context, gamma);
    if (drafted.size() != gamma) throw std::logic_error("drafter returned the wrong number of tokens");
    StepRecord rec = verify(target, context, drafted);

    TokenSequence emitted(drafted.begin(), drafted.begin() + static_cast<std::ptrdiff_t>(rec.accepted));
    emitted.push_back(rec.correction);
    if (stop.stop_token) {
      auto it = std::find(emitted.begin(), emitted.end(), *stop.stop_token);
      if (it != emitted.end()) {
        emitted.erase(it + 1, emitted.end());
        stopped = true;
      }
    }
    const std::size_t room = max_tokens - gen.tokens.size();
    if (emitted.size() > room) emitted.resize(room);

    gen.tokens.insert(gen.tokens.end(), emitted.begin(), emitted.end());
    context.insert(context.end(), emitted.begin(), emitted.end());
    drafter.observe(emitted);
    gen.steps.push_back(std::move(rec));
  }
  gen.report = make_report(gen.steps, gen.tokens.size(), gamma);
  return gen;
}

double modeled_speedup(const AccelerationReport& report, double cost_target, double cost_draft) {
  if (!(cost_target > 0.0) || !(cost_draft >= 0.0)) throw std::invalid_argument("costs must be positive");
  const double denom = static_cast<double>(report.target_passes) * cost_target +
                       static_cast<double>(report.draft_calls) * cost_draft;
  if (denom == 0.0) throw std::invalid_argument("report has no target passes");
  return static_cast<double>(report.total_tokens) * cost_target / denom;
}

TokenSequence GreedyOracleDrafter::draft(std::span<const TokenId> context, std::size_t gamma) const {
  TokenSequence work(context.begin(), context.end());
  TokenSequence out;
  for (std::size_t i = 0; i < gamma; ++i) {
    const TokenId t = greedy_next(target_, work);
    out.push_back(t);
    work.push_back(t);
  }
  return out;
}

TokenSequence AdversarialDrafter::draft(std::span<const TokenId> context, std::size_t gamma) const {
  const auto v = static_cast<TokenId>(target_.vocab_size());
  const TokenId wrong = static_cast<TokenId>((greedy_next(target_, context) + 1) % v);
  return TokenSequence(gamma, wrong);
}

void write_trace(std::ostream& out, std::size_t session, std::span<const StepRecord> steps) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    nlohmann::ordered_json line;
    line["session"] = session;
    line["step"] = i;
    line["drafted"] = steps[i].drafted;
    line["k"] = steps[i].accepted;
    line["correction"] = steps[i].correction;
    out << line.dump() << '\n';
  }
}

}  // namespace tasc
