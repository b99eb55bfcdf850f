#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "tasc/bpe.hpp"
#include "tasc/corpus.hpp"
#include "tasc/enrichment.hpp"
#include "tasc/metrics.hpp"
#include "tasc/ngram_io.hpp"
#include "tasc/predictor.hpp"
#include "tasc/specdec.hpp"
#include "tasc/targets.hpp"
#include "tasc/vocab_io.hpp"

namespace tasc::cli {

using ojson = nlohmann::ordered_json;

namespace {

void emit(const ojson& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << report.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << report.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  return f;
}

TaskCorpus read_corpus(const std::string& path, const std::string& format) {
  if (path.empty()) throw InputError("--corpus is required");
  return load_corpus(path, parse_corpus_format(format));
}

// JSON has no NaN; a null stands for an undefined ratio.
ojson number(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

Vocabulary base_vocabulary(const RunConfig& c, const TaskCorpus& corpus) {
  if (!c.base_vocab.empty()) return load_vocabulary(c.base_vocab);
  if (!c.bpe_vocab.empty() || !c.bpe_merges.empty()) {
    if (c.bpe_vocab.empty() || c.bpe_merges.empty()) throw InputError("--bpe-vocab and --bpe-merges go together");
    return bpe::load(c.bpe_vocab, c.bpe_merges);
  }
  switch (parse_base_scheme(c.base)) {
    case BaseScheme::Bytes:
      return Vocabulary::bytes();
    case BaseScheme::Words: {
      const auto texts = corpus.outputs();
      return Vocabulary::words(texts, c.max_words);
    }
    case BaseScheme::Bpe:
      break;
  }
  throw InputError("--base bpe needs --bpe-vocab and --bpe-merges");
}

struct TokenStats {
  double normalized_entropy = 0.0;
  double h2 = 0.0;
};

TokenStats output_token_stats(const TaskCorpus& corpus, const Vocabulary& vocab) {
  const auto seqs = tokenize_corpus(corpus, vocab, CorpusSide::Output);
  const auto dist = token_distribution(seqs);
  return {normalized_entropy(dist, vocab.size()), renyi_entropy(dist, 2.0)};
}

ojson candidate_json(const MergeCandidate& m, const Vocabulary& vocab) {
  std::string s;
  for (TokenId t : m.ngram) s += vocab.token_string(t);
  ojson j;
  j["ngram"] = m.ngram;
  j["string"] = escape_bytes(s);
  j["freq"] = m.freq;
  j["reward"] = m.reward;
  j["pcs"] = m.pcs;
  return j;
}

void do_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const TaskCorpus corpus = read_corpus(c.corpus, c.format);
  const auto norm = parse_normalization(c.normalization);
  const VariabilityReport r = variability_report(corpus, c.n, norm, c.mass);

  ojson j;
  j["command"] = "analyze";
  j["corpus"] = corpus.id();
  j["documents"] = corpus.size();
  j["n"] = r.n;
  j["normalization"] = to_string(norm);
  j["mass"] = r.mass;
  j["input"] = {{"entropy_bits", r.input_entropy}, {"coverage", r.input_coverage}, {"unique", r.input_unique}};
  j["output"] = {{"entropy_bits", r.output_entropy}, {"coverage", r.output_coverage}, {"unique", r.output_unique}};
  j["delta_pct"] = number(r.delta_pct);
  j["coverage_ratio"] = number(r.coverage_ratio);
  emit(j, c.out, out);

  err << corpus.id() << ": word " << r.n << "-gram entropy " << r.input_entropy << " -> " << r.output_entropy
      << " bits, coverage " << r.input_coverage << " -> " << r.output_coverage << '\n';
}

void do_augment(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const TaskCorpus corpus = read_corpus(c.corpus, c.format);
  const Vocabulary base = base_vocabulary(c, corpus);

  AugmentationConfig ac;
  ac.budget = c.budget;
  ac.n_max = c.n_max;
  ac.pcs_threshold = c.pcs_threshold;
  ac.recount_interval = c.recount_interval;
  ac.threads = c.threads;
  // Greedy enrichment is prefix-stable, so one run at the largest budget
  // serves every sweep point.
  std::size_t run_budget = ac.budget;
  for (std::size_t m : c.sweep) run_budget = std::max(run_budget, m);
  AugmentationConfig run_cfg = ac;
  run_cfg.budget = run_budget;
  const EnrichmentResult full = enrich_vocabulary(corpus, base, run_cfg);

  const std::size_t added_before = base.added_size();
  const std::size_t kept = std::min(ac.budget, full.accepted.size());
  const Vocabulary vocab = full.vocab.with_added_prefix(added_before + kept);
  const bool short_of_budget = kept < ac.budget;

  if (!c.vocab_out.empty()) save_vocabulary(vocab, c.vocab_out);
  // Ledger entries examined before the budget was reached.
  std::size_t examined = 0;
  std::size_t rejected = 0;
  const bool truncated = full.accepted.size() > kept;
  for (std::size_t accepted = 0; examined < full.ledger.size() && !(truncated && accepted == kept); ++examined) {
    if (full.ledger[examined].accepted) {
      ++accepted;
    } else {
      ++rejected;
    }
  }
  if (!c.ledger.empty()) {
    auto f = open_out(c.ledger);
    for (std::size_t i = 0; i < examined; ++i) {
      const auto& e = full.ledger[i];
      ojson line;
      line["step"] = i;
      line["decision"] = e.accepted ? "accepted" : "rejected";
      if (e.accepted) line["id"] = e.id;
      line.update(candidate_json(e.candidate, full.vocab));
      f << line.dump() << '\n';
    }
  }

  const CompressionReport cr = compression_report(corpus, base, vocab);
  const TokenStats before = output_token_stats(corpus, base);
  const TokenStats after = output_token_stats(corpus, vocab);

  ojson j;
  j["command"] = "augment";
  j["corpus"] = corpus.id();
  j["scheme"] = to_string(base.scheme());
  j["budget"] = ac.budget;
  j["n_max"] = ac.n_max;
  j["pcs_threshold"] = ac.pcs_threshold;
  j["recount_interval"] = ac.recount_interval;
  j["base_size"] = base.size();
  j["vocab_size"] = vocab.size();
  j["accepted"] = kept;
  j["rejected"] = rejected;
  j["exhausted"] = short_of_budget;
  j["compression"] = {{"avg_len_before", cr.avg_len_before},
                      {"avg_len_after", cr.avg_len_after},
                      {"compression_ratio", cr.compression_ratio},
                      {"bytes_per_token_before", cr.bytes_per_token_before},
                      {"bytes_per_token_after", cr.bytes_per_token_after}};
  j["output_tokens"] = {{"normalized_entropy_before", before.normalized_entropy},
                        {"normalized_entropy_after", after.normalized_entropy},
                        {"h2_before", before.h2},
                        {"h2_after", after.h2}};
  if (!c.sweep.empty()) {
    auto rows = ojson::array();
    std::vector<std::size_t> budgets = c.sweep;
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
    for (std::size_t m : budgets) {
      const std::size_t avail = std::min(m, full.accepted.size());
      const Vocabulary vm = full.vocab.with_added_prefix(added_before + avail);
      const CompressionReport rm = compression_report(corpus, base, vm);
      const TokenStats sm = output_token_stats(corpus, vm);
      rows.push_back({{"M", m},
                      {"added", avail},
                      {"avg_len", rm.avg_len_after},
                      {"bytes_per_token", rm.bytes_per_token_after},
                      {"normalized_entropy", sm.normalized_entropy},
                      {"h2", sm.h2}});
    }
    j["sweep"] = std::move(rows);
  }
  emit(j, c.out, out);

  if (short_of_budget) {
    err << "warning: only " << kept << " of " << ac.budget << " tokens added; candidate pool exhausted\n";
  }
  err << corpus.id() << ": +" << kept << " tokens, avg output length " << cr.avg_len_before << " -> "
      << cr.avg_len_after << " (x" << cr.compression_ratio << ")\n";
}

std::vector<TokenSequence> encode_side(const TaskCorpus& corpus, const Vocabulary& vocab, bool with_input) {
  std::vector<TokenSequence> seqs;
  seqs.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    seqs.push_back(vocab.encode(with_input ? d.input + d.output : d.output));
  }
  return seqs;
}

struct SimulationResult {
  AccelerationReport report;
  std::vector<Generation> sessions;
};

SimulationResult simulate_once(const RunConfig& c, const TargetModel& target,
                               const std::shared_ptr<const CorpusDrafter>& corpus_drafter,
                               std::span<const TokenSequence> prompts, double lambda) {
  StopCondition stop;
  if (c.stop_token) stop.stop_token = *c.stop_token;

  SimulationResult res;
  std::vector<StepRecord> all_steps;
  std::size_t total = 0;
  for (std::size_t s = 0; s < prompts.size(); ++s) {
    const TokenSequence& prompt = prompts[s];
    std::unique_ptr<Drafter> drafter;
    if (c.drafter == "mixed") {
      drafter = std::make_unique<MixedDrafter>(corpus_drafter, PromptDrafter(prompt, c.n_max, !c.no_refresh), lambda);
    } else if (c.drafter == "oracle") {
      drafter = std::make_unique<GreedyOracleDrafter>(target);
    } else if (c.drafter == "adversarial") {
      drafter = std::make_unique<AdversarialDrafter>(target);
    } else {
      throw InputError("unknown drafter '" + c.drafter + "' (expected mixed, oracle or adversarial)");
    }

    Generation gen = generate(target, *drafter, prompt, c.max_tokens, c.gamma, stop);
    if (c.oracle_check) {
      const TokenSequence reference = greedy_decode(target, prompt, c.max_tokens, stop);
      if (reference != gen.tokens) {
        throw InvariantError("session " + std::to_string(s) + ": speculative output differs from greedy decoding");
      }
    }
    total += gen.tokens.size();
    all_steps.insert(all_steps.end(), gen.steps.begin(), gen.steps.end());
    res.sessions.push_back(std::move(gen));
  }
  res.report = make_report(all_steps, total, c.gamma);
  return res;
}

ojson report_json(const AccelerationReport& r) {
  ojson j;
  j["total_tokens"] = r.total_tokens;
  j["target_passes"] = r.target_passes;
  j["draft_calls"] = r.draft_calls;
  j["tokens_per_pass"] = r.tokens_per_pass;
  j["first_position_rate"] = r.first_position_rate;
  j["acceptance_by_position"] = r.acceptance_by_position;
  return j;
}

void do_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const TaskCorpus corpus = read_corpus(c.corpus, c.format);
  const Vocabulary vocab = c.vocab.empty() ? Vocabulary::bytes() : load_vocabulary(c.vocab);
  if (c.gamma < 1) throw InputError("--gamma must be >= 1");
  if (c.max_tokens < 1) throw InputError("--max-tokens must be >= 1");

  std::unique_ptr<TargetModel> target;
  if (c.target == "ngram") {
    const TaskCorpus held_out = c.target_corpus.empty() ? corpus : read_corpus(c.target_corpus, c.format);
    target = std::make_unique<NGramTarget>(encode_side(held_out, vocab, true), c.target_order, vocab.size());
  } else if (c.target == "random") {
    target = std::make_unique<RandomLogitTarget>(vocab.size(), c.seed);
  } else if (c.target == "replay") {
    if (c.responses.empty()) throw InputError("--target replay needs --responses");
    target = std::make_unique<ReplayTarget>(ReplayTarget::from_file(c.responses, vocab.size()));
  } else {
    throw InputError("unknown target '" + c.target + "' (expected ngram, random or replay)");
  }
  if (c.stop_token && *c.stop_token >= vocab.size()) throw InputError("--stop-token outside the vocabulary");

  const auto drafter_corpus = encode_side(corpus, vocab, false);
  auto corpus_drafter =
      std::make_shared<const CorpusDrafter>(build_corpus_drafter(drafter_corpus, c.n_max, c.p_min, vocab.size()));
  if (!c.ngrams_out.empty()) save_ngram_tables(*corpus_drafter, c.ngrams_out);

  std::vector<TokenSequence> prompts;
  const std::size_t n_sessions = c.sessions == 0 ? corpus.size() : std::min(c.sessions, corpus.size());
  for (std::size_t i = 0; i < n_sessions; ++i) prompts.push_back(vocab.encode(corpus[i].input));

  SimulationResult main_run;
  std::vector<std::pair<double, AccelerationReport>> sweep;
  try {
    main_run = simulate_once(c, *target, corpus_drafter, prompts, c.lambda);
    for (double l : c.lambda_sweep) sweep.emplace_back(l, simulate_once(c, *target, corpus_drafter, prompts, l).report);
  } catch (const MissingContextError& e) {
    if (!c.requests_out.empty()) {
      auto f = open_out(c.requests_out);
      const TokenSequence ctx = e.context();
      write_target_requests(f, std::span<const TokenSequence>(&ctx, 1));
    }
    throw;
  }

  if (!c.trace.empty()) {
    auto f = open_out(c.trace);
    for (std::size_t s = 0; s < main_run.sessions.size(); ++s) write_trace(f, s, main_run.sessions[s].steps);
  }

  ojson j;
  j["command"] = "simulate";
  j["corpus"] = corpus.id();
  j["target"] = c.target;
  j["drafter"] = c.drafter;
  j["vocab_size"] = vocab.size();
  j["gamma"] = c.gamma;
  j["lambda"] = c.lambda;
  j["n_max"] = c.n_max;
  j["p_min"] = c.p_min;
  j["seed"] = c.seed;
  j["sessions"] = prompts.size();
  j["max_tokens"] = c.max_tokens;
  j["oracle_check"] = c.oracle_check;
  j.update(report_json(main_run.report));
  if (!sweep.empty()) {
    auto rows = ojson::array();
    for (const auto& [l, r] : sweep) {
      rows.push_back({{"lambda", l}, {"tokens_per_pass", r.tokens_per_pass}, {"first_position_rate", r.first_position_rate}});
    }
    j["lambda_sweep"] = std::move(rows);
  }
  emit(j, c.out, out);

  err << prompts.size() << " sessions, " << main_run.report.total_tokens << " tokens in "
      << main_run.report.target_passes << " target passes (" << main_run.report.tokens_per_pass
      << " tokens/pass)";
  if (c.oracle_check) err << ", output matches greedy decoding";
  err << '\n';
}

void do_predict(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.series.empty()) throw InputError("--series is required");
  const PredictorSeries series = load_predictor_series(c.series);

  ojson j;
  j["command"] = "predict";
  auto configs = ojson::array();
  auto excluded = ojson::array();
  double tau_sum = 0.0;
  std::size_t tau_n = 0;
  for (const auto& [id, pts] : series.configs()) {
    if (pts.size() < 2) {
      err << "warning: configuration '" << id << "' has a single point; excluded\n";
      excluded.push_back(id);
      continue;
    }
    const KendallResult k = kendall_tau(series, id);
    configs.push_back({{"config", id},
                       {"points", k.n},
                       {"tau", number(k.tau)},
                       {"p_value", number(k.p_value)},
                       {"exact", k.exact}});
    if (std::isfinite(k.tau)) {
      tau_sum += k.tau;
      ++tau_n;
    }
  }
  j["configs"] = std::move(configs);
  j["excluded"] = std::move(excluded);
  j["mean_tau"] = tau_n == 0 ? ojson(nullptr) : ojson(tau_sum / static_cast<double>(tau_n));
  const DirectionalResult d = directional_success_rate(series);
  j["directional_success_rate"] = d.rate;
  j["transitions_used"] = d.transitions_used;
  j["successes"] = d.successes;
  emit(j, c.out, out);

  err << tau_n << " configurations, mean tau " << (tau_n ? tau_sum / static_cast<double>(tau_n) : NAN)
      << ", directional success " << d.successes << "/" << d.transitions_used << '\n';
}

template <class T>
void assign(const nlohmann::json& v, T& field, const std::string& key) {
  try {
    field = v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw InputError("config '" + path + "' is not a JSON object");
  for (const auto& [raw, v] : doc.items()) {
    std::string key = raw;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "corpus") assign(v, c.corpus, key);
    else if (key == "format") assign(v, c.format, key);
    else if (key == "out") assign(v, c.out, key);
    else if (key == "n") assign(v, c.n, key);
    else if (key == "normalization") assign(v, c.normalization, key);
    else if (key == "mass") assign(v, c.mass, key);
    else if (key == "budget") assign(v, c.budget, key);
    else if (key == "n_max") assign(v, c.n_max, key);
    else if (key == "pcs_threshold") assign(v, c.pcs_threshold, key);
    else if (key == "recount_interval") assign(v, c.recount_interval, key);
    else if (key == "threads") assign(v, c.threads, key);
    else if (key == "base") assign(v, c.base, key);
    else if (key == "max_words") assign(v, c.max_words, key);
    else if (key == "base_vocab") assign(v, c.base_vocab, key);
    else if (key == "bpe_vocab") assign(v, c.bpe_vocab, key);
    else if (key == "bpe_merges") assign(v, c.bpe_merges, key);
    else if (key == "vocab_out") assign(v, c.vocab_out, key);
    else if (key == "ledger") assign(v, c.ledger, key);
    else if (key == "sweep") assign(v, c.sweep, key);
    else if (key == "vocab") assign(v, c.vocab, key);
    else if (key == "target") assign(v, c.target, key);
    else if (key == "target_corpus") assign(v, c.target_corpus, key);
    else if (key == "target_order") assign(v, c.target_order, key);
    else if (key == "responses") assign(v, c.responses, key);
    else if (key == "requests_out") assign(v, c.requests_out, key);
    else if (key == "drafter") assign(v, c.drafter, key);
    else if (key == "p_min") assign(v, c.p_min, key);
    else if (key == "lambda") assign(v, c.lambda, key);
    else if (key == "gamma") assign(v, c.gamma, key);
    else if (key == "max_tokens") assign(v, c.max_tokens, key);
    else if (key == "sessions") assign(v, c.sessions, key);
    else if (key == "stop_token") {
      std::uint32_t t = 0;
      assign(v, t, key);
      c.stop_token = t;
    } else if (key == "no_refresh") assign(v, c.no_refresh, key);
    else if (key == "seed") assign(v, c.seed, key);
    else if (key == "oracle_check") assign(v, c.oracle_check, key);
    else if (key == "lambda_sweep") assign(v, c.lambda_sweep, key);
    else if (key == "trace") assign(v, c.trace, key);
    else if (key == "ngrams_out") assign(v, c.ngrams_out, key);
    else if (key == "series") assign(v, c.series, key);
    else throw InputError("unknown config key '" + raw + "'");
  }
}

int guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return 1;
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const EncodingError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] { do_analyze(c, out, err); }, err);
}
int cmd_augment(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] { do_augment(c, out, err); }, err);
}
int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] { do_simulate(c, out, err); }, err);
}
int cmd_predict(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded([&] { do_predict(c, out, err); }, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Task-adaptive tokenization and n-gram drafting toolkit", "tasc"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--corpus", c.corpus, "Corpus file");
    sub->add_option("--format", c.format, "Corpus format: tasc.v1 or plain")->capture_default_str();
    sub->add_option("--out", c.out, "Report path (default stdout)");
    sub->add_option("--config", c.config, "JSON file whose fields override the flags");
  };

  auto* analyze = app.add_subcommand("analyze", "Word n-gram entropy and coverage of inputs vs outputs");
  common(analyze);
  analyze->add_option("--n", c.n, "Word n-gram order")->capture_default_str();
  analyze->add_option("--normalization", c.normalization, "none, lower or lower+strip-punct")->capture_default_str();
  analyze->add_option("--mass", c.mass, "Coverage mass")->capture_default_str();

  auto* augment = app.add_subcommand("augment", "Enrich a vocabulary with task n-gram tokens");
  common(augment);
  augment->add_option("--budget", c.budget, "Tokens to add (M)")->capture_default_str();
  augment->add_option("--n-max", c.n_max, "Longest n-gram considered")->capture_default_str();
  augment->add_option("--pcs-threshold", c.pcs_threshold, "Accept iff PCS is below this")->capture_default_str();
  augment->add_option("--recount-interval", c.recount_interval, "Acceptances between recounts")->capture_default_str();
  augment->add_option("--threads", c.threads, "Counting threads")->capture_default_str();
  augment->add_option("--base", c.base, "Base scheme: bytes or words")->capture_default_str();
  augment->add_option("--max-words", c.max_words, "Word pieces kept by --base words (0 = all)");
  augment->add_option("--base-vocab", c.base_vocab, "Start from a tasc-vocab.v1 file");
  augment->add_option("--bpe-vocab", c.bpe_vocab, "BPE vocab.json");
  augment->add_option("--bpe-merges", c.bpe_merges, "BPE merges.txt");
  augment->add_option("--vocab-out", c.vocab_out, "Write the enriched vocabulary here");
  augment->add_option("--ledger", c.ledger, "Write the candidate ledger (JSON lines) here");
  augment->add_option("--sweep", c.sweep, "Budgets for per-M rows, comma separated")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "Speculative decoding with n-gram drafters");
  common(simulate);
  simulate->add_option("--vocab", c.vocab, "tasc-vocab.v1 file (default: bytes)");
  simulate->add_option("--target", c.target, "ngram, random or replay")->capture_default_str();
  simulate->add_option("--target-corpus", c.target_corpus, "Held-out corpus for the n-gram target");
  simulate->add_option("--target-order", c.target_order, "Order of the n-gram target")->capture_default_str();
  simulate->add_option("--responses", c.responses, "Response file for the replay target");
  simulate->add_option("--requests-out", c.requests_out, "Where to write an unanswered replay context");
  simulate->add_option("--drafter", c.drafter, "mixed, oracle or adversarial")->capture_default_str();
  simulate->add_option("--n-max", c.n_max, "Drafter n-gram order")->capture_default_str();
  simulate->add_option("--p-min", c.p_min, "Corpus drafter pruning threshold")->capture_default_str();
  simulate->add_option("--lambda", c.lambda, "Corpus weight of the mixture")->capture_default_str();
  simulate->add_option("--gamma", c.gamma, "Draft length")->capture_default_str();
  simulate->add_option("--max-tokens", c.max_tokens, "Tokens generated per session")->capture_default_str();
  simulate->add_option("--sessions", c.sessions, "Number of prompts (0 = all)");
  simulate->add_option("--stop-token", c.stop_token, "Stop token id");
  simulate->add_flag("--no-refresh", c.no_refresh, "Do not feed emitted tokens to the prompt drafter");
  simulate->add_option("--seed", c.seed, "Seed of the random target")->capture_default_str();
  simulate->add_flag("--oracle-check", c.oracle_check, "Assert output == greedy decoding");
  simulate->add_option("--lambda-sweep", c.lambda_sweep, "Extra lambdas for tokens/pass rows")->delimiter(',');
  simulate->add_option("--trace", c.trace, "Write per-step trace (JSON lines) here");
  simulate->add_option("--ngrams-out", c.ngrams_out, "Write the corpus drafter tables here");

  auto* predict = app.add_subcommand("predict", "Kendall tau and directional success of H2 vs runtime");
  predict->add_option("--series", c.series, "CSV of config_id,M,h2,runtime");
  predict->add_option("--out", c.out, "Report path (default stdout)");
  predict->add_option("--config", c.config, "JSON file whose fields override the flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  if (!c.config.empty()) {
    const int rc = guarded([&] { apply_config_file(c, c.config); }, err);
    if (rc != 0) return rc;
  }
  if (c.command == "analyze") return cmd_analyze(c, out, err);
  if (c.command == "augment") return cmd_augment(c, out, err);
  if (c.command == "simulate") return cmd_simulate(c, out, err);
  return cmd_predict(c, out, err);
}

}  // namespace tasc::cli
