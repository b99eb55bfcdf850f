#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tasc::cli {

/// Parameters shared by every command. Flag names mirror the field names
/// with dashes; a --config JSON file overrides whatever the flags set.
struct RunConfig {
  std::string command;

  // inputs and outputs
  std::string corpus;
  std::string format = "tasc.v1";
  std::string out;  // report path, stdout when empty
  std::string config;

  // analyze
  std::size_t n = 2;
  std::string normalization = "none";
  double mass = 0.8;

  // augment
  std::size_t budget = 100;
  std::size_t n_max = 4;
  double pcs_threshold = 0.1;
  std::size_t recount_interval = 1;
  std::size_t threads = 1;
  std::string base = "bytes";
  std::size_t max_words = 0;
  std::string base_vocab;
  std::string bpe_vocab;
  std::string bpe_merges;
  std::string vocab_out;
  std::string ledger;
  std::vector<std::size_t> sweep;

  // simulate
  std::string vocab;
  std::string target = "ngram";
  std::string target_corpus;
  std::size_t target_order = 4;
  std::string responses;
  std::string requests_out;
  std::string drafter = "mixed";
  std::uint64_t p_min = 5;
  double lambda = 0.75;
  std::size_t gamma = 8;
  std::size_t max_tokens = 64;
  std::size_t sessions = 0;  // 0 = every document
  std::optional<std::uint32_t> stop_token;
  bool no_refresh = false;
  std::uint64_t seed = 0;
  bool oracle_check = false;
  std::vector<double> lambda_sweep;
  std::string trace;
  std::string ngrams_out;

  // predict
  std::string series;
};

/// Applies a JSON object of RunConfig fields (underscore or dash spelling)
/// on top of `config`. Throws InputError on unknown keys or bad types.
void apply_config_file(RunConfig& config, const std::string& path);

/// Runs the body and maps exceptions to exit codes: 0 success, 1 invariant
/// violation or internal failure, 2 input error. Diagnostics go to `err`.
int guarded(const std::function<void()>& body, std::ostream& err);

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_augment(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tasc::cli
