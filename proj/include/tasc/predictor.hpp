#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tasc {

struct PredictorPoint {
  std::int64_t budget = 0;  // M
  double h2 = 0.0;
  double runtime = 0.0;
};

/// (M, H2(M), runtime(M)) sequences grouped by configuration id. Within a
/// configuration, budgets are strictly increasing.
class PredictorSeries {
 public:
  /// Inserts keeping budgets sorted; throws std::invalid_argument on a
  /// repeated budget within a configuration.
  void add(const std::string& config, PredictorPoint point);

  const std::map<std::string, std::vector<PredictorPoint>>& configs() const { return configs_; }
  const std::vector<PredictorPoint>& points(const std::string& config) const;

 private:
  std::map<std::string, std::vector<PredictorPoint>> configs_;
};

/// Rows of `config_id,M,h2,runtime` (comma or tab separated). A first row
/// whose M column is not an integer is taken as a header.
PredictorSeries load_predictor_series(const std::filesystem::path& path);

struct KendallResult {
  double tau = 0.0;      // tau-b; NaN when either variable is constant
  double p_value = 1.0;  // two-sided
  std::size_t n = 0;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  bool exact = false;  // p-value from the exact permutation distribution
};

/// Kendall tau-b with tie correction. The p-value uses the exact null
/// distribution when n <= 10 and neither variable has ties, and the
/// tie-corrected normal approximation otherwise.
KendallResult kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Rank correlation between H2 and runtime within one configuration.
KendallResult kendall_tau(const PredictorSeries& series, const std::string& config);

struct DirectionalResult {
  double rate = 0.0;
  std::size_t transitions_used = 0;
  std::size_t successes = 0;
};

/// Over consecutive within-configuration transitions with dH2 > 0, the
/// fraction whose runtime dropped (dR < 0). Throws InputError when no
/// transition qualifies.
DirectionalResult directional_success_rate(const PredictorSeries& series);

}  // namespace tasc
