#include "tasc/predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tasc/types.hpp"

namespace tasc {

void PredictorSeries::add(const std::string& config, PredictorPoint point) {
  auto& pts = configs_[config];
  auto it = std::lower_bound(pts.begin(), pts.end(), point.budget,
                             [](const PredictorPoint& p, std::int64_t m) { return p.budget < m; });
  if (it != pts.end() && it->budget == point.budget) {
    throw std::invalid_argument("budget " + std::to_string(point.budget) + " repeated in configuration '" + config + "'");
  }
  pts.insert(it, point);
}

const std::vector<PredictorPoint>& PredictorSeries::points(const std::string& config) const {
  auto it = configs_.find(config);
  if (it == configs_.end()) throw std::out_of_range("unknown configuration '" + config + "'");
  return it->second;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) {
    const auto b = field.find_first_not_of(" \r");
    const auto e = field.find_last_not_of(" \r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

PredictorSeries load_predictor_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read predictor series '" + path.string() + "'");
  PredictorSeries series;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_fields(line);
    PredictorPoint p;
    const bool ok = f.size() == 4 && parse_number(f[1], p.budget) && parse_number(f[2], p.h2) &&
                    parse_number(f[3], p.runtime);
    if (!ok) {
      if (first && f.size() == 4 && !parse_number(f[1], p.budget)) {
        first = false;
        continue;  // header
      }
      throw InputError("line " + std::to_string(lineno) + ": expected config_id,M,h2,runtime");
    }
    first = false;
    try {
      series.add(f[0], p);
    } catch (const std::invalid_argument& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return series;
}

namespace {

// Two-sided exact p-value for S = concordant - discordant with no ties.
// The null distribution of the inversion count over n! permutations is the
// Mahonian distribution; S = pairs - 2 * inversions.
double exact_p_value(std::size_t n, std::int64_t s) {
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<double> counts(pairs + 1, 0.0);
  counts[0] = 1.0;
  for (std::size_t k = 2; k <= n; ++k) {
    std::vector<double> next(pairs + 1, 0.0);
    for (std::size_t inv = 0; inv <= pairs; ++inv) {
      if (counts[inv] == 0.0) continue;
      for (std::size_t add = 0; add < k && inv + add <= pairs; ++add) next[inv + add] += counts[inv];
    }
    counts.swap(next);
  }
  double total = 0.0;
  double tail = 0.0;
  const std::int64_t abs_s = std::abs(s);
  for (std::size_t inv = 0; inv <= pairs; ++inv) {
    total += counts[inv];
    const std::int64_t si = static_cast<std::int64_t>(pairs) - 2 * static_cast<std::int64_t>(inv);
    if (std::abs(si) >= abs_s) tail += counts[inv];
  }
  return std::min(1.0, tail / total);
}

// Tie group sizes of a sample.
std::vector<std::size_t> tie_groups(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> groups;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > 1) groups.push_back(j - i);
    i = j;
  }
  return groups;
}

}  // namespace

KendallResult kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau_b: samples differ in length");
  if (x.size() < 2) throw std::invalid_argument("kendall_tau_b: need at least two points");
  const std::size_t n = x.size();
  KendallResult r;
  r.n = n;
  std::int64_t ties_x = 0;
  std::int64_t ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++ties_x;
      if (dy == 0.0) ++ties_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) {
        ++r.concordant;
      } else {
        ++r.discordant;
      }
    }
  }
  const auto pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  const std::int64_t s = r.concordant - r.discordant;
  if (ties_x == pairs || ties_y == pairs) {
    r.tau = std::numeric_limits<double>::quiet_NaN();
    r.p_value = 1.0;
    return r;
  }
  r.tau = static_cast<double>(s) /
          std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));

  if (ties_x == 0 && ties_y == 0 && n <= 10) {
    r.exact = true;
    r.p_value = exact_p_value(n, s);
    return r;
  }

  const double dn = static_cast<double>(n);
  double v0 = dn * (dn - 1) * (2 * dn + 5);
  double vt = 0, vu = 0, t1 = 0, u1 = 0, t2 = 0, u2 = 0;
  for (auto g : tie_groups(x)) {
    const double t = static_cast<double>(g);
    vt += t * (t - 1) * (2 * t + 5);
    t1 += t * (t - 1);
    t2 += t * (t - 1) * (t - 2);
  }
  for (auto g : tie_groups(y)) {
    const double u = static_cast<double>(g);
    vu += u * (u - 1) * (2 * u + 5);
    u1 += u * (u - 1);
    u2 += u * (u - 1) * (u - 2);
  }
  double var = (v0 - vt - vu) / 18.0 + (t1 * u1) / (2 * dn * (dn - 1));
  if (n > 2) var += (t2 * u2) / (9 * dn * (dn - 1) * (dn - 2));
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = static_cast<double>(s) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  return r;
}

KendallResult kendall_tau(const PredictorSeries& series, const std::string& config) {
  const auto& pts = series.points(config);
  if (pts.size() < 2) throw std::invalid_argument("configuration '" + config + "' has fewer than two points");
  std::vector<double> h2, runtime;
  for (const auto& p : pts) {
    h2.push_back(p.h2);
    runtime.push_back(p.runtime);
  }
  return kendall_tau_b(h2, runtime);
}

DirectionalResult directional_success_rate(const PredictorSeries& series) {
  DirectionalResult r;
  for (const auto& [_, pts] : series.configs()) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i + 1].h2 - pts[i].h2 > 0.0) {
        ++r.transitions_used;
        if (pts[i + 1].runtime - pts[i].runtime < 0.0) ++r.successes;
      }
    }
  }
  if (r.transitions_used == 0) throw InputError("no transition with increasing H2 to evaluate");
  r.rate = static_cast<double>(r.successes) / static_cast<double>(r.transitions_used);
  return r;
}

}  // namespace tasc
