#include <gtest/gtest.h>

#include <numeric>

#include "support.hpp"
#include "tasc/predictor.hpp"

using namespace tasc;
using namespace tasc::testing;

namespace {

PredictorSeries series_of(const std::string& id, const std::vector<double>& h2, const std::vector<double>& rt) {
  PredictorSeries s;
  for (std::size_t i = 0; i < h2.size(); ++i) s.add(id, {static_cast<std::int64_t>(i * 10), h2[i], rt[i]});
  return s;
}

}  // namespace

TEST(Kendall, PerfectOrderings) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> up = {10, 20, 30, 40, 50};
  const std::vector<double> down = {5, 4, 3, 2, 1};
  EXPECT_EQ(kendall_tau_b(x, up).tau, 1.0);
  const auto r = kendall_tau_b(x, down);
  EXPECT_EQ(r.tau, -1.0);
  EXPECT_TRUE(r.exact);
  // Only 2 of 120 permutations reach |S| = 10.
  EXPECT_NEAR(r.p_value, 2.0 / 120.0, 1e-15);
}

TEST(Kendall, EightPointsTwoDiscordant) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> y = {1, 3, 2, 4, 5, 7, 6, 8};
  const auto r = kendall_tau_b(x, y);
  const auto o = brute_kendall(x, y);
  EXPECT_EQ(r.discordant, 2);
  EXPECT_EQ(r.concordant, 26);
  EXPECT_EQ(r.tau, o.tau);
  EXPECT_NEAR(r.tau, 24.0 / 28.0, 1e-15);
}

TEST(Kendall, MatchesPairOracleOnRandomSeries) {
  Rng rng(51);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(10), y(10);
    for (auto& v : x) v = static_cast<double>(uniform(rng, 0, 6));
    for (auto& v : y) v = static_cast<double>(uniform(rng, 0, 6));
    const auto r = kendall_tau_b(x, y);
    const auto o = brute_kendall(x, y);
    EXPECT_EQ(r.concordant, o.concordant);
    EXPECT_EQ(r.discordant, o.discordant);
    if (std::isnan(o.tau)) {
      EXPECT_TRUE(std::isnan(r.tau));
    } else {
      EXPECT_EQ(r.tau, o.tau);
    }
  }
}

TEST(Kendall, ExactPValueMatchesPermutationEnumeration) {
  Rng rng(52);
  for (int i = 0; i < 30; ++i) {
    const std::size_t n = uniform(rng, 2, 7);
    std::vector<double> x(n), y(n);
    std::iota(x.begin(), x.end(), 0.0);
    std::iota(y.begin(), y.end(), 0.0);
    std::shuffle(y.begin(), y.end(), rng);
    const auto r = kendall_tau_b(x, y);
    ASSERT_TRUE(r.exact);
    EXPECT_NEAR(r.p_value, brute_kendall_p(x, y), 1e-12) << "n=" << n;
  }
}

TEST(Kendall, NormalApproximationAboveTen) {
  std::vector<double> x(20), y(20);
  std::iota(x.begin(), x.end(), 0.0);
  for (std::size_t i = 0; i < 20; ++i) y[i] = -x[i];
  const auto r = kendall_tau_b(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.tau, -1.0);
  // z = S / sqrt(n(n-1)(2n+5)/18) with S = -190.
  const double z = 190.0 / std::sqrt(20.0 * 19.0 * 45.0 / 18.0);
  EXPECT_NEAR(r.p_value, std::erfc(z / std::sqrt(2.0)), 1e-15);
}

TEST(Kendall, NegationFlipsSign) {
  Rng rng(53);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> h2(9), rt(9), neg(9);
    for (std::size_t k = 0; k < 9; ++k) {
      h2[k] = static_cast<double>(uniform(rng, 0, 100));
      rt[k] = static_cast<double>(uniform(rng, 0, 100));
      neg[k] = -rt[k];
    }
    const auto a = kendall_tau(series_of("c", h2, rt), "c");
    const auto b = kendall_tau(series_of("c", h2, neg), "c");
    EXPECT_EQ(a.tau, -b.tau);
    EXPECT_NEAR(a.p_value, b.p_value, 1e-12);
  }
}

TEST(Kendall, Degenerate) {
  const std::vector<double> x = {1, 1, 1};
  const std::vector<double> y = {1, 2, 3};
  EXPECT_TRUE(std::isnan(kendall_tau_b(x, y).tau));
  const std::vector<double> one = {1};
  EXPECT_THROW(kendall_tau_b(one, one), std::invalid_argument);
  EXPECT_THROW(kendall_tau_b(x, one), std::invalid_argument);
  PredictorSeries s;
  s.add("solo", {0, 1.0, 1.0});
  EXPECT_THROW(kendall_tau(s, "solo"), std::invalid_argument);
}

TEST(Directional, ExtremesAndConstructed) {
  EXPECT_EQ(directional_success_rate(series_of("c", {1, 2, 3, 4}, {9, 8, 7, 6})).rate, 1.0);
  EXPECT_EQ(directional_success_rate(series_of("c", {1, 2, 3, 4}, {1, 2, 3, 4})).rate, 0.0);

  // 10 transitions with rising H2, 9 of them with falling runtime.
  std::vector<double> h2, rt;
  for (int i = 0; i <= 10; ++i) {
    h2.push_back(i);
    rt.push_back(i == 5 ? rt.back() + 1.0 : 100.0 - i);
  }
  const auto d = directional_success_rate(series_of("c", h2, rt));
  EXPECT_EQ(d.transitions_used, 10u);
  EXPECT_EQ(d.successes, 9u);
  EXPECT_EQ(d.rate, 0.9);
}

TEST(Directional, TwentyFiveTransitionsAt92Percent) {
  PredictorSeries s;
  // Five configurations, five rising-H2 transitions each; two failures overall.
  int failures = 0;
  for (int c = 0; c < 5; ++c) {
    double rt = 1000.0;
    for (int i = 0; i <= 5; ++i) {
      if (i > 0) rt += ((c == 1 && i == 3) || (c == 4 && i == 1)) ? 7.0 : -7.0;
      failures += (c == 1 && i == 3) || (c == 4 && i == 1);
      s.add("cfg" + std::to_string(c), {i * 100, 0.5 * i, rt});
    }
  }
  ASSERT_EQ(failures, 2);
  const auto d = directional_success_rate(s);
  EXPECT_EQ(d.transitions_used, 25u);
  EXPECT_EQ(d.successes, 23u);
  EXPECT_EQ(d.rate, 0.92);
}

TEST(Directional, FallingH2IsIgnored) {
  const auto d = directional_success_rate(series_of("c", {3, 2, 4, 1}, {5, 9, 1, 0}));
  EXPECT_EQ(d.transitions_used, 1u);
  EXPECT_EQ(d.successes, 1u);
  EXPECT_THROW(directional_success_rate(series_of("c", {3, 2, 1}, {1, 2, 3})), InputError);
}

TEST(Series, SortedAndUnique) {
  PredictorSeries s;
  s.add("a", {20, 1, 1});
  s.add("a", {10, 2, 2});
  EXPECT_EQ(s.points("a").front().budget, 10);
  EXPECT_THROW(s.add("a", {10, 3, 3}), std::invalid_argument);
  EXPECT_THROW(s.points("b"), std::out_of_range);
}

TEST(Series, LoadsCsvAndTsv) {
  TempDir dir;
  const auto csv = dir.write("s.csv", "config_id,M,h2,runtime\na,0,1.0,10\na,100,2.0,8\nb,0,1.5,9\n");
  const auto s = load_predictor_series(csv);
  EXPECT_EQ(s.configs().size(), 2u);
  EXPECT_EQ(s.points("a").size(), 2u);
  EXPECT_EQ(s.points("a")[1].runtime, 8.0);
  const auto tsv = dir.write("s.tsv", "a\t0\t1\t2\na\t5\t2\t1\n");
  EXPECT_EQ(load_predictor_series(tsv).points("a").size(), 2u);
  EXPECT_THROW(load_predictor_series(dir.write("bad.csv", "a,0,1\n")), InputError);
  EXPECT_THROW(load_predictor_series(dir.write("bad2.csv", "a,0,1,2\na,x,1,2\n")), InputError);
  EXPECT_THROW(load_predictor_series(dir.file("none.csv")), InputError);
}
