#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hierstore/repair_sim.hpp"

using namespace hierstore;

namespace {

Rational r(long long p, long long q = 1) { return Rational(p, q); }

std::vector<std::size_t> others(std::size_t n, std::size_t skip) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i)
    if (i != skip) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("five datacenters, one failure") {
  const auto rates = datacenter_bandwidths(DatacenterGrid{});
  REQUIRE(rates.size() == 15);
  const auto live = others(15, 0);
  const auto d = choose_d(rates, 0, live, 10);
  CHECK(d.chosen_d == 14);
  CHECK(d.rate == r(5 * 15));
  CHECK(repair_time(d, r(100), 10) == r(2, 15));
  CHECK(per_helper_download(r(100), 10, 14) == r(2));
  const auto stages = stage_analysis(rates, 10, r(100));
  REQUIRE(stages.size() == 5);
  CHECK(stages[0].baseline_time == r(10, 15));
  CHECK(stages[0].opportunistic_time == r(2, 15));
}

TEST_CASE("datacenter improvement factors multiply to 120") {
  const auto stages = stage_analysis(datacenter_bandwidths(DatacenterGrid{}), 10, r(100));
  const std::vector<Rational> factors{r(5), r(4), r(3), r(2), r(1)};
  Rational product = 1;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    CHECK(stages[i].failures == i + 1);
    CHECK(stages[i].improvement == factors[i]);
    CHECK(stages[i].chosen_d == 14 - i);
    product *= stages[i].improvement;
  }
  CHECK(product == 120);
}

TEST_CASE("helper count choice") {
  BandwidthMatrix<double> equal(6, std::vector<double>(6, 4.0));
  const auto live = others(6, 0);
  CHECK(choose_d(equal, 0, live, 2).chosen_d == 5);

  BandwidthMatrix<double> spike(6, std::vector<double>(6, 1.0));
  spike[3][0] = 100.0;
  const auto d = choose_d(spike, 0, live, 1);
  CHECK(d.chosen_d == 1);
  CHECK(d.helpers == std::vector<std::size_t>{3});

  // Ties in (d - k + 1) B_(d) go to the smaller d: 2 * 3 == 1 * 6.
  BandwidthMatrix<Rational> tie(3, std::vector<Rational>(3, Rational(0)));
  tie[1][0] = 6;
  tie[2][0] = 3;
  CHECK(choose_d(tie, 0, std::vector<std::size_t>{1, 2}, 1).chosen_d == 1);

  CHECK_THROWS_AS(choose_d(equal, 0, std::vector<std::size_t>{1}, 2), TooFewLiveNodes);
  CHECK_THROWS_AS(choose_d(equal, 0, std::vector<std::size_t>{0, 1, 2}, 2), ShapeMismatch);
}

TEST_CASE("choose_d ignores node labels") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto rates = draw_bandwidths(RandomGaussian{}, 8, rng);
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(perm.begin() + 1, perm.end(), rng);
    BandwidthMatrix<double> relabeled(8, std::vector<double>(8, 0.0));
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) relabeled[perm[i]][perm[j]] = rates[i][j];
    const auto a = choose_d(rates, 0, others(8, 0), 3);
    const auto b = choose_d(relabeled, 0, others(8, 0), 3);
    CHECK(a.chosen_d == b.chosen_d);
    CHECK(a.rate == b.rate);
  }
}

TEST_CASE("gaussian link model") {
  std::mt19937_64 rng(11);
  const std::size_t draws = 1'000'000;
  double sum = 0;
  double sq = 0;
  double lowest = 1e9;
  for (std::size_t i = 0; i < draws; ++i) {
    const double x = gaussian_bandwidth(3.0, 16.0, 0.25, rng);
    sum += x;
    sq += x * x;
    lowest = std::min(lowest, x);
  }
  CHECK(lowest >= kBandwidthFloor);
  const double mean = sum / draws;
  const double se = std::sqrt((sq / draws - mean * mean) / draws);
  // E[max(X, Y)] for independent normals with equal means: mu + theta phi(0).
  const double theta = std::sqrt(16.0 + 0.25);
  const double analytic = 3.0 + theta / std::sqrt(2 * std::numbers::pi);
  CHECK(std::abs(mean - analytic) <= 3 * se);
  CHECK_THROWS_AS(gaussian_bandwidth(3, 0, 1, rng), InvalidParams);
}

TEST_CASE("equal variances give a symmetric max") {
  std::mt19937_64 rng(5);
  double below = 0;
  const int draws = 200'000;
  std::vector<double> xs;
  for (int i = 0; i < draws; ++i) xs.push_back(gaussian_bandwidth(10.0, 1.0, 1.0, rng));
  std::sort(xs.begin(), xs.end());
  const double median = xs[draws / 2];
  // Median of max of two iid N(10,1) is 10 + z_{sqrt(1/2)}, z = 0.5449.
  CHECK(median == doctest::Approx(10.5449).epsilon(0.005));
  (void)below;
}

TEST_CASE("one failure ratio") {
  const FixedMatrix flat{BandwidthMatrix<double>(9, std::vector<double>(9, 2.5))};
  const SampleStats s = one_failure_ratio(flat, 9, 3, 10, 1);
  CHECK(s.mean == doctest::Approx(1.0 / (8 - 3 + 1)));
  CHECK(s.stddev == doctest::Approx(0.0));

  std::optional<double> prev;
  for (std::size_t n = 6; n <= 14; ++n) {
    const SampleStats g = one_failure_ratio(RandomGaussian{}, n, 5, 2000, 42);
    CHECK(g.mean <= 1.0);
    if (prev) CHECK(g.mean <= *prev);
    prev = g.mean;
  }
  const SampleStats again = one_failure_ratio(RandomGaussian{}, 10, 5, 500, 9);
  const SampleStats same = one_failure_ratio(RandomGaussian{}, 10, 5, 500, 9);
  CHECK(again.mean == same.mean);
  CHECK(again.stddev == same.stddev);
  CHECK_THROWS_AS(one_failure_ratio(RandomGaussian{}, 10, 5, 0, 9), InvalidParams);
}

TEST_CASE("every single draw has ratio at most one") {
  for (std::uint64_t run = 0; run < 200; ++run) {
    auto rng = run_engine(77, run);
    const auto rates = draw_bandwidths(RandomGaussian{}, 10, rng);
    const auto d = choose_d(rates, 0, others(10, 0), 5);
    std::vector<double> in;
    for (std::size_t h = 1; h < 10; ++h) in.push_back(rates[h][0]);
    std::sort(in.begin(), in.end(), std::greater<>());
    CHECK(in[4] / d.rate <= 1.0);
  }
}

TEST_CASE("multi failure profile") {
  const auto prof = multi_failure_profile(RandomGaussian{}, 10, 5, 2000, 3);
  REQUIRE(prof.size() == 5);
  CHECK(prof.back().mean == doctest::Approx(1.0));
  for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
    CHECK(prof[i].failures == i + 1);
    CHECK(prof[i].mean < prof[i + 1].mean);
    CHECK(prof[i].mean <= 1.0);
  }
  std::ostringstream out;
  write_profile_csv(out, prof);
  CHECK(out.str().rfind("t,mean_normalized_time,stddev\r\n", 0) == 0);
}

TEST_CASE("scenario documents") {
  const Scenario dc = parse_scenario(nlohmann::json::parse(
      R"({"n": 15, "k": 10, "generator": {"type": "datacenter", "groups": 5, "per_group": 3, "intra": 150, "inter": "15"}})"));
  CHECK(dc.n == 15);
  CHECK(std::get<DatacenterGrid>(dc.generator).inter == 15);
  const Scenario g = parse_scenario(nlohmann::json::parse(R"({"n": 8, "k": 3, "generator": {"type": "gaussian", "var_b": 1}})"));
  CHECK(std::get<RandomGaussian>(g.generator).var_b == 1.0);
  CHECK(std::get<RandomGaussian>(g.generator).var_a == 16.0);
  const Scenario m = parse_scenario(nlohmann::json::parse(R"({"n": 2, "k": 1, "matrix": [[0, 1], [2, 0]]})"));
  CHECK(std::get<FixedMatrix>(m.generator).rates[1][0] == 2.0);
  CHECK_THROWS_AS(parse_scenario(nlohmann::json::parse(R"({"n": 2, "k": 1, "matrix": [[0, 1]]})")), FormatError);
  CHECK_THROWS_AS(parse_scenario(nlohmann::json::parse(R"({"n": 2, "k": 1, "matrix": [[0, -1], [1, 0]]})")), FormatError);
  CHECK_THROWS_AS(parse_scenario(nlohmann::json::parse(R"({"n": 2, "generator": {"type": "gaussian"}})")), FormatError);
  CHECK_THROWS_AS(parse_scenario(nlohmann::json::parse(R"({"n": 2, "k": 1, "generator": {"type": "mesh"}})")), FormatError);
  CHECK_THROWS_AS(parse_scenario(nlohmann::json::parse(
                      R"({"n": 14, "k": 10, "generator": {"type": "datacenter"}})")),
                  FormatError);
}
