#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hierstore/errors.hpp"
#include "hierstore/rational.hpp"

namespace hierstore {

/// rates[i][j] is the bandwidth from node i to node j; the diagonal is unused.
template <class Rate>
using BandwidthMatrix = std::vector<std::vector<Rate>>;

template <class Rate>
struct RepairDecision {
  std::size_t chosen_d = 0;
  /// The chosen_d live nodes with the largest bandwidth into the target, fastest first.
  std::vector<std::size_t> helpers;
  /// (d - k + 1) times the d-th largest incoming bandwidth.
  Rate rate{};
  /// d-th largest incoming bandwidth.
  Rate slowest_link{};
};

/// Picks d in [k, |live|] maximizing (d - k + 1) B_(d), B_(d) the d-th largest
/// bandwidth from a live node into `target`; ties go to the smaller d.
/// Equal bandwidths are ordered by node index.
template <class Rate>
RepairDecision<Rate> choose_d(const BandwidthMatrix<Rate>& rates, std::size_t target,
                              std::span<const std::size_t> live, std::size_t k) {
  if (k < 1 || live.size() < k) {
    throw TooFewLiveNodes("repair needs k = " + std::to_string(k) + " live nodes, have " +
                          std::to_string(live.size()));
  }
  if (target >= rates.size()) throw ShapeMismatch("target node out of range");
  for (std::size_t h : live) {
    if (h == target || h >= rates.size()) throw ShapeMismatch("live set must exclude the target and be in range");
  }
  std::vector<std::size_t> order(live.begin(), live.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rates[a][target] > rates[b][target] || (!(rates[b][target] > rates[a][target]) && a < b);
  });
  RepairDecision<Rate> best;
  for (std::size_t d = k; d <= order.size(); ++d) {
    const Rate link = rates[order[d - 1]][target];
    const Rate value = Rate(static_cast<long long>(d - k + 1)) * link;
    if (best.chosen_d == 0 || value > best.rate) {
      best.chosen_d = d;
      best.rate = value;
      best.slowest_link = link;
    }
  }
  best.helpers.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best.chosen_d));
  return best;
}

/// beta_d = F / (k (d - k + 1)), the per-helper download at the minimum-storage point.
template <class Rate>
Rate per_helper_download(const Rate& file_size, std::size_t k, std::size_t d) {
  return file_size / Rate(static_cast<long long>(k * (d - k + 1)));
}

/// Time to pull beta_d over the slowest of the d links: F / (k (d - k + 1) B_(d)).
template <class Rate>
Rate repair_time(const RepairDecision<Rate>& decision, const Rate& file_size, std::size_t k) {
  return per_helper_download(file_size, k, decision.chosen_d) / decision.slowest_link;
}

/// Nodes in `groups` datacenters of `per_group` nodes; links inside a datacenter
/// run at `intra`, links between datacenters at `inter`.
struct DatacenterGrid {
  std::size_t groups = 5;
  std::size_t per_group = 3;
  Rational intra = 150;
  Rational inter = 15;

  std::size_t nodes() const noexcept { return groups * per_group; }
};

BandwidthMatrix<Rational> datacenter_bandwidths(const DatacenterGrid& grid);

/// Every link drawn independently as gaussian_bandwidth(mean, var_a, var_b).
struct RandomGaussian {
  double mean = 3.0;
  double var_a = 16.0;
  double var_b = 0.25;
};

inline constexpr double kBandwidthFloor = 1e-6;

/// max(N(mean, var_a), N(mean, var_b)) floored at kBandwidthFloor.
double gaussian_bandwidth(double mean, double var_a, double var_b, std::mt19937_64& rng);

struct FixedMatrix {
  BandwidthMatrix<double> rates;
};

using ScenarioGenerator = std::variant<DatacenterGrid, RandomGaussian, FixedMatrix>;

/// n × n matrix for one run; off-diagonal entries drawn row by row for RandomGaussian.
BandwidthMatrix<double> draw_bandwidths(const ScenarioGenerator& gen, std::size_t n, std::mt19937_64& rng);

/// Engine for run `run` of a simulation seeded with `seed`. Runs are independent
/// streams, so results do not depend on the order runs are evaluated in.
std::mt19937_64 run_engine(std::uint64_t seed, std::uint64_t run);

struct SampleStats {
  double mean = 0;
  double stddev = 0;
};

/// Mean and sample standard deviation of B_(k) / max_d (d - k + 1) B_(d) with
/// node 0 failed and all others live.
SampleStats one_failure_ratio(const ScenarioGenerator& gen, std::size_t n, std::size_t k, std::size_t runs,
                              std::uint64_t seed);

struct ProfilePoint {
  std::size_t failures;
  double mean;
  double stddev;
};

/// For t = 1..n-k failed nodes {0..t-1}: the time 1 / max_{k<=d<=n-t} (d-k+1) B_(d)
/// of the fastest repairable failed node, averaged over runs and scaled so that
/// t = n - k has mean 1.
std::vector<ProfilePoint> multi_failure_profile(const ScenarioGenerator& gen, std::size_t n, std::size_t k,
                                                std::size_t runs, std::uint64_t seed);

struct StageResult {
  std::size_t failures;
  std::size_t chosen_d;
  Rational opportunistic_time;
  Rational baseline_time;
  Rational improvement;
};

/// Repairs of 1..n-k concurrent failures {0..t-1} in an exact bandwidth matrix,
/// comparing the best d against d = k for a file of `file_size`.
std::vector<StageResult> stage_analysis(const BandwidthMatrix<Rational>& rates, std::size_t k,
                                        const Rational& file_size);

/// Scenario document {n, k, generator: {type, ...}} or {n, k, matrix: [[...]]}.
struct Scenario {
  std::size_t n = 0;
  std::size_t k = 0;
  ScenarioGenerator generator;
};

/// Throws FormatError on malformed documents.
Scenario parse_scenario(const nlohmann::json& doc);

void write_profile_csv(std::ostream& out, std::span<const ProfilePoint> points);

}  // namespace hierstore
