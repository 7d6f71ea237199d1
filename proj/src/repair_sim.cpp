#include "hierstore/repair_sim.hpp"

#include <cmath>
#include <functional>

namespace hierstore {
namespace {

SampleStats stats(const std::vector<double>& xs) {
  SampleStats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v(to - from);
  std::iota(v.begin(), v.end(), from);
  return v;
}

template <class Rate>
RepairDecision<Rate> best_failed_node(const BandwidthMatrix<Rate>& rates, std::size_t failures, std::size_t k,
                                      std::size_t& repaired) {
  const auto live = range(failures, rates.size());
  RepairDecision<Rate> best;
  for (std::size_t f = 0; f < failures; ++f) {
    auto d = choose_d(rates, f, live, k);
    if (best.chosen_d == 0 || d.rate > best.rate) {
      best = std::move(d);
      repaired = f;
    }
  }
  return best;
}

void check_sim_params(std::size_t n, std::size_t k, std::size_t runs) {
  if (k < 1 || k >= n) throw InvalidParams("need 1 <= k < n");
  if (runs < 1) throw InvalidParams("runs must be at least 1");
}

}  // namespace

BandwidthMatrix<Rational> datacenter_bandwidths(const DatacenterGrid& grid) {
  const std::size_t n = grid.nodes();
  BandwidthMatrix<Rational> rates(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) rates[i][j] = i / grid.per_group == j / grid.per_group ? grid.intra : grid.inter;
    }
  }
  return rates;
}

double gaussian_bandwidth(double mean, double var_a, double var_b, std::mt19937_64& rng) {
  if (!(var_a > 0) || !(var_b > 0)) throw InvalidParams("variances must be positive");
  std::normal_distribution<double> a(mean, std::sqrt(var_a));
  std::normal_distribution<double> b(mean, std::sqrt(var_b));
  const double x = a(rng);
  const double y = b(rng);
  return std::max({x, y, kBandwidthFloor});
}

BandwidthMatrix<double> draw_bandwidths(const ScenarioGenerator& gen, std::size_t n, std::mt19937_64& rng) {
  if (const auto* grid = std::get_if<DatacenterGrid>(&gen)) {
    if (grid->nodes() != n) throw ShapeMismatch("datacenter grid has " + std::to_string(grid->nodes()) + " nodes");
    const auto exact = datacenter_bandwidths(*grid);
    BandwidthMatrix<double> out(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i][j] = to_double(exact[i][j]);
    return out;
  }
  if (const auto* fixed = std::get_if<FixedMatrix>(&gen)) {
    if (fixed->rates.size() != n) throw ShapeMismatch("bandwidth matrix must be " + std::to_string(n) + " square");
    return fixed->rates;
  }
  const auto& g = std::get<RandomGaussian>(gen);
  BandwidthMatrix<double> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) out[i][j] = gaussian_bandwidth(g.mean, g.var_a, g.var_b, rng);
    }
  }
  return out;
}

std::mt19937_64 run_engine(std::uint64_t seed, std::uint64_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  return std::mt19937_64(seq);
}

SampleStats one_failure_ratio(const ScenarioGenerator& gen, std::size_t n, std::size_t k, std::size_t runs,
                              std::uint64_t seed) {
  check_sim_params(n, k, runs);
  const auto live = range(1, n);
  std::vector<double> ratios;
  ratios.reserve(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    auto rng = run_engine(seed, run);
    const auto rates = draw_bandwidths(gen, n, rng);
    const auto best = choose_d(rates, 0, live, k);
    std::vector<double> incoming;
    for (std::size_t h : live) incoming.push_back(rates[h][0]);
    std::nth_element(incoming.begin(), incoming.begin() + static_cast<std::ptrdiff_t>(k - 1), incoming.end(),
                     std::greater<>());
    ratios.push_back(incoming[k - 1] / best.rate);
  }
  return stats(ratios);
}

std::vector<ProfilePoint> multi_failure_profile(const ScenarioGenerator& gen, std::size_t n, std::size_t k,
                                                std::size_t runs, std::uint64_t seed) {
  check_sim_params(n, k, runs);
  const std::size_t max_t = n - k;
  std::vector<std::vector<double>> times(max_t);
  for (std::size_t run = 0; run < runs; ++run) {
    auto rng = run_engine(seed, run);
    const auto rates = draw_bandwidths(gen, n, rng);
    for (std::size_t t = 1; t <= max_t; ++t) {
      std::size_t repaired = 0;
      const auto best = best_failed_node(rates, t, k, repaired);
      times[t - 1].push_back(1.0 / best.rate);
    }
  }
  const double unit = stats(times[max_t - 1]).mean;
  std::vector<ProfilePoint> out;
  for (std::size_t t = 1; t <= max_t; ++t) {
    const SampleStats s = stats(times[t - 1]);
    out.push_back({t, s.mean / unit, s.stddev / unit});
  }
  return out;
}

std::vector<StageResult> stage_analysis(const BandwidthMatrix<Rational>& rates, std::size_t k,
                                        const Rational& file_size) {
  const std::size_t n = rates.size();
  if (k < 1 || k >= n) throw InvalidParams("need 1 <= k < n");
  std::vector<StageResult> out;
  for (std::size_t t = 1; t <= n - k; ++t) {
    std::size_t repaired = 0;
    const auto best = best_failed_node(rates, t, k, repaired);
    const auto live = range(t, n);
    auto baseline = choose_d(rates, repaired, live, k);
    // Force d = k for the baseline: the k fastest helpers.
    std::vector<Rational> incoming;
    for (std::size_t h : live) incoming.push_back(rates[h][repaired]);
    std::sort(incoming.begin(), incoming.end(), std::greater<>());
    baseline.chosen_d = k;
    baseline.slowest_link = incoming[k - 1];
    const Rational opp = repair_time(best, file_size, k);
    const Rational base = repair_time(baseline, file_size, k);
    out.push_back({t, best.chosen_d, opp, base, base / opp});
  }
  return out;
}

Scenario parse_scenario(const nlohmann::json& doc) {
  try {
    Scenario s;
    s.n = doc.at("n").get<std::size_t>();
    s.k = doc.at("k").get<std::size_t>();
    if (doc.contains("matrix")) {
      FixedMatrix m;
      m.rates = doc.at("matrix").get<BandwidthMatrix<double>>();
      if (m.rates.size() != s.n) throw FormatError("matrix must have n rows");
      for (const auto& row : m.rates) {
        if (row.size() != s.n) throw FormatError("matrix must be n × n");
        for (double r : row) {
          if (!(r >= 0)) throw FormatError("bandwidths must be non-negative");
        }
      }
      s.generator = std::move(m);
      return s;
    }
    const auto& g = doc.at("generator");
    const std::string type = g.at("type").get<std::string>();
    auto rat = [&](const char* key, const Rational& fallback) {
      if (!g.contains(key)) return fallback;
      const auto& v = g.at(key);
      return v.is_string() ? parse_rational(v.get<std::string>()) : parse_rational(v.dump());
    };
    if (type == "datacenter") {
      DatacenterGrid grid;
      grid.groups = g.value("groups", grid.groups);
      grid.per_group = g.value("per_group", grid.per_group);
      grid.intra = rat("intra", grid.intra);
      grid.inter = rat("inter", grid.inter);
      if (grid.nodes() != s.n) throw FormatError("datacenter grid size must equal n");
      s.generator = grid;
    } else if (type == "gaussian") {
      RandomGaussian r;
      r.mean = g.value("mean", r.mean);
      r.var_a = g.value("var_a", r.var_a);
      r.var_b = g.value("var_b", r.var_b);
      s.generator = r;
    } else {
      throw FormatError("unknown generator type '" + type + "'");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad scenario document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad scenario number: ") + e.what());
  }
}

void write_profile_csv(std::ostream& out, std::span<const ProfilePoint> points) {
  const auto precision = out.precision(12);
  out << "t,mean_normalized_time,stddev\r\n";
  for (const auto& p : points) out << p.failures << ',' << p.mean << ',' << p.stddev << "\r\n";
  out.precision(precision);
}

}  // namespace hierstore
