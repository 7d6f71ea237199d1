#include "doctest.h"

#include <random>
#include <sstream>

#include "hierstore/errors.hpp"
#include "hierstore/tradeoff.hpp"

using namespace hierstore;

namespace {

Rational r(long long p, long long q = 1) { return Rational(p, q); }
Rational q(std::size_t v) { return Rational(static_cast<unsigned long long>(v)); }

// Independent of the library's search: on each linear piece of the cut, solve
// cut(alpha) = M and keep the smallest candidate whose cut reaches M.
Rational threshold_by_pieces(const HierParams& p, const Rational& m, const Rational& gamma) {
  const Rational beta = gamma / q(p.d_b);
  const Rational local = q((p.local_dim() - 1) * p.k);
  auto cut = [&](const Rational& alpha) {
    Rational c = local * alpha;
    for (std::size_t i = 0; i < p.k; ++i) c += std::min(q(p.d_b - i) * beta, alpha);
    return c;
  };
  std::optional<Rational> best;
  // In piece j the j terms with the smallest (d_b - i) beta are repair-limited.
  for (std::size_t j = 0; j <= p.k; ++j) {
    Rational fixed = 0;
    for (std::size_t i = p.k - j; i < p.k; ++i) fixed += q(p.d_b - i) * beta;
    const Rational slope = local + q(p.k - j);
    if (slope == 0) continue;
    const Rational cand = (m - fixed) / slope;
    if (cand < 0) continue;
    if (cut(cand) >= m && (!best || cand < *best)) best = cand;
  }
  if (!best) throw std::runtime_error("no threshold");
  return *best;
}

HierParams random_params(std::mt19937_64& rng) {
  while (true) {
    HierParams p;
    p.n_b = 2 + rng() % 11;
    p.d_b = 1 + rng() % (p.n_b - 1);
    p.k = 1 + rng() % p.d_b;
    p.n_l = 1 + rng() % 5;
    p.d_l = rng() % p.n_l;
    try {
      p.validate();
      return p;
    } catch (const InvalidParams&) {
    }
  }
}

}  // namespace

TEST_CASE("fgh") {
  const HierParams p{5, 3, 2, 3, 1};
  const Fgh v = fgh(p, r(1), 1);
  CHECK(v.f == r(3, 5));
  CHECK(v.g == r(2, 3));
  CHECK(v.h == r(1));
  const Fgh zero = fgh(p, r(1), 0);
  CHECK(zero.f == r(3, 4));  // M d_b / (k (d_b - k + 1))
  CHECK(zero.g == 0);
  CHECK(zero.h == r(2, 3));
  CHECK(fgh(p, r(1), 2).g == r(5, 3));  // (2 d_b - k + 1) k / (2 d_b)
  CHECK_THROWS_AS(fgh(p, r(1), 3), InvalidParams);
}

TEST_CASE("f, g, h are positive for 0 < i <= k") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const HierParams p = random_params(rng);
    for (std::size_t i = 1; i <= p.k; ++i) {
      const Fgh v = fgh(p, r(7), i);
      CHECK(v.f > 0);
      CHECK(v.g > 0);
      CHECK(v.h > 0);
    }
  }
}

TEST_CASE("first breakpoint is the minimum-storage point") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const HierParams p = random_params(rng);
    const Rational m = r(1 + static_cast<long long>(rng() % 100));
    const auto bp = gamma_breakpoints(p, m);
    const ExtremalPoints ex = extremal_points(p, m);
    CHECK(bp[0] == ex.msr.gamma);
    CHECK(alpha_star(p, m, bp[0]).alpha == ex.msr.alpha);
    CHECK(alpha_star(p, m, bp[0]).regime == 0);
    for (std::size_t i = 1; i < bp.size(); ++i) CHECK(bp[i] < bp[i - 1]);
  }
}

TEST_CASE("threshold is continuous at every breakpoint") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const HierParams p = random_params(rng);
    const Rational m = r(1);
    const auto bp = gamma_breakpoints(p, m);
    for (std::size_t i = 0; i < bp.size(); ++i) {
      // Value of the branch just below bp[i], extended to bp[i].
      const std::size_t below = i + 1;
      if (below == p.k && p.local_dim() == 1) continue;
      const Fgh v = fgh(p, m, below);
      const Rational denom = below < p.k ? q(p.k * p.local_dim()) - q(below) : q(p.k * (p.local_dim() - 1));
      CHECK(alpha_star(p, m, bp[i]).alpha == (m - v.g * bp[i]) / denom);
    }
  }
}

TEST_CASE("threshold matches the min-cut on dense grids") {
  std::mt19937_64 rng(4);
  for (int set = 0; set < 20; ++set) {
    const HierParams p = random_params(rng);
    const Rational m = r(1 + static_cast<long long>(rng() % 50));
    const auto bp = gamma_breakpoints(p, m);
    const Rational lo = p.local_dim() > 1 ? Rational(0) : bp.back();
    const Rational hi = 2 * bp.front();
    std::optional<Rational> prev;
    for (int g = 0; g < 200; ++g) {
      const Rational gamma = lo + (hi - lo) * r(g, 199);
      const Rational a = alpha_star(p, m, gamma).alpha;
      CHECK(a == alpha_star_oracle(p, m, gamma));
      CHECK(a == threshold_by_pieces(p, m, gamma));
      if (prev) CHECK(a <= *prev);
      prev = a;
    }
  }
}

TEST_CASE("infeasible repair bandwidth without local redundancy") {
  const HierParams p{5, 2, 2, 3, 1};  // n_l - d_l = 1
  CHECK_THROWS_AS(alpha_star(p, r(1), r(0)), InfeasibleGamma);
  CHECK_THROWS_AS(alpha_star_oracle(p, r(1), r(0)), Infeasible);
  CHECK_THROWS_AS(alpha_star(p, r(1), r(-1)), InfeasibleGamma);
}

TEST_CASE("min-cut") {
  const HierParams p{5, 3, 2, 3, 1};
  CHECK(mincut(p, r(2), r(0)) == r(2 * 2));
  const ExtremalPoints ex = extremal_points(p, r(1));
  CHECK(mincut(p, ex.msr.alpha, ex.msr.gamma / 3) == r(1));
  // Large alpha: every min picks the beta term.
  CHECK(mincut(p, r(1000), r(1)) == r(2 * 1000) + r(3 + 2));
}

TEST_CASE("without local redundancy the threshold is the flat one") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    HierParams p = random_params(rng);
    p.d_l = p.n_l - 1;
    const Rational m = r(12);
    const auto bp = gamma_breakpoints(p, m);
    for (int g = 0; g < 10; ++g) {
      const Rational gamma = bp.back() + (2 * bp.front() - bp.back()) * r(g, 9);
      const Rational alpha = alpha_star(p, m, gamma).alpha;
      if (alpha * q(p.k) < m) continue;
      const Rational beta = dimakis_beta_star(p.n_b, p.k, p.d_b, m, alpha);
      CHECK(beta <= gamma / q(p.d_b));
      if (alpha > m / q(p.k)) CHECK(beta == gamma / q(p.d_b));
    }
  }
}

TEST_CASE("threshold saturates at large gamma") {
  const HierParams p{6, 3, 3, 4, 1};
  CHECK(alpha_star_oracle(p, r(30), r(1'000'000)) == r(30) / r(3 * 2));
}

TEST_CASE("extremal points") {
  const HierParams p{5, 3, 2, 3, 1};
  const ExtremalPoints ex = extremal_points(p, r(1));
  CHECK(ex.msr == TradeoffPoint{r(1, 4), r(3, 8)});
  REQUIRE(ex.mbr);
  CHECK(ex.mbr->gamma == 0);
  CHECK(ex.mbr->alpha == r(1, 2));
  CHECK(ex.msr_exact_beta == r(1) / r(2 * (3 - 2 + 1) * 2));
  CHECK_FALSE(extremal_points(HierParams{5, 2, 2, 3, 1}, r(1)).mbr.has_value());
}

TEST_CASE("flat threshold beta") {
  CHECK(dimakis_beta_star(4, 2, 3, r(1), r(1, 2)) == r(1, 4));
  CHECK(dimakis_beta_star(9, 4, 7, r(10), r(10, 4)) == r(10) / r(4 * 4));
  // d = k, alpha >= M: sum_i min(alpha, (k - i) beta) = M with beta terms only.
  CHECK(dimakis_beta_star(5, 3, 3, r(6), r(6)) == r(1));
  CHECK_THROWS_AS(dimakis_beta_star(4, 2, 3, r(1), r(1, 3)), InfeasibleAlpha);
  CHECK_THROWS_AS(dimakis_beta_star(4, 2, 4, r(1), r(1)), InvalidParams);

  std::optional<Rational> prev;
  for (int i = 0; i < 100; ++i) {
    const Rational alpha = r(1, 3) + r(i, 40);
    const Rational b = dimakis_beta_star(10, 3, 8, r(1), alpha);
    if (prev) CHECK(b <= *prev);
    prev = b;
  }
}

TEST_CASE("block-design parameters") {
  const HierParams p{6, 3, 4, 5, 1};
  const ChaoParams c = chao_params(p, 2, r(1));
  CHECK(c.t_c == 3);
  CHECK(c.alpha == 5);
  CHECK(c.message_size == 24);
  CHECK_NOTHROW(chao_params(p, 3, r(1)));
  CHECK_THROWS_AS(chao_params(p, 1, r(1)), ROutOfRange);
  CHECK_THROWS_AS(chao_params(p, 4, r(1)), ROutOfRange);
  // Integral upper bound is inclusive: n_b - d_b + d_b / (d_b - k + 1) = 2 + 4 with k = d_b.
  const HierParams edge{6, 3, 4, 4, 1};
  CHECK_NOTHROW(chao_params(edge, 6, r(1)));
  CHECK(chao_params(edge, 6, r(1)).t_c == 0);
  CHECK_THROWS_AS(chao_params(edge, 7, r(1)), ROutOfRange);
}

TEST_CASE("curve csv") {
  const HierParams p{5, 3, 2, 3, 1};
  const std::vector<Rational> g{r(1, 2), r(0)};
  std::ostringstream out;
  write_tradeoff_csv(out, p, r(1), g);
  CHECK(out.str().rfind("gamma,alpha_star,regime_index\r\n", 0) == 0);
  CHECK(out.str().find("1/2,1/4,0\r\n") != std::string::npos);
  CHECK(out.str().find("0,1/2,2\r\n") != std::string::npos);
}
