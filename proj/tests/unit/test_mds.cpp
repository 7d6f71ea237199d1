#include "doctest.h"

#include <random>

#include "hierstore/combinations.hpp"
#include "hierstore/errors.hpp"
#include "hierstore/mds.hpp"

using namespace hierstore;

namespace {

std::vector<Element> random_message(const PrimeField& f, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<Element> d(0, f.modulus() - 1);
  std::vector<Element> m(k);
  for (auto& x : m) x = d(rng);
  return m;
}

}  // namespace

TEST_CASE("systematic construction") {
  const PrimeField f(11);
  const MdsCode c = make_systematic_mds(f, 3, 2);
  CHECK(c.generator().block(0, 0, 2, 2) == FieldMatrix::identity(f, 2));
  CHECK(check_mds(c.generator()).ok());

  CHECK(make_systematic_mds(f, 4, 4).generator() == FieldMatrix::identity(f, 4));

  const MdsCode five = make_systematic_mds(f, 5, 2);
  const MdsCheck chk = check_mds(five.generator());
  CHECK(chk.ok());
  CHECK(chk.exhaustive);
  CHECK(chk.minors_checked == 10);

  CHECK_THROWS_AS(make_systematic_mds(f, 12, 3), FieldTooSmall);
  CHECK_THROWS_AS(make_systematic_mds(f, 3, 4), InvalidParams);
  CHECK_THROWS_AS(make_systematic_mds(f, 3, 0), InvalidParams);
}

TEST_CASE("explicit combiner [[1,0],[0,1],[1,1]]") {
  const PrimeField f(11);
  const MdsCode b = MdsCode::from_generator(FieldMatrix::from_rows(f, {{1, 0}, {0, 1}, {1, 1}}));
  const std::vector<Element> msg{3, 4};
  CHECK(b.encode(msg) == std::vector<Element>{3, 4, 7});
  CHECK(b.encode(std::vector<Element>{0, 0}) == std::vector<Element>{0, 0, 0});

  // Coordinates 1 and 2, both zero-based: x1 = 4 and x0 + x1 = 7.
  const std::vector<KnownSymbol> known{{1, 4}, {2, 7}};
  CHECK(b.decode_erasures(known) == std::vector<Element>{3, 4});

  const std::vector<KnownSymbol> all{{0, 3}, {1, 4}, {2, 7}};
  CHECK(b.decode_erasures(all) == msg);

  const std::vector<KnownSymbol> one{{2, 7}};
  CHECK_THROWS_AS(b.decode_erasures(one), TooFewSymbols);
  const std::vector<KnownSymbol> bad{{0, 3}, {1, 4}, {2, 8}};
  CHECK_THROWS_AS(b.decode_erasures(bad), InconsistentSymbols);
  const std::vector<KnownSymbol> dup{{0, 3}, {0, 3}};
  CHECK_THROWS_AS(b.decode_erasures(dup), ShapeMismatch);
  CHECK_THROWS_AS(b.encode(std::vector<Element>{1}), ShapeMismatch);
}

TEST_CASE("from_generator rejects non-systematic and non-MDS matrices") {
  const PrimeField f(11);
  CHECK_THROWS_AS(MdsCode::from_generator(FieldMatrix::from_rows(f, {{1, 1}, {0, 1}, {1, 0}})), NotMds);
  CHECK_THROWS_AS(MdsCode::from_generator(FieldMatrix::from_rows(f, {{1, 0}, {0, 1}, {1, 0}})), NotMds);
  CHECK_THROWS_AS(MdsCode::from_generator(FieldMatrix::from_rows(f, {{1, 0}, {0, 1}, {0, 3}})), NotMds);
}

TEST_CASE("decode from every k-subset recovers the message") {
  const PrimeField f(13);
  std::mt19937_64 rng(5);
  for (auto [n, k] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 2}, {5, 2}, {6, 3}, {7, 4}, {8, 1}}) {
    const MdsCode c = make_systematic_mds(f, n, k);
    REQUIRE(count_combinations(n, k) <= 200);
    for_each_combination(n, k, [&](const std::vector<std::size_t>& subset) {
      for (int trial = 0; trial < 500; ++trial) {
        const auto m = random_message(f, k, rng);
        const auto word = c.encode(m);
        CHECK(std::equal(m.begin(), m.end(), word.begin()));
        std::vector<KnownSymbol> known;
        for (std::size_t i : subset) known.push_back({i, word[i]});
        if (c.decode_erasures(known) != m) {
          FAIL("decode mismatch");
          return false;
        }
      }
      return true;
    });
  }
}

TEST_CASE("large codes are checked by sampling") {
  const PrimeField f(101);
  const MdsCode c = make_systematic_mds(f, 40, 20);
  const MdsCheck chk = check_mds(c.generator(), 3);
  CHECK_FALSE(chk.exhaustive);
  CHECK(chk.minors_checked == kSampledMinors);
  CHECK(chk.ok());
}
