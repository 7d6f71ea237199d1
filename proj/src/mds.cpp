#include "hierstore/mds.hpp"

#include <random>
#include <string>
#include <unordered_set>

#include "hierstore/combinations.hpp"
#include "hierstore/errors.hpp"

namespace hierstore {

MdsCheck check_mds(const FieldMatrix& generator, std::uint64_t seed) {
  const std::size_t n = generator.rows();
  const std::size_t k = generator.cols();
  MdsCheck result;
  if (k == 0 || k > n) {
    result.singular_minor = std::vector<std::size_t>{};
    return result;
  }
  const std::uint64_t total = count_combinations(n, k);
  if (total <= kExhaustiveMinorBudget) {
    for_each_combination(n, k, [&](const std::vector<std::size_t>& rows) {
      ++result.minors_checked;
      if (!is_nonsingular(generator.select_rows(rows))) {
        result.singular_minor = rows;
        return false;
      }
      return true;
    });
    return result;
  }
  result.exhaustive = false;
  std::mt19937_64 engine(seed);
  for (std::uint64_t s = 0; s < kSampledMinors; ++s) {
    auto rows = random_combination(n, k, engine);
    ++result.minors_checked;
    if (!is_nonsingular(generator.select_rows(rows))) {
      result.singular_minor = std::move(rows);
      break;
    }
  }
  return result;
}

MdsCode MdsCode::from_generator(FieldMatrix generator) {
  const std::size_t k = generator.cols();
  if (k == 0 || generator.rows() < k) throw NotMds("generator must be n×k with n >= k >= 1");
  if (!(generator.block(0, 0, k, k) == FieldMatrix::identity(generator.field(), k))) {
    throw NotMds("generator is not systematic: top k rows must be the identity");
  }
  const MdsCheck check = check_mds(generator);
  if (!check.ok()) throw NotMds("generator has a singular k×k minor");
  return MdsCode(std::move(generator));
}

std::vector<Element> MdsCode::encode(std::span<const Element> message) const {
  if (message.size() != k()) {
    throw ShapeMismatch("message has " + std::to_string(message.size()) + " symbols, code dimension is " +
                        std::to_string(k()));
  }
  const PrimeField& f = field();
  std::vector<Element> out(n(), 0);
  for (std::size_t r = 0; r < n(); ++r) {
    Element acc = 0;
    for (std::size_t c = 0; c < k(); ++c) acc = f.add(acc, f.mul(generator_(r, c), f.reduce_unsigned(message[c])));
    out[r] = acc;
  }
  return out;
}

std::vector<Element> MdsCode::decode_erasures(std::span<const KnownSymbol> known) const {
  std::unordered_set<std::size_t> seen;
  for (const auto& s : known) {
    if (s.index >= n()) throw ShapeMismatch("symbol index " + std::to_string(s.index) + " out of range");
    if (!seen.insert(s.index).second) {
      throw ShapeMismatch("duplicate symbol index " + std::to_string(s.index));
    }
  }
  if (known.size() < k()) {
    throw TooFewSymbols("need " + std::to_string(k()) + " symbols, got " + std::to_string(known.size()));
  }
  const PrimeField& f = field();
  std::vector<std::size_t> rows(k());
  std::vector<Element> rhs(k());
  for (std::size_t i = 0; i < k(); ++i) {
    rows[i] = known[i].index;
    rhs[i] = f.reduce_unsigned(known[i].value);
  }
  const FieldMatrix x = solve(generator_.select_rows(rows), FieldMatrix(f, k(), 1, rhs));
  std::vector<Element> message(x.entries().begin(), x.entries().end());
  const std::vector<Element> codeword = encode(message);
  for (const auto& s : known) {
    if (codeword[s.index] != f.reduce_unsigned(s.value)) {
      throw InconsistentSymbols("symbol at index " + std::to_string(s.index) + " disagrees with the decoded message");
    }
  }
  return message;
}

MdsCode make_systematic_mds(const PrimeField& field, std::size_t n, std::size_t k) {
  if (k == 0 || n < k) throw InvalidParams("MDS code requires n >= k >= 1");
  if (field.modulus() < n) {
    throw FieldTooSmall("GF(" + std::to_string(field.modulus()) + ") has fewer than n = " + std::to_string(n) +
                        " distinct points");
  }
  std::vector<Element> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = i;
  const FieldMatrix v = vandermonde(field, points, k);
  const FieldMatrix g = v * invert(v.block(0, 0, k, k));
  return MdsCode::from_generator(g);
}

}  // namespace hierstore
