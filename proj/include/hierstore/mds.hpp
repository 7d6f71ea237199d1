#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hierstore/finite_field.hpp"

namespace hierstore {

struct KnownSymbol {
  std::size_t index;
  Element value;
};

/// Result of checking that every k×k submatrix of an n×k generator is nonsingular.
struct MdsCheck {
  bool exhaustive = true;
  std::uint64_t minors_checked = 0;
  /// Rows of the first singular minor found, if any.
  std::optional<std::vector<std::size_t>> singular_minor;

  bool ok() const noexcept { return !singular_minor.has_value(); }
};

/// Minor-check budget: exhaustive up to kExhaustiveMinorBudget minors,
/// otherwise kSampledMinors random minors drawn from `seed`.
inline constexpr std::uint64_t kExhaustiveMinorBudget = 100'000;
inline constexpr std::uint64_t kSampledMinors = 10'000;

MdsCheck check_mds(const FieldMatrix& generator, std::uint64_t seed = 0);

/// Systematic (n, k) MDS code with an n×k generator whose top k rows are the identity.
class MdsCode {
 public:
  /// Validates the systematic form and the MDS property; throws NotMds otherwise.
  static MdsCode from_generator(FieldMatrix generator);

  const PrimeField& field() const noexcept { return generator_.field(); }
  std::size_t n() const noexcept { return generator_.rows(); }
  std::size_t k() const noexcept { return generator_.cols(); }
  const FieldMatrix& generator() const noexcept { return generator_; }

  std::vector<Element> encode(std::span<const Element> message) const;
  /// Recovers the message from at least k coordinates with distinct indices.
  /// Throws TooFewSymbols, or InconsistentSymbols when surplus coordinates disagree.
  std::vector<Element> decode_erasures(std::span<const KnownSymbol> known) const;

 private:
  explicit MdsCode(FieldMatrix generator) : generator_(std::move(generator)) {}
  FieldMatrix generator_;
};

/// Vandermonde on points 0..n-1, right-multiplied by the inverse of its top k×k block.
/// Requires q >= n (FieldTooSmall otherwise).
MdsCode make_systematic_mds(const PrimeField& field, std::size_t n, std::size_t k);

}  // namespace hierstore
