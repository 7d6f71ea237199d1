#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hierstore {

/// A field element; always stored reduced into [0, q).
using Element = std::uint64_t;

/// GF(q) for a prime q. Primality is checked by trial division at construction.
class PrimeField {
 public:
  /// Largest accepted modulus; keeps products inside unsigned __int128 and
  /// trial division bounded.
  static constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 62);

  explicit PrimeField(std::uint64_t q);

  std::uint64_t modulus() const noexcept { return q_; }

  Element reduce(std::int64_t value) const noexcept;
  Element reduce_unsigned(std::uint64_t value) const noexcept { return value % q_; }

  Element add(Element a, Element b) const noexcept;
  Element sub(Element a, Element b) const noexcept;
  Element neg(Element a) const noexcept { return a == 0 ? 0 : q_ - a; }
  Element mul(Element a, Element b) const noexcept;
  Element pow(Element base, std::uint64_t exponent) const noexcept;
  /// Throws InverseOfZero for a == 0.
  Element inv(Element a) const;

  friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept { return a.q_ == b.q_; }

 private:
  std::uint64_t q_;
};

bool is_prime(std::uint64_t q) noexcept;

/// Dense row-major matrix over a prime field.
class FieldMatrix {
 public:
  FieldMatrix(const PrimeField& field, std::size_t rows, std::size_t cols);
  /// Entries are reduced modulo q.
  FieldMatrix(const PrimeField& field, std::size_t rows, std::size_t cols, std::vector<Element> entries);

  static FieldMatrix identity(const PrimeField& field, std::size_t n);
  static FieldMatrix from_rows(const PrimeField& field,
                               std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static FieldMatrix from_rows(const PrimeField& field, const std::vector<std::vector<std::int64_t>>& rows);
  static FieldMatrix row_vector(const PrimeField& field, std::span<const Element> values);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::vector<Element>& entries() const noexcept { return entries_; }

  Element operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Element value);
  std::span<const Element> row(std::size_t r) const;

  FieldMatrix transpose() const;
  FieldMatrix select_rows(std::span<const std::size_t> indices) const;
  FieldMatrix block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const;
  FieldMatrix vstack(const FieldMatrix& below) const;
  FieldMatrix hstack(const FieldMatrix& right) const;

  friend FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b);
  friend FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b);
  friend FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b);
  friend bool operator==(const FieldMatrix& a, const FieldMatrix& b) noexcept;

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Element> entries_;
};

std::size_t rank(const FieldMatrix& m);
bool is_nonsingular(const FieldMatrix& m);
/// Throws ShapeMismatch for non-square input and Singular when no inverse exists.
FieldMatrix invert(const FieldMatrix& m);
/// Solves a·x = b for square nonsingular a.
FieldMatrix solve(const FieldMatrix& a, const FieldMatrix& b);
/// Row r is [1, p_r, p_r^2, ..., p_r^(cols-1)].
FieldMatrix vandermonde(const PrimeField& field, std::span<const Element> points, std::size_t cols);

}  // namespace hierstore
