#include "hierstore/finite_field.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "hierstore/errors.hpp"

namespace hierstore {

bool is_prime(std::uint64_t q) noexcept {
  if (q < 2) return false;
  if (q < 4) return true;
  if (q % 2 == 0 || q % 3 == 0) return false;
  for (std::uint64_t d = 5; d <= q / d; d += 6) {
    if (q % d == 0 || q % (d + 2) == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t q) : q_(q) {
  if (q > kMaxModulus) throw NotPrime("field modulus " + std::to_string(q) + " exceeds 2^62");
  if (!is_prime(q)) throw NotPrime("field modulus " + std::to_string(q) + " is not prime");
}

Element PrimeField::reduce(std::int64_t value) const noexcept {
  const auto q = static_cast<std::int64_t>(q_);
  std::int64_t r = value % q;
  if (r < 0) r += q;
  return static_cast<Element>(r);
}

Element PrimeField::add(Element a, Element b) const noexcept {
  Element s = a + b;
  return s >= q_ ? s - q_ : s;
}

Element PrimeField::sub(Element a, Element b) const noexcept { return a >= b ? a - b : a + (q_ - b); }

Element PrimeField::mul(Element a, Element b) const noexcept {
  return static_cast<Element>((static_cast<unsigned __int128>(a) * b) % q_);
}

Element PrimeField::pow(Element base, std::uint64_t exponent) const noexcept {
  Element result = 1 % q_;
  base %= q_;
  while (exponent > 0) {
    if (exponent & 1U) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1U;
  }
  return result;
}

Element PrimeField::inv(Element a) const {
  a %= q_;
  if (a == 0) throw InverseOfZero("inverse of zero in GF(" + std::to_string(q_) + ")");
  // Extended Euclid on signed 128-bit to stay exact up to 2^62.
  __int128 t = 0, new_t = 1;
  __int128 r = q_, new_r = a;
  while (new_r != 0) {
    __int128 quotient = r / new_r;
    __int128 tmp = t - quotient * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - quotient * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += q_;
  return static_cast<Element>(t);
}

FieldMatrix::FieldMatrix(const PrimeField& field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

FieldMatrix::FieldMatrix(const PrimeField& field, std::size_t rows, std::size_t cols, std::vector<Element> entries)
    : field_(field), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw ShapeMismatch("matrix entry count " + std::to_string(entries_.size()) + " != " + std::to_string(rows) +
                        "x" + std::to_string(cols));
  }
  for (auto& e : entries_) e = field_.reduce_unsigned(e);
}

FieldMatrix FieldMatrix::identity(const PrimeField& field, std::size_t n) {
  FieldMatrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1 % field.modulus();
  return m;
}

FieldMatrix FieldMatrix::from_rows(const PrimeField& field, const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  FieldMatrix m(field, r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw ShapeMismatch("ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m.entries_[i * c + j] = field.reduce(rows[i][j]);
  }
  return m;
}

FieldMatrix FieldMatrix::from_rows(const PrimeField& field,
                                   std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  std::vector<std::vector<std::int64_t>> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(field, v);
}

FieldMatrix FieldMatrix::row_vector(const PrimeField& field, std::span<const Element> values) {
  return FieldMatrix(field, 1, values.size(), std::vector<Element>(values.begin(), values.end()));
}

void FieldMatrix::set(std::size_t r, std::size_t c, Element value) {
  entries_[r * cols_ + c] = field_.reduce_unsigned(value);
}

std::span<const Element> FieldMatrix::row(std::size_t r) const {
  return std::span<const Element>(entries_).subspan(r * cols_, cols_);
}

FieldMatrix FieldMatrix::transpose() const {
  FieldMatrix t(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.entries_[j * rows_ + i] = entries_[i * cols_ + j];
  return t;
}

FieldMatrix FieldMatrix::select_rows(std::span<const std::size_t> indices) const {
  FieldMatrix out(field_, indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw ShapeMismatch("row index out of range");
    std::copy_n(entries_.begin() + static_cast<std::ptrdiff_t>(indices[i] * cols_), cols_,
                out.entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
  return out;
}

FieldMatrix FieldMatrix::block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const {
  if (row0 + rows > rows_ || col0 + cols > cols_) throw ShapeMismatch("block out of range");
  FieldMatrix out(field_, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out.entries_[i * cols + j] = entries_[(row0 + i) * cols_ + col0 + j];
  return out;
}

FieldMatrix FieldMatrix::vstack(const FieldMatrix& below) const {
  if (!(field_ == below.field_)) throw ShapeMismatch("field mismatch in vstack");
  if (rows_ != 0 && below.rows_ != 0 && cols_ != below.cols_) throw ShapeMismatch("column mismatch in vstack");
  if (rows_ == 0) return below;
  FieldMatrix out(field_, rows_ + below.rows_, cols_);
  std::copy(entries_.begin(), entries_.end(), out.entries_.begin());
  std::copy(below.entries_.begin(), below.entries_.end(),
            out.entries_.begin() + static_cast<std::ptrdiff_t>(entries_.size()));
  return out;
}

FieldMatrix FieldMatrix::hstack(const FieldMatrix& right) const {
  if (!(field_ == right.field_)) throw ShapeMismatch("field mismatch in hstack");
  if (rows_ != right.rows_) throw ShapeMismatch("row mismatch in hstack");
  FieldMatrix out(field_, rows_, cols_ + right.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out.entries_[i * out.cols_ + j] = entries_[i * cols_ + j];
    for (std::size_t j = 0; j < right.cols_; ++j)
      out.entries_[i * out.cols_ + cols_ + j] = right.entries_[i * right.cols_ + j];
  }
  return out;
}

FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b) {
  if (!(a.field_ == b.field_)) throw ShapeMismatch("field mismatch in product");
  if (a.cols_ != b.rows_) {
    throw ShapeMismatch("cannot multiply " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) + " by " +
                        std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
  }
  const PrimeField& f = a.field_;
  FieldMatrix out(f, a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Element aik = a.entries_[i * a.cols_ + k];
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        Element& dst = out.entries_[i * b.cols_ + j];
        dst = f.add(dst, f.mul(aik, b.entries_[k * b.cols_ + j]));
      }
    }
  }
  return out;
}

FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b) {
  if (!(a.field_ == b.field_) || a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ShapeMismatch("sum shape mismatch");
  FieldMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) out.entries_[i] = a.field_.add(a.entries_[i], b.entries_[i]);
  return out;
}

FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b) {
  if (!(a.field_ == b.field_) || a.rows_ != b.rows_ || a.cols_ != b.cols_) {
    throw ShapeMismatch("difference shape mismatch");
  }
  FieldMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) out.entries_[i] = a.field_.sub(a.entries_[i], b.entries_[i]);
  return out;
}

bool operator==(const FieldMatrix& a, const FieldMatrix& b) noexcept {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
}

namespace {

// In-place reduction to reduced row-echelon form over the columns [0, pivot_cols).
// Pivot: first row at or below the current one with a nonzero entry in the column.
std::size_t row_reduce(std::vector<Element>& e, std::size_t rows, std::size_t cols, std::size_t pivot_cols,
                       const PrimeField& f) {
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < pivot_cols && pivot_row < rows; ++c) {
    std::size_t p = pivot_row;
    while (p < rows && e[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != pivot_row) {
      std::swap_ranges(e.begin() + static_cast<std::ptrdiff_t>(p * cols),
                       e.begin() + static_cast<std::ptrdiff_t>((p + 1) * cols),
                       e.begin() + static_cast<std::ptrdiff_t>(pivot_row * cols));
    }
    const Element scale = f.inv(e[pivot_row * cols + c]);
    for (std::size_t j = 0; j < cols; ++j) e[pivot_row * cols + j] = f.mul(e[pivot_row * cols + j], scale);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pivot_row) continue;
      const Element factor = e[r * cols + c];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        e[r * cols + j] = f.sub(e[r * cols + j], f.mul(factor, e[pivot_row * cols + j]));
      }
    }
    ++pivot_row;
  }
  return pivot_row;
}

}  // namespace

std::size_t rank(const FieldMatrix& m) {
  std::vector<Element> e = m.entries();
  return row_reduce(e, m.rows(), m.cols(), m.cols(), m.field());
}

bool is_nonsingular(const FieldMatrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

FieldMatrix solve(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.rows() != a.cols()) throw ShapeMismatch("solve requires a square coefficient matrix");
  if (a.rows() != b.rows()) throw ShapeMismatch("solve: right-hand side has wrong row count");
  if (!(a.field() == b.field())) throw ShapeMismatch("solve: field mismatch");
  const std::size_t n = a.rows();
  const std::size_t w = n + b.cols();
  const FieldMatrix aug = a.hstack(b);
  std::vector<Element> e = aug.entries();
  if (row_reduce(e, n, w, n, a.field()) != n) throw Singular("matrix is singular");
  FieldMatrix x(a.field(), n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x.set(i, j, e[i * w + n + j]);
  return x;
}

FieldMatrix invert(const FieldMatrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("only square matrices can be inverted");
  return solve(m, FieldMatrix::identity(m.field(), m.rows()));
}

FieldMatrix vandermonde(const PrimeField& field, std::span<const Element> points, std::size_t cols) {
  if (points.empty()) throw ShapeMismatch("vandermonde needs at least one point");
  if (cols == 0) throw ShapeMismatch("vandermonde needs at least one column");
  std::unordered_set<Element> seen;
  for (Element p : points) {
    if (!seen.insert(field.reduce_unsigned(p)).second) {
      throw DuplicatePoints("vandermonde evaluation points must be distinct modulo " +
                            std::to_string(field.modulus()));
    }
  }
  FieldMatrix v(field, points.size(), cols);
  for (std::size_t r = 0; r < points.size(); ++r) {
    Element power = 1 % field.modulus();
    const Element p = field.reduce_unsigned(points[r]);
    for (std::size_t c = 0; c < cols; ++c) {
      v.set(r, c, power);
      power = field.mul(power, p);
    }
  }
  return v;
}

}  // namespace hierstore
