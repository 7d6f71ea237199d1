#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "hierstore/rational.hpp"

namespace hierstore {

/// A flat (n, k) system whose newcomers may download from any d ∈ D helpers.
class OppSystem {
 public:
  /// Sorts D descending; throws InvalidParams unless D is non-empty, distinct and k <= d < n.
  static OppSystem make(std::size_t n, std::size_t k, Rational message_size, std::vector<std::size_t> helper_counts);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  const Rational& message_size() const noexcept { return message_size_; }
  /// d_1 > d_2 > ... > d_l
  const std::vector<std::size_t>& helper_counts() const noexcept { return d_; }
  std::size_t d1() const noexcept { return d_.front(); }

 private:
  OppSystem(std::size_t n, std::size_t k, Rational m, std::vector<std::size_t> d)
      : n_(n), k_(k), message_size_(std::move(m)), d_(std::move(d)) {}
  std::size_t n_;
  std::size_t k_;
  Rational message_size_;
  std::vector<std::size_t> d_;
};

/// Per-helper download; an unbounded capacity never constrains a cut.
class Capacity {
 public:
  Capacity(Rational value) : value_(std::move(value)) {}
  Capacity(long long value) : value_(Rational(value)) {}
  static Capacity unbounded() { return Capacity(); }

  bool is_unbounded() const noexcept { return !value_.has_value(); }
  /// Throws std::bad_optional_access when unbounded.
  const Rational& value() const { return value_.value(); }

 private:
  Capacity() = default;
  std::optional<Rational> value_;
};

using BetaMap = std::map<std::size_t, Capacity>;

/// sum_{i<k} min(alpha, min_{d ∈ D} (d - i) beta_d) >= M. Throws MissingBeta if D is not covered.
bool feasible(const OppSystem& sys, const Rational& alpha, const BetaMap& betas);

/// Left-hand side of the feasibility inequality.
Rational feasibility_lhs(const OppSystem& sys, const Rational& alpha, const BetaMap& betas);

/// M (d_1 - k + 2) / (k (d_1 - k + 2) - 1); empty for k = 1, where every alpha is loss-free.
std::optional<Rational> alpha_o(std::size_t k, std::size_t d1, const Rational& message_size);

/// beta_{d_1} = beta*_{d_1}(alpha), beta_{d_i} = (d_1 - k + 1) / (d_i - k + 1) beta_{d_1}.
/// Throws InfeasibleAlpha for alpha < M / k.
std::map<std::size_t, Rational> beta_tilde(const OppSystem& sys, const Rational& alpha);

/// Smallest beta_{d_secondary} keeping every term of the feasibility sum at its
/// beta*_{d_1} value: max_{i<k} min(alpha, (d_1 - i) beta*_{d_1}(alpha)) / (d_secondary - i).
Rational beta_tilde_oracle(const OppSystem& sys, const Rational& alpha, std::size_t d_secondary);

/// The newcomer helper counts e_0..e_{k-1} with e_i minimizing (d - i) beta_d; ties go to the larger d.
std::vector<std::size_t> worst_case_sequence(const OppSystem& sys, const BetaMap& betas);

inline constexpr std::size_t kFlowGraphMaxNodes = 6;
inline constexpr std::size_t kFlowGraphMaxK = 3;
inline constexpr std::size_t kFlowGraphMaxHelperCounts = 2;

/// Min-cut between the source and a collector attached to k successive newcomers.
/// Newcomer n + i replaces the oldest live node and downloads beta_{e_i} from each
/// of the e_i most recent nodes. Exact max-flow after clearing denominators.
/// Throws InstanceTooLarge beyond n <= 6, k <= 3, |D| <= 2.
Rational flowgraph_mincut(const OppSystem& sys, const Rational& alpha, const BetaMap& betas,
                          std::span<const std::size_t> failure_sequence);

/// Every length-k sequence over D, in lexicographic order of positions in D.
std::vector<std::vector<std::size_t>> all_failure_sequences(const OppSystem& sys);

/// Columns alpha, beta_d1_star, beta_d2_star, beta_d2_tilde. Needs |D| >= 2.
void write_loss_curve_csv(std::ostream& out, const OppSystem& sys, std::span<const Rational> alphas,
                          std::optional<int> digits = std::nullopt);

}  // namespace hierstore
