#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "hierstore/params.hpp"
#include "hierstore/rational.hpp"

namespace hierstore {

/// Storage per disk (alpha) and total cross-cluster repair download (gamma).
/// Throughout this module gamma = d_b * beta, with beta the per-helper-cluster download.
struct TradeoffPoint {
  Rational alpha;
  Rational gamma;

  friend bool operator==(const TradeoffPoint&, const TradeoffPoint&) = default;
};

struct Fgh {
  Rational f;
  Rational g;
  Rational h;
};

/// f(i), g(i), h(i) of the clustered threshold function, 0 <= i <= k.
Fgh fgh(const HierParams& params, const Rational& message_size, std::size_t i);

/// The regime boundaries gamma_0 > gamma_1 > ... > gamma_{k-1}, where
/// gamma_i = 1 / (1/f(i) + k (n_l - d_l - 1) h(i) / M).
std::vector<Rational> gamma_breakpoints(const HierParams& params, const Rational& message_size);

struct ThresholdValue {
  Rational alpha;
  /// 0 for gamma >= gamma_0, i for gamma in [gamma_i, gamma_{i-1}), k below gamma_{k-1}.
  std::size_t regime;
};

/// Minimum storage per disk for functional repair with total repair download gamma.
/// Throws InfeasibleGamma for gamma < gamma_{k-1} when n_l - d_l = 1.
ThresholdValue alpha_star(const HierParams& params, const Rational& message_size, const Rational& gamma);

/// Source-to-collector cut: (n_l - d_l - 1) k alpha + sum_{i<k} min((d_b - i) beta, alpha).
Rational mincut(const HierParams& params, const Rational& alpha, const Rational& beta);

/// Smallest alpha with mincut(alpha, gamma / d_b) >= M, found by walking the
/// piecewise-linear cut over its breakpoints. Throws Infeasible if no alpha works.
Rational alpha_star_oracle(const HierParams& params, const Rational& message_size, const Rational& gamma);

struct ExtremalPoints {
  TradeoffPoint msr;
  /// Present only when n_l - d_l > 1.
  std::optional<TradeoffPoint> mbr;
  TradeoffPoint ambr;
  /// Per-cluster download of the asymptotic exact-repair MSR code, lower-order terms dropped.
  Rational msr_exact_beta;
};

ExtremalPoints extremal_points(const HierParams& params, const Rational& message_size);

/// Minimal beta_d with sum_{i<k} min(alpha, (d - i) beta_d) >= M for a flat (n, k, d)
/// system. Throws InfeasibleAlpha for alpha < M / k.
Rational dimakis_beta_star(std::size_t n, std::size_t k, std::size_t d, const Rational& message_size,
                           const Rational& alpha);

struct ChaoParams {
  Rational alpha;
  Rational message_size;
  BigInt t_c;
};

/// Parameters of the block-design code placed on the systematic disks of every
/// cluster. Valid for n_b - d_b + 1 <= r <= n_b - d_b + d_b / (d_b - k + 1).
ChaoParams chao_params(const HierParams& params, std::size_t r, const Rational& beta);

/// CSV with header "gamma,alpha_star,regime_index", rationals as "p/q".
/// Throws InfeasibleGamma on the first infeasible grid point.
void write_tradeoff_csv(std::ostream& out, const HierParams& params, const Rational& message_size,
                        std::span<const Rational> gammas, std::optional<int> digits = std::nullopt);

}  // namespace hierstore
