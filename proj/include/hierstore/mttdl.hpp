#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hierstore/rational.hpp"

namespace hierstore {

/// Chen: one repairman. Angus: one repairman per failed node.
enum class RepairModel { chen, angus };

std::string to_string(RepairModel model);
/// Accepts "chen" or "angus"; throws InvalidParams otherwise.
RepairModel parse_repair_model(const std::string& text);

/// Birth-death reliability model of an (n, k) system with per-node failure rate
/// lambda and base repair rate mu. Opportunistic repair speeds each repair up by
/// the number of surplus live helpers.
struct MarkovSpec {
  std::size_t n = 0;
  std::size_t k = 0;
  Rational lambda = 1;
  Rational mu = 1;
  RepairModel model = RepairModel::chen;
  bool opportunistic = false;

  /// Throws InvalidParams unless n > k >= 1, lambda > 0 and mu >= 0.
  void validate() const;
};

/// Transition rate from c failed nodes to c - 1, 1 <= c <= n - k.
Rational repair_rate(const MarkovSpec& spec, std::size_t failed);

/// Exact value of the printed double-sum expression for the spec's model.
Rational mttdl_closed_form(const MarkovSpec& spec);

/// Expected time from n live nodes until fewer than k remain, by solving the
/// first-passage equations of the birth-death chain exactly.
Rational mttdl_chain_oracle(const MarkovSpec& spec);

/// Leading term for lambda << mu.
Rational mttdl_asymptotic(const MarkovSpec& spec);

/// (n - k)!, the asymptotic gain of opportunistic repair under either model.
BigInt improvement_factor(std::size_t n, std::size_t k);

/// sum_{i=0}^{l} (b_1 ... b_{l-i})(c_{l-i+1} ... c_l) mu^{l-i} lambda^i: the
/// determinant of the l × l tridiagonal matrix with diagonal c_r lambda + b_r mu,
/// superdiagonal -b_{r+1} mu and subdiagonal -c_r lambda.
Rational tridiag_det(std::span<const Rational> b, std::span<const Rational> c, const Rational& lambda,
                     const Rational& mu);

struct MttdlComparison {
  MarkovSpec spec;
  Rational closed;
  Rational oracle;
  bool match() const { return closed == oracle; }
};

MttdlComparison compare_mttdl(const MarkovSpec& spec);

/// Every spec with 2 <= n <= n_max, 1 <= k < n, both models, both flags, for each mu.
std::vector<MttdlComparison> mttdl_sweep(std::size_t n_max, const Rational& lambda, std::span<const Rational> mus);

/// Columns n,k,lambda,mu,model,opportunistic,mttdl_closed,mttdl_oracle,match_flag.
void write_mttdl_csv(std::ostream& out, std::span<const MttdlComparison> rows, std::optional<int> digits = std::nullopt);

}  // namespace hierstore
