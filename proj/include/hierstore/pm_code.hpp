#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "hierstore/cluster_state.hpp"
#include "hierstore/finite_field.hpp"
#include "hierstore/params.hpp"
#include "hierstore/rational.hpp"
#include "hierstore/tradeoff.hpp"

namespace hierstore {

/// Exact-repair product-matrix code at the AMBR point of a clustered system.
///
/// The encoding matrix psi has n_b (n_l - d_l) rows and d' columns; rows
/// [i (n_l - d_l), (i + 1)(n_l - d_l)) form the block psi_i of cluster i. Its
/// first k' columns are Phi, the remaining d' - k' columns Delta. The combiner
/// B is n_l × (n_l - d_l) with an identity top block, so disk j of cluster i
/// stores B_j psi_i M, a d'-symbol row.
class PmCode {
 public:
  PmCode(HierParams params, FieldMatrix psi, FieldMatrix combiner);

  const HierParams& params() const noexcept { return params_; }
  const PrimeField& field() const noexcept { return psi_.field(); }
  const FieldMatrix& psi() const noexcept { return psi_; }
  const FieldMatrix& combiner() const noexcept { return combiner_; }

  FieldMatrix phi() const;
  FieldMatrix delta() const;
  /// psi_i, the (n_l - d_l) × d' block of cluster i.
  FieldMatrix cluster_block(std::size_t cluster) const;

  std::size_t message_size() const noexcept { return params_.pm_message_size(); }
  std::size_t symbols_per_disk() const noexcept { return params_.d_prime(); }

 private:
  HierParams params_;
  FieldMatrix psi_;
  FieldMatrix combiner_;
};

struct VandermondePsi {
  std::vector<Element> points;
};
struct ExplicitPsi {
  FieldMatrix psi;
};
struct RandomPsi {
  std::uint64_t seed = 0;
};
using PsiSource = std::variant<VandermondePsi, ExplicitPsi, RandomPsi>;

/// Redraw budget for RandomPsi before giving up with ConditionsUnsatisfiable.
inline constexpr int kRandomPsiAttempts = 32;

/// Builds and validates a code. Without an explicit combiner, B is the
/// systematic (n_l, n_l - d_l) MDS generator. Explicit and Vandermonde sources
/// that violate a condition raise ConditionsUnsatisfiable immediately.
PmCode build_pm_code(const HierParams& params, const PrimeField& field, const PsiSource& source,
                     std::optional<FieldMatrix> combiner = std::nullopt);

/// The GF(11) code with n_b=5, n_l=3, k=2, d_b=3, d_l=1, psi = Vandermonde(1..10, 7)
/// and B = [[1,0],[0,1],[1,1]].
PmCode reference_f11_code();

struct Exhaustive {};
struct Sampled {
  std::uint64_t count = 10'000;
  std::uint64_t seed = 0;
};
using ValidationMode = std::variant<Exhaustive, Sampled>;

inline constexpr std::uint64_t kExhaustiveSubsetBudget = 1'000'000;

struct Condition1Violation {
  std::vector<std::size_t> rows;
};
struct Condition2Violation {
  std::size_t cluster;
  std::vector<std::size_t> helpers;
  std::vector<std::size_t> local_disks;
};

struct ValidationReport {
  bool exhaustive = true;
  std::uint64_t condition1_checked = 0;
  std::uint64_t condition2_checked = 0;
  bool combiner_ok = true;
  std::vector<Condition1Violation> condition1_violations;
  std::vector<Condition2Violation> condition2_violations;

  bool ok() const noexcept {
    return combiner_ok && condition1_violations.empty() && condition2_violations.empty();
  }
};

/// Number of subsets an exhaustive validation visits for the two conditions.
std::uint64_t exhaustive_subset_count(const HierParams& params);

/// Condition 1: every k' rows of Phi are independent. Condition 2: for every
/// cluster i, every d_b other clusters and every (n_l - d_l - 1) local disks
/// k_m, the rows {B_{k_m} psi_i} ∪ {psi_j} form a nonsingular d' × d' matrix.
/// Exhaustive mode throws BudgetExceeded above kExhaustiveSubsetBudget subsets.
ValidationReport validate_conditions(const PmCode& code, const ValidationMode& mode);

/// M = [[S, T], [T^t, 0]] built from a message in canonical order: the upper
/// triangle of S row by row, then T row by row.
class MessageMatrix {
 public:
  static MessageMatrix from_symbols(const PrimeField& field, std::size_t k_prime, std::size_t d_prime,
                                    std::span<const Element> symbols);

  const FieldMatrix& s() const noexcept { return s_; }
  const FieldMatrix& t() const noexcept { return t_; }
  const FieldMatrix& m() const noexcept { return m_; }

 private:
  MessageMatrix(FieldMatrix s, FieldMatrix t, FieldMatrix m);
  FieldMatrix s_;
  FieldMatrix t_;
  FieldMatrix m_;
};

/// Inverse of MessageMatrix::from_symbols for (S, T).
std::vector<Element> message_symbols(const FieldMatrix& s, const FieldMatrix& t);

ClusterState encode_clusters(const PmCode& code, std::span<const Element> message);

struct RepairReport {
  ClusterState state;
  /// Failed systematic disk regenerated from the helper clusters.
  std::size_t target_disk;
  /// Symbols downloaded from each helper cluster.
  std::map<std::size_t, std::size_t> helper_symbols;
  /// Total cross-cluster download (gamma).
  std::size_t cross_cluster_symbols;
  /// Symbols read from surviving disks of the failed cluster.
  std::size_t local_symbols;
};

/// Exact repair of d_l + 1 failed disks of one cluster from d_b helper clusters.
/// Failed disks' contents are never read.
RepairReport repair_cluster(const ClusterState& state, const PmCode& code, std::size_t failed_cluster,
                            const std::set<std::size_t>& failed_disks, const std::set<std::size_t>& helper_clusters);

/// Recovers the message from k clusters; each contributes any n_l - d_l live disks.
std::vector<Element> reconstruct(const ClusterState& state, const PmCode& code,
                                 const std::set<std::size_t>& clusters);

/// (2 M d' / (2 k' d' - k'^2 + k'), 2 M d_b (n_l - d_l) / (2 k' d' - k'^2 + k')).
TradeoffPoint ambr_point(const HierParams& params, const Rational& message_size);

}  // namespace hierstore
