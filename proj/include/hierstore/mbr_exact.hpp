#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "hierstore/cluster_state.hpp"
#include "hierstore/finite_field.hpp"
#include "hierstore/mds.hpp"
#include "hierstore/params.hpp"

namespace hierstore {

/// Exact-repair code at the zero-cross-bandwidth point. The message is cut into
/// k (n_l - d_l - 1) pieces stored on the first n_l - d_l - 1 disks of the first
/// k clusters; an (n_b, k) MDS code fills the same disk positions of the other
/// clusters, and an (n_l, n_l - d_l - 1) MDS code fills the rest of every cluster.
class MbrCode {
 public:
  MbrCode(HierParams params, MdsCode cross, MdsCode intra);

  const HierParams& params() const noexcept { return params_; }
  const PrimeField& field() const noexcept { return cross_.field(); }
  const MdsCode& cross_code() const noexcept { return cross_; }
  const MdsCode& intra_code() const noexcept { return intra_; }
  /// k (n_l - d_l - 1)
  std::size_t pieces() const noexcept { return params_.k * (params_.local_dim() - 1); }

 private:
  HierParams params_;
  MdsCode cross_;
  MdsCode intra_;
};

/// Requires n_l - d_l > 1 and q >= max(n_b, n_l).
MbrCode make_mbr_code(const HierParams& params, const PrimeField& field);

ClusterState mbr_encode(const MbrCode& code, std::span<const Element> message);

struct MbrRepairReport {
  ClusterState state;
  std::size_t cross_cluster_symbols = 0;
  std::size_t local_symbols = 0;
};

/// Restores up to d_l + 1 failed disks of one cluster from its own survivors.
/// Throws TooManyLocalFailures for more failures or failures in other clusters.
MbrRepairReport mbr_repair(const ClusterState& state, const MbrCode& code, std::size_t cluster,
                           const std::set<std::size_t>& failed_disks);

/// Throws TooFewClusters when fewer than k clusters are given.
std::vector<Element> mbr_reconstruct(const ClusterState& state, const MbrCode& code,
                                     const std::set<std::size_t>& clusters);

}  // namespace hierstore
