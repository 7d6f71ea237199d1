#pragma once

#include <cstddef>
#include <string>

namespace hierstore {

/// Parameters of a clustered storage system: n_b clusters of n_l disks; any k
/// clusters reconstruct the data; d_l + 1 failures in one cluster are repaired
/// from d_b helper clusters.
struct HierParams {
  std::size_t n_b = 0;
  std::size_t n_l = 0;
  std::size_t k = 0;
  std::size_t d_b = 0;
  std::size_t d_l = 0;

  /// n_l - d_l: systematic disks per cluster, and the per-helper-cluster repair download.
  std::size_t local_dim() const noexcept { return n_l - d_l; }
  /// k' = k (n_l - d_l)
  std::size_t k_prime() const noexcept { return k * local_dim(); }
  /// d' = (d_b + 1)(n_l - d_l) - 1
  std::size_t d_prime() const noexcept { return (d_b + 1) * local_dim() - 1; }
  /// Product-matrix message size: C(k'+1, 2) + k'(d' - k').
  std::size_t pm_message_size() const noexcept {
    const std::size_t kp = k_prime();
    return kp * (kp + 1) / 2 + kp * (d_prime() - kp);
  }

  /// Throws InvalidParams unless 1 <= k <= d_b <= n_b - 1 and 0 <= d_l <= n_l - 1.
  void validate() const;
  std::string describe() const;

  friend bool operator==(const HierParams&, const HierParams&) = default;
};

}  // namespace hierstore
