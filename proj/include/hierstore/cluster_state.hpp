#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hierstore/finite_field.hpp"

namespace hierstore {

/// Contents of every disk in a clustered system plus per-disk failure flags.
/// Disks are addressed (cluster, disk), both zero-based. A failed disk's
/// contents are cleared to zero.
class ClusterState {
 public:
  ClusterState(std::size_t clusters, std::size_t disks_per_cluster, std::size_t symbols_per_disk);

  std::size_t clusters() const noexcept { return clusters_; }
  std::size_t disks_per_cluster() const noexcept { return disks_per_cluster_; }
  std::size_t symbols_per_disk() const noexcept { return symbols_per_disk_; }

  std::span<const Element> disk(std::size_t cluster, std::size_t disk) const;
  void set_disk(std::size_t cluster, std::size_t disk, std::span<const Element> contents);

  bool is_failed(std::size_t cluster, std::size_t disk) const;
  void fail(std::size_t cluster, std::size_t disk);
  bool cluster_has_failures(std::size_t cluster) const;
  std::size_t failed_count(std::size_t cluster) const;

  /// Same shape, contents and failure flags.
  friend bool operator==(const ClusterState&, const ClusterState&) = default;

 private:
  std::size_t offset(std::size_t cluster, std::size_t disk) const;

  std::size_t clusters_;
  std::size_t disks_per_cluster_;
  std::size_t symbols_per_disk_;
  std::vector<Element> symbols_;
  std::vector<bool> failed_;
};

}  // namespace hierstore
