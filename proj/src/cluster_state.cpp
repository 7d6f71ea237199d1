#include "hierstore/cluster_state.hpp"

#include <algorithm>
#include <string>

#include "hierstore/errors.hpp"

namespace hierstore {

ClusterState::ClusterState(std::size_t clusters, std::size_t disks_per_cluster, std::size_t symbols_per_disk)
    : clusters_(clusters),
      disks_per_cluster_(disks_per_cluster),
      symbols_per_disk_(symbols_per_disk),
      symbols_(clusters * disks_per_cluster * symbols_per_disk, 0),
      failed_(clusters * disks_per_cluster, false) {}

std::size_t ClusterState::offset(std::size_t cluster, std::size_t disk) const {
  if (cluster >= clusters_ || disk >= disks_per_cluster_) {
    throw ShapeMismatch("disk (" + std::to_string(cluster) + ", " + std::to_string(disk) + ") out of range");
  }
  return cluster * disks_per_cluster_ + disk;
}

std::span<const Element> ClusterState::disk(std::size_t cluster, std::size_t disk) const {
  return std::span<const Element>(symbols_).subspan(offset(cluster, disk) * symbols_per_disk_, symbols_per_disk_);
}

void ClusterState::set_disk(std::size_t cluster, std::size_t disk, std::span<const Element> contents) {
  const std::size_t o = offset(cluster, disk);
  if (contents.size() != symbols_per_disk_) {
    throw ShapeMismatch("disk contents must have " + std::to_string(symbols_per_disk_) + " symbols");
  }
  std::copy(contents.begin(), contents.end(), symbols_.begin() + static_cast<std::ptrdiff_t>(o * symbols_per_disk_));
  failed_[o] = false;
}

bool ClusterState::is_failed(std::size_t cluster, std::size_t disk) const { return failed_[offset(cluster, disk)]; }

void ClusterState::fail(std::size_t cluster, std::size_t disk) {
  const std::size_t o = offset(cluster, disk);
  failed_[o] = true;
  std::fill_n(symbols_.begin() + static_cast<std::ptrdiff_t>(o * symbols_per_disk_), symbols_per_disk_, Element{0});
}

bool ClusterState::cluster_has_failures(std::size_t cluster) const { return failed_count(cluster) > 0; }

std::size_t ClusterState::failed_count(std::size_t cluster) const {
  std::size_t count = 0;
  for (std::size_t d = 0; d < disks_per_cluster_; ++d) count += is_failed(cluster, d) ? 1 : 0;
  return count;
}

}  // namespace hierstore
