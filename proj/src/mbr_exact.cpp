#include "hierstore/mbr_exact.hpp"

#include <algorithm>
#include <string>

#include "hierstore/errors.hpp"

namespace hierstore {
namespace {

// Systematic positions of every cluster, decoding through the intra code if needed.
std::vector<std::vector<Element>> systematic_disks(const ClusterState& state, const MbrCode& code,
                                                   std::size_t cluster) {
  const std::size_t width = code.intra_code().k();
  const std::size_t alpha = state.symbols_per_disk();
  std::vector<std::vector<Element>> out(width);
  bool intact = true;
  for (std::size_t j = 0; j < width; ++j) {
    if (state.is_failed(cluster, j)) intact = false;
  }
  if (intact) {
    for (std::size_t j = 0; j < width; ++j) {
      auto d = state.disk(cluster, j);
      out[j].assign(d.begin(), d.end());
    }
    return out;
  }
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < code.params().n_l; ++j) {
    if (!state.is_failed(cluster, j)) live.push_back(j);
  }
  if (live.size() < width) {
    throw TooManyLocalFailures("cluster " + std::to_string(cluster) + " has only " + std::to_string(live.size()) +
                               " live disks");
  }
  live.resize(width);
  for (auto& v : out) v.resize(alpha);
  std::vector<KnownSymbol> known(width);
  for (std::size_t s = 0; s < alpha; ++s) {
    for (std::size_t m = 0; m < width; ++m) known[m] = {live[m], state.disk(cluster, live[m])[s]};
    const auto decoded = code.intra_code().decode_erasures(known);
    for (std::size_t j = 0; j < width; ++j) out[j][s] = decoded[j];
  }
  return out;
}

}  // namespace

MbrCode::MbrCode(HierParams params, MdsCode cross, MdsCode intra)
    : params_(params), cross_(std::move(cross)), intra_(std::move(intra)) {
  params_.validate();
  if (params_.local_dim() < 2) throw InvalidParams("the zero-bandwidth code needs n_l - d_l > 1");
  if (cross_.n() != params_.n_b || cross_.k() != params_.k) throw ShapeMismatch("cross code must be (n_b, k)");
  if (intra_.n() != params_.n_l || intra_.k() != params_.local_dim() - 1) {
    throw ShapeMismatch("intra code must be (n_l, n_l - d_l - 1)");
  }
  if (!(cross_.field() == intra_.field())) throw ShapeMismatch("component codes are over different fields");
}

MbrCode make_mbr_code(const HierParams& params, const PrimeField& field) {
  params.validate();
  if (params.local_dim() < 2) throw InvalidParams("the zero-bandwidth code needs n_l - d_l > 1");
  return MbrCode(params, make_systematic_mds(field, params.n_b, params.k),
                 make_systematic_mds(field, params.n_l, params.local_dim() - 1));
}

ClusterState mbr_encode(const MbrCode& code, std::span<const Element> message) {
  const HierParams& p = code.params();
  const std::size_t width = p.local_dim() - 1;
  const std::size_t pieces = code.pieces();
  if (message.empty() || message.size() % pieces != 0) {
    throw ShapeMismatch("message length " + std::to_string(message.size()) + " is not a positive multiple of " +
                        std::to_string(pieces));
  }
  const std::size_t alpha = message.size() / pieces;
  const PrimeField& f = code.field();
  ClusterState state(p.n_b, p.n_l, alpha);

  // systematic[c][j][s]: disk j of cluster c, symbol s, before the intra code.
  std::vector<std::vector<std::vector<Element>>> systematic(
      p.n_b, std::vector<std::vector<Element>>(width, std::vector<Element>(alpha)));
  std::vector<Element> column(p.k);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t s = 0; s < alpha; ++s) {
      for (std::size_t c = 0; c < p.k; ++c) column[c] = f.reduce_unsigned(message[(c * width + j) * alpha + s]);
      const auto coded = code.cross_code().encode(column);
      for (std::size_t c = 0; c < p.n_b; ++c) systematic[c][j][s] = coded[c];
    }
  }
  std::vector<Element> local(width);
  std::vector<std::vector<Element>> disks(p.n_l, std::vector<Element>(alpha));
  for (std::size_t c = 0; c < p.n_b; ++c) {
    for (std::size_t s = 0; s < alpha; ++s) {
      for (std::size_t j = 0; j < width; ++j) local[j] = systematic[c][j][s];
      const auto coded = code.intra_code().encode(local);
      for (std::size_t d = 0; d < p.n_l; ++d) disks[d][s] = coded[d];
    }
    for (std::size_t d = 0; d < p.n_l; ++d) state.set_disk(c, d, disks[d]);
  }
  return state;
}

MbrRepairReport mbr_repair(const ClusterState& state, const MbrCode& code, std::size_t cluster,
                           const std::set<std::size_t>& failed_disks) {
  const HierParams& p = code.params();
  if (cluster >= p.n_b) throw InvalidRepairRequest("cluster out of range");
  if (failed_disks.size() > p.d_l + 1) {
    throw TooManyLocalFailures(std::to_string(failed_disks.size()) + " failures exceed d_l + 1 = " +
                               std::to_string(p.d_l + 1));
  }
  if (!failed_disks.empty() && *failed_disks.rbegin() >= p.n_l) {
    throw InvalidRepairRequest("failed disk index out of range");
  }
  for (std::size_t c = 0; c < p.n_b; ++c) {
    for (std::size_t d = 0; d < p.n_l; ++d) {
      if (!state.is_failed(c, d)) continue;
      if (c != cluster || !failed_disks.count(d)) {
        throw TooManyLocalFailures("disk (" + std::to_string(c) + ", " + std::to_string(d) +
                                   ") is failed outside the repair set");
      }
    }
  }
  MbrRepairReport report{state, 0, 0};
  if (failed_disks.empty()) return report;

  ClusterState erased = state;
  for (std::size_t d : failed_disks) erased.fail(cluster, d);
  const auto systematic = systematic_disks(erased, code, cluster);
  const std::size_t width = systematic.size();
  const std::size_t alpha = state.symbols_per_disk();
  report.local_symbols = width * alpha;
  std::vector<Element> local(width);
  std::vector<std::vector<Element>> rebuilt(p.n_l, std::vector<Element>(alpha));
  for (std::size_t s = 0; s < alpha; ++s) {
    for (std::size_t j = 0; j < width; ++j) local[j] = systematic[j][s];
    const auto coded = code.intra_code().encode(local);
    for (std::size_t d : failed_disks) rebuilt[d][s] = coded[d];
  }
  for (std::size_t d : failed_disks) report.state.set_disk(cluster, d, rebuilt[d]);
  return report;
}

std::vector<Element> mbr_reconstruct(const ClusterState& state, const MbrCode& code,
                                     const std::set<std::size_t>& clusters) {
  const HierParams& p = code.params();
  if (clusters.size() < p.k) {
    throw TooFewClusters("reconstruction needs k = " + std::to_string(p.k) + " clusters, got " +
                         std::to_string(clusters.size()));
  }
  std::vector<std::size_t> chosen(clusters.begin(), clusters.end());
  chosen.resize(p.k);
  const std::size_t width = p.local_dim() - 1;
  const std::size_t alpha = state.symbols_per_disk();
  std::vector<std::vector<std::vector<Element>>> systematic;
  for (std::size_t c : chosen) {
    if (c >= p.n_b) throw ShapeMismatch("cluster " + std::to_string(c) + " out of range");
    systematic.push_back(systematic_disks(state, code, c));
  }
  std::vector<Element> message(code.pieces() * alpha);
  std::vector<KnownSymbol> known(p.k);
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t s = 0; s < alpha; ++s) {
      for (std::size_t m = 0; m < p.k; ++m) known[m] = {chosen[m], systematic[m][j][s]};
      const auto decoded = code.cross_code().decode_erasures(known);
      for (std::size_t c = 0; c < p.k; ++c) message[(c * width + j) * alpha + s] = decoded[c];
    }
  }
  return message;
}

}  // namespace hierstore
