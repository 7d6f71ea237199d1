#pragma once

#include <optional>

#include "json.hpp"

#include "hierstore/cluster_state.hpp"
#include "hierstore/mbr_exact.hpp"
#include "hierstore/params.hpp"
#include "hierstore/pm_code.hpp"

namespace hierstore {

/// Documents look like {field_q, params: {n_b, n_l, k, d_b, d_l}, psi, b, disks, failed}.
/// psi and b are row-major integer lists (flat or nested on input); disks lists
/// every disk cluster by cluster; failed lists [cluster, disk] pairs.
nlohmann::json params_to_json(const HierParams& params);
HierParams params_from_json(const nlohmann::json& doc);

nlohmann::json state_to_json(const ClusterState& state);
/// Reads doc["disks"] (and doc["failed"] if present) into an n_b × n_l state.
ClusterState state_from_json(const nlohmann::json& doc, const HierParams& params);

nlohmann::json pm_code_to_json(const PmCode& code, const ClusterState* state = nullptr);

struct PmDocument {
  PmCode code;
  std::optional<ClusterState> state;
};

/// Checks shapes only; the repair and reconstruction conditions are left to
/// validate_conditions. Throws FormatError on malformed input.
PmDocument pm_code_from_json(const nlohmann::json& doc);

nlohmann::json mbr_state_to_json(const MbrCode& code, const ClusterState& state);

struct MbrDocument {
  MbrCode code;
  ClusterState state;
};

MbrDocument mbr_state_from_json(const nlohmann::json& doc);

}  // namespace hierstore
