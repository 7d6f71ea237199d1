#include "hierstore/codec_json.hpp"

#include <string>
#include <vector>

#include "hierstore/errors.hpp"

namespace hierstore {
namespace {

using nlohmann::json;

std::vector<Element> matrix_entries(const json& value, std::size_t rows, std::size_t cols, const char* name) {
  std::vector<Element> out;
  if (!value.is_array()) throw FormatError(std::string(name) + " must be an array");
  for (const auto& item : value) {
    if (item.is_array()) {
      if (item.size() != cols) throw FormatError(std::string(name) + " rows must have " + std::to_string(cols) + " entries");
      for (const auto& x : item) out.push_back(x.get<Element>());
    } else {
      out.push_back(item.get<Element>());
    }
  }
  if (out.size() != rows * cols) {
    throw FormatError(std::string(name) + " must hold " + std::to_string(rows) + "×" + std::to_string(cols) +
                      " entries, got " + std::to_string(out.size()));
  }
  return out;
}

template <class F>
auto guarded(F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed document: ") + e.what());
  } catch (const InvalidParams& e) {
    throw FormatError(e.what());
  } catch (const NotPrime& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

json params_to_json(const HierParams& p) {
  return {{"n_b", p.n_b}, {"n_l", p.n_l}, {"k", p.k}, {"d_b", p.d_b}, {"d_l", p.d_l}};
}

HierParams params_from_json(const json& doc) {
  return guarded([&] {
    HierParams p{doc.at("n_b").get<std::size_t>(), doc.at("n_l").get<std::size_t>(), doc.at("k").get<std::size_t>(),
                 doc.at("d_b").get<std::size_t>(), doc.at("d_l").get<std::size_t>()};
    p.validate();
    return p;
  });
}

json state_to_json(const ClusterState& state) {
  json disks = json::array();
  json failed = json::array();
  for (std::size_t c = 0; c < state.clusters(); ++c) {
    for (std::size_t d = 0; d < state.disks_per_cluster(); ++d) {
      auto contents = state.disk(c, d);
      disks.push_back(std::vector<Element>(contents.begin(), contents.end()));
      if (state.is_failed(c, d)) failed.push_back({c, d});
    }
  }
  return {{"disks", disks}, {"failed", failed}};
}

ClusterState state_from_json(const json& doc, const HierParams& params) {
  return guarded([&] {
    const json& disks = doc.at("disks");
    if (!disks.is_array() || disks.size() != params.n_b * params.n_l) {
      throw FormatError("disks must list n_b × n_l = " + std::to_string(params.n_b * params.n_l) + " disks");
    }
    const std::size_t width = disks.empty() ? 0 : disks.front().size();
    ClusterState state(params.n_b, params.n_l, width);
    for (std::size_t i = 0; i < disks.size(); ++i) {
      const auto contents = disks[i].get<std::vector<Element>>();
      if (contents.size() != width) throw FormatError("every disk must hold the same number of symbols");
      state.set_disk(i / params.n_l, i % params.n_l, contents);
    }
    if (doc.contains("failed")) {
      for (const auto& pair : doc.at("failed")) {
        const auto c = pair.at(0).get<std::size_t>();
        const auto d = pair.at(1).get<std::size_t>();
        if (c >= params.n_b || d >= params.n_l) throw FormatError("failed disk out of range");
        state.fail(c, d);
      }
    }
    return state;
  });
}

json pm_code_to_json(const PmCode& code, const ClusterState* state) {
  json doc = {{"field_q", code.field().modulus()},
              {"params", params_to_json(code.params())},
              {"psi", code.psi().entries()},
              {"b", code.combiner().entries()}};
  if (state) {
    json s = state_to_json(*state);
    doc["disks"] = s["disks"];
    doc["failed"] = s["failed"];
  }
  return doc;
}

PmDocument pm_code_from_json(const json& doc) {
  return guarded([&] {
    const PrimeField field(doc.at("field_q").get<std::uint64_t>());
    const HierParams p = params_from_json(doc.at("params"));
    const std::size_t a = p.local_dim();
    FieldMatrix psi(field, p.n_b * a, p.d_prime(), matrix_entries(doc.at("psi"), p.n_b * a, p.d_prime(), "psi"));
    FieldMatrix b(field, p.n_l, a, matrix_entries(doc.at("b"), p.n_l, a, "b"));
    PmDocument out{PmCode(p, std::move(psi), std::move(b)), std::nullopt};
    if (doc.contains("disks")) {
      out.state = state_from_json(doc, p);
      if (out.state->symbols_per_disk() != p.d_prime()) throw FormatError("disks must hold d' symbols each");
    }
    return out;
  });
}

json mbr_state_to_json(const MbrCode& code, const ClusterState& state) {
  json doc = {{"field_q", code.field().modulus()}, {"params", params_to_json(code.params())}, {"scheme", "mbr"}};
  json s = state_to_json(state);
  doc["disks"] = s["disks"];
  doc["failed"] = s["failed"];
  return doc;
}

MbrDocument mbr_state_from_json(const json& doc) {
  return guarded([&] {
    const PrimeField field(doc.at("field_q").get<std::uint64_t>());
    const HierParams p = params_from_json(doc.at("params"));
    return MbrDocument{make_mbr_code(p, field), state_from_json(doc, p)};
  });
}

}  // namespace hierstore
