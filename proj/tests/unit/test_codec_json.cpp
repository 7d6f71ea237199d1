#include "doctest.h"

#include "hierstore/codec_json.hpp"
#include "hierstore/errors.hpp"

using namespace hierstore;
using nlohmann::json;

TEST_CASE("product-matrix code and state round trip") {
  const PmCode code = reference_f11_code();
  std::vector<Element> msg(22);
  for (std::size_t i = 0; i < 22; ++i) msg[i] = (i * 7 + 3) % 11;
  ClusterState s = encode_clusters(code, msg);
  s.fail(2, 1);
  const json doc = pm_code_to_json(code, &s);
  CHECK(doc.at("field_q") == 11);
  CHECK(doc.at("psi").size() == 70);
  CHECK(doc.at("b") == json::array({1, 0, 0, 1, 1, 1}));
  CHECK(doc.at("disks").size() == 15);
  CHECK(doc.at("failed") == json::array({json::array({2, 1})}));

  const PmDocument back = pm_code_from_json(json::parse(doc.dump()));
  CHECK(back.code.psi() == code.psi());
  CHECK(back.code.combiner() == code.combiner());
  CHECK(back.code.params() == code.params());
  REQUIRE(back.state);
  CHECK(*back.state == s);

  const PmDocument bare = pm_code_from_json(pm_code_to_json(code));
  CHECK_FALSE(bare.state.has_value());
}

TEST_CASE("nested matrices are accepted") {
  const PmCode code = reference_f11_code();
  json doc = pm_code_to_json(code);
  json rows = json::array();
  for (std::size_t r = 0; r < 10; ++r) rows.push_back(std::vector<Element>(code.psi().row(r).begin(), code.psi().row(r).end()));
  doc["psi"] = rows;
  doc["b"] = json::parse("[[1,0],[0,1],[1,1]]");
  CHECK(pm_code_from_json(doc).code.psi() == code.psi());
}

TEST_CASE("malformed documents") {
  const json good = pm_code_to_json(reference_f11_code());
  json missing = good;
  missing.erase("psi");
  CHECK_THROWS_AS(pm_code_from_json(missing), FormatError);
  json short_psi = good;
  short_psi["psi"].erase(0);
  CHECK_THROWS_AS(pm_code_from_json(short_psi), FormatError);
  json bad_q = good;
  bad_q["field_q"] = 12;
  CHECK_THROWS_AS(pm_code_from_json(bad_q), FormatError);
  json bad_params = good;
  bad_params["params"]["k"] = 9;
  CHECK_THROWS_AS(pm_code_from_json(bad_params), FormatError);
  json bad_disks = good;
  bad_disks["disks"] = json::array({json::array({1, 2})});
  CHECK_THROWS_AS(pm_code_from_json(bad_disks), FormatError);
}

TEST_CASE("zero-bandwidth state round trip") {
  const HierParams p{4, 4, 2, 2, 1};
  const MbrCode code = make_mbr_code(p, PrimeField(11));
  ClusterState s = mbr_encode(code, std::vector<Element>{1, 2, 3, 4, 5, 6, 7, 8});
  s.fail(3, 0);
  const json doc = mbr_state_to_json(code, s);
  CHECK(doc.at("scheme") == "mbr");
  const MbrDocument back = mbr_state_from_json(doc);
  CHECK(back.state == s);
  CHECK(back.code.params() == p);
}
