#include "hierstore/params.hpp"

#include <string>

#include "hierstore/errors.hpp"

namespace hierstore {

void HierParams::validate() const {
  auto fail = [this](const std::string& why) { throw InvalidParams(describe() + ": " + why); };
  if (k < 1) fail("k must be at least 1");
  if (k > d_b) fail("k must not exceed d_b");
  if (n_b < 2 || d_b > n_b - 1) fail("d_b must be at most n_b - 1");
  if (n_l < 1) fail("n_l must be at least 1");
  if (d_l > n_l - 1) fail("d_l must be at most n_l - 1");
  if (k_prime() > d_prime()) fail("k' must not exceed d'");
}

std::string HierParams::describe() const {
  return "(n_b=" + std::to_string(n_b) + ", n_l=" + std::to_string(n_l) + ", k=" + std::to_string(k) +
         ", d_b=" + std::to_string(d_b) + ", d_l=" + std::to_string(d_l) + ")";
}

}  // namespace hierstore
