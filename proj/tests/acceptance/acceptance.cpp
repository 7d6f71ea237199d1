// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fail.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hierstore/combinations.hpp"
#include "hierstore/errors.hpp"
#include "hierstore/mbr_exact.hpp"
#include "hierstore/mttdl.hpp"
#include "hierstore/opportunistic.hpp"
#include "hierstore/pm_code.hpp"
#include "hierstore/repair_sim.hpp"
#include "hierstore/tradeoff.hpp"

using namespace hierstore;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << why;
    else if (detail.str().size() < 2000) detail << "; " << why;
    pass = false;
  }
};

Rational r(long long p, long long q = 1) { return Rational(p, q); }
Rational q(std::size_t v) { return Rational(static_cast<unsigned long long>(v)); }

const HierParams kExample{5, 3, 2, 3, 1};

// The 10 x 7 matrix printed for the GF(11) example.
const std::vector<std::vector<std::int64_t>> kPrintedPsi{
    {1, 1, 1, 1, 1, 1, 1},  {1, 2, 4, 8, 5, 10, 9}, {1, 3, 9, 5, 4, 1, 3},  {1, 4, 5, 9, 3, 1, 4},
    {1, 5, 3, 4, 9, 1, 5},  {1, 6, 3, 7, 9, 10, 5}, {1, 7, 5, 2, 3, 10, 4}, {1, 8, 9, 6, 4, 10, 3},
    {1, 9, 4, 3, 5, 1, 9},  {1, 10, 1, 10, 1, 10, 1}};

std::vector<Element> random_message(const PmCode& code, std::mt19937_64& rng) {
  std::uniform_int_distribution<Element> d(0, code.field().modulus() - 1);
  std::vector<Element> m(code.message_size());
  for (auto& x : m) x = d(rng);
  return m;
}

struct RepairEvent {
  std::size_t cluster;
  std::set<std::size_t> failed;
  std::set<std::size_t> helpers;
};

std::vector<RepairEvent> all_repair_events(const HierParams& p) {
  std::vector<RepairEvent> out;
  for (std::size_t c = 0; c < p.n_b; ++c) {
    for_each_combination(p.n_l, p.d_l + 1, [&](const std::vector<std::size_t>& f) {
      for_each_combination(p.n_b - 1, p.d_b, [&](const std::vector<std::size_t>& h) {
        RepairEvent e{c, {f.begin(), f.end()}, {}};
        for (std::size_t x : h) e.helpers.insert(x >= c ? x + 1 : x);
        out.push_back(std::move(e));
        return true;
      });
      return true;
    });
  }
  return out;
}

ClusterState with_failures(ClusterState s, std::size_t cluster, const std::set<std::size_t>& disks) {
  for (std::size_t d : disks) s.fail(cluster, d);
  return s;
}

Outcome criterion1() {
  Outcome o;
  const PmCode code = reference_f11_code();
  const FieldMatrix printed = FieldMatrix::from_rows(code.field(), kPrintedPsi);
  std::vector<Element> pts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const FieldMatrix generated = vandermonde(PrimeField(11), pts, 7);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      if (generated(i, j) != printed(i, j)) o.fail("psi(" + std::to_string(i) + "," + std::to_string(j) + ") differs");
  if (!(code.psi() == printed)) o.fail("reference code psi differs from the printed matrix");
  const ValidationReport rep = validate_conditions(code, Exhaustive{});
  if (!rep.ok()) o.fail("validation reported violations");
  if (rep.condition1_checked != 210) o.fail("condition 1 checks = " + std::to_string(rep.condition1_checked));
  if (rep.condition2_checked != 60) o.fail("condition 2 checks = " + std::to_string(rep.condition2_checked));
  o.detail << (o.pass ? "" : " | ") << "psi 10x7 matches; checks " << rep.condition1_checked << "+"
           << rep.condition2_checked << ", violations "
           << rep.condition1_violations.size() + rep.condition2_violations.size();
  return o;
}

Outcome criterion2() {
  Outcome o;
  const PmCode code = reference_f11_code();
  const auto events = all_repair_events(kExample);
  std::mt19937_64 rng(2024);
  std::size_t repairs = 0;
  std::size_t reconstructs = 0;
  for (int m = 0; m < 1000; ++m) {
    const auto msg = random_message(code, rng);
    const ClusterState s = encode_clusters(code, msg);
    const RepairEvent& e = events[static_cast<std::size_t>(m) % events.size()];
    const RepairReport rep = repair_cluster(with_failures(s, e.cluster, e.failed), code, e.cluster, e.failed, e.helpers);
    ++repairs;
    if (!(rep.state == s)) o.fail("repair mismatch at message " + std::to_string(m));
    for_each_combination(kExample.n_b, kExample.k, [&](const std::vector<std::size_t>& cs) {
      ++reconstructs;
      if (reconstruct(rep.state, code, {cs.begin(), cs.end()}) != msg) o.fail("reconstruct mismatch");
      return true;
    });
  }
  o.detail << (o.pass ? "" : " | ") << "1000 messages, " << repairs << " repairs over " << events.size()
           << " distinct events, " << reconstructs << " reconstructions";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const PmCode code = reference_f11_code();
  std::mt19937_64 rng(3);
  const ClusterState s = encode_clusters(code, random_message(code, rng));
  std::size_t events = 0;
  for (const RepairEvent& e : all_repair_events(kExample)) {
    const RepairReport rep = repair_cluster(with_failures(s, e.cluster, e.failed), code, e.cluster, e.failed, e.helpers);
    ++events;
    if (rep.cross_cluster_symbols != 6) o.fail("gamma = " + std::to_string(rep.cross_cluster_symbols));
    for (const auto& [h, count] : rep.helper_symbols)
      if (count != 2) o.fail("helper " + std::to_string(h) + " sent " + std::to_string(count));
  }
  if (code.symbols_per_disk() != 7) o.fail("alpha = " + std::to_string(code.symbols_per_disk()));
  if (code.message_size() != 22) o.fail("M = " + std::to_string(code.message_size()));
  const TradeoffPoint pt = ambr_point(kExample, r(22));
  if (!(pt == TradeoffPoint{r(7), r(6)})) o.fail("ambr_point = (" + to_string(pt.alpha) + ", " + to_string(pt.gamma) + ")");
  o.detail << (o.pass ? "" : " | ") << events << " events, gamma 6, alpha 7, M 22, ambr_point (" << pt.alpha << ", "
           << pt.gamma << ")";
  return o;
}

HierParams random_params(std::mt19937_64& rng) {
  while (true) {
    HierParams p;
    p.n_b = 2 + rng() % 11;
    p.d_b = 1 + rng() % (p.n_b - 1);
    p.k = 1 + rng() % p.d_b;
    p.n_l = 1 + rng() % 6;
    p.d_l = rng() % p.n_l;
    try {
      p.validate();
      return p;
    } catch (const InvalidParams&) {
    }
  }
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(44);
  std::size_t points = 0;
  for (int set = 0; set < 20; ++set) {
    const HierParams p = random_params(rng);
    const Rational m = r(1 + static_cast<long long>(rng() % 100));
    const auto bp = gamma_breakpoints(p, m);
    const Rational lo = p.local_dim() > 1 ? Rational(0) : bp.back();
    const Rational hi = 2 * bp.front();
    for (int g = 0; g < 200; ++g) {
      const Rational gamma = lo + (hi - lo) * r(g, 199);
      ++points;
      if (alpha_star(p, m, gamma).alpha != alpha_star_oracle(p, m, gamma))
        o.fail(p.describe() + " gamma=" + to_string(gamma));
    }
    const Rational k = q(p.k), a = q(p.local_dim()), db = q(p.d_b);
    if (bp[0] != m * db / (k * (db - k + 1) * a) || alpha_star(p, m, bp[0]).alpha != m / (k * a))
      o.fail("breakpoint 0 is not the MSR pair for " + p.describe());
    // Left limit of each lower branch must meet the value at the breakpoint.
    for (std::size_t i = 0; i < bp.size(); ++i) {
      const std::size_t below = i + 1;
      if (below == p.k && p.local_dim() == 1) continue;
      const Fgh v = fgh(p, m, below);
      const Rational denom = below < p.k ? q(p.k * p.local_dim()) - q(below) : q(p.k * (p.local_dim() - 1));
      if (alpha_star(p, m, bp[i]).alpha != (m - v.g * bp[i]) / denom)
        o.fail("discontinuity at breakpoint " + std::to_string(i) + " for " + p.describe());
    }
  }
  o.detail << (o.pass ? "" : " | ") << "20 parameter sets, " << points << " grid points exact";
  return o;
}

Outcome criterion5() {
  Outcome o;
  const HierParams p{4, 4, 2, 2, 1};
  const MbrCode code = make_mbr_code(p, PrimeField(11));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Element> sym(0, 10);
  std::size_t repairs = 0;
  std::size_t reconstructs = 0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Element> msg(code.pieces() * 2);
    for (auto& x : msg) x = sym(rng);
    const ClusterState s = mbr_encode(code, msg);
    for (std::size_t c = 0; c < p.n_b; ++c) {
      for (std::size_t count = 1; count <= p.d_l + 1; ++count) {
        for_each_combination(p.n_l, count, [&](const std::vector<std::size_t>& f) {
          const std::set<std::size_t> failed(f.begin(), f.end());
          const ClusterState broken = with_failures(s, c, failed);
          const MbrRepairReport rep = mbr_repair(broken, code, c, failed);
          ++repairs;
          if (rep.cross_cluster_symbols != 0) o.fail("gamma = " + std::to_string(rep.cross_cluster_symbols));
          if (!(rep.state == s)) o.fail("repair mismatch");
          for_each_combination(p.n_b, p.k, [&](const std::vector<std::size_t>& cs) {
            ++reconstructs;
            if (mbr_reconstruct(broken, code, {cs.begin(), cs.end()}) != msg) o.fail("reconstruct mismatch");
            return true;
          });
          return true;
        });
      }
    }
  }
  o.detail << (o.pass ? "" : " | ") << repairs << " repairs with gamma 0, " << reconstructs << " reconstructions";
  return o;
}

Outcome criterion6() {
  Outcome o;
  const OppSystem s = OppSystem::make(10, 5, r(1), {9, 7});
  const auto ao = alpha_o(5, 9, r(1));
  if (!ao) {
    o.fail("alpha_o unbounded");
    return o;
  }
  std::size_t below = 0, above = 0;
  std::vector<Rational> alphas{*ao};
  for (int i = 0; i <= 400; ++i) alphas.push_back(r(1, 5) + r(i, 2000));
  for (const Rational& a : alphas) {
    const auto bt = beta_tilde(s, a);
    const Rational b7 = dimakis_beta_star(10, 5, 7, r(1), a);
    const Rational b9 = dimakis_beta_star(10, 5, 9, r(1), a);
    if (bt.at(9) != b9) o.fail("beta_9 differs at alpha=" + to_string(a));
    if (a <= *ao) {
      ++below;
      if (bt.at(7) != b7) o.fail("loss below threshold at alpha=" + to_string(a));
    } else {
      ++above;
      if (!(bt.at(7) > b7)) o.fail("no loss above threshold at alpha=" + to_string(a));
    }
  }
  std::size_t systems = 0;
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t width = n - k;
      for (std::uint32_t mask = 1; mask < (1u << width); ++mask) {
        std::vector<std::size_t> d;
        for (std::size_t b = 0; b < width; ++b)
          if (mask & (1u << b)) d.push_back(k + b);
        const OppSystem sys = OppSystem::make(n, k, r(1), d);
        BetaMap betas;
        for (std::size_t x : d) betas.insert_or_assign(x, Capacity(r(1) / (q(k) * q(x - k + 1))));
        ++systems;
        if (!feasible(sys, r(1) / q(k), betas)) o.fail("MSR simultaneity fails for n=" + std::to_string(n));
      }
    }
  }
  o.detail << (o.pass ? "" : " | ") << "alpha_o(5,9,1) = " << *ao << "; " << below << " alphas lossless, " << above
           << " lossy; MSR simultaneity over " << systems << " helper sets";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const std::vector<Rational> alphas{r(1, 4), r(1, 2), r(1), r(3, 2), r(2)};
  const std::vector<Rational> betas{r(1, 8), r(1, 4), r(1, 2), r(1), r(2)};
  std::size_t instances = 0, flows = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    for (std::size_t k = 1; k <= 3 && k < n; ++k) {
      std::vector<std::vector<std::size_t>> sets;
      for (std::size_t a = k; a < n; ++a) {
        sets.push_back({a});
        for (std::size_t b = k; b < a; ++b) sets.push_back({a, b});
      }
      for (const auto& d : sets) {
        const OppSystem sys = OppSystem::make(n, k, r(1), d);
        const auto sequences = all_failure_sequences(sys);
        for (const Rational& a : alphas) {
          for (const Rational& b : betas) {
            // Secondary helper count downloads twice as much per helper.
            BetaMap bm;
            for (std::size_t j = 0; j < d.size(); ++j) bm.insert_or_assign(d[j], Capacity(b * q(j + 1)));
            const Rational rhs = feasibility_lhs(sys, a, bm);
            const auto worst = worst_case_sequence(sys, bm);
            ++instances;
            if (flowgraph_mincut(sys, a, bm, worst) != rhs) o.fail("worst-case cut differs from the bound");
            for (const auto& seq : sequences) {
              ++flows;
              if (flowgraph_mincut(sys, a, bm, seq) < rhs) o.fail("a failure sequence cuts below the bound");
            }
          }
        }
      }
    }
  }
  o.detail << (o.pass ? "" : " | ") << instances << " instances, " << flows << " max-flows";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const std::vector<Rational> mus{r(1), r(10), r(100)};
  const auto rows = mttdl_sweep(14, r(1), mus);
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // family -> (mismatches, total)
  std::map<std::string, std::string> first;
  for (const auto& c : rows) {
    const std::string family = to_string(c.spec.model) + (c.spec.opportunistic ? "/opportunistic" : "/original");
    auto& t = tally[family];
    ++t.second;
    if (!c.match()) {
      ++t.first;
      if (!first.count(family)) {
        std::ostringstream s;
        s << "n=" << c.spec.n << " k=" << c.spec.k << " mu=" << c.spec.mu << " closed=" << c.closed
          << " chain=" << c.oracle;
        first[family] = s.str();
      }
    }
  }
  for (const auto& [family, t] : tally) {
    if (t.first > 0) o.fail(family + " closed form mismatches chain in " + std::to_string(t.first) + "/" +
                            std::to_string(t.second) + " cases (first: " + first[family] + ")");
  }
  const Rational two = mttdl_closed_form({2, 1, r(1), r(1), RepairModel::chen, false});
  if (two != r(2)) o.fail("n=2,k=1 value " + to_string(two));
  for (RepairModel model : {RepairModel::chen, RepairModel::angus}) {
    const Rational opp = mttdl_chain_oracle({14, 10, r(1), r(1000000), model, true});
    const Rational orig = mttdl_chain_oracle({14, 10, r(1), r(1000000), model, false});
    const double ratio = to_double(opp / orig);
    if (std::abs(ratio / 24 - 1) > 0.01) o.fail(to_string(model) + " ratio " + std::to_string(ratio));
  }
  const Rational chen_ratio = mttdl_closed_form({14, 10, r(1), r(1000000), RepairModel::chen, true}) /
                              mttdl_closed_form({14, 10, r(1), r(1000000), RepairModel::chen, false});
  if (std::abs(to_double(chen_ratio) / 24 - 1) > 0.01) o.fail("closed-form ratio " + to_string(chen_ratio));
  if (improvement_factor(51, 30) != factorial(21)) o.fail("improvement factor (51,30) is not 21!");
  std::ostringstream summary;
  for (const auto& [family, t] : tally) summary << family << " " << t.second - t.first << "/" << t.second << " exact, ";
  o.detail << (o.pass ? "" : " | ") << summary.str() << "ratio(14,10) " << to_double(chen_ratio) << ", factor(51,30) "
           << improvement_factor(51, 30);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto rates = datacenter_bandwidths(DatacenterGrid{});
  std::vector<std::size_t> live;
  for (std::size_t i = 1; i < 15; ++i) live.push_back(i);
  const auto best = choose_d(rates, 0, live, 10);
  const Rational fast = repair_time(best, r(100), 10);
  if (best.chosen_d != 14 || fast != r(2, 15)) o.fail("d=" + std::to_string(best.chosen_d) + " time " + to_string(fast));
  const auto stages = stage_analysis(rates, 10, r(100));
  if (stages.empty() || stages[0].baseline_time != r(10, 15)) o.fail("baseline time differs");
  const std::vector<Rational> factors{r(5), r(4), r(3), r(2), r(1)};
  Rational product = 1;
  std::ostringstream seen;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    seen << (i ? "," : "") << stages[i].improvement;
    if (i >= factors.size() || stages[i].improvement != factors[i]) o.fail("factor " + std::to_string(i + 1));
    product *= stages[i].improvement;
  }
  if (product != 120) o.fail("product " + to_string(product));
  o.detail << (o.pass ? "" : " | ") << "repair " << fast << " s vs " << (stages.empty() ? Rational(0) : stages[0].baseline_time)
           << " s; factors " << seen.str() << "; product " << product;
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::ostringstream means;
  std::optional<double> prev;
  for (std::size_t n = 6; n <= 14; ++n) {
    const SampleStats s = one_failure_ratio(RandomGaussian{}, n, 5, 10'000, 1);
    means << (n > 6 ? "," : "") << s.mean;
    if (s.mean > 1.0) o.fail("ratio above 1 at n=" + std::to_string(n));
    if (prev && s.mean > *prev) o.fail("ratio increases at n=" + std::to_string(n));
    prev = s.mean;
  }
  const auto prof = multi_failure_profile(RandomGaussian{}, 14, 5, 10'000, 2);
  std::ostringstream curve;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    curve << (i ? "," : "") << prof[i].mean;
    if (i > 0 && prof[i].mean < prof[i - 1].mean) o.fail("profile decreases at t=" + std::to_string(prof[i].failures));
  }
  if (prof.empty() || prof.back().failures != 9 || std::abs(prof.back().mean - 1.0) > 1e-12)
    o.fail("profile not normalized at t = n - k");
  o.detail.precision(4);
  o.detail << (o.pass ? "" : " | ") << "one-failure means " << means.str() << "; profile(n=14) " << curve.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"F11 example psi and validation", criterion1},
      {"product-matrix round trip", criterion2},
      {"AMBR repair accounting", criterion3},
      {"tradeoff threshold consistency", criterion4},
      {"MBR-exact round trip", criterion5},
      {"opportunistic no-loss threshold", criterion6},
      {"flow-graph min-cut", criterion7},
      {"MTTDL closed forms and factors", criterion8},
      {"datacenter repair scenario", criterion9},
      {"random-bandwidth trends", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", " << secs
              << " s): " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
