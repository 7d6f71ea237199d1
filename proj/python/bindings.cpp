#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <string>

#include "hierstore/errors.hpp"
#include "hierstore/mttdl.hpp"
#include "hierstore/opportunistic.hpp"
#include "hierstore/pm_code.hpp"
#include "hierstore/repair_sim.hpp"
#include "hierstore/tradeoff.hpp"

namespace py = pybind11;

namespace pybind11::detail {

// Rational <-> fractions.Fraction. Accepts int, Fraction or "p/q" strings.
template <>
struct type_caster<hierstore::Rational> {
  PYBIND11_TYPE_CASTER(hierstore::Rational, const_name("fractions.Fraction"));

  bool load(handle src, bool) {
    if (!src || PyFloat_Check(src.ptr())) return false;
    try {
      value = hierstore::parse_rational(py::str(src).cast<std::string>());
      return true;
    } catch (const std::invalid_argument&) {
      return false;
    }
  }

  static handle cast(const hierstore::Rational& v, return_value_policy, handle) {
    py::object fraction = py::module_::import("fractions").attr("Fraction");
    py::int_ num(py::str(boost::multiprecision::numerator(v).str()));
    py::int_ den(py::str(boost::multiprecision::denominator(v).str()));
    return fraction(num, den).release();
  }
};

}  // namespace pybind11::detail

namespace {

using namespace hierstore;

py::int_ to_py_int(const BigInt& v) { return py::int_(py::str(v.str())); }

py::dict point(const TradeoffPoint& p) {
  py::dict d;
  d["alpha"] = p.alpha;
  d["gamma"] = p.gamma;
  return d;
}

BetaMap to_betas(const std::map<std::size_t, std::optional<Rational>>& in) {
  BetaMap out;
  for (const auto& [d, b] : in) out.insert_or_assign(d, b ? Capacity(*b) : Capacity::unbounded());
  return out;
}

std::vector<std::vector<Element>> rows_of(const FieldMatrix& m) {
  std::vector<std::vector<Element>> out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_hierstore, m) {
  m.doc() = "Native core of the hierstore package";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "HierstoreError", PyExc_ValueError);
#define HIERSTORE_EXC(T) py::register_exception<T>(m, #T, base.ptr());
  HIERSTORE_EXC(NotPrime)
  HIERSTORE_EXC(Singular)
  HIERSTORE_EXC(ShapeMismatch)
  HIERSTORE_EXC(InvalidParams)
  HIERSTORE_EXC(ConditionsUnsatisfiable)
  HIERSTORE_EXC(BudgetExceeded)
  HIERSTORE_EXC(InvalidRepairRequest)
  HIERSTORE_EXC(TooFewClusters)
  HIERSTORE_EXC(TooFewSymbols)
  HIERSTORE_EXC(SingularPhiLeft)
  HIERSTORE_EXC(InfeasibleGamma)
  HIERSTORE_EXC(Infeasible)
  HIERSTORE_EXC(InfeasibleAlpha)
  HIERSTORE_EXC(ROutOfRange)
  HIERSTORE_EXC(MissingBeta)
  HIERSTORE_EXC(InstanceTooLarge)
  HIERSTORE_EXC(TooFewLiveNodes)
#undef HIERSTORE_EXC

  py::class_<HierParams>(m, "HierParams")
      .def(py::init([](std::size_t n_b, std::size_t n_l, std::size_t k, std::size_t d_b, std::size_t d_l) {
             HierParams p{n_b, n_l, k, d_b, d_l};
             p.validate();
             return p;
           }),
           py::arg("n_b"), py::arg("n_l"), py::arg("k"), py::arg("d_b"), py::arg("d_l"))
      .def_readonly("n_b", &HierParams::n_b)
      .def_readonly("n_l", &HierParams::n_l)
      .def_readonly("k", &HierParams::k)
      .def_readonly("d_b", &HierParams::d_b)
      .def_readonly("d_l", &HierParams::d_l)
      .def_property_readonly("k_prime", &HierParams::k_prime)
      .def_property_readonly("d_prime", &HierParams::d_prime)
      .def_property_readonly("pm_message_size", &HierParams::pm_message_size)
      .def("__eq__", [](const HierParams& a, const HierParams& b) { return a == b; })
      .def("__repr__", [](const HierParams& p) { return "HierParams" + p.describe(); });

  // tradeoff
  m.def("alpha_star", [](const HierParams& p, const Rational& msg, const Rational& gamma) {
    const ThresholdValue v = alpha_star(p, msg, gamma);
    return py::make_tuple(py::cast(v.alpha), v.regime);
  }, py::arg("params"), py::arg("M"), py::arg("gamma"), "Minimum storage per disk and its regime index.");
  m.def("alpha_star_oracle", &alpha_star_oracle, py::arg("params"), py::arg("M"), py::arg("gamma"));
  m.def("gamma_breakpoints", &gamma_breakpoints, py::arg("params"), py::arg("M"));
  m.def("mincut", &mincut, py::arg("params"), py::arg("alpha"), py::arg("beta"));
  m.def("extremal_points", [](const HierParams& p, const Rational& msg) {
    const ExtremalPoints ex = extremal_points(p, msg);
    py::dict d;
    d["msr"] = point(ex.msr);
    d["mbr"] = ex.mbr ? py::object(point(*ex.mbr)) : py::none();
    d["ambr"] = point(ex.ambr);
    d["msr_exact_beta"] = ex.msr_exact_beta;
    return d;
  }, py::arg("params"), py::arg("M"));
  m.def("dimakis_beta_star", &dimakis_beta_star, py::arg("n"), py::arg("k"), py::arg("d"), py::arg("M"),
        py::arg("alpha"));
  m.def("chao_params", [](const HierParams& p, std::size_t r, const Rational& beta) {
    const ChaoParams c = chao_params(p, r, beta);
    py::dict d;
    d["alpha"] = c.alpha;
    d["M"] = c.message_size;
    d["t_c"] = to_py_int(c.t_c);
    return d;
  }, py::arg("params"), py::arg("r"), py::arg("beta"));

  // opportunistic
  m.def("alpha_o", &alpha_o, py::arg("k"), py::arg("d1"), py::arg("M"), "None when k = 1 (no threshold).");
  m.def("beta_tilde", [](std::size_t n, std::size_t k, const Rational& msg, std::vector<std::size_t> d,
                         const Rational& alpha) { return beta_tilde(OppSystem::make(n, k, msg, std::move(d)), alpha); },
        py::arg("n"), py::arg("k"), py::arg("M"), py::arg("D"), py::arg("alpha"));
  m.def("feasible", [](std::size_t n, std::size_t k, const Rational& msg, std::vector<std::size_t> d,
                       const Rational& alpha, const std::map<std::size_t, std::optional<Rational>>& betas) {
    return feasible(OppSystem::make(n, k, msg, std::move(d)), alpha, to_betas(betas));
  }, py::arg("n"), py::arg("k"), py::arg("M"), py::arg("D"), py::arg("alpha"), py::arg("betas"),
        "betas maps each helper count to a per-helper download; None means unbounded.");
  m.def("flowgraph_mincut", [](std::size_t n, std::size_t k, const Rational& msg, std::vector<std::size_t> d,
                               const Rational& alpha, const std::map<std::size_t, std::optional<Rational>>& betas,
                               std::optional<std::vector<std::size_t>> sequence) {
    const OppSystem sys = OppSystem::make(n, k, msg, std::move(d));
    const BetaMap b = to_betas(betas);
    const auto seq = sequence ? *sequence : worst_case_sequence(sys, b);
    return flowgraph_mincut(sys, alpha, b, seq);
  }, py::arg("n"), py::arg("k"), py::arg("M"), py::arg("D"), py::arg("alpha"), py::arg("betas"),
        py::arg("sequence") = py::none());

  // mttdl
  auto spec = [](std::size_t n, std::size_t k, const Rational& lambda, const Rational& mu, const std::string& model,
                 bool opportunistic) { return MarkovSpec{n, k, lambda, mu, parse_repair_model(model), opportunistic}; };
  m.def("mttdl_closed_form", [spec](std::size_t n, std::size_t k, const Rational& lambda, const Rational& mu,
                                    const std::string& model, bool opp) {
    return mttdl_closed_form(spec(n, k, lambda, mu, model, opp));
  }, py::arg("n"), py::arg("k"), py::arg("lam"), py::arg("mu"), py::arg("model") = "chen",
        py::arg("opportunistic") = false);
  m.def("mttdl_chain_oracle", [spec](std::size_t n, std::size_t k, const Rational& lambda, const Rational& mu,
                                     const std::string& model, bool opp) {
    return mttdl_chain_oracle(spec(n, k, lambda, mu, model, opp));
  }, py::arg("n"), py::arg("k"), py::arg("lam"), py::arg("mu"), py::arg("model") = "chen",
        py::arg("opportunistic") = false);
  m.def("improvement_factor", [](std::size_t n, std::size_t k) { return to_py_int(improvement_factor(n, k)); },
        py::arg("n"), py::arg("k"));

  // product-matrix code
  py::class_<ClusterState>(m, "ClusterState")
      .def_property_readonly("clusters", &ClusterState::clusters)
      .def_property_readonly("disks_per_cluster", &ClusterState::disks_per_cluster)
      .def_property_readonly("symbols_per_disk", &ClusterState::symbols_per_disk)
      .def("disk", [](const ClusterState& s, std::size_t c, std::size_t d) {
        const auto v = s.disk(c, d);
        return std::vector<Element>(v.begin(), v.end());
      })
      .def("is_failed", &ClusterState::is_failed)
      .def("fail", &ClusterState::fail)
      .def("copy", [](const ClusterState& s) { return s; })
      .def("__eq__", [](const ClusterState& a, const ClusterState& b) { return a == b; });

  py::class_<PmCode>(m, "PmCode")
      .def_static("reference_example", &reference_f11_code, "The GF(11) code with (n_b, n_l, k, d_b, d_l) = (5, 3, 2, 3, 1).")
      .def_static("random", [](const HierParams& p, std::uint64_t q, std::uint64_t seed) {
        return build_pm_code(p, PrimeField(q), RandomPsi{seed});
      }, py::arg("params"), py::arg("q"), py::arg("seed") = 0)
      .def_property_readonly("params", &PmCode::params)
      .def_property_readonly("q", [](const PmCode& c) { return c.field().modulus(); })
      .def_property_readonly("psi", [](const PmCode& c) { return rows_of(c.psi()); })
      .def_property_readonly("combiner", [](const PmCode& c) { return rows_of(c.combiner()); })
      .def_property_readonly("message_size", &PmCode::message_size)
      .def_property_readonly("symbols_per_disk", &PmCode::symbols_per_disk)
      .def("validate", [](const PmCode& c, std::optional<std::uint64_t> samples, std::uint64_t seed) {
        const ValidationReport r =
            validate_conditions(c, samples ? ValidationMode{Sampled{*samples, seed}} : ValidationMode{Exhaustive{}});
        py::dict d;
        d["ok"] = r.ok();
        d["exhaustive"] = r.exhaustive;
        d["condition1_checked"] = r.condition1_checked;
        d["condition2_checked"] = r.condition2_checked;
        d["violations"] = r.condition1_violations.size() + r.condition2_violations.size();
        return d;
      }, py::arg("samples") = py::none(), py::arg("seed") = 0)
      .def("encode", [](const PmCode& c, const std::vector<Element>& msg) { return encode_clusters(c, msg); })
      .def("repair", [](const PmCode& c, const ClusterState& s, std::size_t cluster, const std::set<std::size_t>& failed,
                        const std::set<std::size_t>& helpers) {
        const RepairReport r = repair_cluster(s, c, cluster, failed, helpers);
        py::dict d;
        d["state"] = r.state;
        d["target_disk"] = r.target_disk;
        d["helper_symbols"] = r.helper_symbols;
        d["cross_cluster_symbols"] = r.cross_cluster_symbols;
        d["local_symbols"] = r.local_symbols;
        return d;
      }, py::arg("state"), py::arg("cluster"), py::arg("failed"), py::arg("helpers"))
      .def("reconstruct", [](const PmCode& c, const ClusterState& s, const std::set<std::size_t>& clusters) {
        return reconstruct(s, c, clusters);
      }, py::arg("state"), py::arg("clusters"));
  m.def("ambr_point", [](const HierParams& p, const Rational& msg) { return point(ambr_point(p, msg)); },
        py::arg("params"), py::arg("M"));

  // repair simulation
  m.def("datacenter_stages", [](const Rational& file_size, std::size_t k) {
    py::list out;
    for (const auto& s : stage_analysis(datacenter_bandwidths(DatacenterGrid{}), k, file_size)) {
      py::dict d;
      d["failures"] = s.failures;
      d["chosen_d"] = s.chosen_d;
      d["opportunistic_time"] = s.opportunistic_time;
      d["baseline_time"] = s.baseline_time;
      d["improvement"] = s.improvement;
      out.append(d);
    }
    return out;
  }, py::arg("file_size") = Rational(100), py::arg("k") = 10, "Five datacenters of three nodes, 150/15 links.");
  m.def("one_failure_ratio", [](std::size_t n, std::size_t k, std::size_t runs, std::uint64_t seed) {
    const SampleStats s = one_failure_ratio(RandomGaussian{}, n, k, runs, seed);
    return py::make_tuple(s.mean, s.stddev);
  }, py::arg("n"), py::arg("k"), py::arg("runs") = 10000, py::arg("seed") = 0);
}
