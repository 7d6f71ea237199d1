#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hierstore/codec_json.hpp"
#include "hierstore/combinations.hpp"
#include "hierstore/errors.hpp"
#include "hierstore/mbr_exact.hpp"
#include "hierstore/mttdl.hpp"
#include "hierstore/opportunistic.hpp"
#include "hierstore/pm_code.hpp"
#include "hierstore/repair_sim.hpp"
#include "hierstore/tradeoff.hpp"

namespace hierstore::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// A bad flag value detected after CLI11 has accepted the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string error_name(const std::exception& e) {
#define HIERSTORE_NAME(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  HIERSTORE_NAME(NotPrime)
  HIERSTORE_NAME(InverseOfZero)
  HIERSTORE_NAME(Singular)
  HIERSTORE_NAME(ShapeMismatch)
  HIERSTORE_NAME(DuplicatePoints)
  HIERSTORE_NAME(FieldTooSmall)
  HIERSTORE_NAME(NotMds)
  HIERSTORE_NAME(TooFewSymbols)
  HIERSTORE_NAME(InconsistentSymbols)
  HIERSTORE_NAME(InvalidParams)
  HIERSTORE_NAME(ConditionsUnsatisfiable)
  HIERSTORE_NAME(BudgetExceeded)
  HIERSTORE_NAME(InvalidRepairRequest)
  HIERSTORE_NAME(SingularRepairMatrix)
  HIERSTORE_NAME(SingularPhiLeft)
  HIERSTORE_NAME(TooManyLocalFailures)
  HIERSTORE_NAME(TooFewClusters)
  HIERSTORE_NAME(InfeasibleGamma)
  HIERSTORE_NAME(Infeasible)
  HIERSTORE_NAME(InfeasibleAlpha)
  HIERSTORE_NAME(ROutOfRange)
  HIERSTORE_NAME(MissingBeta)
  HIERSTORE_NAME(InstanceTooLarge)
  HIERSTORE_NAME(TooFewLiveNodes)
  HIERSTORE_NAME(FormatError)
#undef HIERSTORE_NAME
  return "Error";
}

bool is_usage_error(const std::exception& e) {
  return dynamic_cast<const UsageError*>(&e) || dynamic_cast<const InvalidParams*>(&e) ||
         dynamic_cast<const FormatError*>(&e) || dynamic_cast<const NotPrime*>(&e) ||
         dynamic_cast<const std::invalid_argument*>(&e);
}

Rational rational_flag(const std::string& name, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError("--" + name + ": expected a rational such as 3, 2/5 or 0.25, got '" + text + "'");
  }
}

struct Common {
  bool json = false;
  std::optional<int> digits;
  std::string output;

  std::string fmt(const Rational& v) const { return format_rational(v, digits); }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_flag("--json", c.json, "Emit a JSON envelope {command, params, results, provenance}");
  sub->add_option("--decimal", c.digits, "Render rationals with this many fractional digits")
      ->check(CLI::Range(0, 200));
  sub->add_option("--output", c.output, "Write the CSV or JSON artifact to this file");
}

struct ParamFlags {
  std::size_t n_b = 0, n_l = 0, k = 0, d_b = 0, d_l = 0;
};

void add_params(CLI::App* sub, ParamFlags& p, bool required) {
  auto opt = [&](const char* name, std::size_t& v, const char* help) {
    CLI::Option* o = sub->add_option(name, v, help);
    if (required) o->required();
  };
  opt("--nb", p.n_b, "Number of clusters");
  opt("--nl", p.n_l, "Disks per cluster");
  opt("--k", p.k, "Clusters needed to reconstruct");
  opt("--db", p.d_b, "Helper clusters per repair");
  opt("--dl", p.d_l, "Tolerated extra local failures (d_l + 1 disks fail together)");
}

HierParams to_params(const ParamFlags& f) {
  HierParams p{f.n_b, f.n_l, f.k, f.d_b, f.d_l};
  p.validate();
  return p;
}

json params_json(const HierParams& p) {
  return {{"n_b", p.n_b}, {"n_l", p.n_l}, {"k", p.k}, {"d_b", p.d_b}, {"d_l", p.d_l}};
}

std::string join(const std::vector<std::size_t>& v, const char* sep = ",") {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? sep : "") << v[i];
  return s.str();
}

std::string join(const std::set<std::size_t>& v) { return join(std::vector<std::size_t>(v.begin(), v.end())); }

std::vector<Rational> grid(const Rational& lo, const Rational& hi, std::size_t steps) {
  if (steps == 0) throw UsageError("--steps must be positive");
  if (hi < lo) throw UsageError("grid upper end is below the lower end");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(steps == 1 ? lo : lo + (hi - lo) * Rational(i) / Rational(steps - 1));
  }
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err, std::vector<std::string> argv)
      : out_(out), err_(err), argv_(std::move(argv)) {}

  // Writes the primary artifact: the JSON envelope in --json mode, otherwise `text`.
  void finish(const Common& c, const std::string& command, const json& params, const json& results,
              const std::string& text) {
    std::string body;
    if (c.json) {
      json env{{"command", command},
               {"params", params},
               {"results", results},
               {"provenance", {{"tool", "hierstore"}, {"version", kVersion}, {"argv", argv_}}}};
      body = env.dump(2) + "\n";
    } else {
      body = text;
    }
    if (c.output.empty()) {
      out_ << body;
      return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw UsageError("cannot write " + c.output);
    f << body;
  }

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::string> argv_;
};

// ---------------------------------------------------------------- tradeoff

struct TradeoffFlags {
  Common common;
  ParamFlags params;
  std::string message = "1";
  std::vector<std::string> gammas;
  std::optional<std::string> gamma_min, gamma_max;
  std::size_t steps = 101;
};

int run_tradeoff(Runner& run, const TradeoffFlags& f) {
  const HierParams p = to_params(f.params);
  const Rational m = rational_flag("M", f.message);
  const auto bp = gamma_breakpoints(p, m);
  std::vector<Rational> gammas;
  if (!f.gammas.empty()) {
    for (const auto& g : f.gammas) gammas.push_back(rational_flag("gamma", g));
  } else {
    const Rational lo = f.gamma_min ? rational_flag("gamma-min", *f.gamma_min) : Rational(0);
    const Rational hi = f.gamma_max ? rational_flag("gamma-max", *f.gamma_max) : 2 * bp.front();
    gammas = grid(lo, hi, f.steps);
  }
  std::ostringstream csv;
  write_tradeoff_csv(csv, p, m, gammas, f.common.digits);
  json results{{"breakpoints", json::array()}, {"curve", json::array()}};
  for (const auto& b : bp) results["breakpoints"].push_back(f.common.fmt(b));
  for (const auto& g : gammas) {
    const ThresholdValue v = alpha_star(p, m, g);
    results["curve"].push_back({{"gamma", f.common.fmt(g)}, {"alpha_star", f.common.fmt(v.alpha)}, {"regime", v.regime}});
  }
  json params = params_json(p);
  params["M"] = to_string(m);
  run.finish(f.common, "tradeoff", params, results, csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------- points

struct PointsFlags {
  Common common;
  ParamFlags params;
  std::string message = "1";
  std::optional<std::size_t> chao_r;
  std::string beta = "1";
};

int run_points(Runner& run, const PointsFlags& f) {
  const HierParams p = to_params(f.params);
  const Rational m = rational_flag("M", f.message);
  const ExtremalPoints ex = extremal_points(p, m);
  const Common& c = f.common;
  auto pair = [&](const TradeoffPoint& t) { return json{{"alpha", c.fmt(t.alpha)}, {"gamma", c.fmt(t.gamma)}}; };
  json results{{"msr", pair(ex.msr)}, {"ambr", pair(ex.ambr)}, {"msr_exact_beta", c.fmt(ex.msr_exact_beta)}};
  results["mbr"] = ex.mbr ? pair(*ex.mbr) : json(nullptr);
  std::ostringstream text;
  text << "parameters " << p.describe() << ", M = " << to_string(m) << "\n";
  text << "MSR   alpha = " << c.fmt(ex.msr.alpha) << "  gamma = " << c.fmt(ex.msr.gamma) << "\n";
  if (ex.mbr) {
    text << "MBR   alpha = " << c.fmt(ex.mbr->alpha) << "  gamma = " << c.fmt(ex.mbr->gamma) << "\n";
  } else {
    text << "MBR   not available: n_l - d_l = 1 leaves no local redundancy\n";
  }
  text << "AMBR  alpha = " << c.fmt(ex.ambr.alpha) << "  gamma = " << c.fmt(ex.ambr.gamma) << "\n";
  text << "exact-repair MSR beta per helper cluster = " << c.fmt(ex.msr_exact_beta) << "\n";
  if (f.chao_r) {
    const Rational beta = rational_flag("beta", f.beta);
    const ChaoParams cp = chao_params(p, *f.chao_r, beta);
    results["block_design"] = {{"r", *f.chao_r},
                               {"beta", c.fmt(beta)},
                               {"alpha", c.fmt(cp.alpha)},
                               {"M", c.fmt(cp.message_size)},
                               {"t_c", cp.t_c.str()}};
    text << "block design r = " << *f.chao_r << ", beta = " << c.fmt(beta) << ": alpha = " << c.fmt(cp.alpha)
         << "  M = " << c.fmt(cp.message_size) << "  T_c = " << cp.t_c << "\n";
  }
  json params = params_json(p);
  params["M"] = to_string(m);
  run.finish(c, "points", params, results, text.str());
  return kExitOk;
}

// ---------------------------------------------------------------- opportunistic

struct OppFlags {
  Common common;
  std::size_t n = 0, k = 0;
  std::string message = "1";
  std::vector<std::size_t> helper_counts;
  std::optional<std::string> alpha_min, alpha_max;
  std::size_t steps = 101;
};

int run_opportunistic(Runner& run, const OppFlags& f) {
  const Rational m = rational_flag("M", f.message);
  const OppSystem sys = OppSystem::make(f.n, f.k, m, f.helper_counts);
  if (sys.helper_counts().size() < 2) throw UsageError("--D needs at least two helper counts for a loss curve");
  const Rational msr = m / Rational(static_cast<unsigned long long>(f.k));
  const Rational lo = f.alpha_min ? rational_flag("alpha-min", *f.alpha_min) : msr;
  const Rational hi = f.alpha_max ? rational_flag("alpha-max", *f.alpha_max) : 2 * msr;
  const auto alphas = grid(lo, hi, f.steps);
  std::ostringstream csv;
  write_loss_curve_csv(csv, sys, alphas, f.common.digits);

  const Common& c = f.common;
  const auto ao = alpha_o(f.k, sys.d1(), m);
  json results{{"alpha_o", ao ? json(c.fmt(*ao)) : json("unbounded")}, {"curve", json::array()}};
  for (const Rational& a : alphas) {
    json row{{"alpha", c.fmt(a)}};
    const auto bt = beta_tilde(sys, a);
    BetaMap betas;
    for (const auto& [d, b] : bt) {
      row["beta_star_" + std::to_string(d)] = c.fmt(dimakis_beta_star(f.n, f.k, d, m, a));
      row["beta_tilde_" + std::to_string(d)] = c.fmt(b);
      betas.insert_or_assign(d, Capacity(b));
    }
    row["feasible"] = feasible(sys, a, betas);
    results["curve"].push_back(row);
  }
  json params{{"n", f.n}, {"k", f.k}, {"M", to_string(m)}, {"D", sys.helper_counts()}};
  run.finish(c, "opportunistic", params, results, csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------- mttdl

struct MttdlFlags {
  Common common;
  std::size_t n = 0, k = 0;
  std::optional<std::size_t> n_max;
  std::string lambda = "1";
  std::vector<std::string> mus{"1"};
  std::string model = "both";
};

int run_mttdl(Runner& run, const MttdlFlags& f) {
  const Rational lambda = rational_flag("lambda", f.lambda);
  std::vector<Rational> mus;
  for (const auto& m : f.mus) mus.push_back(rational_flag("mu", m));
  std::vector<RepairModel> models;
  if (f.model == "both") {
    models = {RepairModel::chen, RepairModel::angus};
  } else {
    models = {parse_repair_model(f.model)};
  }

  std::vector<MttdlComparison> rows;
  if (f.n_max) {
    for (const auto& c : mttdl_sweep(*f.n_max, lambda, mus))
      if (std::find(models.begin(), models.end(), c.spec.model) != models.end()) rows.push_back(c);
  } else {
    if (f.n == 0) throw UsageError("give --n and --k, or --n-max for a sweep");
    for (const Rational& mu : mus)
      for (RepairModel model : models)
        for (bool opp : {false, true}) rows.push_back(compare_mttdl({f.n, f.k, lambda, mu, model, opp}));
  }

  const Common& c = f.common;
  std::ostringstream csv;
  write_mttdl_csv(csv, rows, c.digits);
  json results{{"rows", json::array()}, {"ratios", json::array()}};
  std::size_t mismatches = 0;
  for (const auto& r : rows) {
    mismatches += r.match() ? 0 : 1;
    results["rows"].push_back({{"n", r.spec.n},
                               {"k", r.spec.k},
                               {"mu", to_string(r.spec.mu)},
                               {"model", to_string(r.spec.model)},
                               {"opportunistic", r.spec.opportunistic},
                               {"closed", c.fmt(r.closed)},
                               {"oracle", c.fmt(r.oracle)},
                               {"match", r.match()}});
  }
  std::ostringstream ratios;
  ratios << std::setprecision(8);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& orig = rows[i];
    const auto& opp = rows[i + 1];
    if (orig.spec.opportunistic || !opp.spec.opportunistic || orig.spec.n != opp.spec.n || orig.spec.k != opp.spec.k ||
        orig.spec.mu != opp.spec.mu || orig.spec.model != opp.spec.model)
      continue;
    const Rational closed = opp.closed / orig.closed;
    const Rational chain = opp.oracle / orig.oracle;
    const BigInt factor = improvement_factor(orig.spec.n, orig.spec.k);
    results["ratios"].push_back({{"n", orig.spec.n},
                                 {"k", orig.spec.k},
                                 {"mu", to_string(orig.spec.mu)},
                                 {"model", to_string(orig.spec.model)},
                                 {"closed", to_double(closed)},
                                 {"oracle", to_double(chain)},
                                 {"asymptotic", factor.str()}});
    ratios << "# opportunistic/original " << to_string(orig.spec.model) << " n=" << orig.spec.n
           << " k=" << orig.spec.k << " mu=" << to_string(orig.spec.mu) << ": closed " << to_double(closed)
           << ", chain " << to_double(chain) << ", asymptotic " << factor << "\n";
  }
  results["mismatches"] = mismatches;
  json params{{"lambda", to_string(lambda)}, {"model", f.model}, {"mu", f.mus}};
  if (f.n_max) {
    params["n_max"] = *f.n_max;
  } else {
    params["n"] = f.n;
    params["k"] = f.k;
  }
  run.finish(c, "mttdl", params, results, csv.str());
  // The ratio summary is a side channel so the CSV stays a single table.
  if (!c.json) run.err() << ratios.str();
  if (mismatches > 0) {
    run.err() << "warning: " << mismatches << " closed form(s) disagree with the Markov chain oracle\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimFlags {
  Common common;
  std::string scenario;
  std::string preset = "gaussian";
  std::size_t n = 0, k = 0;
  std::optional<std::size_t> n_min;
  std::size_t runs = 10'000;
  std::uint64_t seed = 0;
  std::string mode = "one";
  std::string file_size = "100";
};

BandwidthMatrix<Rational> exact_rates(const Scenario& s) {
  if (const auto* dc = std::get_if<DatacenterGrid>(&s.generator)) return datacenter_bandwidths(*dc);
  if (const auto* fm = std::get_if<FixedMatrix>(&s.generator)) {
    BandwidthMatrix<Rational> out(fm->rates.size());
    for (std::size_t i = 0; i < fm->rates.size(); ++i)
      for (double v : fm->rates[i]) out[i].push_back(Rational(v));
    return out;
  }
  throw UsageError("--mode stages needs a deterministic scenario (datacenter or explicit matrix)");
}

int run_simulate(Runner& run, const SimFlags& f) {
  Scenario s;
  if (!f.scenario.empty()) {
    std::ifstream in(f.scenario);
    if (!in) throw UsageError("cannot read " + f.scenario);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError(std::string("scenario: ") + e.what());
    }
    s = parse_scenario(doc);
  } else if (f.preset == "datacenter") {
    s = {f.n ? f.n : 15, f.k ? f.k : 10, DatacenterGrid{}};
    if (s.n != DatacenterGrid{}.nodes()) throw UsageError("the datacenter preset has 15 nodes");
  } else if (f.preset == "gaussian") {
    if (f.n == 0 || f.k == 0) throw UsageError("--preset gaussian needs --n and --k");
    s = {f.n, f.k, RandomGaussian{}};
  } else {
    throw UsageError("--preset must be datacenter or gaussian");
  }
  if (s.k == 0 || s.k >= s.n) throw InvalidParams("need 1 <= k < n");

  const Common& c = f.common;
  std::ostringstream csv;
  json results = json::array();
  csv << std::setprecision(12);
  if (f.mode == "one" || f.mode == "sweep") {
    if (f.runs == 0) throw UsageError("--runs must be positive");
    csv << "n,k,runs,mean_ratio,stddev\r\n";
    const std::size_t first = f.mode == "sweep" ? (f.n_min ? *f.n_min : s.k + 1) : s.n;
    if (first <= s.k || first > s.n) throw UsageError("--n-min must satisfy k < n-min <= n");
    for (std::size_t n = first; n <= s.n; ++n) {
      const SampleStats st = one_failure_ratio(s.generator, n, s.k, f.runs, f.seed);
      csv << n << ',' << s.k << ',' << f.runs << ',' << st.mean << ',' << st.stddev << "\r\n";
      results.push_back({{"n", n}, {"k", s.k}, {"mean_ratio", st.mean}, {"stddev", st.stddev}});
    }
  } else if (f.mode == "profile") {
    if (f.runs == 0) throw UsageError("--runs must be positive");
    const auto prof = multi_failure_profile(s.generator, s.n, s.k, f.runs, f.seed);
    write_profile_csv(csv, prof);
    for (const auto& p : prof)
      results.push_back({{"t", p.failures}, {"mean_normalized_time", p.mean}, {"stddev", p.stddev}});
  } else if (f.mode == "stages") {
    const Rational size = rational_flag("file-size", f.file_size);
    const auto stages = stage_analysis(exact_rates(s), s.k, size);
    csv << "failures,chosen_d,opportunistic_time,baseline_time,improvement\r\n";
    for (const auto& st : stages) {
      csv << st.failures << ',' << st.chosen_d << ',' << c.fmt(st.opportunistic_time) << ','
          << c.fmt(st.baseline_time) << ',' << c.fmt(st.improvement) << "\r\n";
      results.push_back({{"failures", st.failures},
                         {"chosen_d", st.chosen_d},
                         {"opportunistic_time", c.fmt(st.opportunistic_time)},
                         {"baseline_time", c.fmt(st.baseline_time)},
                         {"improvement", c.fmt(st.improvement)}});
    }
  } else {
    throw UsageError("--mode must be one, sweep, profile or stages");
  }
  json params{{"n", s.n}, {"k", s.k}, {"mode", f.mode}, {"runs", f.runs}, {"seed", f.seed}};
  if (!f.scenario.empty()) {
    params["scenario"] = f.scenario;
  } else {
    params["preset"] = f.preset;
  }
  run.finish(c, "simulate", params, results, csv.str());
  return kExitOk;
}

// ---------------------------------------------------------------- pmdemo / mbrdemo

struct DemoFlags {
  Common common;
  bool reference_example = false;
  ParamFlags params;
  std::uint64_t q = 0;
  std::uint64_t seed = 0;
  std::string save;
};

std::size_t count_equal(const std::vector<Element>& a, const std::vector<Element>& b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) same += a[i] == b[i] ? 1 : 0;
  return same;
}

std::set<std::size_t> pick_helpers(std::size_t n_b, std::size_t d_b, std::size_t failed_cluster, std::mt19937_64& rng) {
  std::set<std::size_t> out;
  for (std::size_t x : random_combination(n_b - 1, d_b, rng)) out.insert(x >= failed_cluster ? x + 1 : x);
  return out;
}

void save_json(const std::string& path, const json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << doc.dump(2) << "\n";
}

int run_pmdemo(Runner& run, const DemoFlags& f) {
  std::optional<PmCode> built;
  if (f.reference_example) {
    built = reference_f11_code();
  } else {
    if (f.q == 0) throw UsageError("give --paper-example, or parameters with --q");
    const HierParams p = to_params(f.params);
    built = build_pm_code(p, PrimeField(f.q), RandomPsi{f.seed});
  }
  const PmCode& code = *built;
  const HierParams& p = code.params();
  std::mt19937_64 rng(f.seed);
  std::uniform_int_distribution<Element> sym(0, code.field().modulus() - 1);
  std::vector<Element> msg(code.message_size());
  for (auto& x : msg) x = sym(rng);

  std::ostringstream t;
  const ValidationReport rep = validate_conditions(
      code, exhaustive_subset_count(p) <= kExhaustiveSubsetBudget ? ValidationMode{Exhaustive{}} : ValidationMode{Sampled{}});
  t << "CODE " << p.describe() << " over GF(" << code.field().modulus() << "): " << code.psi().rows() << "x"
    << code.psi().cols() << " psi, " << code.symbols_per_disk() << " symbols per disk, message " << code.message_size()
    << " symbols\n";
  t << "VALIDATE " << (rep.exhaustive ? "exhaustive" : "sampled") << ": " << rep.condition1_checked
    << " condition-1 and " << rep.condition2_checked << " condition-2 checks, "
    << rep.condition1_violations.size() + rep.condition2_violations.size() << " violations\n";
  const ClusterState encoded = encode_clusters(code, msg);
  t << "ENCODE seed " << f.seed << ": " << p.n_b << " clusters x " << p.n_l << " disks\n";

  const std::size_t cluster = std::uniform_int_distribution<std::size_t>(0, p.n_b - 1)(rng);
  const auto failed_v = random_combination(p.n_l, p.d_l + 1, rng);
  const std::set<std::size_t> failed(failed_v.begin(), failed_v.end());
  const std::set<std::size_t> helpers = pick_helpers(p.n_b, p.d_b, cluster, rng);
  ClusterState broken = encoded;
  for (std::size_t d : failed) broken.fail(cluster, d);
  t << "FAIL cluster " << cluster << " disks {" << join(failed) << "}\n";
  const RepairReport r = repair_cluster(broken, code, cluster, failed, helpers);
  t << "REPAIR disk " << r.target_disk << " from helper clusters {" << join(helpers) << "}: "
    << r.cross_cluster_symbols << " cross-cluster symbols, " << r.local_symbols << " local symbols\n";
  const bool repaired = r.state == encoded;
  t << (repaired ? "REPAIR OK" : "REPAIR MISMATCH") << " (" << failed.size() << " disks restored)\n";

  const auto chosen = random_combination(p.n_b, p.k, rng);
  const std::set<std::size_t> clusters(chosen.begin(), chosen.end());
  const auto recovered = reconstruct(r.state, code, clusters);
  const std::size_t same = count_equal(recovered, msg);
  const bool ok = repaired && same == msg.size();
  t << "RECONSTRUCT from clusters {" << join(clusters) << "}\n";
  t << (same == msg.size() ? "RECONSTRUCT OK" : "RECONSTRUCT FAILED") << " (" << same << "/" << msg.size()
    << " symbols)\n";

  if (!f.save.empty()) save_json(f.save, pm_code_to_json(code, &encoded));
  json results{{"validation_ok", rep.ok()},
               {"failed_cluster", cluster},
               {"failed_disks", failed},
               {"helper_clusters", helpers},
               {"cross_cluster_symbols", r.cross_cluster_symbols},
               {"local_symbols", r.local_symbols},
               {"repair_ok", repaired},
               {"reconstruct_clusters", clusters},
               {"symbols_recovered", same},
               {"message_size", msg.size()}};
  json params = params_json(p);
  params["q"] = code.field().modulus();
  params["seed"] = f.seed;
  params["reference_example"] = f.reference_example;
  run.finish(f.common, "pmdemo", params, results, t.str());
  return ok ? kExitOk : kExitFailure;
}

int run_mbrdemo(Runner& run, const DemoFlags& f) {
  HierParams p{4, 4, 2, 2, 1};
  if (f.params.n_b != 0) p = to_params(f.params);
  const PrimeField field(f.q ? f.q : 11);
  const MbrCode code = make_mbr_code(p, field);
  std::mt19937_64 rng(f.seed);
  std::uniform_int_distribution<Element> sym(0, field.modulus() - 1);
  std::vector<Element> msg(code.pieces());
  for (auto& x : msg) x = sym(rng);

  std::ostringstream t;
  t << "CODE zero-cross-bandwidth " << p.describe() << " over GF(" << field.modulus() << "): message " << msg.size()
    << " symbols in " << code.pieces() << " pieces\n";
  const ClusterState encoded = mbr_encode(code, msg);
  t << "ENCODE seed " << f.seed << ": " << p.n_b << " clusters x " << p.n_l << " disks\n";
  const std::size_t cluster = std::uniform_int_distribution<std::size_t>(0, p.n_b - 1)(rng);
  const auto failed_v = random_combination(p.n_l, p.d_l + 1, rng);
  const std::set<std::size_t> failed(failed_v.begin(), failed_v.end());
  ClusterState broken = encoded;
  for (std::size_t d : failed) broken.fail(cluster, d);
  t << "FAIL cluster " << cluster << " disks {" << join(failed) << "}\n";
  const MbrRepairReport r = mbr_repair(broken, code, cluster, failed);
  const bool repaired = r.state == encoded;
  t << "REPAIR local only: " << r.cross_cluster_symbols << " cross-cluster symbols, " << r.local_symbols
    << " local symbols\n";
  t << (repaired ? "REPAIR OK" : "REPAIR MISMATCH") << " (" << failed.size() << " disks restored)\n";
  const auto chosen = random_combination(p.n_b, p.k, rng);
  const std::set<std::size_t> clusters(chosen.begin(), chosen.end());
  const auto recovered = mbr_reconstruct(r.state, code, clusters);
  const std::size_t same = count_equal(recovered, msg);
  t << "RECONSTRUCT from clusters {" << join(clusters) << "}\n";
  t << (same == msg.size() ? "RECONSTRUCT OK" : "RECONSTRUCT FAILED") << " (" << same << "/" << msg.size()
    << " symbols)\n";

  if (!f.save.empty()) save_json(f.save, mbr_state_to_json(code, encoded));
  json results{{"failed_cluster", cluster},
               {"failed_disks", failed},
               {"cross_cluster_symbols", r.cross_cluster_symbols},
               {"local_symbols", r.local_symbols},
               {"repair_ok", repaired},
               {"reconstruct_clusters", clusters},
               {"symbols_recovered", same},
               {"message_size", msg.size()}};
  json params = params_json(p);
  params["q"] = field.modulus();
  params["seed"] = f.seed;
  run.finish(f.common, "mbrdemo", params, results, t.str());
  return repaired && same == msg.size() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- validate

struct ValidateFlags {
  Common common;
  std::string code;
  std::string mode = "auto";
  std::uint64_t samples = 10'000;
  std::uint64_t seed = 0;
};

int run_validate(Runner& run, const ValidateFlags& f) {
  std::ifstream in(f.code);
  if (!in) throw UsageError("cannot read " + f.code);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("code file: ") + e.what());
  }
  const PmDocument d = pm_code_from_json(doc);
  const HierParams& p = d.code.params();
  ValidationMode mode = Sampled{f.samples, f.seed};
  if (f.mode == "exhaustive" || (f.mode == "auto" && exhaustive_subset_count(p) <= kExhaustiveSubsetBudget)) {
    mode = Exhaustive{};
  } else if (f.mode != "sampled" && f.mode != "auto") {
    throw UsageError("--mode must be auto, exhaustive or sampled");
  }
  const ValidationReport rep = validate_conditions(d.code, mode);

  bool disks_ok = true;
  if (d.state) {
    // Live disks must hold exactly what the code would store for some message;
    // checked by re-encoding the message reconstructed from the first k clusters.
    std::set<std::size_t> first;
    for (std::size_t c = 0; first.size() < p.k && c < p.n_b; ++c) first.insert(c);
    try {
      const ClusterState again = encode_clusters(d.code, reconstruct(*d.state, d.code, first));
      for (std::size_t c = 0; c < p.n_b; ++c)
        for (std::size_t j = 0; j < p.n_l; ++j)
          if (!d.state->is_failed(c, j) && !std::ranges::equal(again.disk(c, j), d.state->disk(c, j))) disks_ok = false;
    } catch (const Error&) {
      disks_ok = false;
    }
  }

  std::ostringstream t;
  t << "code " << p.describe() << " over GF(" << d.code.field().modulus() << ")\n";
  t << (rep.exhaustive ? "exhaustive" : "sampled") << " check: " << rep.condition1_checked << " condition-1 subsets, "
    << rep.condition2_checked << " condition-2 subsets\n";
  if (!rep.combiner_ok) t << "combiner: B does not start with an identity block or is not MDS\n";
  json v1 = json::array(), v2 = json::array();
  for (const auto& v : rep.condition1_violations) {
    v1.push_back(v.rows);
    t << "condition 1 violated by psi rows {" << join(v.rows) << "}\n";
  }
  for (const auto& v : rep.condition2_violations) {
    v2.push_back({{"cluster", v.cluster}, {"helpers", v.helpers}, {"local_disks", v.local_disks}});
    t << "condition 2 violated: cluster " << v.cluster << ", helpers {" << join(v.helpers) << "}, local disks {"
      << join(v.local_disks) << "}\n";
  }
  if (d.state) t << "stored disks " << (disks_ok ? "consistent with the code" : "INCONSISTENT with the code") << "\n";
  const bool ok = rep.ok() && disks_ok;
  t << (ok ? "VALID" : "INVALID") << "\n";
  json results{{"ok", ok},
               {"exhaustive", rep.exhaustive},
               {"condition1_checked", rep.condition1_checked},
               {"condition2_checked", rep.condition2_checked},
               {"combiner_ok", rep.combiner_ok},
               {"condition1_violations", v1},
               {"condition2_violations", v2}};
  if (d.state) results["disks_consistent"] = disks_ok;
  json params{{"code", f.code}, {"mode", f.mode}, {"samples", f.samples}, {"seed", f.seed}};
  run.finish(f.common, "validate", params, results, t.str());
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repair-bandwidth, code construction and reliability tools for clustered storage", "hierstore"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);

  TradeoffFlags tf;
  auto* tradeoff = app.add_subcommand("tradeoff", "Storage/repair-bandwidth threshold curve as CSV");
  add_common(tradeoff, tf.common);
  add_params(tradeoff, tf.params, true);
  tradeoff->add_option("--M", tf.message, "Message size (rational)");
  tradeoff->add_option("--gamma", tf.gammas, "Explicit repair-bandwidth values (rationals)");
  tradeoff->add_option("--gamma-min", tf.gamma_min, "Grid start (default 0)");
  tradeoff->add_option("--gamma-max", tf.gamma_max, "Grid end (default twice the minimum-storage bandwidth)");
  tradeoff->add_option("--steps", tf.steps, "Grid points");

  PointsFlags pf;
  auto* points = app.add_subcommand("points", "Extremal operating points as exact rationals");
  add_common(points, pf.common);
  add_params(points, pf.params, true);
  points->add_option("--M", pf.message, "Message size (rational)");
  points->add_option("--chao-r", pf.chao_r, "Also evaluate the block-design code for this r");
  points->add_option("--beta", pf.beta, "Per-helper download for --chao-r (rational)");

  OppFlags of;
  auto* opp = app.add_subcommand("opportunistic", "Loss curve of a system with several helper counts");
  add_common(opp, of.common);
  opp->add_option("--n", of.n, "Nodes")->required();
  opp->add_option("--k", of.k, "Nodes needed to reconstruct")->required();
  opp->add_option("--M", of.message, "Message size (rational)");
  opp->add_option("--D", of.helper_counts, "Allowed helper counts")->required()->delimiter(',');
  opp->add_option("--alpha-min", of.alpha_min, "Grid start (default M/k)");
  opp->add_option("--alpha-max", of.alpha_max, "Grid end (default 2M/k)");
  opp->add_option("--steps", of.steps, "Grid points");

  MttdlFlags mf;
  auto* mttdl = app.add_subcommand("mttdl", "Closed-form MTTDL against the Markov chain oracle");
  add_common(mttdl, mf.common);
  mttdl->add_option("--n", mf.n, "Nodes");
  mttdl->add_option("--k", mf.k, "Nodes needed to reconstruct");
  mttdl->add_option("--n-max", mf.n_max, "Sweep every 1 <= k < n <= n-max instead");
  mttdl->add_option("--lambda", mf.lambda, "Per-node failure rate (rational)");
  mttdl->add_option("--mu", mf.mus, "Repair rate(s) (rationals)")->delimiter(',');
  mttdl->add_option("--model", mf.model, "chen, angus or both");

  SimFlags sf;
  auto* sim = app.add_subcommand("simulate", "Bandwidth-aware helper selection scenarios");
  add_common(sim, sf.common);
  sim->add_option("--scenario", sf.scenario, "Scenario JSON file");
  sim->add_option("--preset", sf.preset, "datacenter or gaussian when no scenario file is given");
  sim->add_option("--n", sf.n, "Nodes");
  sim->add_option("--k", sf.k, "Nodes needed to reconstruct");
  sim->add_option("--n-min", sf.n_min, "Smallest n for --mode sweep");
  sim->add_option("--runs", sf.runs, "Monte Carlo runs");
  sim->add_option("--seed", sf.seed, "Seed");
  sim->add_option("--mode", sf.mode, "one, sweep, profile or stages");
  sim->add_option("--file-size", sf.file_size, "File size for --mode stages (rational)");

  DemoFlags pd;
  auto* pmdemo = app.add_subcommand("pmdemo", "Encode, fail, repair and reconstruct with the product-matrix code");
  add_common(pmdemo, pd.common);
  pmdemo->add_flag("--paper-example", pd.reference_example, "Use the GF(11) example code");
  add_params(pmdemo, pd.params, false);
  pmdemo->add_option("--q", pd.q, "Prime field size for a random code");
  pmdemo->add_option("--seed", pd.seed, "Seed for the message, the failure and the helpers");
  pmdemo->add_option("--save", pd.save, "Write the code and encoded disks as JSON");

  DemoFlags md;
  auto* mbrdemo = app.add_subcommand("mbrdemo", "Encode, fail, repair and reconstruct with the zero-cross-bandwidth code");
  add_common(mbrdemo, md.common);
  add_params(mbrdemo, md.params, false);
  mbrdemo->add_option("--q", md.q, "Prime field size (default 11)");
  mbrdemo->add_option("--seed", md.seed, "Seed for the message and the failure");
  mbrdemo->add_option("--save", md.save, "Write the encoded disks as JSON");

  ValidateFlags vf;
  auto* validate = app.add_subcommand("validate", "Check the repair and reconstruction conditions of a code file");
  add_common(validate, vf.common);
  validate->add_option("--code", vf.code, "Code JSON file")->required();
  validate->add_option("--mode", vf.mode, "auto, exhaustive or sampled");
  validate->add_option("--samples", vf.samples, "Samples per condition in sampled mode");
  validate->add_option("--seed", vf.seed, "Sampling seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::vector<std::string> argv{"hierstore"};
  argv.insert(argv.end(), args.begin(), args.end());
  Runner runner(out, err, argv);
  try {
    if (tradeoff->parsed()) return run_tradeoff(runner, tf);
    if (points->parsed()) return run_points(runner, pf);
    if (opp->parsed()) return run_opportunistic(runner, of);
    if (mttdl->parsed()) return run_mttdl(runner, mf);
    if (sim->parsed()) return run_simulate(runner, sf);
    if (pmdemo->parsed()) return run_pmdemo(runner, pd);
    if (mbrdemo->parsed()) return run_mbrdemo(runner, md);
    if (validate->parsed()) return run_validate(runner, vf);
  } catch (const std::exception& e) {
    err << "error: " << (dynamic_cast<const UsageError*>(&e) ? "usage" : error_name(e)) << ": " << e.what() << "\n";
    return is_usage_error(e) ? kExitUsage : kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hierstore::cli
