#include "hierstore/pm_code.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "hierstore/combinations.hpp"
#include "hierstore/errors.hpp"
#include "hierstore/mds.hpp"

namespace hierstore {
namespace {

std::string list(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

bool combiner_valid(const FieldMatrix& b) {
  const std::size_t a = b.cols();
  if (a == 0 || b.rows() < a) return false;
  if (!(b.block(0, 0, a, a) == FieldMatrix::identity(b.field(), a))) return false;
  return check_mds(b).ok();
}

// The d' × d' matrix of condition 2 for cluster i, helper clusters and local disks.
FieldMatrix repair_matrix(const PmCode& code, std::size_t cluster, const std::vector<std::size_t>& helpers,
                          const std::vector<std::size_t>& local_disks) {
  const FieldMatrix block = code.cluster_block(cluster);
  FieldMatrix out(code.field(), 0, code.symbols_per_disk());
  for (std::size_t m : local_disks) {
    const FieldMatrix b_row = code.combiner().block(m, 0, 1, code.combiner().cols());
    out = out.vstack(b_row * block);
  }
  for (std::size_t j : helpers) out = out.vstack(code.cluster_block(j));
  return out;
}

// Helper clusters are indices into the other n_b - 1 clusters; map them back.
std::vector<std::size_t> others_to_clusters(const std::vector<std::size_t>& picks, std::size_t skip) {
  std::vector<std::size_t> out;
  out.reserve(picks.size());
  for (std::size_t p : picks) out.push_back(p >= skip ? p + 1 : p);
  return out;
}

FieldMatrix disk_row(const ClusterState& state, const PrimeField& field, std::size_t cluster, std::size_t disk) {
  auto contents = state.disk(cluster, disk);
  return FieldMatrix::row_vector(field, contents);
}

// Recovers psi_c M (a × d') from the given a disks of cluster c.
FieldMatrix cluster_product(const ClusterState& state, const PmCode& code, std::size_t cluster,
                            const std::vector<std::size_t>& disks) {
  const FieldMatrix b_sel = code.combiner().select_rows(disks);
  FieldMatrix rhs(code.field(), 0, code.symbols_per_disk());
  for (std::size_t d : disks) rhs = rhs.vstack(disk_row(state, code.field(), cluster, d));
  return solve(b_sel, rhs);
}

}  // namespace

PmCode::PmCode(HierParams params, FieldMatrix psi, FieldMatrix combiner)
    : params_(params), psi_(std::move(psi)), combiner_(std::move(combiner)) {
  params_.validate();
  const std::size_t a = params_.local_dim();
  if (psi_.rows() != params_.n_b * a || psi_.cols() != params_.d_prime()) {
    throw ShapeMismatch("psi must be " + std::to_string(params_.n_b * a) + "×" + std::to_string(params_.d_prime()));
  }
  if (combiner_.rows() != params_.n_l || combiner_.cols() != a) {
    throw ShapeMismatch("B must be " + std::to_string(params_.n_l) + "×" + std::to_string(a));
  }
  if (!(psi_.field() == combiner_.field())) throw ShapeMismatch("psi and B are over different fields");
}

FieldMatrix PmCode::phi() const { return psi_.block(0, 0, psi_.rows(), params_.k_prime()); }

FieldMatrix PmCode::delta() const {
  return psi_.block(0, params_.k_prime(), psi_.rows(), params_.d_prime() - params_.k_prime());
}

FieldMatrix PmCode::cluster_block(std::size_t cluster) const {
  if (cluster >= params_.n_b) throw ShapeMismatch("cluster " + std::to_string(cluster) + " out of range");
  const std::size_t a = params_.local_dim();
  return psi_.block(cluster * a, 0, a, psi_.cols());
}

std::uint64_t exhaustive_subset_count(const HierParams& params) {
  const std::size_t a = params.local_dim();
  const std::uint64_t c1 = count_combinations(params.n_b * a, params.k_prime());
  const std::uint64_t helpers = count_combinations(params.n_b - 1, params.d_b);
  const std::uint64_t local = count_combinations(params.n_l, a - 1);
  const unsigned __int128 c2 = static_cast<unsigned __int128>(params.n_b) * helpers * local;
  const unsigned __int128 total = static_cast<unsigned __int128>(c1) + c2;
  return total > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(total);
}

ValidationReport validate_conditions(const PmCode& code, const ValidationMode& mode) {
  const HierParams& p = code.params();
  const std::size_t a = p.local_dim();
  const std::size_t rows = p.n_b * a;
  const FieldMatrix phi = code.phi();
  ValidationReport report;
  report.combiner_ok = combiner_valid(code.combiner());

  auto check1 = [&](const std::vector<std::size_t>& subset) {
    ++report.condition1_checked;
    if (!is_nonsingular(phi.select_rows(subset))) report.condition1_violations.push_back({subset});
  };
  auto check2 = [&](std::size_t cluster, const std::vector<std::size_t>& helpers,
                    const std::vector<std::size_t>& local) {
    ++report.condition2_checked;
    if (!is_nonsingular(repair_matrix(code, cluster, helpers, local))) {
      report.condition2_violations.push_back({cluster, helpers, local});
    }
  };

  if (std::holds_alternative<Exhaustive>(mode)) {
    const std::uint64_t total = exhaustive_subset_count(p);
    if (total > kExhaustiveSubsetBudget) {
      throw BudgetExceeded("exhaustive validation needs " + std::to_string(total) + " subsets, budget is " +
                           std::to_string(kExhaustiveSubsetBudget));
    }
    for_each_combination(rows, p.k_prime(), [&](const std::vector<std::size_t>& s) {
      check1(s);
      return true;
    });
    for (std::size_t i = 0; i < p.n_b; ++i) {
      for_each_combination(p.n_b - 1, p.d_b, [&](const std::vector<std::size_t>& picks) {
        const auto helpers = others_to_clusters(picks, i);
        for_each_combination(p.n_l, a - 1, [&](const std::vector<std::size_t>& local) {
          check2(i, helpers, local);
          return true;
        });
        return true;
      });
    }
    return report;
  }

  const Sampled& s = std::get<Sampled>(mode);
  report.exhaustive = false;
  std::mt19937_64 engine(s.seed);
  std::uniform_int_distribution<std::size_t> pick_cluster(0, p.n_b - 1);
  for (std::uint64_t n = 0; n < s.count; ++n) {
    check1(random_combination(rows, p.k_prime(), engine));
    const std::size_t i = pick_cluster(engine);
    const auto helpers = others_to_clusters(random_combination(p.n_b - 1, p.d_b, engine), i);
    check2(i, helpers, random_combination(p.n_l, a - 1, engine));
  }
  return report;
}

PmCode build_pm_code(const HierParams& params, const PrimeField& field, const PsiSource& source,
                     std::optional<FieldMatrix> combiner) {
  params.validate();
  const std::size_t a = params.local_dim();
  const std::size_t rows = params.n_b * a;
  const std::size_t cols = params.d_prime();

  FieldMatrix b = combiner ? *combiner : make_systematic_mds(field, params.n_l, a).generator();
  if (b.rows() != params.n_l || b.cols() != a) {
    throw ShapeMismatch("B must be " + std::to_string(params.n_l) + "×" + std::to_string(a));
  }
  if (!combiner_valid(b)) {
    throw ConditionsUnsatisfiable("B needs an identity top block and every " + std::to_string(a) +
                                  " rows independent");
  }

  const ValidationMode mode = exhaustive_subset_count(params) <= kExhaustiveSubsetBudget
                                  ? ValidationMode{Exhaustive{}}
                                  : ValidationMode{Sampled{10'000, 0}};
  auto checked = [&](PmCode code) -> std::optional<PmCode> {
    const ValidationReport r = validate_conditions(code, mode);
    if (r.ok()) return code;
    return std::nullopt;
  };

  if (const auto* v = std::get_if<VandermondePsi>(&source)) {
    std::vector<Element> points = v->points;
    if (points.empty()) {
      points.resize(rows);
      std::iota(points.begin(), points.end(), Element{1});
    }
    if (points.size() != rows) {
      throw ShapeMismatch("Vandermonde psi needs " + std::to_string(rows) + " points, got " +
                          std::to_string(points.size()));
    }
    auto code = checked(PmCode(params, vandermonde(field, points, cols), b));
    if (!code) throw ConditionsUnsatisfiable("Vandermonde psi violates the repair or reconstruction conditions");
    return *code;
  }
  if (const auto* e = std::get_if<ExplicitPsi>(&source)) {
    if (!(e->psi.field() == field)) throw ShapeMismatch("explicit psi is over a different field");
    auto code = checked(PmCode(params, e->psi, b));
    if (!code) throw ConditionsUnsatisfiable("explicit psi violates the repair or reconstruction conditions");
    return *code;
  }
  const RandomPsi& r = std::get<RandomPsi>(source);
  std::mt19937_64 engine(r.seed);
  std::uniform_int_distribution<Element> draw(0, field.modulus() - 1);
  for (int attempt = 0; attempt < kRandomPsiAttempts; ++attempt) {
    std::vector<Element> entries(rows * cols);
    for (auto& x : entries) x = draw(engine);
    if (auto code = checked(PmCode(params, FieldMatrix(field, rows, cols, std::move(entries)), b))) return *code;
  }
  throw ConditionsUnsatisfiable("no random psi over GF(" + std::to_string(field.modulus()) + ") passed after " +
                                std::to_string(kRandomPsiAttempts) + " draws");
}

PmCode reference_f11_code() {
  const PrimeField f(11);
  const HierParams params{5, 3, 2, 3, 1};
  std::vector<Element> points(10);
  std::iota(points.begin(), points.end(), Element{1});
  const FieldMatrix b = FieldMatrix::from_rows(f, {{1, 0}, {0, 1}, {1, 1}});
  return build_pm_code(params, f, ExplicitPsi{vandermonde(f, points, 7)}, b);
}

MessageMatrix::MessageMatrix(FieldMatrix s, FieldMatrix t, FieldMatrix m)
    : s_(std::move(s)), t_(std::move(t)), m_(std::move(m)) {}

MessageMatrix MessageMatrix::from_symbols(const PrimeField& field, std::size_t k_prime, std::size_t d_prime,
                                          std::span<const Element> symbols) {
  if (k_prime > d_prime) throw ShapeMismatch("k' must not exceed d'");
  const std::size_t extra = d_prime - k_prime;
  const std::size_t expected = k_prime * (k_prime + 1) / 2 + k_prime * extra;
  if (symbols.size() != expected) {
    throw ShapeMismatch("message has " + std::to_string(symbols.size()) + " symbols, expected " +
                        std::to_string(expected));
  }
  FieldMatrix s(field, k_prime, k_prime);
  FieldMatrix t(field, k_prime, extra);
  std::size_t next = 0;
  for (std::size_t r = 0; r < k_prime; ++r) {
    for (std::size_t c = r; c < k_prime; ++c) {
      const Element v = field.reduce_unsigned(symbols[next++]);
      s.set(r, c, v);
      s.set(c, r, v);
    }
  }
  for (std::size_t r = 0; r < k_prime; ++r) {
    for (std::size_t c = 0; c < extra; ++c) t.set(r, c, field.reduce_unsigned(symbols[next++]));
  }
  const FieldMatrix zero(field, extra, extra);
  FieldMatrix m = s.hstack(t).vstack(t.transpose().hstack(zero));
  return MessageMatrix(std::move(s), std::move(t), std::move(m));
}

std::vector<Element> message_symbols(const FieldMatrix& s, const FieldMatrix& t) {
  std::vector<Element> out;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = r; c < s.cols(); ++c) out.push_back(s(r, c));
  }
  out.insert(out.end(), t.entries().begin(), t.entries().end());
  return out;
}

ClusterState encode_clusters(const PmCode& code, std::span<const Element> message) {
  const HierParams& p = code.params();
  const MessageMatrix mm = MessageMatrix::from_symbols(code.field(), p.k_prime(), p.d_prime(), message);
  ClusterState state(p.n_b, p.n_l, p.d_prime());
  for (std::size_t i = 0; i < p.n_b; ++i) {
    const FieldMatrix disks = code.combiner() * (code.cluster_block(i) * mm.m());
    for (std::size_t j = 0; j < p.n_l; ++j) state.set_disk(i, j, disks.row(j));
  }
  return state;
}

RepairReport repair_cluster(const ClusterState& state, const PmCode& code, std::size_t failed_cluster,
                            const std::set<std::size_t>& failed_disks,
                            const std::set<std::size_t>& helper_clusters) {
  const HierParams& p = code.params();
  const std::size_t a = p.local_dim();
  const PrimeField& f = code.field();
  if (failed_cluster >= p.n_b) throw InvalidRepairRequest("failed cluster out of range");
  if (failed_disks.size() != p.d_l + 1) {
    throw InvalidRepairRequest("repair handles exactly d_l + 1 = " + std::to_string(p.d_l + 1) + " failed disks");
  }
  if (*failed_disks.rbegin() >= p.n_l) throw InvalidRepairRequest("failed disk index out of range");
  for (std::size_t d = 0; d < p.n_l; ++d) {
    if (state.is_failed(failed_cluster, d) && !failed_disks.count(d)) {
      throw InvalidRepairRequest("disk " + std::to_string(d) + " is failed but not listed for repair");
    }
  }
  if (helper_clusters.size() != p.d_b) {
    throw InvalidRepairRequest("repair needs exactly d_b = " + std::to_string(p.d_b) + " helper clusters");
  }
  for (std::size_t h : helper_clusters) {
    if (h >= p.n_b || h == failed_cluster) throw InvalidRepairRequest("invalid helper cluster " + std::to_string(h));
    if (state.cluster_has_failures(h)) {
      throw InvalidRepairRequest("helper cluster " + std::to_string(h) + " has failed disks");
    }
  }

  // d_l + 1 failures among n_l disks of which only d_l are parity: one systematic disk must be failed.
  const std::size_t target = *failed_disks.begin();
  if (target >= a) throw InvalidRepairRequest("no systematic disk among the failures");

  std::vector<std::size_t> survivors;
  for (std::size_t d = 0; d < p.n_l; ++d) {
    if (!failed_disks.count(d)) survivors.push_back(d);
  }
  const std::vector<std::size_t> helpers(helper_clusters.begin(), helper_clusters.end());

  const FieldMatrix target_row_t = code.psi().block(failed_cluster * a + target, 0, 1, p.d_prime()).transpose();
  RepairReport report{state, target, {}, 0, survivors.size() * p.d_prime()};

  // Each survivor and each helper disk projects its contents onto psi_{i,t}.
  FieldMatrix rhs(f, 0, 1);
  for (std::size_t m : survivors) rhs = rhs.vstack(disk_row(state, f, failed_cluster, m) * target_row_t);
  for (std::size_t j : helpers) {
    for (std::size_t m = 0; m < a; ++m) rhs = rhs.vstack(disk_row(state, f, j, m) * target_row_t);
    report.helper_symbols[j] = a;
    report.cross_cluster_symbols += a;
  }

  const FieldMatrix lhs = repair_matrix(code, failed_cluster, helpers, survivors);
  FieldMatrix recovered(f, 0, 0);
  try {
    recovered = solve(lhs, rhs).transpose();
  } catch (const Singular&) {
    throw SingularRepairMatrix("repair matrix for cluster " + std::to_string(failed_cluster) + " with helpers " +
                               list(helpers) + " and local disks " + list(survivors) + " is singular");
  }
  report.state.set_disk(failed_cluster, target, recovered.row(0));

  std::vector<std::size_t> known = survivors;
  known.push_back(target);
  std::sort(known.begin(), known.end());
  const FieldMatrix product = cluster_product(report.state, code, failed_cluster, known);
  for (std::size_t d : failed_disks) {
    if (d == target) continue;
    const FieldMatrix row = code.combiner().block(d, 0, 1, a) * product;
    report.state.set_disk(failed_cluster, d, row.row(0));
  }
  return report;
}

std::vector<Element> reconstruct(const ClusterState& state, const PmCode& code,
                                 const std::set<std::size_t>& clusters) {
  const HierParams& p = code.params();
  const std::size_t a = p.local_dim();
  const std::size_t kp = p.k_prime();
  if (clusters.size() < p.k) {
    throw TooFewClusters("reconstruction needs k = " + std::to_string(p.k) + " clusters, got " +
                         std::to_string(clusters.size()));
  }
  std::vector<std::size_t> chosen(clusters.begin(), clusters.end());
  chosen.resize(p.k);

  FieldMatrix products(code.field(), 0, p.d_prime());
  std::vector<std::size_t> psi_rows;
  for (std::size_t c : chosen) {
    if (c >= p.n_b) throw ShapeMismatch("cluster " + std::to_string(c) + " out of range");
    std::vector<std::size_t> live;
    for (std::size_t d = 0; d < p.n_l && live.size() < a; ++d) {
      if (!state.is_failed(c, d)) live.push_back(d);
    }
    if (live.size() < a) {
      throw TooFewSymbols("cluster " + std::to_string(c) + " has fewer than " + std::to_string(a) + " live disks");
    }
    products = products.vstack(cluster_product(state, code, c, live));
    for (std::size_t r = 0; r < a; ++r) psi_rows.push_back(c * a + r);
  }

  const FieldMatrix phi_left = code.phi().select_rows(psi_rows);
  const FieldMatrix delta_left = code.delta().select_rows(psi_rows);
  const FieldMatrix left = products.block(0, 0, kp, kp);
  const FieldMatrix right = products.block(0, kp, kp, p.d_prime() - kp);
  FieldMatrix phi_inv(code.field(), 0, 0);
  try {
    phi_inv = invert(phi_left);
  } catch (const Singular&) {
    throw SingularPhiLeft("Phi restricted to clusters " + list(chosen) + " is singular");
  }
  const FieldMatrix t = phi_inv * right;
  const FieldMatrix s = phi_inv * (left - delta_left * t.transpose());
  return message_symbols(s, t);
}

TradeoffPoint ambr_point(const HierParams& params, const Rational& message_size) {
  params.validate();
  const Rational kp(static_cast<unsigned long long>(params.k_prime()));
  const Rational dp(static_cast<unsigned long long>(params.d_prime()));
  const Rational denom = 2 * kp * dp - kp * kp + kp;
  const Rational per_cluster(static_cast<unsigned long long>(params.d_b * params.local_dim()));
  return {2 * message_size * dp / denom, 2 * message_size * per_cluster / denom};
}

}  // namespace hierstore
