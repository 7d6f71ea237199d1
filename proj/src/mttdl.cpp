#include "hierstore/mttdl.hpp"

#include "hierstore/errors.hpp"

namespace hierstore {
namespace {

Rational q(std::size_t v) { return Rational(static_cast<unsigned long long>(v)); }
Rational fact(std::size_t v) { return Rational(factorial(v)); }

}  // namespace

std::string to_string(RepairModel model) { return model == RepairModel::chen ? "chen" : "angus"; }

RepairModel parse_repair_model(const std::string& text) {
  if (text == "chen") return RepairModel::chen;
  if (text == "angus") return RepairModel::angus;
  throw InvalidParams("unknown repair model '" + text + "' (expected chen or angus)");
}

void MarkovSpec::validate() const {
  if (k < 1 || n <= k) throw InvalidParams("need n > k >= 1");
  if (lambda <= 0) throw InvalidParams("lambda must be positive");
  if (mu < 0) throw InvalidParams("mu must be non-negative");
}

Rational repair_rate(const MarkovSpec& spec, std::size_t failed) {
  if (failed < 1 || failed + spec.k > spec.n) throw InvalidParams("failed count must be in [1, n - k]");
  const Rational speedup = spec.opportunistic ? q(spec.n - spec.k - failed + 1) : Rational(1);
  const Rational crews = spec.model == RepairModel::angus ? q(failed) : Rational(1);
  return crews * speedup * spec.mu;
}

Rational mttdl_closed_form(const MarkovSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t k = spec.k;
  const bool angus = spec.model == RepairModel::angus;
  Rational total = 0;
  for (std::size_t l = 0; l <= n - k; ++l) {
    Rational inner = 0;
    for (std::size_t i = 0; i <= n - k - l; ++i) {
      Rational term = pow(spec.mu, i) / pow(spec.lambda, i + 1) * fact(n - l - i - 1);
      if (spec.opportunistic) term /= fact(n - l - k - i);
      if (angus) term *= fact(i);
      inner += term;
    }
    const Rational outer = spec.opportunistic ? fact(n - k - l) / fact(n - l) : 1 / fact(n - l);
    total += outer * inner;
  }
  return total;
}

Rational mttdl_chain_oracle(const MarkovSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t k = spec.k;
  // Unknowns T_m for m = n, n-1, ..., k (index j = n - m):
  //   (m lambda + r_j) T_m - m lambda T_{m-1} - r_j T_{m+1} = 1, with T_{k-1} = 0.
  const std::size_t size = n - k + 1;
  std::vector<Rational> lower(size), diag(size), upper(size), rhs(size, Rational(1));
  for (std::size_t j = 0; j < size; ++j) {
    const std::size_t m = n - j;
    const Rational fail = q(m) * spec.lambda;
    const Rational rep = j == 0 ? Rational(0) : repair_rate(spec, j);
    diag[j] = fail + rep;
    upper[j] = -fail;  // couples to T_{m-1}, index j + 1
    lower[j] = -rep;   // couples to T_{m+1}, index j - 1
  }
  // Thomas algorithm, forward sweep then back substitution.
  for (std::size_t j = 1; j < size; ++j) {
    const Rational w = lower[j] / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  std::vector<Rational> t(size);
  t[size - 1] = rhs[size - 1] / diag[size - 1];
  for (std::size_t j = size - 1; j-- > 0;) t[j] = (rhs[j] - upper[j] * t[j + 1]) / diag[j];
  return t[0];
}

Rational mttdl_asymptotic(const MarkovSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t k = spec.k;
  Rational base = fact(k - 1) / fact(n) * pow(spec.mu, n - k) / pow(spec.lambda, n - k + 1);
  const Rational gain = fact(n - k);
  if (spec.model == RepairModel::angus) base *= gain;
  if (spec.opportunistic) base *= gain;
  return base;
}

BigInt improvement_factor(std::size_t n, std::size_t k) {
  if (k < 1 || n <= k) throw InvalidParams("need n > k >= 1");
  return factorial(n - k);
}

Rational tridiag_det(std::span<const Rational> b, std::span<const Rational> c, const Rational& lambda,
                     const Rational& mu) {
  if (b.size() != c.size()) throw ShapeMismatch("b and c must have the same length");
  const std::size_t l = b.size();
  Rational total = 0;
  for (std::size_t i = 0; i <= l; ++i) {
    Rational term = pow(mu, l - i) * pow(lambda, i);
    for (std::size_t r = 0; r < l - i; ++r) term *= b[r];
    for (std::size_t r = l - i; r < l; ++r) term *= c[r];
    total += term;
  }
  return total;
}

MttdlComparison compare_mttdl(const MarkovSpec& spec) {
  return {spec, mttdl_closed_form(spec), mttdl_chain_oracle(spec)};
}

std::vector<MttdlComparison> mttdl_sweep(std::size_t n_max, const Rational& lambda, std::span<const Rational> mus) {
  std::vector<MttdlComparison> out;
  for (std::size_t n = 2; n <= n_max; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      for (RepairModel model : {RepairModel::chen, RepairModel::angus}) {
        for (bool opp : {false, true}) {
          for (const Rational& mu : mus) out.push_back(compare_mttdl({n, k, lambda, mu, model, opp}));
        }
      }
    }
  }
  return out;
}

void write_mttdl_csv(std::ostream& out, std::span<const MttdlComparison> rows, std::optional<int> digits) {
  out << "n,k,lambda,mu,model,opportunistic,mttdl_closed,mttdl_oracle,match_flag\r\n";
  for (const auto& r : rows) {
    out << r.spec.n << ',' << r.spec.k << ',' << format_rational(r.spec.lambda, digits) << ','
        << format_rational(r.spec.mu, digits) << ',' << to_string(r.spec.model) << ','
        << (r.spec.opportunistic ? "true" : "false") << ',' << format_rational(r.closed, digits) << ','
        << format_rational(r.oracle, digits) << ',' << (r.match() ? "true" : "false") << "\r\n";
  }
}

}  // namespace hierstore
