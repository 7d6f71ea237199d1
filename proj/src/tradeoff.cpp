#include "hierstore/tradeoff.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "hierstore/errors.hpp"
#include "hierstore/pm_code.hpp"

namespace hierstore {
namespace {

Rational q(std::size_t v) { return Rational(static_cast<unsigned long long>(v)); }

// Smallest x >= 0 with value(x) >= target, for a continuous nondecreasing
// piecewise-linear value() whose slope only changes at `kinks` and equals
// `tail_slope` past the last one. Empty when the target is never reached.
std::optional<Rational> first_crossing(const std::function<Rational(const Rational&)>& value,
                                       std::vector<Rational> kinks, const Rational& tail_slope,
                                       const Rational& target) {
  kinks.push_back(Rational(0));
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
  std::optional<Rational> prev;
  Rational prev_value;
  for (const Rational& x : kinks) {
    if (x < 0) continue;
    const Rational v = value(x);
    if (v >= target) {
      if (!prev) return x;
      return *prev + (target - prev_value) * (x - *prev) / (v - prev_value);
    }
    prev = x;
    prev_value = v;
  }
  if (tail_slope <= 0) return std::nullopt;
  return *prev + (target - prev_value) / tail_slope;
}

void require_message(const Rational& message_size) {
  if (message_size <= 0) throw InvalidParams("message size must be positive");
}

}  // namespace

Fgh fgh(const HierParams& params, const Rational& message_size, std::size_t i) {
  if (i > params.k) throw InvalidParams("fgh index must satisfy 0 <= i <= k");
  const Rational k = q(params.k);
  const Rational db = q(params.d_b);
  const Rational ir = q(i);
  Fgh out;
  out.f = 2 * message_size * db / ((2 * k - ir - 1) * ir + 2 * k * (db - k + 1));
  out.g = (2 * db - 2 * k + ir + 1) * ir / (2 * db);
  out.h = (db - k + 1 + ir) / db;
  return out;
}

std::vector<Rational> gamma_breakpoints(const HierParams& params, const Rational& message_size) {
  params.validate();
  require_message(message_size);
  std::vector<Rational> out;
  out.reserve(params.k);
  const Rational local_extra = q(params.k * (params.local_dim() - 1));
  for (std::size_t i = 0; i < params.k; ++i) {
    const Fgh v = fgh(params, message_size, i);
    out.push_back(1 / (1 / v.f + local_extra * v.h / message_size));
  }
  return out;
}

ThresholdValue alpha_star(const HierParams& params, const Rational& message_size, const Rational& gamma) {
  if (gamma < 0) throw InfeasibleGamma("gamma must be non-negative");
  const std::vector<Rational> bp = gamma_breakpoints(params, message_size);
  const std::size_t k = params.k;
  const std::size_t a = params.local_dim();
  if (gamma >= bp[0]) return {message_size / q(k * a), 0};
  for (std::size_t i = 1; i < k; ++i) {
    if (gamma >= bp[i]) {
      const Fgh v = fgh(params, message_size, i);
      return {(message_size - v.g * gamma) / (q(k * a) - q(i)), i};
    }
  }
  if (a > 1) {
    const Fgh v = fgh(params, message_size, k);
    return {(message_size - v.g * gamma) / q(k * (a - 1)), k};
  }
  throw InfeasibleGamma("gamma = " + to_string(gamma) + " is below the minimum repair bandwidth " +
                        to_string(bp[k - 1]) + " for n_l - d_l = 1 " + params.describe());
}

Rational mincut(const HierParams& params, const Rational& alpha, const Rational& beta) {
  Rational cut = q((params.local_dim() - 1) * params.k) * alpha;
  for (std::size_t i = 0; i < params.k; ++i) cut += min_of(q(params.d_b - i) * beta, alpha);
  return cut;
}

Rational alpha_star_oracle(const HierParams& params, const Rational& message_size, const Rational& gamma) {
  params.validate();
  require_message(message_size);
  if (gamma < 0) throw Infeasible("gamma must be non-negative");
  const Rational beta = gamma / q(params.d_b);
  std::vector<Rational> kinks;
  for (std::size_t i = 0; i < params.k; ++i) kinks.push_back(q(params.d_b - i) * beta);
  const Rational tail = q((params.local_dim() - 1) * params.k);
  auto cut = [&](const Rational& alpha) { return mincut(params, alpha, beta); };
  auto root = first_crossing(cut, kinks, tail, message_size);
  if (!root) throw Infeasible("no alpha reaches the message size at gamma = " + to_string(gamma));
  return *root;
}

ExtremalPoints extremal_points(const HierParams& params, const Rational& message_size) {
  params.validate();
  require_message(message_size);
  const Rational k = q(params.k);
  const Rational a = q(params.local_dim());
  const Rational db = q(params.d_b);
  ExtremalPoints out;
  out.msr = {message_size / (k * a), message_size * db / (k * (db - k + 1) * a)};
  if (params.local_dim() > 1) out.mbr = TradeoffPoint{message_size / (k * (a - 1)), Rational(0)};
  out.ambr = ambr_point(params, message_size);
  out.msr_exact_beta = message_size / (k * (db + 1 - k) * a);
  return out;
}

Rational dimakis_beta_star(std::size_t n, std::size_t k, std::size_t d, const Rational& message_size,
                           const Rational& alpha) {
  if (k < 1 || d < k || d + 1 > n) throw InvalidParams("need 1 <= k <= d <= n - 1");
  require_message(message_size);
  if (alpha * q(k) < message_size) {
    throw InfeasibleAlpha("alpha = " + to_string(alpha) + " is below M / k = " + to_string(message_size / q(k)));
  }
  std::vector<Rational> kinks;
  for (std::size_t i = 0; i < k; ++i) kinks.push_back(alpha / q(d - i));
  auto lhs = [&](const Rational& beta) {
    Rational s = 0;
    for (std::size_t i = 0; i < k; ++i) s += min_of(alpha, q(d - i) * beta);
    return s;
  };
  auto root = first_crossing(lhs, kinks, Rational(0), message_size);
  if (!root) throw InfeasibleAlpha("alpha = " + to_string(alpha) + " cannot store the message");
  return *root;
}

ChaoParams chao_params(const HierParams& params, std::size_t r, const Rational& beta) {
  params.validate();
  const std::size_t n_b = params.n_b;
  const std::size_t d_b = params.d_b;
  const std::size_t k = params.k;
  const Rational upper = q(n_b - d_b) + q(d_b) / q(d_b - k + 1);
  if (r < n_b - d_b + 1 || q(r) > upper) {
    throw ROutOfRange("r = " + std::to_string(r) + " outside [" + std::to_string(n_b - d_b + 1) + ", " +
                      to_string(upper) + "]");
  }
  BigInt t_c = 0;
  const std::size_t top = std::min(r, n_b - k);
  for (std::size_t i = n_b - d_b + 1; i <= top; ++i) {
    t_c += BigInt(static_cast<unsigned long long>(i + n_b - d_b)) *
           binomial(static_cast<std::int64_t>(n_b - k), static_cast<std::int64_t>(i)) *
           binomial(static_cast<std::int64_t>(k), static_cast<std::int64_t>(r) - static_cast<std::int64_t>(i));
  }
  const Rational shift = q(r + d_b - n_b);
  ChaoParams out;
  out.t_c = t_c;
  out.alpha = q(d_b) * beta / shift;
  const Rational bracket =
      q(n_b * d_b) / q(r) -
      q(d_b) * Rational(t_c) /
          (shift * Rational(binomial(static_cast<std::int64_t>(n_b) - 1, static_cast<std::int64_t>(r) - 1)));
  out.message_size = bracket * q(params.local_dim()) * beta;
  return out;
}

void write_tradeoff_csv(std::ostream& out, const HierParams& params, const Rational& message_size,
                        std::span<const Rational> gammas, std::optional<int> digits) {
  out << "gamma,alpha_star,regime_index\r\n";
  for (const Rational& g : gammas) {
    const ThresholdValue v = alpha_star(params, message_size, g);
    out << format_rational(g, digits) << ',' << format_rational(v.alpha, digits) << ',' << v.regime << "\r\n";
  }
}

}  // namespace hierstore
