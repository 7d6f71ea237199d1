#include "hierstore/opportunistic.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "hierstore/errors.hpp"
#include "hierstore/tradeoff.hpp"

namespace hierstore {
namespace {

Rational q(std::size_t v) { return Rational(static_cast<unsigned long long>(v)); }

const Capacity& beta_for(const BetaMap& betas, std::size_t d) {
  auto it = betas.find(d);
  if (it == betas.end()) throw MissingBeta("no beta given for d = " + std::to_string(d));
  return it->second;
}

// Edmonds-Karp on integer capacities.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adj_(nodes) {}

  void add_edge(std::size_t from, std::size_t to, const BigInt& cap) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0});
  }

  BigInt max_flow(std::size_t s, std::size_t t) {
    BigInt total = 0;
    while (true) {
      std::vector<std::ptrdiff_t> via(adj_.size(), -1);
      std::deque<std::size_t> queue{s};
      std::vector<bool> seen(adj_.size(), false);
      seen[s] = true;
      while (!queue.empty() && !seen[t]) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t e : adj_[u]) {
          const Edge& edge = edges_[e];
          if (edge.cap > 0 && !seen[edge.to]) {
            seen[edge.to] = true;
            via[edge.to] = static_cast<std::ptrdiff_t>(e);
            queue.push_back(edge.to);
          }
        }
      }
      if (!seen[t]) return total;
      BigInt push = -1;
      for (std::size_t v = t; v != s; v = edges_[static_cast<std::size_t>(via[v]) ^ 1].to) {
        const BigInt& cap = edges_[static_cast<std::size_t>(via[v])].cap;
        if (push < 0 || cap < push) push = cap;
      }
      for (std::size_t v = t; v != s; v = edges_[static_cast<std::size_t>(via[v]) ^ 1].to) {
        const auto e = static_cast<std::size_t>(via[v]);
        edges_[e].cap -= push;
        edges_[e ^ 1].cap += push;
      }
      total += push;
    }
  }

 private:
  struct Edge {
    std::size_t to;
    BigInt cap;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace

OppSystem OppSystem::make(std::size_t n, std::size_t k, Rational message_size, std::vector<std::size_t> helper_counts) {
  if (k < 1 || k >= n) throw InvalidParams("need 1 <= k < n");
  if (message_size <= 0) throw InvalidParams("message size must be positive");
  if (helper_counts.empty()) throw InvalidParams("helper count set D must be non-empty");
  std::sort(helper_counts.begin(), helper_counts.end(), std::greater<>());
  if (std::adjacent_find(helper_counts.begin(), helper_counts.end()) != helper_counts.end()) {
    throw InvalidParams("helper counts must be distinct");
  }
  if (helper_counts.back() < k || helper_counts.front() >= n) {
    throw InvalidParams("every helper count d must satisfy k <= d < n");
  }
  return OppSystem(n, k, std::move(message_size), std::move(helper_counts));
}

Rational feasibility_lhs(const OppSystem& sys, const Rational& alpha, const BetaMap& betas) {
  Rational sum = 0;
  for (std::size_t i = 0; i < sys.k(); ++i) {
    Rational term = alpha;
    for (std::size_t d : sys.helper_counts()) {
      const Capacity& b = beta_for(betas, d);
      if (!b.is_unbounded()) term = min_of(term, q(d - i) * b.value());
    }
    sum += term;
  }
  return sum;
}

bool feasible(const OppSystem& sys, const Rational& alpha, const BetaMap& betas) {
  return feasibility_lhs(sys, alpha, betas) >= sys.message_size();
}

std::optional<Rational> alpha_o(std::size_t k, std::size_t d1, const Rational& message_size) {
  if (k < 1 || d1 < k) throw InvalidParams("need d_1 >= k >= 1");
  if (k == 1) return std::nullopt;
  const Rational s = q(d1 - k + 2);
  return message_size * s / (q(k) * s - 1);
}

std::map<std::size_t, Rational> beta_tilde(const OppSystem& sys, const Rational& alpha) {
  const std::size_t d1 = sys.d1();
  const Rational base = dimakis_beta_star(sys.n(), sys.k(), d1, sys.message_size(), alpha);
  std::map<std::size_t, Rational> out;
  for (std::size_t d : sys.helper_counts()) out[d] = q(d1 - sys.k() + 1) / q(d - sys.k() + 1) * base;
  return out;
}

Rational beta_tilde_oracle(const OppSystem& sys, const Rational& alpha, std::size_t d_secondary) {
  if (d_secondary < sys.k() || d_secondary > sys.d1()) throw InvalidParams("need k <= d_secondary <= d_1");
  const std::size_t d1 = sys.d1();
  const Rational base = dimakis_beta_star(sys.n(), sys.k(), d1, sys.message_size(), alpha);
  // Smallest beta with (d_secondary - i) beta >= min(alpha, (d_1 - i) beta*) for every i,
  // i.e. the largest of the per-term bounds.
  Rational best = 0;
  for (std::size_t i = 0; i < sys.k(); ++i) {
    best = max_of(best, min_of(alpha, q(d1 - i) * base) / q(d_secondary - i));
  }
  return best;
}

std::vector<std::size_t> worst_case_sequence(const OppSystem& sys, const BetaMap& betas) {
  std::vector<std::size_t> seq;
  for (std::size_t i = 0; i < sys.k(); ++i) {
    std::size_t pick = sys.d1();
    std::optional<Rational> best;
    for (std::size_t d : sys.helper_counts()) {
      const Capacity& b = beta_for(betas, d);
      if (b.is_unbounded()) continue;
      const Rational v = q(d - i) * b.value();
      if (!best || v < *best) {
        best = v;
        pick = d;
      }
    }
    seq.push_back(pick);
  }
  return seq;
}

Rational flowgraph_mincut(const OppSystem& sys, const Rational& alpha, const BetaMap& betas,
                          std::span<const std::size_t> failure_sequence) {
  const std::size_t n = sys.n();
  const std::size_t k = sys.k();
  if (n > kFlowGraphMaxNodes || k > kFlowGraphMaxK || sys.helper_counts().size() > kFlowGraphMaxHelperCounts) {
    throw InstanceTooLarge("flow graph limited to n <= 6, k <= 3, |D| <= 2");
  }
  if (failure_sequence.size() != k) throw InvalidParams("failure sequence must list k helper counts");
  const auto& counts = sys.helper_counts();
  for (std::size_t e : failure_sequence) {
    if (std::find(counts.begin(), counts.end(), e) == counts.end()) {
      throw InvalidParams("failure sequence uses d = " + std::to_string(e) + " outside D");
    }
  }
  if (alpha < 0) throw InvalidParams("alpha must be non-negative");

  // Scale every finite capacity to an integer.
  BigInt scale = boost::multiprecision::denominator(alpha);
  BigInt finite_total = 0;
  for (std::size_t e : failure_sequence) {
    const Capacity& b = beta_for(betas, e);
    if (!b.is_unbounded()) scale = boost::multiprecision::lcm(scale, boost::multiprecision::denominator(b.value()));
  }
  auto scaled = [&](const Rational& v) {
    return BigInt(boost::multiprecision::numerator(v) * (scale / boost::multiprecision::denominator(v)));
  };
  const BigInt alpha_cap = scaled(alpha);

  // Storage nodes 0..n+k-1, each split into in (2v) and out (2v+1); source and collector last.
  const std::size_t nodes = n + k;
  const std::size_t source = 2 * nodes;
  const std::size_t collector = source + 1;
  struct PendingEdge {
    std::size_t from, to;
    std::optional<BigInt> cap;
  };
  std::vector<PendingEdge> pending;
  for (std::size_t v = 0; v < nodes; ++v) {
    pending.push_back({2 * v, 2 * v + 1, alpha_cap});
    finite_total += alpha_cap;
  }
  for (std::size_t v = 0; v < n; ++v) pending.push_back({source, 2 * v, std::nullopt});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t newcomer = n + i;
    const std::size_t e = failure_sequence[i];
    const Capacity& b = beta_for(betas, e);
    for (std::size_t h = newcomer - e; h < newcomer; ++h) {
      if (b.is_unbounded()) {
        pending.push_back({2 * h + 1, 2 * newcomer, std::nullopt});
      } else {
        const BigInt c = scaled(b.value());
        pending.push_back({2 * h + 1, 2 * newcomer, c});
        finite_total += c;
      }
    }
    pending.push_back({2 * newcomer + 1, collector, std::nullopt});
  }
  const BigInt infinite = finite_total + 1;
  FlowNetwork net(collector + 1);
  for (const auto& e : pending) net.add_edge(e.from, e.to, e.cap ? *e.cap : infinite);
  const BigInt flow = net.max_flow(source, collector);
  return Rational(flow) / Rational(scale);
}

std::vector<std::vector<std::size_t>> all_failure_sequences(const OppSystem& sys) {
  const auto& counts = sys.helper_counts();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> pos(sys.k(), 0);
  while (true) {
    std::vector<std::size_t> seq;
    for (std::size_t p : pos) seq.push_back(counts[p]);
    out.push_back(std::move(seq));
    std::size_t i = pos.size();
    while (i > 0 && pos[i - 1] + 1 == counts.size()) pos[--i] = 0;
    if (i == 0) return out;
    ++pos[i - 1];
  }
}

void write_loss_curve_csv(std::ostream& out, const OppSystem& sys, std::span<const Rational> alphas,
                          std::optional<int> digits) {
  if (sys.helper_counts().size() < 2) throw InvalidParams("loss curve needs at least two helper counts");
  const std::size_t d1 = sys.d1();
  const std::size_t d2 = sys.helper_counts()[1];
  out << "alpha,beta_d1_star,beta_d2_star,beta_d2_tilde\r\n";
  for (const Rational& a : alphas) {
    const Rational b1 = dimakis_beta_star(sys.n(), sys.k(), d1, sys.message_size(), a);
    const Rational b2 = dimakis_beta_star(sys.n(), sys.k(), d2, sys.message_size(), a);
    const Rational tilde = beta_tilde(sys, a).at(d2);
    out << format_rational(a, digits) << ',' << format_rational(b1, digits) << ',' << format_rational(b2, digits) << ','
        << format_rational(tilde, digits) << "\r\n";
  }
}

}  // namespace hierstore
