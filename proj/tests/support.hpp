#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "paynet/graph.hpp"

namespace testing_support {

using paynet::Rating;
using paynet::graph::PaymentGraph;

inline std::string node_name(std::size_t i) { return "v" + std::to_string(i); }

// Unit-weight graph on nodes 0..n-1; ratings default to NA.
inline PaymentGraph make_graph(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& arcs,
                               const std::vector<Rating>& ratings = {}, const std::vector<double>& weights = {}) {
  std::vector<paynet::FirmMeta> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].id = node_name(i);
    nodes[i].status = paynet::Status::customer;
    nodes[i].rating = i < ratings.size() ? ratings[i] : Rating::NA;
  }
  std::vector<paynet::graph::Edge> edges;
  for (std::size_t e = 0; e < arcs.size(); ++e)
    edges.push_back({arcs[e].first, arcs[e].second, e < weights.size() ? weights[e] : 1.0});
  return PaymentGraph::from_edges(std::move(nodes), std::move(edges));
}

// Each ordered pair (u != v) present with probability p.
inline PaymentGraph random_digraph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = 0; v < n; ++v)
      if (u != v && coin(rng)) arcs.emplace_back(u, v);
  return make_graph(n, arcs);
}

// Brute-force minimum agony: ranks range over {0..n-1}^n, which always
// contains an optimum since a minimizer can be compressed to n levels.
inline std::uint64_t brute_force_agony(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int64_t> r(n, 0);
  const auto edges = g.edges();
  std::uint64_t best = UINT64_MAX;
  while (true) {
    std::uint64_t a = 0;
    for (const auto& e : edges) {
      const std::int64_t d = r[e.src] - r[e.dst];
      if (d >= 0) a += static_cast<std::uint64_t>(d + 1);
    }
    best = std::min(best, a);
    std::size_t i = 0;
    while (i < n && ++r[i] == static_cast<std::int64_t>(n)) r[i++] = 0;
    if (i == n) break;
  }
  return edges.empty() ? 0 : best;
}

// Directed modularity straight from the definition, edge by edge.
inline double modularity_oracle(const PaymentGraph& g, const std::vector<std::uint32_t>& c) {
  const auto edges = g.edges();
  const double m = static_cast<double>(edges.size());
  std::vector<double> kout(g.node_count(), 0), kin(g.node_count(), 0);
  for (const auto& e : edges) {
    kout[e.src] += 1;
    kin[e.dst] += 1;
  }
  double q = 0;
  for (const auto& e : edges)
    if (c[e.src] == c[e.dst]) q += 1;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (std::size_t j = 0; j < g.node_count(); ++j)
      if (c[i] == c[j]) q -= kout[i] * kin[j] / m;
  return q / m;
}

// Calls f(labels) for every set partition of n elements (restricted growth strings).
template <class F>
void set_partitions_from(std::vector<std::uint32_t>& a, std::size_t i, std::uint32_t used, F& f) {
  if (i == a.size()) {
    f(a);
    return;
  }
  for (std::uint32_t c = 0; c <= used; ++c) {
    a[i] = c;
    set_partitions_from(a, i + 1, std::max(used, c + 1), f);
  }
}

template <class F>
void for_each_set_partition(std::size_t n, F f) {
  std::vector<std::uint32_t> a(n, 0);
  set_partitions_from(a, 0, 0, f);
}

// Exact hypergeometric tails by summing integer binomial products.
inline unsigned __int128 binom128(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline long double hypergeom_tail_oracle(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N,
                                         bool upper) {
  unsigned __int128 num = 0;
  for (std::uint64_t i = 0; i <= n; ++i) {
    if (upper ? i < k : i > k) continue;
    if (i > K || n - i > N - K) continue;
    num += binom128(K, i) * binom128(N - K, n - i);
  }
  return static_cast<long double>(num) / static_cast<long double>(binom128(N, n));
}

// Mann-Whitney U (pairs a > b, ties 1/2) for an explicit split.
inline double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

struct EnumeratedP {
  double greater = 0, less = 0, two_sided = 0;
};

// Permutation p-values by enumerating every way to choose |a| of the pooled values.
inline EnumeratedP mann_whitney_enumerated(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double u_obs = u_statistic(a, b);
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(na), true);
  std::size_t total = 0, ge = 0, le = 0;
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
    const double u = u_statistic(x, y);
    ++total;
    if (u >= u_obs - 1e-9) ++ge;
    if (u <= u_obs + 1e-9) ++le;
  } while (std::next_permutation(pick.begin(), pick.end()));
  EnumeratedP p;
  p.greater = static_cast<double>(ge) / static_cast<double>(total);
  p.less = static_cast<double>(le) / static_cast<double>(total);
  p.two_sided = std::min(1.0, 2.0 * std::min(p.greater, p.less));
  return p;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::max(std::sqrt(std::max(na, nb)), 1e-12);
  return std::sqrt(diff) / scale;
}

}  // namespace testing_support
