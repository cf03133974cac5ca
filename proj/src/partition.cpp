#include "paynet/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace paynet::partition {

using graph::Arc;
using graph::NodeId;
using graph::PaymentGraph;

std::vector<std::size_t> RankedPartition::group_sizes() const {
  std::vector<std::size_t> sizes(n_groups, 0);
  for (std::uint32_t g : assignment) ++sizes[g - 1];
  return sizes;
}

namespace {

// Maps arbitrary labels to 0..k-1 in order of first appearance.
std::vector<std::uint32_t> densify(std::span<const std::uint32_t> labels, std::size_t* k) {
  std::map<std::uint32_t, std::uint32_t> ids;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<std::uint32_t>(ids.size()));
    out[i] = it->second;
  }
  *k = ids.size();
  return out;
}

// Renumbers groups 1..M by descending size, ties by smallest member.
std::vector<std::uint32_t> renumber_by_size(std::span<const std::uint32_t> labels, std::uint32_t* n_groups) {
  std::size_t k = 0;
  const std::vector<std::uint32_t> dense = densify(labels, &k);
  std::vector<std::size_t> size(k, 0);
  for (std::uint32_t c : dense) ++size[c];
  std::vector<std::uint32_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  // Dense ids already follow first appearance, i.e. smallest member.
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return size[a] > size[b]; });
  std::vector<std::uint32_t> new_id(k);
  for (std::uint32_t i = 0; i < k; ++i) new_id[order[i]] = i + 1;
  std::vector<std::uint32_t> out(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) out[i] = new_id[dense[i]];
  *n_groups = static_cast<std::uint32_t>(k);
  return out;
}

}  // namespace

double modularity(const PaymentGraph& g, std::span<const std::uint32_t> groups, bool weighted) {
  if (groups.size() != g.node_count()) throw DomainError("modularity: every node needs a group");
  std::size_t k = 0;
  const std::vector<std::uint32_t> c = densify(groups, &k);
  std::vector<double> inside(k, 0.0), k_out(k, 0.0), k_in(k, 0.0);
  double m = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (const Arc& a : g.out_arcs(u)) {
      const double w = weighted ? a.weight : 1.0;
      m += w;
      k_out[c[u]] += w;
      k_in[c[a.node]] += w;
      if (c[u] == c[a.node]) inside[c[u]] += w;
    }
  if (m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < k; ++i) q += inside[i] - k_in[i] * k_out[i] / m;
  return q / m;
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

struct WeightedGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out, in;
  std::vector<double> self;
  std::vector<double> k_out, k_in;
  double m = 0.0;

  void finish() {
    k_out.assign(n, 0.0);
    k_in.assign(n, 0.0);
    m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      k_out[i] += self[i];
      k_in[i] += self[i];
      m += self[i];
      for (const auto& [j, w] : out[i]) {
        k_out[i] += w;
        k_in[j] += w;
        m += w;
      }
    }
  }
};

WeightedGraph from_payment_graph(const PaymentGraph& g, bool weighted) {
  WeightedGraph w;
  w.n = g.node_count();
  w.out.resize(w.n);
  w.in.resize(w.n);
  w.self.assign(w.n, 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (const Arc& a : g.out_arcs(u)) {
      const double x = weighted ? a.weight : 1.0;
      w.out[u].emplace_back(a.node, x);
      w.in[a.node].emplace_back(u, x);
    }
  w.finish();
  return w;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm, std::size_t k) {
  WeightedGraph a;
  a.n = k;
  a.out.resize(k);
  a.in.resize(k);
  a.self.assign(k, 0.0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> acc;
  for (std::size_t i = 0; i < g.n; ++i) {
    a.self[comm[i]] += g.self[i];
    for (const auto& [j, w] : g.out[i]) {
      if (comm[i] == comm[j])
        a.self[comm[i]] += w;
      else
        acc[{comm[i], comm[j]}] += w;
    }
  }
  for (const auto& [key, w] : acc) {
    a.out[key.first].emplace_back(key.second, w);
    a.in[key.second].emplace_back(key.first, w);
  }
  a.finish();
  return a;
}

constexpr double kTie = 1e-12;

// Best-community sweeps over a seeded node order. Returns the number of moves.
std::size_t local_moves(const WeightedGraph& g, std::vector<std::uint32_t>& comm, std::mt19937_64& rng,
                        std::size_t max_sweeps) {
  const double m = g.m;
  std::vector<double> tot_out(g.n, 0.0), tot_in(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    tot_out[comm[i]] += g.k_out[i];
    tot_in[comm[i]] += g.k_in[i];
  }
  std::vector<std::uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(g.n, 0.0);
  std::vector<std::uint32_t> touched;
  std::size_t moves = 0;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    std::size_t sweep_moves = 0;
    for (std::uint32_t i : order) {
      const std::uint32_t c0 = comm[i];
      touched.clear();
      auto add = [&](std::uint32_t j, double w) {
        const std::uint32_t c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      };
      for (const auto& [j, w] : g.out[i]) add(j, w);
      for (const auto& [j, w] : g.in[i]) add(j, w);

      tot_out[c0] -= g.k_out[i];
      tot_in[c0] -= g.k_in[i];
      auto gain = [&](std::uint32_t c) {
        return link[c] / m - (g.k_out[i] * tot_in[c] + g.k_in[i] * tot_out[c]) / (m * m);
      };
      std::uint32_t best = c0;
      double best_gain = gain(c0);
      for (std::uint32_t c : touched) {
        if (c == c0) continue;
        const double gc = gain(c);
        if (gc > best_gain + kTie || (std::abs(gc - best_gain) <= kTie && c < best)) {
          best = c;
          best_gain = gc;
        }
      }
      tot_out[best] += g.k_out[i];
      tot_in[best] += g.k_in[i];
      comm[i] = best;
      if (best != c0) ++sweep_moves;
      for (std::uint32_t c : touched) link[c] = 0.0;
    }
    moves += sweep_moves;
    if (sweep_moves == 0) break;
  }
  return moves;
}

RankedPartition louvain_once(const PaymentGraph& pg, const LouvainOptions& options, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const WeightedGraph base = from_payment_graph(pg, options.weighted);
  RankedPartition result;
  result.seed = seed;
  std::vector<std::uint32_t> node_comm(base.n);
  std::iota(node_comm.begin(), node_comm.end(), 0);
  if (base.m == 0.0) {
    std::fill(node_comm.begin(), node_comm.end(), 0);
  } else {
    std::size_t n_comm = base.n;
    for (int round = 0; round < 16; ++round) {
      WeightedGraph level = aggregate(base, node_comm, n_comm);
      std::size_t round_moves = 0;
      while (true) {
        std::vector<std::uint32_t> comm(level.n);
        std::iota(comm.begin(), comm.end(), 0);
        const std::size_t moved = local_moves(level, comm, rng, options.max_sweeps);
        ++result.levels;
        result.moves += moved;
        round_moves += moved;
        if (moved == 0) break;
        std::size_t k = 0;
        const std::vector<std::uint32_t> dense = densify(comm, &k);
        for (std::uint32_t& c : node_comm) c = dense[c];
        level = aggregate(level, dense, k);
      }
      // Polish on the original nodes so that no single-node move helps.
      node_comm = densify(node_comm, &n_comm);
      std::vector<std::uint32_t> comm = node_comm;
      const std::size_t moved = local_moves(base, comm, rng, options.max_sweeps);
      result.moves += moved;
      node_comm = densify(comm, &n_comm);
      if (moved == 0 || round_moves == 0) break;
    }
  }
  result.assignment = renumber_by_size(node_comm, &result.n_groups);
  result.score = modularity(pg, result.assignment, options.weighted);
  if (result.score < 0.0) {
    std::fill(result.assignment.begin(), result.assignment.end(), 1);
    result.n_groups = result.assignment.empty() ? 0 : 1;
    result.score = 0.0;
  }
  return result;
}

}  // namespace

RankedPartition louvain(const PaymentGraph& g, const LouvainOptions& options) {
  const std::size_t runs = std::max<std::size_t>(1, options.restarts);
  if (runs == 1) return louvain_once(g, options, options.seed);
  std::vector<std::future<RankedPartition>> jobs;
  for (std::size_t r = 0; r < runs; ++r)
    jobs.push_back(std::async(std::launch::async, louvain_once, std::cref(g), std::cref(options), options.seed + r));
  RankedPartition best;
  bool first = true;
  for (auto& job : jobs) {
    RankedPartition p = job.get();
    if (first || p.score > best.score) best = std::move(p);
    first = false;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Agony

std::uint64_t agony(const PaymentGraph& g, std::span<const std::int64_t> ranks) {
  if (ranks.size() != g.node_count()) throw DomainError("agony: every node needs a rank");
  std::uint64_t a = 0;
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (const Arc& arc : g.out_arcs(u)) {
      const std::int64_t d = ranks[u] - ranks[arc.node];
      if (d >= 0) a += static_cast<std::uint64_t>(d + 1);
    }
  return a;
}

namespace {

std::vector<std::int64_t> exact_agony_ranks(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  if (n > kExactAgonyLimit)
    throw DomainError("exact agony supports at most " + std::to_string(kExactAgonyLimit) + " nodes");
  if (n == 0) return {};
  const std::uint32_t full = (1u << n) - 1;
  std::vector<std::uint32_t> in_mask(n, 0);
  for (NodeId u = 0; u < n; ++u)
    for (const Arc& a : g.out_arcs(u)) in_mask[a.node] |= 1u << u;

  // Levels are stacked bottom-up; S holds the nodes placed so far and the new
  // top level is S \ P. An edge u->v pays one unit for every level l with
  // r(v) <= l <= r(u), i.e. for every step where v is placed and u is not
  // below the new level.
  constexpr std::uint32_t kInf = UINT32_MAX;
  std::vector<std::uint32_t> best(full + 1, kInf), arg(full + 1, 0);
  best[0] = 0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    for (std::uint32_t p = (s - 1) & s;; p = (p - 1) & s) {
      if (best[p] != kInf) {
        std::uint32_t cost = best[p];
        for (std::uint32_t rest = s; rest; rest &= rest - 1) {
          const int v = std::countr_zero(rest);
          cost += static_cast<std::uint32_t>(std::popcount(in_mask[v] & ~p));
        }
        if (cost < best[s]) {
          best[s] = cost;
          arg[s] = p;
        }
      }
      if (p == 0) break;
    }
  }
  std::vector<std::uint32_t> levels;
  for (std::uint32_t s = full; s; s = arg[s]) levels.push_back(s & ~arg[s]);
  std::vector<std::int64_t> ranks(n, 0);
  const auto top = static_cast<std::int64_t>(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l)
    for (std::uint32_t rest = levels[l]; rest; rest &= rest - 1)
      ranks[static_cast<std::size_t>(std::countr_zero(rest))] = top - static_cast<std::int64_t>(l);
  return ranks;
}

// Longest-path layering of the DAG formed by edges u->v with pos[u] < pos[v],
// processed in increasing pos.
std::vector<std::int64_t> layer_by_order(const PaymentGraph& g, const std::vector<NodeId>& order) {
  std::vector<std::size_t> pos(g.node_count());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  std::vector<std::int64_t> r(g.node_count(), 1);
  for (NodeId v : order)
    for (const Arc& a : g.in_arcs(v))
      if (pos[a.node] < pos[v]) r[v] = std::max(r[v], r[a.node] + 1);
  return r;
}

// Topological order of the SCC condensation; inside a component the nodes
// keep their id order.
std::vector<NodeId> condensation_order(const PaymentGraph& g, const graph::Components& scc) {
  const std::size_t k = scc.count();
  std::vector<std::vector<std::uint32_t>> succ(k);
  std::vector<std::size_t> indeg(k, 0);
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (const Arc& a : g.out_arcs(u)) {
      const std::uint32_t cu = scc.label[u], cv = scc.label[a.node];
      if (cu != cv) {
        succ[cu].push_back(cv);
        ++indeg[cv];
      }
    }
  std::vector<std::uint32_t> queue;
  for (std::uint32_t c = 0; c < k; ++c)
    if (indeg[c] == 0) queue.push_back(c);
  std::vector<std::size_t> comp_pos(k);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t c = queue[head];
    comp_pos[c] = head;
    for (std::uint32_t d : succ[c])
      if (--indeg[d] == 0) queue.push_back(d);
  }
  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return comp_pos[scc.label[a]] < comp_pos[scc.label[b]]; });
  return order;
}

// Eades-Lin-Smyth feedback-arc ordering: peel sinks to the back, sources to
// the front, otherwise the node with the largest out-minus-in degree.
std::vector<NodeId> els_order(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int64_t> outd(n), ind(n);
  std::vector<bool> gone(n, false);
  std::set<std::pair<std::int64_t, NodeId>> by_delta;  // (-delta, node)
  for (NodeId v = 0; v < n; ++v) {
    outd[v] = static_cast<std::int64_t>(g.out_degree(v));
    ind[v] = static_cast<std::int64_t>(g.in_degree(v));
    by_delta.insert({-(outd[v] - ind[v]), v});
  }
  std::vector<NodeId> front, back, sinks, sources;
  for (NodeId v = 0; v < n; ++v) {
    if (outd[v] == 0)
      sinks.push_back(v);
    else if (ind[v] == 0)
      sources.push_back(v);
  }
  auto remove = [&](NodeId v) {
    gone[v] = true;
    by_delta.erase({-(outd[v] - ind[v]), v});
    for (const Arc& a : g.out_arcs(v)) {
      const NodeId w = a.node;
      if (gone[w]) continue;
      by_delta.erase({-(outd[w] - ind[w]), w});
      --ind[w];
      by_delta.insert({-(outd[w] - ind[w]), w});
      if (ind[w] == 0 && outd[w] > 0) sources.push_back(w);
    }
    for (const Arc& a : g.in_arcs(v)) {
      const NodeId w = a.node;
      if (gone[w]) continue;
      by_delta.erase({-(outd[w] - ind[w]), w});
      --outd[w];
      by_delta.insert({-(outd[w] - ind[w]), w});
      if (outd[w] == 0) sinks.push_back(w);
    }
  };
  std::size_t placed = 0;
  while (placed < n) {
    if (!sinks.empty()) {
      const NodeId v = sinks.back();
      sinks.pop_back();
      if (gone[v]) continue;
      back.push_back(v);
      remove(v);
    } else if (!sources.empty()) {
      const NodeId v = sources.back();
      sources.pop_back();
      if (gone[v] || outd[v] == 0) continue;
      front.push_back(v);
      remove(v);
    } else {
      const NodeId v = by_delta.begin()->second;
      front.push_back(v);
      remove(v);
    }
    ++placed;
  }
  front.insert(front.end(), back.rbegin(), back.rend());
  return front;
}

// Cost of node v at rank x given the other ranks.
std::uint64_t node_cost(const PaymentGraph& g, const std::vector<std::int64_t>& r, NodeId v, std::int64_t x) {
  std::uint64_t c = 0;
  for (const Arc& a : g.out_arcs(v))
    if (x >= r[a.node]) c += static_cast<std::uint64_t>(x - r[a.node] + 1);
  for (const Arc& a : g.in_arcs(v))
    if (r[a.node] >= x) c += static_cast<std::uint64_t>(r[a.node] - x + 1);
  return c;
}

// Moves every node to a rank minimizing its own cost. The cost is a sum of
// hinges with kinks at r(w) - 1 (out-neighbours) and r(u) + 1 (in-neighbours);
// its right slope at x is #{out kinks <= x} - #{in kinks > x}.
bool single_node_pass(const PaymentGraph& g, std::vector<std::int64_t>& r) {
  bool improved = false;
  std::vector<std::int64_t> out_k, in_k;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.out_degree(v) + g.in_degree(v) == 0) continue;
    out_k.clear();
    in_k.clear();
    for (const Arc& a : g.out_arcs(v)) out_k.push_back(r[a.node] - 1);
    for (const Arc& a : g.in_arcs(v)) in_k.push_back(r[a.node] + 1);
    std::sort(out_k.begin(), out_k.end());
    std::sort(in_k.begin(), in_k.end());
    std::vector<std::int64_t> cand(out_k);
    cand.insert(cand.end(), in_k.begin(), in_k.end());
    std::sort(cand.begin(), cand.end());
    // Smallest kink with non-negative right slope is a minimizer.
    std::int64_t x = cand.back();
    for (std::int64_t c : cand) {
      const auto le = std::upper_bound(out_k.begin(), out_k.end(), c) - out_k.begin();
      const auto gt = in_k.end() - std::upper_bound(in_k.begin(), in_k.end(), c);
      if (le - gt >= 0) {
        x = c;
        break;
      }
    }
    if (x == r[v]) continue;
    const std::uint64_t now = node_cost(g, r, v, r[v]);
    const std::uint64_t then = node_cost(g, r, v, x);
    if (then < now) {
      r[v] = x;
      improved = true;
    }
  }
  return improved;
}

void compress(std::vector<std::int64_t>& r) {
  std::vector<std::int64_t> values(r);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  for (std::int64_t& x : r) x = std::lower_bound(values.begin(), values.end(), x) - values.begin() + 1;
}

// Merges adjacent levels t and t+1 while that lowers agony: forward edges
// t -> t+1 start paying 1, backward edges spanning the boundary pay 1 less.
bool merge_pass(const PaymentGraph& g, std::vector<std::int64_t>& r) {
  bool improved = false;
  while (true) {
    compress(r);
    const std::int64_t levels = r.empty() ? 0 : *std::max_element(r.begin(), r.end());
    if (levels < 2) break;
    std::vector<std::int64_t> delta(static_cast<std::size_t>(levels) + 2, 0);
    std::vector<std::int64_t> span(static_cast<std::size_t>(levels) + 2, 0);
    for (NodeId u = 0; u < g.node_count(); ++u)
      for (const Arc& a : g.out_arcs(u)) {
        const std::int64_t ru = r[u], rv = r[a.node];
        if (rv == ru + 1) ++delta[static_cast<std::size_t>(ru)];
        if (rv < ru) {
          ++span[static_cast<std::size_t>(rv)];
          --span[static_cast<std::size_t>(ru)];
        }
      }
    std::int64_t best = 0, best_t = -1, running = 0;
    for (std::int64_t t = 1; t < levels; ++t) {
      running += span[static_cast<std::size_t>(t)];
      const std::int64_t d = delta[static_cast<std::size_t>(t)] - running;
      if (d < best) {
        best = d;
        best_t = t;
      }
    }
    if (best_t < 0) break;
    for (std::int64_t& x : r)
      if (x > best_t) --x;
    improved = true;
  }
  return improved;
}

// Greedy packing of edge-disjoint cycles; each cycle of length L forces at
// least L units of agony, so the covered edge count bounds A* from below.
std::uint64_t cycle_packing_bound(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<NodeId>> out(n);
  for (NodeId u = 0; u < n; ++u)
    for (const Arc& a : g.out_arcs(u)) out[u].push_back(a.node);
  std::vector<std::size_t> on_path(n, SIZE_MAX);
  std::vector<bool> dead(n, false);
  std::uint64_t covered = 0;
  std::vector<NodeId> path;
  for (NodeId s = 0; s < n; ++s) {
    path.clear();
    if (dead[s]) continue;
    path.push_back(s);
    on_path[s] = 0;
    while (!path.empty()) {
      const NodeId u = path.back();
      while (!out[u].empty() && dead[out[u].back()]) out[u].pop_back();
      if (out[u].empty()) {
        dead[u] = true;
        on_path[u] = SIZE_MAX;
        path.pop_back();
        if (!path.empty()) out[path.back()].pop_back();
        continue;
      }
      const NodeId w = out[u].back();
      if (on_path[w] == SIZE_MAX) {
        on_path[w] = path.size();
        path.push_back(w);
        continue;
      }
      // Cycle path[on_path[w]] .. u -> w: drop its edges.
      const std::size_t start = on_path[w];
      covered += path.size() - start;
      out[u].pop_back();
      for (std::size_t i = start; i + 1 < path.size(); ++i) {
        auto& adj = out[path[i]];
        adj.erase(std::find(adj.begin(), adj.end(), path[i + 1]));
      }
      for (std::size_t i = start + 1; i < path.size(); ++i) on_path[path[i]] = SIZE_MAX;
      path.resize(start + 1);
    }
  }
  return covered;
}

}  // namespace

RankedPartition minimize_agony(const PaymentGraph& g, AgonyMode mode) {
  const std::size_t m = g.edge_count();
  if (m == 0) throw DomainError("minimize_agony: graph has no edges");
  std::vector<std::int64_t> ranks;
  if (mode == AgonyMode::exact_small) {
    ranks = exact_agony_ranks(g);
  } else {
    const graph::Components scc = graph::components(g, graph::ComponentMode::strong);
    ranks = layer_by_order(g, condensation_order(g, scc));
    std::uint64_t best = agony(g, ranks);
    std::vector<std::int64_t> alt = layer_by_order(g, els_order(g));
    if (agony(g, alt) < best) ranks = std::move(alt);
    std::size_t rounds = 0;
    while (rounds++ < 1000) {
      bool changed = false;
      for (int pass = 0; pass < 100 && single_node_pass(g, ranks); ++pass) changed = true;
      changed = merge_pass(g, ranks) || changed;
      if (!changed) break;
    }
  }
  compress(ranks);

  RankedPartition p;
  p.ordered = true;
  p.mode = mode;
  p.assignment.resize(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) p.assignment[i] = static_cast<std::uint32_t>(ranks[i]);
  p.n_groups = ranks.empty() ? 0 : *std::max_element(p.assignment.begin(), p.assignment.end());
  p.agony = agony(g, ranks);
  p.agony_lower_bound = mode == AgonyMode::exact_small ? p.agony : std::min(p.agony, cycle_packing_bound(g));
  p.score = 1.0 - static_cast<double>(p.agony) / static_cast<double>(m);
  return p;
}

// ---------------------------------------------------------------------------

double nmi(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) throw DomainError("nmi: labelings differ in length");
  if (a.empty()) return 1.0;
  std::size_t ka = 0, kb = 0;
  const auto da = densify(a, &ka), db = densify(b, &kb);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  std::vector<double> pa(ka, 0.0), pb(kb, 0.0);
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{da[i], db[i]}] += 1.0 / n;
    pa[da[i]] += 1.0 / n;
    pb[db[i]] += 1.0 / n;
  }
  auto entropy = [](const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
      if (x > 0) h -= x * std::log(x);
    return h;
  };
  const double ha = entropy(pa), hb = entropy(pb);
  if (ha + hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [key, p] : joint) mi += p * std::log(p / (pa[key.first] * pb[key.second]));
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

GroupRiskReport group_risk_profiles(const RankedPartition& partition, std::span<const Rating> ratings,
                                    std::size_t min_rated, double p_s) {
  if (ratings.size() != partition.assignment.size())
    throw DomainError("group_risk_profiles: partition and ratings cover different node sets");
  min_rated = std::max<std::size_t>(min_rated, 1);
  GroupRiskReport report;
  report.total_groups = partition.n_groups;
  std::array<std::uint64_t, 3> population{};
  std::vector<std::array<std::uint64_t, 3>> in_group(partition.n_groups + 1, {0, 0, 0});
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (!is_known(ratings[i])) continue;
    ++population[index_of(ratings[i])];
    ++in_group[partition.assignment[i]][index_of(ratings[i])];
  }
  report.rated_population = population[0] + population[1] + population[2];
  std::vector<std::uint32_t> tested;
  for (std::uint32_t grp = 1; grp <= partition.n_groups; ++grp) {
    const auto& c = in_group[grp];
    if (c[0] + c[1] + c[2] >= min_rated)
      tested.push_back(grp);
    else
      report.skipped.push_back(grp);
  }
  report.tested_groups = tested.size();
  for (std::uint32_t grp : tested) {
    const auto& c = in_group[grp];
    const std::uint64_t n = c[0] + c[1] + c[2];
    for (Rating r : kKnownRatings) {
      riskstats::EnrichmentResult e = riskstats::hypergeom_test(c[index_of(r)], n, population[index_of(r)],
                                                                report.rated_population, 3 * tested.size(), p_s);
      e.group = grp;
      e.rating = r;
      report.results.push_back(e);
    }
  }
  return report;
}

}  // namespace paynet::partition
