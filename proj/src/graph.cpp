#include "paynet/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "paynet/text.hpp"

namespace paynet::graph {

PaymentGraph PaymentGraph::from_edges(std::vector<FirmMeta> nodes, std::vector<Edge> edges) {
  PaymentGraph g;
  const std::size_t n = nodes.size();
  g.index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = g.index_.emplace(nodes[i].id, static_cast<NodeId>(i));
    if (!inserted) throw DataError("duplicate firm id '" + nodes[i].id + "'");
  }
  for (const Edge& e : edges) {
    if (e.src >= n || e.dst >= n) throw DataError("edge endpoint out of range");
    if (e.src == e.dst) throw DataError("self-loop on '" + nodes[e.src].id + "'");
    if (!(e.weight > 0.0)) throw DataError("non-positive edge weight");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const Edge& e : edges) {
    if (!merged.empty() && merged.back().src == e.src && merged.back().dst == e.dst)
      merged.back().weight += e.weight;
    else
      merged.push_back(e);
  }

  g.nodes_ = std::move(nodes);
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const Edge& e : merged) {
    ++g.out_offsets_[e.src + 1];
    ++g.in_offsets_[e.dst + 1];
  }
  std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
  g.out_targets_.resize(merged.size());
  g.in_sources_.resize(merged.size());
  std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  // merged is sorted by (src, dst), so both CSR halves come out sorted by neighbour.
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Edge& e = merged[i];
    g.out_targets_[i] = Arc{e.dst, e.weight};
    g.in_sources_[in_fill[e.dst]++] = Arc{e.src, e.weight};
    g.total_weight_ += e.weight;
  }
  return g;
}

std::optional<NodeId> PaymentGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> PaymentGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u)
    for (const Arc& a : out_arcs(u)) out.push_back({u, a.node, a.weight});
  return out;
}

std::vector<Rating> PaymentGraph::ratings() const {
  std::vector<Rating> r(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) r[i] = nodes_[i].rating;
  return r;
}

DegreeTable degrees(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  DegreeTable t;
  t.in_degree.resize(n);
  t.out_degree.resize(n);
  t.in_strength.assign(n, 0.0);
  t.out_strength.assign(n, 0.0);
  std::size_t active_in = 0, active_out = 0;
  for (NodeId u = 0; u < n; ++u) {
    t.in_degree[u] = static_cast<std::uint32_t>(g.in_degree(u));
    t.out_degree[u] = static_cast<std::uint32_t>(g.out_degree(u));
    for (const Arc& a : g.in_arcs(u)) t.in_strength[u] += a.weight;
    for (const Arc& a : g.out_arcs(u)) t.out_strength[u] += a.weight;
    active_in += t.in_degree[u] > 0;
    active_out += t.out_degree[u] > 0;
  }
  const double m = static_cast<double>(g.edge_count());
  if (n > 0) t.mean_in_all = t.mean_out_all = m / static_cast<double>(n);
  if (active_in > 0) t.mean_in_active = m / static_cast<double>(active_in);
  if (active_out > 0) t.mean_out_active = m / static_cast<double>(active_out);
  return t;
}

std::uint32_t Components::largest() const {
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < sizes.size(); ++c)
    if (sizes[c] > sizes[best]) best = c;
  return best;
}

namespace {

// Relabels arbitrary component ids so that they follow the smallest node id.
Components canonical(std::vector<std::uint32_t> raw, std::size_t raw_count) {
  Components c;
  std::vector<std::uint32_t> remap(raw_count, UINT32_MAX);
  c.label.resize(raw.size());
  for (std::size_t u = 0; u < raw.size(); ++u) {
    std::uint32_t& r = remap[raw[u]];
    if (r == UINT32_MAX) {
      r = static_cast<std::uint32_t>(c.sizes.size());
      c.sizes.push_back(0);
    }
    c.label[u] = r;
    ++c.sizes[r];
  }
  return c;
}

Components weak_components(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> label(n, UINT32_MAX);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (label[s] != UINT32_MAX) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      auto visit = [&](std::span<const Arc> arcs) {
        for (const Arc& a : arcs)
          if (label[a.node] == UINT32_MAX) {
            label[a.node] = next;
            stack.push_back(a.node);
          }
      };
      visit(g.out_arcs(u));
      visit(g.in_arcs(u));
    }
    ++next;
  }
  return canonical(std::move(label), next);
}

// Iterative Tarjan.
Components strong_components(const PaymentGraph& g) {
  const std::size_t n = g.node_count();
  constexpr std::uint32_t kUnvisited = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), label(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> scc_stack;
  struct Frame {
    NodeId node;
    std::size_t next_arc;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0, comp = 0;
  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto arcs = g.out_arcs(f.node);
      if (f.next_arc < arcs.size()) {
        NodeId v = arcs[f.next_arc++].node;
        if (index[v] == kUnvisited) {
          index[v] = low[v] = counter++;
          scc_stack.push_back(v);
          on_stack[v] = true;
          call.push_back({v, 0});
        } else if (on_stack[v]) {
          low[f.node] = std::min(low[f.node], index[v]);
        }
        continue;
      }
      NodeId u = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[u]);
      if (low[u] == index[u]) {
        NodeId w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          label[w] = comp;
        } while (w != u);
        ++comp;
      }
    }
  }
  return canonical(std::move(label), comp);
}

std::vector<bool> reach(const PaymentGraph& g, std::span<const NodeId> sources, bool forward) {
  std::vector<bool> seen(g.node_count(), false);
  std::vector<NodeId> stack(sources.begin(), sources.end());
  for (NodeId s : sources) seen[s] = true;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (const Arc& a : forward ? g.out_arcs(u) : g.in_arcs(u))
      if (!seen[a.node]) {
        seen[a.node] = true;
        stack.push_back(a.node);
      }
  }
  return seen;
}

}  // namespace

Components components(const PaymentGraph& g, ComponentMode mode) {
  return mode == ComponentMode::weak ? weak_components(g) : strong_components(g);
}

BowTie bow_tie(const PaymentGraph& g) {
  BowTie bt;
  const std::size_t n = g.node_count();
  for (NodeId u = 0; u < n; ++u)
    if (g.in_degree(u) == 0) bt.payers_only.push_back(u);
  if (n == 0) return bt;

  const Components weak = weak_components(g);
  const Components strong = strong_components(g);
  const std::uint32_t giant = weak.largest();

  // Largest SCC inside the giant weak component; ties go to the lower label,
  // i.e. the component holding the smaller node id.
  std::uint32_t best = UINT32_MAX;
  for (NodeId u = 0; u < n; ++u) {
    if (weak.label[u] != giant) continue;
    const std::uint32_t c = strong.label[u];
    if (best == UINT32_MAX || strong.sizes[c] > strong.sizes[best] ||
        (strong.sizes[c] == strong.sizes[best] && c < best))
      best = c;
  }
  for (NodeId u = 0; u < n; ++u)
    if (strong.label[u] == best) bt.scc.push_back(u);
  bt.degenerate_scc = bt.scc.size() <= 1;

  const std::vector<bool> downstream = reach(g, bt.scc, true);
  const std::vector<bool> upstream = reach(g, bt.scc, false);
  for (NodeId u = 0; u < n; ++u) {
    if (weak.label[u] != giant) {
      bt.outside_giant.push_back(u);
    } else if (strong.label[u] == best) {
      continue;
    } else if (upstream[u]) {
      bt.in_comp.push_back(u);
    } else if (downstream[u]) {
      bt.out_comp.push_back(u);
    } else {
      bt.tendrils_other.push_back(u);
    }
  }
  return bt;
}

double density(std::size_t n, std::size_t m) {
  if (n < 2) throw DomainError("density is undefined for fewer than two nodes");
  const double nd = static_cast<double>(n);
  return static_cast<double>(m) / (nd * (nd - 1.0));
}

namespace {

struct Sweep {
  std::uint32_t eccentricity = 0;
  NodeId farthest = 0;
  std::vector<NodeId> parent;
};

// BFS on the undirected view, limited to nodes of one weak component.
Sweep undirected_bfs(const PaymentGraph& g, NodeId source, std::vector<std::uint32_t>& dist) {
  Sweep s;
  s.parent.assign(g.node_count(), UINT32_MAX);
  std::fill(dist.begin(), dist.end(), UINT32_MAX);
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  s.farthest = source;
  std::size_t head = 0;
  while (head < frontier.size()) {
    NodeId u = frontier[head++];
    auto visit = [&](std::span<const Arc> arcs) {
      for (const Arc& a : arcs)
        if (dist[a.node] == UINT32_MAX) {
          dist[a.node] = dist[u] + 1;
          s.parent[a.node] = u;
          frontier.push_back(a.node);
          if (dist[a.node] > s.eccentricity) {
            s.eccentricity = dist[a.node];
            s.farthest = a.node;
          }
        }
    };
    visit(g.out_arcs(u));
    visit(g.in_arcs(u));
  }
  return s;
}

}  // namespace

DiameterResult diameter(const PaymentGraph& g, DiameterMode mode, std::uint64_t seed) {
  if (g.empty()) throw DomainError("diameter of an empty graph");
  const Components weak = weak_components(g);
  const std::uint32_t giant = weak.largest();
  std::vector<NodeId> members;
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (weak.label[u] == giant) members.push_back(u);

  DiameterResult r;
  r.method = mode;
  r.restricted_to_giant = weak.count() > 1;
  std::vector<std::uint32_t> dist(g.node_count());

  if (mode == DiameterMode::exact) {
    std::uint32_t best = 0;
    for (NodeId u : members) best = std::max(best, undirected_bfs(g, u, dist).eccentricity);
    r.lower = r.upper = best;
    return r;
  }

  // Repeated double sweeps: start from the highest-degree node, then from a
  // few seeded random members. The eccentricity of a midpoint of the longest
  // path found bounds the diameter from above by twice that value.
  std::mt19937_64 rng(seed);
  std::vector<NodeId> starts;
  starts.push_back(*std::max_element(members.begin(), members.end(), [&](NodeId a, NodeId b) {
    return g.in_degree(a) + g.out_degree(a) < g.in_degree(b) + g.out_degree(b);
  }));
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  for (int i = 0; i < 3; ++i) starts.push_back(members[pick(rng)]);

  std::uint32_t lower = 0;
  std::uint32_t upper = UINT32_MAX;
  for (NodeId s : starts) {
    Sweep first = undirected_bfs(g, s, dist);
    upper = std::min(upper, 2 * first.eccentricity);
    lower = std::max(lower, first.eccentricity);
    Sweep second = undirected_bfs(g, first.farthest, dist);
    lower = std::max(lower, second.eccentricity);
    upper = std::min(upper, 2 * second.eccentricity);
    NodeId mid = second.farthest;
    for (std::uint32_t step = 0; step < second.eccentricity / 2; ++step) mid = second.parent[mid];
    Sweep center = undirected_bfs(g, mid, dist);
    lower = std::max(lower, center.eccentricity);
    upper = std::min(upper, 2 * center.eccentricity);
  }
  r.lower = lower;
  r.upper = std::max(upper, lower);
  return r;
}

std::vector<std::uint32_t> bfs_distances(const PaymentGraph& g, NodeId source,
                                         std::uint32_t max_depth) {
  std::vector<std::uint32_t> dist(g.node_count(), UINT32_MAX);
  std::vector<NodeId> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    if (dist[u] >= max_depth) continue;
    for (const Arc& a : g.out_arcs(u))
      if (dist[a.node] == UINT32_MAX) {
        dist[a.node] = dist[u] + 1;
        queue.push_back(a.node);
      }
  }
  return dist;
}

double closeness(const PaymentGraph& g, NodeId node) {
  if (node >= g.node_count()) throw DomainError("closeness: unknown node");
  if (g.node_count() < 2) return 0.0;
  const auto dist = bfs_distances(g, node);
  double sum = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (v != node && dist[v] != UINT32_MAX) sum += 1.0 / dist[v];
  return sum / static_cast<double>(g.node_count() - 1);
}

PaymentGraph subgraph(const PaymentGraph& g, const NodePredicate& keep) {
  std::vector<NodeId> remap(g.node_count(), UINT32_MAX);
  std::vector<FirmMeta> nodes;
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (keep(g.meta(u))) {
      remap[u] = static_cast<NodeId>(nodes.size());
      nodes.push_back(g.meta(u));
    }
  std::vector<Edge> edges;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (remap[u] == UINT32_MAX) continue;
    for (const Arc& a : g.out_arcs(u))
      if (remap[a.node] != UINT32_MAX) edges.push_back({remap[u], remap[a.node], a.weight});
  }
  return PaymentGraph::from_edges(std::move(nodes), std::move(edges));
}

void write_edge_list(std::ostream& out, const PaymentGraph& g) {
  out << "src,dst,weight\n";
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (const Arc& a : g.out_arcs(u))
      out << text::csv_field(g.meta(u).id) << ',' << text::csv_field(g.meta(a.node).id) << ','
          << text::format_double(a.weight) << '\n';
}

void write_node_table(std::ostream& out, const PaymentGraph& g) {
  out << "id,status,rating,sector\n";
  for (const FirmMeta& f : g.nodes())
    out << text::csv_field(f.id) << ',' << to_string(f.status) << ',' << to_string(f.rating) << ','
        << text::csv_field(f.sector.value_or("")) << '\n';
}

namespace {

void expect_header(std::istream& in, std::string_view expected, std::string_view what) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != expected)
    throw DataError(std::string(what) + ": expected header '" + std::string(expected) + "'");
}

}  // namespace

PaymentGraph read_graph(std::istream& edges, std::istream& nodes) {
  std::vector<FirmMeta> metas;
  std::unordered_map<std::string, NodeId> index;
  std::string line;
  expect_header(nodes, "id,status,rating,sector", "node table");
  std::size_t line_no = 1;
  while (std::getline(nodes, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto f = text::split_csv(line);
    if (f.size() != 4) throw DataError("node table line " + std::to_string(line_no) + ": 4 fields expected");
    FirmMeta m{f[0], parse_status(f[1]), parse_rating(f[2]), std::nullopt};
    if (!f[3].empty()) m.sector = f[3];
    index.emplace(m.id, static_cast<NodeId>(metas.size()));
    metas.push_back(std::move(m));
  }
  std::vector<Edge> list;
  expect_header(edges, "src,dst,weight", "edge list");
  line_no = 1;
  while (std::getline(edges, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto f = text::split_csv(line);
    auto where = "edge list line " + std::to_string(line_no);
    if (f.size() != 3) throw DataError(where + ": 3 fields expected");
    auto s = index.find(f[0]), d = index.find(f[1]);
    if (s == index.end() || d == index.end()) throw DataError(where + ": unknown node id");
    auto w = text::parse_double(f[2]);
    if (!w) throw DataError(where + ": bad weight");
    list.push_back({s->second, d->second, *w});
  }
  return PaymentGraph::from_edges(std::move(metas), std::move(list));
}

}  // namespace paynet::graph
