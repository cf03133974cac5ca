#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "paynet/types.hpp"

namespace paynet::graph {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 0.0;
};

struct Arc {
  NodeId node = 0;
  double weight = 0.0;
};

/// Immutable directed weighted graph with per-node firm metadata.
///
/// Adjacency is stored twice in CSR form (out-arcs and in-arcs), both sorted
/// by neighbour id. There are no self-loops and no parallel edges; every
/// weight is strictly positive. Node ids are dense indices into nodes().
class PaymentGraph {
 public:
  PaymentGraph() = default;

  /// Builds a graph, summing the weights of repeated (src, dst) pairs.
  /// Throws DataError on self-loops, non-positive weights, out-of-range ids
  /// or duplicate firm ids.
  static PaymentGraph from_edges(std::vector<FirmMeta> nodes, std::vector<Edge> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return out_targets_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::span<const Arc> out_arcs(NodeId u) const {
    return {out_targets_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
  }
  std::span<const Arc> in_arcs(NodeId u) const {
    return {in_sources_.data() + in_offsets_[u], in_offsets_[u + 1] - in_offsets_[u]};
  }
  std::size_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::size_t in_degree(NodeId u) const { return in_offsets_[u + 1] - in_offsets_[u]; }

  const FirmMeta& meta(NodeId u) const { return nodes_[u]; }
  std::span<const FirmMeta> nodes() const { return nodes_; }
  std::optional<NodeId> find(std::string_view id) const;

  double total_weight() const { return total_weight_; }

  /// All edges ordered by (src, dst).
  std::vector<Edge> edges() const;

  /// Rating of every node, indexed by NodeId.
  std::vector<Rating> ratings() const;

 private:
  std::vector<FirmMeta> nodes_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Arc> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Arc> in_sources_;
  std::unordered_map<std::string, NodeId> index_;
  double total_weight_ = 0.0;
};

struct DegreeTable {
  std::vector<std::uint32_t> in_degree;
  std::vector<std::uint32_t> out_degree;
  std::vector<double> in_strength;
  std::vector<double> out_strength;

  // Mean degree over every node (both equal m/n).
  double mean_in_all = 0.0;
  double mean_out_all = 0.0;
  // Mean degree over nodes whose degree in that direction is non-zero.
  double mean_in_active = 0.0;
  double mean_out_active = 0.0;
};

DegreeTable degrees(const PaymentGraph& g);

enum class ComponentMode { weak, strong };

struct Components {
  // Component label per node. Labels are 0..count-1, numbered in order of
  // each component's smallest node id.
  std::vector<std::uint32_t> label;
  std::vector<std::size_t> sizes;

  std::size_t count() const { return sizes.size(); }
  // Label of the largest component; ties go to the lower label.
  std::uint32_t largest() const;
};

Components components(const PaymentGraph& g, ComponentMode mode);

struct BowTie {
  std::vector<NodeId> scc;
  std::vector<NodeId> in_comp;
  std::vector<NodeId> out_comp;
  std::vector<NodeId> tendrils_other;
  // Every node with zero in-degree, wherever it sits.
  std::vector<NodeId> payers_only;
  // Nodes outside the giant weak component.
  std::vector<NodeId> outside_giant;
  // Set when the largest strongly connected component is a single node.
  bool degenerate_scc = false;
};

/// Bow-tie decomposition around the largest SCC of the giant weak component.
/// scc, in_comp, out_comp and tendrils_other partition the giant component.
BowTie bow_tie(const PaymentGraph& g);

double density(std::size_t n, std::size_t m);

enum class DiameterMode { exact, double_sweep_bound };

struct DiameterResult {
  std::uint32_t lower = 0;
  std::uint32_t upper = 0;
  DiameterMode method = DiameterMode::exact;
  // True when the input had more than one weak component and the value
  // refers to the largest one only.
  bool restricted_to_giant = false;

  std::uint32_t value() const { return lower; }
  bool exact() const { return lower == upper; }
};

/// Hop diameter of the undirected view of the giant weak component.
DiameterResult diameter(const PaymentGraph& g, DiameterMode mode, std::uint64_t seed = 1);

/// Harmonic closeness (1/(n-1)) sum 1/d(u,v) over directed hop distances.
double closeness(const PaymentGraph& g, NodeId node);

/// Directed BFS hop distances from `source`; unreachable nodes get UINT32_MAX.
std::vector<std::uint32_t> bfs_distances(const PaymentGraph& g, NodeId source,
                                         std::uint32_t max_depth = UINT32_MAX);

using NodePredicate = std::function<bool(const FirmMeta&)>;

/// Induced subgraph on the nodes accepted by `keep`, node order preserved.
PaymentGraph subgraph(const PaymentGraph& g, const NodePredicate& keep);

// Edge list `src,dst,weight` keyed by firm id, and the matching node sidecar
// `id,status,rating,sector`. Both are written in node-id order.
void write_edge_list(std::ostream& out, const PaymentGraph& g);
void write_node_table(std::ostream& out, const PaymentGraph& g);
PaymentGraph read_graph(std::istream& edges, std::istream& nodes);

}  // namespace paynet::graph
