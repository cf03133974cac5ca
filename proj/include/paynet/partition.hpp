#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "paynet/graph.hpp"
#include "paynet/riskstats.hpp"

namespace paynet::partition {

enum class AgonyMode { exact_small, heuristic };

/// Node -> group assignment with groups numbered 1..n_groups. For ordered
/// (hierarchy) partitions the group is the rank, 1 being the lowest.
struct RankedPartition {
  std::vector<std::uint32_t> assignment;
  bool ordered = false;
  std::uint32_t n_groups = 0;
  double score = 0.0;  // Q for modules, h for hierarchies

  // Hierarchy only.
  std::uint64_t agony = 0;
  std::uint64_t agony_lower_bound = 0;  // edges covered by disjoint cycles
  AgonyMode mode = AgonyMode::heuristic;

  // Louvain only.
  std::size_t levels = 0;
  std::size_t moves = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> group_sizes() const;
};

/// Directed modularity Q = (1/m) sum_C [e_C - K_in(C) K_out(C) / m], where e_C
/// is the edge mass inside C. Groups may use any labels.
double modularity(const graph::PaymentGraph& g, std::span<const std::uint32_t> groups, bool weighted = false);

struct LouvainOptions {
  std::uint64_t seed = 1;
  bool weighted = false;
  std::size_t max_sweeps = 100;  // per level
  std::size_t restarts = 1;      // seeds seed, seed+1, ...; best Q wins
};

/// Groups are renumbered by descending size (ties: smallest member id).
RankedPartition louvain(const graph::PaymentGraph& g, const LouvainOptions& options = {});

/// A = sum over edges of f(r(u) - r(v)), f(x) = x + 1 for x >= 0 else 0.
std::uint64_t agony(const graph::PaymentGraph& g, std::span<const std::int64_t> ranks);

/// Largest graph accepted by the exact search.
inline constexpr std::size_t kExactAgonyLimit = 12;

/// exact_small: dynamic program over node subsets, DomainError above
/// kExactAgonyLimit nodes. heuristic: SCC-condensation layering refined by
/// local moves. h = 1 - A*/m; DomainError when the graph has no edges.
RankedPartition minimize_agony(const graph::PaymentGraph& g, AgonyMode mode);

/// Normalized mutual information with arithmetic-mean normalization; 1 when
/// both labelings are constant.
double nmi(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct GroupRiskReport {
  std::vector<riskstats::EnrichmentResult> results;  // three per tested group
  std::vector<std::uint32_t> skipped;                // groups below min_rated
  std::size_t tested_groups = 0;
  std::size_t total_groups = 0;
  std::uint64_t rated_population = 0;
};

/// Hypergeometric over/under-representation of L, M and H in every group with
/// at least min_rated rated members; Bonferroni over 3 x tested groups.
GroupRiskReport group_risk_profiles(const RankedPartition& partition, std::span<const Rating> ratings,
                                    std::size_t min_rated = 500, double p_s = 0.01);

}  // namespace paynet::partition
