#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "paynet/graph.hpp"

namespace paynet::synth {

using Prior = std::array<double, 4>;                      // L, M, H, NA
using Mixing = std::array<std::array<double, 4>, 4>;      // row-conditional

/// Discrete power law P(k) ~ k^-alpha on k >= 1 (Devroye's rejection method).
std::uint64_t sample_zeta(double alpha, std::mt19937_64& rng);
/// Continuous power law with density ~ x^-alpha on x >= xmin.
double sample_pareto(double alpha, double xmin, std::mt19937_64& rng);

std::vector<double> zeta_samples(double alpha, std::size_t n, std::uint64_t seed);
std::vector<double> pareto_samples(double alpha, double xmin, std::size_t n, std::uint64_t seed);

struct WeightModel {
  double log_mean = 7.0;   // log-normal edge weights
  double log_sd = 1.5;
};

struct PowerLawSpec {
  std::size_t n = 1000;
  double alpha_in = 2.5;
  double alpha_out = 2.8;
  WeightModel weights;
  std::uint64_t seed = 1;
};

/// Directed configuration model on zeta degree sequences (capped at n-1, sums
/// equalized by dropping random surplus stubs); self-loops dropped and
/// multi-edges merged with summed weights. All nodes are rated NA customers.
graph::PaymentGraph gen_powerlaw_digraph(const PowerLawSpec& spec);

struct PlantResult {
  std::vector<Rating> ratings;
  Mixing achieved{};       // row-conditional weighted mixing reached
  double max_deviation = 0.0;
  bool converged = false;  // every entry within tolerance
  std::size_t sweeps = 0;
  std::size_t swaps = 0;
};

/// Label-swap search towards the target row-conditional weighted mixing. The
/// initial multiset follows the prior exactly (largest remainder) and swaps
/// keep it fixed. Stops at max |achieved - target| <= tolerance.
PlantResult plant_ratings(const graph::PaymentGraph& g, const Prior& prior, const Mixing& target,
                          std::size_t sweeps, std::uint64_t seed, double tolerance = 0.01);

/// Copy of g with the given ratings.
graph::PaymentGraph with_ratings(const graph::PaymentGraph& g, const std::vector<Rating>& ratings);

struct HierarchySpec {
  std::size_t n = 2000;
  std::size_t n_ranks = 8;
  double forward_prob = 0.8;  // share of forward edges that land exactly one rank up
  double noise_prob = 0.1;    // share of edges that are lateral or one rank back
  double mean_degree = 5.0;
  WeightModel weights;
  std::uint64_t seed = 1;
};

struct HierarchyGraph {
  graph::PaymentGraph graph;
  std::vector<std::int64_t> ranks;  // planted rank per node, 1 = lowest
  std::size_t planted_backward = 0; // edges not going strictly up
  std::uint64_t planted_agony = 0;
};

HierarchyGraph gen_hierarchy_graph(const HierarchySpec& spec);

struct ModularSpec {
  std::size_t n = 400;
  std::size_t n_modules = 4;
  double p_in = 0.3;
  double p_out = 0.01;
  Prior prior{0.4, 0.4, 0.1, 0.1};
  std::vector<Prior> module_priors;  // optional per-module override
  WeightModel weights;
  std::uint64_t seed = 1;
};

struct ModularGraph {
  graph::PaymentGraph graph;
  std::vector<std::uint32_t> modules;  // 1..n_modules
};

/// Directed planted partition with contiguous equal-size modules. DomainError
/// unless p_in > p_out.
ModularGraph gen_modular_graph(const ModularSpec& spec);

struct CustomerSpec {
  std::size_t n = 50000;
  std::size_t n_modules = 10;
  double mean_degree = 6.0;
  Prior rated_prior{0.45, 0.45, 0.10, 0.0};  // over rated nodes
  double na_share = 0.2;                      // hidden ratings
  double homophily = 0.45;     // share of edges aimed at the payer's rating class
  double module_affinity = 0.6; // share of remaining edges kept inside the module
  double module_bias = 0.35;   // strength of per-module rating tilt
  double activity_alpha = 2.3; // tail of node activity
  std::array<double, 3> activity_scale{2.0, 1.0, 0.5};  // larger firms are safer
  WeightModel weights;
  std::uint64_t seed = 1;
};

struct CustomerGraph {
  graph::PaymentGraph graph;           // NA where the rating is hidden
  std::vector<Rating> true_ratings;
  std::vector<std::uint32_t> modules;
};

/// Customer-like network: heavy-tailed activity linked to rating, module
/// structure with rating tilt, and rating homophily.
CustomerGraph gen_customer_graph(const CustomerSpec& spec);

/// Spreads every edge over `months` monthly transaction rows (cents, days
/// drawn at random), in the CSV layout read by ingest.
void write_transactions(std::ostream& out, const graph::PaymentGraph& g, int first_year, int months,
                        std::uint64_t seed);
/// Firm table with status customer and the node ratings.
void write_firms(std::ostream& out, const graph::PaymentGraph& g);

// ---------------------------------------------------------------------------
// Config-file driven generation.

enum class Model { powerlaw, hierarchy, modular, customer };

struct SynthSpec {
  Model model = Model::hierarchy;
  std::size_t n = 2000;
  double alpha_in = 2.5;
  double alpha_out = 2.8;
  Prior rating_prior{0.35, 0.38, 0.07, 0.20};
  bool has_mixing = false;
  Mixing mixing{};
  std::size_t mixing_sweeps = 50;
  std::size_t n_modules = 4;
  double p_in = 0.05;
  double p_out = 0.002;
  std::vector<Prior> module_priors;
  std::size_t n_ranks = 8;
  double forward_edge_prob = 0.8;
  double noise_prob = 0.1;
  double mean_degree = 5.0;
  std::uint64_t seed = 1;
};

/// Parses and validates a spec; ConfigError on bad fields (priors and mixing
/// rows must sum to 1, probabilities in [0, 1]).
SynthSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& s);

struct SynthOutput {
  graph::PaymentGraph graph;
  nlohmann::json truth;  // planted ranks/modules and generator diagnostics
};

SynthOutput generate(const SynthSpec& spec);

}  // namespace paynet::synth
