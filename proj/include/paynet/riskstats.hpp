#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "paynet/graph.hpp"
#include "paynet/linalg.hpp"

namespace paynet::riskstats {

enum class Direction { in, out };

struct RatingShares {
  std::array<double, 3> share{};  // L, M, H
  std::size_t rated = 0;
};

/// For every observed degree among rated nodes, the share of L, M and H.
/// Unrated nodes are ignored. Throws DomainError when nothing is rated.
std::map<std::uint32_t, RatingShares> rating_given_degree(const graph::PaymentGraph& g, Direction d);

// ---------------------------------------------------------------------------
// Cumulative logit: log P(r<=L)/P(r>L) = a_L + b_L.x, same for M, each split
// fitted as its own binary logistic regression.

struct BinaryLogitFit {
  double intercept = 0.0;
  std::vector<double> slopes;
  std::vector<double> std_errors;  // intercept first, then slopes
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  bool separated = false;  // a coefficient hit the +-20 cap
};

struct CumulativeLogitModel {
  BinaryLogitFit split_l;  // P(r <= L)
  BinaryLogitFit split_m;  // P(r <= M)
  // Training rows where the fitted P(r<=L) exceeds P(r<=M).
  std::size_t ordering_violations = 0;

  std::array<double, 3> predict(std::span<const double> x) const;
};

struct LogitOptions {
  double gradient_tolerance = 1e-6;
  std::size_t max_iterations = 500;
  double coefficient_cap = 20.0;
};

/// Mean log-likelihood of a binary logit and its gradient; params are
/// (intercept, slopes...), y is 1 for "at or below the split".
double binary_logit_loglik(std::span<const double> params, const Matrix& x,
                           std::span<const std::uint8_t> y, std::vector<double>* gradient);

BinaryLogitFit fit_binary_logit(const Matrix& x, std::span<const std::uint8_t> y,
                                const LogitOptions& options = {});

/// y must hold known ratings only. Needs at least two distinct ratings.
CumulativeLogitModel fit_cumulative_logit(const Matrix& x, std::span<const Rating> y,
                                          const LogitOptions& options = {});

// ---------------------------------------------------------------------------
// Hypergeometric enrichment.

enum class Over { over, under };

struct EnrichmentResult {
  std::uint32_t group = 0;
  Rating rating = Rating::NA;
  std::uint64_t observed = 0;    // k: group members with the rating
  std::uint64_t draws = 0;       // n: group size
  std::uint64_t successes = 0;   // K: population members with the rating
  std::uint64_t population = 0;  // N
  double p_value = 1.0;
  Over direction = Over::under;
  bool tie = false;  // k/n == K/N exactly
  double threshold = 0.0;
  bool significant = false;
};

/// Upper tail P(Y >= k) and lower tail P(Y <= k) of a hypergeometric
/// variable (population N, K successes, n draws).
double hypergeom_upper(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N);
double hypergeom_lower(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N);

/// One-sided test in the direction of the observed deviation; ties use the
/// lower tail. Significant iff p < p_s / n_tests.
EnrichmentResult hypergeom_test(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N,
                                std::size_t n_tests, double p_s);

/// Binomial tails, used where draws can exceed the population (pair counts).
double binomial_upper(std::uint64_t k, std::uint64_t n, double p);
double binomial_lower(std::uint64_t k, std::uint64_t n, double p);

// ---------------------------------------------------------------------------
// Ratings at directed distance k from every rated source of a class.

struct DistanceShell {
  std::uint32_t k = 0;
  std::array<std::uint64_t, 3> pairs{};  // targets rated L, M, H
  std::uint64_t total = 0;
  std::array<double, 3> share{};
  std::array<double, 3> p_value{};
  std::array<bool, 3> significant{};
  std::array<bool, 3> over{};
};

struct DistanceTable {
  Rating source = Rating::L;
  std::array<double, 3> null_share{};  // unconditional shares among rated nodes
  std::vector<DistanceShell> shells;   // only non-empty shells, ascending k
  std::size_t sources = 0;
};

/// Pair-count shares: share_X(k) = #{(i,j): d(i,j)=k, r(i)=source, r(j)=X} /
/// #{(i,j): d(i,j)=k, r(i)=source, j rated}. Paths may cross unrated nodes.
/// Significance uses a one-sided tail against the null shares with
/// Bonferroni over 3 * (number of shells). max_sources > 0 restricts the
/// sources to a seeded random sample of that size.
DistanceTable distance_conditional_ratings(const graph::PaymentGraph& g, Rating source,
                                           std::uint32_t k_max = 13, double p_s = 0.01,
                                           std::size_t max_sources = 0, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Excess volume.

struct ExcessVolume {
  // Volume-weighted mixing over rated edges: a~ (row) and b~ (column) sums.
  std::array<double, 3> a{};
  std::array<double, 3> b{};
  // samples[dir][node rating][target rating]; dir 0 = in, 1 = out.
  std::array<std::array<std::array<std::vector<double>, 3>, 3>, 2> samples;

  const std::vector<double>& get(Direction d, Rating node, Rating target) const {
    return samples[d == Direction::in ? 0 : 1][index_of(node)][index_of(target)];
  }
};

/// Delta_out_i(X) = (w_out_i(X) - a~_r(i) b~_X) / (1 - a~_r(i) b~_X) and the
/// in-analogue with a~_X b~_r(i), computed on edges between rated nodes.
ExcessVolume excess_volume_samples(const graph::PaymentGraph& g);

// ---------------------------------------------------------------------------
// Mann-Whitney U.

enum class Alternative { less, greater, two_sided };

struct MannWhitney {
  double u = 0.0;  // U of the first sample: pairs a > b, ties count 1/2
  double p = 1.0;
  bool exact = false;
};

/// `greater` tests whether the first sample is stochastically larger. Exact
/// permutation p (midranks, ties handled) when |a| + |b| <= 12, otherwise the
/// normal approximation with tie and continuity corrections.
MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alt);

struct ExcessVolumeTest {
  std::string label_a;
  std::string label_b;
  MannWhitney result;
};

/// The two families of comparisons: out vs in excess for each (rating,
/// target) pair (two-sided), and within one (rating, direction) every ordered
/// pair of targets (one-sided "greater").
std::vector<ExcessVolumeTest> excess_volume_tests(const ExcessVolume& ev);

}  // namespace paynet::riskstats
