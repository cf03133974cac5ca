#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "paynet/graph.hpp"

namespace paynet::metrics {

struct CcdfPoint {
  double x = 0.0;
  double p = 0.0;  // P(X >= x)
};

/// Empirical complementary CDF on the sorted unique sample values.
std::vector<CcdfPoint> ccdf(std::span<const double> samples);

struct PowerLawFit {
  double alpha = 0.0;
  double xmin = 0.0;
  double ks = 1.0;
  std::size_t n_tail = 0;
  bool discrete = false;
  // Fraction of samples at or above xmin, i.e. 1 - ECDF just below xmin.
  double tail_fraction = 0.0;
  std::size_t candidates_scanned = 0;
};

struct PowerLawOptions {
  std::size_t min_tail = 50;
  // Upper bound on xmin candidates; they are spread evenly over the eligible
  // unique values. Ignored when exact_scan is set.
  std::size_t max_candidates = 500;
  bool exact_scan = false;
};

class FitError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Tail fit: for each xmin candidate the MLE exponent (closed form when
/// continuous; for integers the exact zeta likelihood, maximized near the
/// xmin - 1/2 approximation), keeping the candidate with the
/// smallest Kolmogorov-Smirnov distance. Throws FitError when no candidate
/// has enough tail samples with spread.
PowerLawFit powerlaw_fit(std::span<const double> samples, bool discrete,
                         const PowerLawOptions& options = {});

/// Hurwitz zeta sum_{k>=0} (q+k)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Category-by-category mixing fractions. e(i,j) is the share of edges (or of
/// volume when weighted) going from category i to category j.
struct MixingMatrix {
  std::size_t k = 0;
  std::vector<double> e;  // row-major k*k
  std::vector<double> a;  // row sums
  std::vector<double> b;  // column sums

  double operator()(std::size_t i, std::size_t j) const { return e[i * k + j]; }
  static MixingMatrix from_counts(std::size_t k, std::vector<double> counts);
};

MixingMatrix mixing_matrix(const graph::PaymentGraph& g, std::span<const std::uint32_t> labels,
                           std::size_t n_categories, bool weighted);

struct Assortativity {
  double r = 0.0;
  double r_min = 0.0;
};

/// r = (sum e_ii - sum a_i b_i) / (1 - sum a_i b_i). DomainError when
/// sum a_i b_i == 1, which happens when a single category carries all mass.
Assortativity assortativity(const MixingMatrix& mix);

enum class NodeAttribute { degree, strength };

struct LogBinning {
  double base = 2.0;
};

/// Assigns each node to a logarithmic bin of its total degree (or strength)
/// and returns the bins (contiguous, zero-valued nodes in their own bin).
std::vector<std::uint32_t> log_bins(std::span<const double> values, const LogBinning& binning,
                                    std::size_t* n_bins);

double degree_class_assortativity(const graph::PaymentGraph& g, NodeAttribute attribute,
                                  const LogBinning& binning = {});

/// Rating assortativity over the categories L, M, H, NA.
Assortativity rating_assortativity(const graph::PaymentGraph& g, bool weighted);

/// Size proxy in+out strength split at the 1/3 and 2/3 lower empirical
/// quantiles; a value equal to a boundary goes to the lower tertile.
std::vector<std::uint8_t> size_proxy_tertiles(const graph::PaymentGraph& g);
std::vector<std::uint8_t> tertiles(std::span<const double> values);

}  // namespace paynet::metrics
