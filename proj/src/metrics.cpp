#include "paynet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/tools/minima.hpp>

namespace paynet::metrics {

std::vector<CcdfPoint> ccdf(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
    i = j;
  }
  return out;
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw DomainError("hurwitz_zeta needs s > 1 and q > 0");
  // Euler-Maclaurin with the direct sum pushed out to q + N >= 12.
  constexpr double kBernoulli[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                   5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};
  double sum = 0.0;
  double a = q;
  while (a < 12.0) {
    sum += std::pow(a, -s);
    a += 1.0;
  }
  const double a_pow = std::pow(a, -s);
  sum += a * a_pow / (s - 1.0) + 0.5 * a_pow;
  // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * a^(-s-2j+1)
  double rising = s;           // s (s+1) ... (s+2j-2)
  double factorial = 2.0;      // (2j)!
  double power = a_pow / a;    // a^(-s-2j+1) for j = 1
  for (int j = 1; j <= 7; ++j) {
    const double term = kBernoulli[j - 1] / factorial * rising * power;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    factorial *= (2.0 * j + 1) * (2.0 * j + 2);
    power /= a * a;
  }
  return sum;
}

namespace {

struct UniqueValues {
  std::vector<double> value;
  std::vector<std::size_t> first;  // index of first occurrence in sorted samples
};

UniqueValues unique_of(const std::vector<double>& sorted) {
  UniqueValues u;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) {
      u.value.push_back(sorted[i]);
      u.first.push_back(i);
    }
  return u;
}

double continuous_ks(std::span<const double> log_tail, double log_xmin, double alpha) {
  const double n = static_cast<double>(log_tail.size());
  double d = 0.0;
  for (std::size_t j = 0; j < log_tail.size(); ++j) {
    const double model = 1.0 - std::exp((1.0 - alpha) * (log_tail[j] - log_xmin));
    d = std::max({d, std::abs(static_cast<double>(j + 1) / n - model),
                  std::abs(static_cast<double>(j) / n - model)});
  }
  return d;
}

// Tail unique values u[first..] with cumulative counts; model CDF from the
// Hurwitz zeta normalised at xmin.
double discrete_ks(const UniqueValues& u, std::size_t first_unique, std::size_t tail_start,
                   std::size_t n_total, double alpha) {
  const double xmin = u.value[first_unique];
  const double n = static_cast<double>(n_total - tail_start);
  const double z0 = hurwitz_zeta(alpha, xmin);
  double d = 0.0;
  double zeta_at = z0;  // zeta(alpha, v) for the current unique value v
  double prev_value = xmin;
  for (std::size_t i = first_unique; i < u.value.size(); ++i) {
    const double v = u.value[i];
    if (i > first_unique) {
      const double gap = v - prev_value;
      if (gap <= 16.0) {
        // zeta(alpha, v) = zeta(alpha, prev) - sum_{k=prev}^{v-1} k^-alpha
        for (double k = prev_value; k < v; k += 1.0) zeta_at -= std::pow(k, -alpha);
      } else {
        zeta_at = hurwitz_zeta(alpha, v);
      }
    }
    const double below = static_cast<double>(u.first[i] - tail_start) / n;
    const double upto = static_cast<double>((i + 1 < u.value.size() ? u.first[i + 1] : n_total) - tail_start) / n;
    const double model_before = 1.0 - zeta_at / z0;  // P(X <= v-1)
    const double model_at = 1.0 - (zeta_at - std::pow(v, -alpha)) / z0;
    d = std::max({d, std::abs(below - model_before), std::abs(upto - model_at)});
    prev_value = v;
  }
  return d;
}

// Exact discrete MLE: maximizes -alpha * mean_log - log zeta(alpha, xmin),
// searched around the xmin - 1/2 approximation.
double discrete_mle(double mean_log, double xmin, double guess) {
  const auto neg_loglik = [&](double a) { return a * mean_log + std::log(hurwitz_zeta(a, xmin)); };
  // Convex in a, so widen the bracket until the minimum is interior.
  double lo = std::max(1.0 + 1e-6, guess - 0.5), hi = guess + 0.5;
  for (int widen = 0;; ++widen) {
    std::uintmax_t iterations = 100;
    const double a = boost::math::tools::brent_find_minima(neg_loglik, lo, hi, 30, iterations).first;
    const double edge = 1e-6 * (hi - lo);
    const bool at_lo = a - lo < edge && lo > 1.0 + 1e-6, at_hi = hi - a < edge;
    if ((!at_lo && !at_hi) || widen == 8) return a;
    if (at_lo) lo = std::max(1.0 + 1e-6, lo - (hi - lo));
    if (at_hi) hi += hi - lo;
  }
}

}  // namespace

PowerLawFit powerlaw_fit(std::span<const double> samples, bool discrete, const PowerLawOptions& options) {
  std::vector<double> sorted;
  sorted.reserve(samples.size());
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) continue;
    if (discrete && x != std::floor(x)) throw FitError("discrete fit on non-integer sample");
    sorted.push_back(x);
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const UniqueValues u = unique_of(sorted);

  // Eligible xmin: enough samples at or above it, and at least two distinct values.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i + 1 < u.value.size(); ++i)
    if (n - u.first[i] >= options.min_tail) eligible.push_back(i);
  if (eligible.empty())
    throw FitError("power-law fit: fewer than " + std::to_string(options.min_tail) +
                   " samples above every candidate xmin with spread (n=" + std::to_string(n) +
                   ", unique=" + std::to_string(u.value.size()) + ")");

  std::vector<std::size_t> candidates;
  if (options.exact_scan || eligible.size() <= options.max_candidates) {
    candidates = eligible;
  } else {
    const std::size_t k = std::max<std::size_t>(options.max_candidates, 2);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t idx = c * (eligible.size() - 1) / (k - 1);
      if (candidates.empty() || candidates.back() != eligible[idx]) candidates.push_back(eligible[idx]);
    }
  }

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(sorted[i]);
  std::vector<double> suffix_log(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix_log[i] = suffix_log[i + 1] + logs[i];

  PowerLawFit best;
  best.discrete = discrete;
  bool found = false;
  for (std::size_t ci : candidates) {
    const std::size_t start = u.first[ci];
    const double xmin = u.value[ci];
    const double tail_n = static_cast<double>(n - start);
    const double shift = discrete ? std::log(xmin - 0.5) : std::log(xmin);
    const double denom = suffix_log[start] - tail_n * shift;
    if (!(denom > 0.0)) continue;
    double alpha = 1.0 + tail_n / denom;
    if (!(alpha > 1.0) || !std::isfinite(alpha)) continue;
    if (discrete) alpha = discrete_mle(suffix_log[start] / tail_n, xmin, alpha);
    const double ks = discrete ? discrete_ks(u, ci, start, n, alpha)
                               : continuous_ks(std::span(logs).subspan(start), std::log(xmin), alpha);
    if (!found || ks < best.ks) {
      found = true;
      best.alpha = alpha;
      best.xmin = xmin;
      best.ks = ks;
      best.n_tail = n - start;
      best.tail_fraction = tail_n / static_cast<double>(n);
    }
  }
  if (!found) throw FitError("power-law fit: no candidate produced a finite exponent");
  best.candidates_scanned = candidates.size();
  return best;
}

MixingMatrix MixingMatrix::from_counts(std::size_t k, std::vector<double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("mixing matrix of a graph without edges");
  MixingMatrix mix;
  mix.k = k;
  mix.e = std::move(counts);
  mix.a.assign(k, 0.0);
  mix.b.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double& v = mix.e[i * k + j];
      v /= total;
      mix.a[i] += v;
      mix.b[j] += v;
    }
  return mix;
}

MixingMatrix mixing_matrix(const graph::PaymentGraph& g, std::span<const std::uint32_t> labels,
                           std::size_t n_categories, bool weighted) {
  if (labels.size() != g.node_count()) throw std::invalid_argument("mixing_matrix: one label per node");
  std::vector<double> counts(n_categories * n_categories, 0.0);
  for (graph::NodeId u = 0; u < g.node_count(); ++u) {
    if (labels[u] >= n_categories) throw std::invalid_argument("mixing_matrix: label out of range");
    for (const graph::Arc& a : g.out_arcs(u))
      counts[labels[u] * n_categories + labels[a.node]] += weighted ? a.weight : 1.0;
  }
  return MixingMatrix::from_counts(n_categories, std::move(counts));
}

Assortativity assortativity(const MixingMatrix& mix) {
  double trace = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < mix.k; ++i) {
    trace += mix(i, i);
    ab += mix.a[i] * mix.b[i];
  }
  if (std::abs(1.0 - ab) < 1e-12)
    throw DomainError("assortativity undefined: all mass in a single category");
  return {(trace - ab) / (1.0 - ab), -ab / (1.0 - ab)};
}

std::vector<std::uint32_t> log_bins(std::span<const double> values, const LogBinning& binning,
                                    std::size_t* n_bins) {
  if (!(binning.base > 1.0)) throw std::invalid_argument("log bin base must exceed 1");
  double origin = 0.0;
  for (double v : values)
    if (v > 0.0 && (origin == 0.0 || v < origin)) origin = v;
  std::vector<long> raw(values.size());
  const double log_base = std::log(binning.base);
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Zero gets bin -1; the small epsilon keeps exact powers in their own bin.
    raw[i] = values[i] > 0.0 ? static_cast<long>(std::floor(std::log(values[i] / origin) / log_base + 1e-9)) : -1;
  }
  std::map<long, std::uint32_t> dense;
  for (long r : raw) dense.emplace(r, 0);
  std::uint32_t next = 0;
  for (auto& [r, id] : dense) id = next++;
  std::vector<std::uint32_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = dense[raw[i]];
  if (n_bins) *n_bins = dense.size();
  return out;
}

double degree_class_assortativity(const graph::PaymentGraph& g, NodeAttribute attribute,
                                  const LogBinning& binning) {
  const auto deg = graph::degrees(g);
  std::vector<double> values(g.node_count());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = attribute == NodeAttribute::degree
                    ? static_cast<double>(deg.in_degree[i] + deg.out_degree[i])
                    : deg.in_strength[i] + deg.out_strength[i];
  std::size_t k = 0;
  const auto labels = log_bins(values, binning, &k);
  return assortativity(mixing_matrix(g, labels, k, false)).r;
}

Assortativity rating_assortativity(const graph::PaymentGraph& g, bool weighted) {
  std::vector<std::uint32_t> labels(g.node_count());
  for (std::size_t i = 0; i < labels.size(); ++i)
    labels[i] = static_cast<std::uint32_t>(index_of(g.meta(static_cast<graph::NodeId>(i)).rating));
  return assortativity(mixing_matrix(g, labels, 4, weighted));
}

std::vector<std::uint8_t> tertiles(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::uint8_t> out(n, 1);
  if (n == 0) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Lower empirical quantile at p = k/3: element ceil(n k / 3) - 1.
  const double q1 = sorted[(n + 2) / 3 - 1];
  const double q2 = sorted[(2 * n + 2) / 3 - 1];
  for (std::size_t i = 0; i < n; ++i) out[i] = values[i] <= q1 ? 1 : values[i] <= q2 ? 2 : 3;
  return out;
}

std::vector<std::uint8_t> size_proxy_tertiles(const graph::PaymentGraph& g) {
  const auto deg = graph::degrees(g);
  std::vector<double> size(g.node_count());
  for (std::size_t i = 0; i < size.size(); ++i) size[i] = deg.in_strength[i] + deg.out_strength[i];
  return tertiles(size);
}

}  // namespace paynet::metrics
