#include "paynet/riskstats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace paynet::riskstats {

using graph::Arc;
using graph::NodeId;
using graph::PaymentGraph;

std::map<std::uint32_t, RatingShares> rating_given_degree(const PaymentGraph& g, Direction d) {
  std::map<std::uint32_t, std::array<std::size_t, 3>> counts;
  std::size_t rated = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const Rating r = g.meta(u).rating;
    if (!is_known(r)) continue;
    ++rated;
    const auto k = static_cast<std::uint32_t>(d == Direction::in ? g.in_degree(u) : g.out_degree(u));
    ++counts[k][index_of(r)];
  }
  if (rated == 0) throw DomainError("rating_given_degree: no rated nodes");
  std::map<std::uint32_t, RatingShares> out;
  for (const auto& [k, c] : counts) {
    RatingShares s;
    s.rated = c[0] + c[1] + c[2];
    for (std::size_t i = 0; i < 3; ++i) s.share[i] = static_cast<double>(c[i]) / static_cast<double>(s.rated);
    out.emplace(k, s);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }
double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

double linear(std::span<const double> params, std::span<const double> row) {
  double z = params[0];
  for (std::size_t j = 0; j < row.size(); ++j) z += params[j + 1] * row[j];
  return z;
}

}  // namespace

double binary_logit_loglik(std::span<const double> params, const Matrix& x, std::span<const std::uint8_t> y,
                           std::vector<double>* gradient) {
  const std::size_t n = x.rows(), p = x.cols();
  if (params.size() != p + 1 || y.size() != n) throw std::invalid_argument("binary_logit_loglik: shape");
  if (gradient) gradient->assign(p + 1, 0.0);
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const double z = linear(params, row);
    ll += y[i] ? log_sigmoid(z) : log_sigmoid(-z);
    if (gradient) {
      const double resid = static_cast<double>(y[i]) - sigmoid(z);
      (*gradient)[0] += resid;
      for (std::size_t j = 0; j < p; ++j) (*gradient)[j + 1] += resid * row[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (gradient)
    for (double& v : *gradient) v *= inv_n;
  return ll * inv_n;
}

BinaryLogitFit fit_binary_logit(const Matrix& x, std::span<const std::uint8_t> y, const LogitOptions& options) {
  const std::size_t n = x.rows(), p = x.cols(), dim = p + 1;
  if (n == 0) throw DomainError("logit fit on empty data");
  for (double v : x.data())
    if (!std::isfinite(v)) throw DomainError("logit fit: non-finite predictor");

  // Newton-Raphson on the mean log-likelihood with step halving.
  std::vector<double> theta(dim, 0.0);
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  if (ybar > 0.0 && ybar < 1.0) theta[0] = std::log(ybar / (1.0 - ybar));

  BinaryLogitFit fit;
  std::vector<double> grad;
  double ll = binary_logit_loglik(theta, x, y, &grad);
  Matrix info(dim, dim);
  auto fisher = [&](std::span<const double> th) {
    std::fill(info.data().begin(), info.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double s = sigmoid(linear(th, row));
      const double w = s * (1.0 - s);
      info(0, 0) += w;
      for (std::size_t a = 0; a < p; ++a) {
        info(0, a + 1) += w * row[a];
        for (std::size_t b = a; b < p; ++b) info(a + 1, b + 1) += w * row[a] * row[b];
      }
    }
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < a; ++b) info(a, b) = info(b, a);
    for (double& v : info.data()) v /= static_cast<double>(n);
  };

  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    fit.gradient_norm = norm2(grad);
    if (fit.gradient_norm < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    fisher(theta);
    std::vector<double> step;
    try {
      step = solve(info, grad);
    } catch (const DomainError&) {
      step = grad;  // flat likelihood direction: fall back to a gradient step
    }
    double scale = 1.0;
    std::vector<double> trial(dim);
    double trial_ll = ll;
    std::vector<double> trial_grad;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t j = 0; j < dim; ++j) trial[j] = theta[j] + scale * step[j];
      trial_ll = binary_logit_loglik(trial, x, y, &trial_grad);
      if (trial_ll >= ll - 1e-15) break;
      scale *= 0.5;
    }
    theta = trial;
    ll = trial_ll;
    grad = trial_grad;
    bool capped = false;
    for (double& v : theta)
      if (std::abs(v) > options.coefficient_cap) {
        v = std::copysign(options.coefficient_cap, v);
        capped = true;
      }
    if (capped) {
      fit.separated = true;
      ll = binary_logit_loglik(theta, x, y, &grad);
      fit.gradient_norm = norm2(grad);
      break;
    }
  }
  if (!fit.converged && !fit.separated) fit.gradient_norm = norm2(grad);

  fit.intercept = theta[0];
  fit.slopes.assign(theta.begin() + 1, theta.end());
  fit.std_errors.assign(dim, std::numeric_limits<double>::infinity());
  if (!fit.separated) {
    fisher(theta);
    try {
      const Matrix cov = inverse(info);
      for (std::size_t j = 0; j < dim; ++j)
        fit.std_errors[j] = std::sqrt(std::max(cov(j, j), 0.0) / static_cast<double>(n));
    } catch (const DomainError&) {
    }
  }
  return fit;
}

std::array<double, 3> CumulativeLogitModel::predict(std::span<const double> x) const {
  auto eval = [&](const BinaryLogitFit& f) {
    double z = f.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) z += f.slopes[j] * x[j];
    return sigmoid(z);
  };
  const double fl = eval(split_l), fm = eval(split_m);
  return {fl, fm - fl, 1.0 - fm};
}

CumulativeLogitModel fit_cumulative_logit(const Matrix& x, std::span<const Rating> y, const LogitOptions& options) {
  if (y.size() != x.rows()) throw std::invalid_argument("fit_cumulative_logit: shape");
  std::array<std::size_t, 3> present{};
  std::vector<std::uint8_t> at_most_l(y.size()), at_most_m(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!is_known(y[i])) throw DomainError("fit_cumulative_logit: unrated response");
    ++present[index_of(y[i])];
    at_most_l[i] = y[i] == Rating::L;
    at_most_m[i] = y[i] != Rating::H;
  }
  if (std::count_if(present.begin(), present.end(), [](std::size_t c) { return c > 0; }) < 2)
    throw DomainError("fit_cumulative_logit: at least two distinct ratings required");

  CumulativeLogitModel m;
  m.split_l = fit_binary_logit(x, at_most_l, options);
  m.split_m = fit_binary_logit(x, at_most_m, options);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto p = m.predict(x.row(i));
    if (p[1] < -1e-12) ++m.ordering_violations;
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

long double log_choose(std::uint64_t a, std::uint64_t b) {
  return std::lgamma(static_cast<long double>(a) + 1) - std::lgamma(static_cast<long double>(b) + 1) -
         std::lgamma(static_cast<long double>(a - b) + 1);
}

struct Support {
  std::uint64_t lo, hi;
};

Support hyper_support(std::uint64_t n, std::uint64_t K, std::uint64_t N) {
  return {n + K > N ? n + K - N : 0, std::min(n, K)};
}

long double hyper_log_pmf(std::uint64_t j, std::uint64_t n, std::uint64_t K, std::uint64_t N) {
  return log_choose(K, j) + log_choose(N - K, n - j) - log_choose(N, n);
}

void check_hyper(std::uint64_t n, std::uint64_t K, std::uint64_t N) {
  if (K > N || n > N) throw DomainError("hypergeometric: draws and successes cannot exceed the population");
}

}  // namespace

double hypergeom_upper(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N) {
  check_hyper(n, K, N);
  const Support s = hyper_support(n, K, N);
  if (k <= s.lo) return 1.0;
  if (k > s.hi) return 0.0;
  long double term = std::exp(hyper_log_pmf(k, n, K, N));
  long double sum = 0.0L;
  for (std::uint64_t j = k; j <= s.hi; ++j) {
    sum += term;
    if (j == s.hi) break;
    term *= static_cast<long double>(K - j) * static_cast<long double>(n - j) /
            (static_cast<long double>(j + 1) * static_cast<long double>(N - K - n + j + 1));
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

double hypergeom_lower(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N) {
  check_hyper(n, K, N);
  const Support s = hyper_support(n, K, N);
  if (k >= s.hi) return 1.0;
  if (k < s.lo) return 0.0;
  long double term = std::exp(hyper_log_pmf(k, n, K, N));
  long double sum = 0.0L;
  for (std::uint64_t j = k;; --j) {
    sum += term;
    if (j == s.lo) break;
    term *= static_cast<long double>(j) * static_cast<long double>(N - K - n + j) /
            (static_cast<long double>(K - j + 1) * static_cast<long double>(n - j + 1));
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

EnrichmentResult hypergeom_test(std::uint64_t k, std::uint64_t n, std::uint64_t K, std::uint64_t N,
                                std::size_t n_tests, double p_s) {
  if (n == 0 || n > N || K > N || k > std::min(n, K) || k + N < n + K)
    throw DomainError("hypergeom_test: invalid counts k=" + std::to_string(k) + " n=" + std::to_string(n) +
                      " K=" + std::to_string(K) + " N=" + std::to_string(N));
  if (n_tests == 0) throw DomainError("hypergeom_test: n_tests must be positive");
  EnrichmentResult r;
  r.observed = k;
  r.draws = n;
  r.successes = K;
  r.population = N;
  const unsigned __int128 lhs = static_cast<unsigned __int128>(k) * N;
  const unsigned __int128 rhs = static_cast<unsigned __int128>(K) * n;
  r.tie = lhs == rhs;
  r.direction = lhs > rhs ? Over::over : Over::under;
  r.p_value = r.direction == Over::over ? hypergeom_upper(k, n, K, N) : hypergeom_lower(k, n, K, N);
  r.threshold = p_s / static_cast<double>(n_tests);
  r.significant = r.p_value < r.threshold;
  return r;
}

namespace {

long double binom_log_pmf(std::uint64_t j, std::uint64_t n, double p) {
  return log_choose(n, j) + static_cast<long double>(j) * std::log(static_cast<long double>(p)) +
         static_cast<long double>(n - j) * std::log1p(-static_cast<long double>(p));
}

}  // namespace

double binomial_upper(std::uint64_t k, std::uint64_t n, double p) {
  if (k == 0) return 1.0;
  if (k > n || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  long double term = std::exp(binom_log_pmf(k, n, p));
  long double sum = 0.0L;
  const long double odds = static_cast<long double>(p) / (1.0L - p);
  for (std::uint64_t j = k; j <= n; ++j) {
    sum += term;
    if (j == n || term < sum * 1e-20L) break;
    term *= static_cast<long double>(n - j) / static_cast<long double>(j + 1) * odds;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

double binomial_lower(std::uint64_t k, std::uint64_t n, double p) {
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  long double term = std::exp(binom_log_pmf(k, n, p));
  long double sum = 0.0L;
  const long double inv_odds = (1.0L - p) / static_cast<long double>(p);
  for (std::uint64_t j = k;; --j) {
    sum += term;
    if (j == 0 || term < sum * 1e-20L) break;
    term *= static_cast<long double>(j) / static_cast<long double>(n - j + 1) * inv_odds;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

// ---------------------------------------------------------------------------

DistanceTable distance_conditional_ratings(const PaymentGraph& g, Rating source, std::uint32_t k_max, double p_s,
                                           std::size_t max_sources, std::uint64_t seed) {
  if (!is_known(source)) throw DomainError("distance table needs a known source rating");
  if (k_max < 1) throw DomainError("k_max must be at least 1");
  DistanceTable t;
  t.source = source;
  std::array<std::uint64_t, 3> population{};
  for (const FirmMeta& f : g.nodes())
    if (is_known(f.rating)) ++population[index_of(f.rating)];
  const std::uint64_t rated = population[0] + population[1] + population[2];
  if (rated == 0) throw DomainError("distance table: no rated nodes");
  for (std::size_t x = 0; x < 3; ++x) t.null_share[x] = static_cast<double>(population[x]) / static_cast<double>(rated);

  std::vector<std::array<std::uint64_t, 3>> counts(k_max + 1, {0, 0, 0});
  std::vector<std::uint32_t> dist(g.node_count(), UINT32_MAX);
  std::vector<NodeId> queue;
  std::vector<NodeId> sources;
  for (NodeId s = 0; s < g.node_count(); ++s)
    if (g.meta(s).rating == source) sources.push_back(s);
  if (max_sources > 0 && sources.size() > max_sources) {
    std::mt19937_64 rng(seed);
    std::shuffle(sources.begin(), sources.end(), rng);
    sources.resize(max_sources);
    std::sort(sources.begin(), sources.end());
  }
  t.sources = sources.size();
  for (NodeId s : sources) {
    queue.clear();
    queue.push_back(s);
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      if (dist[u] >= k_max) continue;
      for (const Arc& a : g.out_arcs(u))
        if (dist[a.node] == UINT32_MAX) {
          dist[a.node] = dist[u] + 1;
          queue.push_back(a.node);
          const Rating r = g.meta(a.node).rating;
          if (is_known(r)) ++counts[dist[a.node]][index_of(r)];
        }
    }
    for (NodeId u : queue) dist[u] = UINT32_MAX;
  }

  for (std::uint32_t k = 1; k <= k_max; ++k) {
    DistanceShell shell;
    shell.k = k;
    shell.pairs = counts[k];
    shell.total = counts[k][0] + counts[k][1] + counts[k][2];
    if (shell.total == 0) continue;
    for (std::size_t x = 0; x < 3; ++x)
      shell.share[x] = static_cast<double>(shell.pairs[x]) / static_cast<double>(shell.total);
    t.shells.push_back(shell);
  }
  const double threshold = p_s / static_cast<double>(std::max<std::size_t>(1, 3 * t.shells.size()));
  for (DistanceShell& shell : t.shells)
    for (std::size_t x = 0; x < 3; ++x) {
      const std::uint64_t k = shell.pairs[x], n = shell.total, K = population[x];
      shell.over[x] = static_cast<unsigned __int128>(k) * rated > static_cast<unsigned __int128>(K) * n;
      // Pair counts can exceed the number of rated nodes; the hypergeometric
      // null then no longer applies and the binomial limit is used instead.
      if (n <= rated)
        shell.p_value[x] = shell.over[x] ? hypergeom_upper(k, n, K, rated) : hypergeom_lower(k, n, K, rated);
      else
        shell.p_value[x] = shell.over[x] ? binomial_upper(k, n, t.null_share[x])
                                         : binomial_lower(k, n, t.null_share[x]);
      shell.significant[x] = shell.p_value[x] < threshold;
    }
  return t;
}

// ---------------------------------------------------------------------------

ExcessVolume excess_volume_samples(const PaymentGraph& g) {
  ExcessVolume ev;
  std::array<std::array<double, 3>, 3> vol{};
  double total = 0.0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const Rating ru = g.meta(u).rating;
    if (!is_known(ru)) continue;
    for (const Arc& a : g.out_arcs(u)) {
      const Rating rv = g.meta(a.node).rating;
      if (!is_known(rv)) continue;
      vol[index_of(ru)][index_of(rv)] += a.weight;
      total += a.weight;
    }
  }
  if (!(total > 0.0)) throw DomainError("excess volume: no volume between rated nodes");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      ev.a[i] += vol[i][j] / total;
      ev.b[j] += vol[i][j] / total;
    }

  for (NodeId u = 0; u < g.node_count(); ++u) {
    const Rating ru = g.meta(u).rating;
    if (!is_known(ru)) continue;
    const std::size_t ri = index_of(ru);
    for (int dir = 0; dir < 2; ++dir) {
      std::array<double, 3> w{};
      double sum = 0.0;
      for (const Arc& a : dir == 0 ? g.in_arcs(u) : g.out_arcs(u)) {
        const Rating rv = g.meta(a.node).rating;
        if (!is_known(rv)) continue;
        w[index_of(rv)] += a.weight;
        sum += a.weight;
      }
      if (!(sum > 0.0)) continue;
      for (std::size_t x = 0; x < 3; ++x) {
        const double expected = dir == 0 ? ev.a[x] * ev.b[ri] : ev.a[ri] * ev.b[x];
        if (expected >= 1.0) continue;
        ev.samples[dir][ri][x].push_back((w[x] / sum - expected) / (1.0 - expected));
      }
    }
  }
  return ev;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> midranks(const std::vector<double>& pooled, double* tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> rank(n);
  *tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) rank[order[t]] = mid;
    const double ties = static_cast<double>(j - i);
    *tie_term += ties * ties * ties - ties;
    i = j;
  }
  return rank;
}

double normal_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alt) {
  if (a.empty() || b.empty()) throw DomainError("mann_whitney_u: both samples must be non-empty");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const std::vector<double> rank = midranks(pooled, &tie_term);
  const double base = static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum += rank[i];

  MannWhitney res;
  res.u = rank_sum - base;

  double p_greater = 1.0, p_less = 1.0;
  if (n <= 12) {
    // Permutation distribution of the rank sum over every size-na subset.
    res.exact = true;
    std::size_t total = 0, ge = 0, le = 0;
    const double eps = 1e-9;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) s += rank[i];
      ++total;
      ge += s >= rank_sum - eps;
      le += s <= rank_sum + eps;
    }
    p_greater = static_cast<double>(ge) / static_cast<double>(total);
    p_less = static_cast<double>(le) / static_cast<double>(total);
  } else {
    const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
    const double nd = static_cast<double>(n);
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (var > 0.0) {
      const double sd = std::sqrt(var);
      p_greater = normal_upper((res.u - mu - 0.5) / sd);
      p_less = 1.0 - normal_upper((res.u - mu + 0.5) / sd);
    }
  }
  switch (alt) {
    case Alternative::greater: res.p = p_greater; break;
    case Alternative::less: res.p = p_less; break;
    case Alternative::two_sided: res.p = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
  }
  return res;
}

std::vector<ExcessVolumeTest> excess_volume_tests(const ExcessVolume& ev) {
  std::vector<ExcessVolumeTest> out;
  auto label = [](const char* dir, Rating node, Rating target) {
    return std::string(dir) + "_" + std::string(to_string(node)) + "(" + std::string(to_string(target)) + ")";
  };
  for (Rating r : kKnownRatings)
    for (Rating x : kKnownRatings) {
      const auto& out_s = ev.get(Direction::out, r, x);
      const auto& in_s = ev.get(Direction::in, r, x);
      if (out_s.empty() || in_s.empty()) continue;
      out.push_back({label("out", r, x), label("in", r, x), mann_whitney_u(out_s, in_s, Alternative::two_sided)});
    }
  for (Direction d : {Direction::out, Direction::in})
    for (Rating r : kKnownRatings)
      for (Rating x : kKnownRatings)
        for (Rating y : kKnownRatings) {
          if (x == y) continue;
          const auto& sx = ev.get(d, r, x);
          const auto& sy = ev.get(d, r, y);
          if (sx.empty() || sy.empty()) continue;
          const char* dir = d == Direction::out ? "out" : "in";
          out.push_back({label(dir, r, x), label(dir, r, y), mann_whitney_u(sx, sy, Alternative::greater)});
        }
  return out;
}

}  // namespace paynet::riskstats
