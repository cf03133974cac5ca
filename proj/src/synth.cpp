#include "paynet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "paynet/partition.hpp"

namespace paynet::synth {

using graph::Arc;
using graph::Edge;
using graph::NodeId;
using graph::PaymentGraph;

std::uint64_t sample_zeta(double alpha, std::mt19937_64& rng) {
  if (!(alpha > 1.0)) throw DomainError("zeta sampling needs alpha > 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double b = std::pow(2.0, alpha - 1.0);
  while (true) {
    const double u = 1.0 - unit(rng);  // (0, 1]
    const double v = unit(rng);
    const double x = std::floor(std::pow(u, -1.0 / (alpha - 1.0)));
    if (!(x < 9e18)) continue;
    const double t = std::pow(1.0 + 1.0 / x, alpha - 1.0);
    if (v * x * (t - 1.0) / (b - 1.0) <= t / b) return static_cast<std::uint64_t>(x);
  }
}

double sample_pareto(double alpha, double xmin, std::mt19937_64& rng) {
  if (!(alpha > 1.0) || !(xmin > 0.0)) throw DomainError("pareto sampling needs alpha > 1 and xmin > 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return xmin * std::pow(1.0 - unit(rng), -1.0 / (alpha - 1.0));
}

std::vector<double> zeta_samples(double alpha, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = static_cast<double>(sample_zeta(alpha, rng));
  return out;
}

std::vector<double> pareto_samples(double alpha, double xmin, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = sample_pareto(alpha, xmin, rng);
  return out;
}

namespace {

std::string node_name(std::size_t i, std::size_t n) {
  const int width = static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "n%0*zu", width, i);
  return buf;
}

std::vector<FirmMeta> customers(std::size_t n, const std::vector<Rating>& ratings) {
  std::vector<FirmMeta> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].id = node_name(i, n);
    nodes[i].status = Status::customer;
    nodes[i].rating = ratings.empty() ? Rating::NA : ratings[i];
  }
  return nodes;
}

double draw_weight(const WeightModel& w, std::mt19937_64& rng) {
  std::lognormal_distribution<double> d(w.log_mean, w.log_sd);
  // Cent resolution keeps exported transaction files exact.
  return std::max(0.01, std::round(d(rng) * 100.0) / 100.0);
}

std::uint64_t edge_key(NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

Rating draw_rating(const Prior& p, std::mt19937_64& rng) {
  std::discrete_distribution<int> d(p.begin(), p.end());
  return kAllRatings[static_cast<std::size_t>(d(rng))];
}

// Exactly round(prior * n) of each rating (largest remainder), shuffled.
std::vector<Rating> prior_multiset(const Prior& prior, std::size_t n, std::mt19937_64& rng) {
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> frac{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = prior[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % 4]];
  std::vector<Rating> out;
  out.reserve(n);
  for (std::size_t i = 0; i < 4; ++i) out.insert(out.end(), counts[i], kAllRatings[i]);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Cumulative weights for proportional sampling.
struct Sampler {
  std::vector<NodeId> items;
  std::vector<double> cum;

  void add(NodeId v, double w) {
    items.push_back(v);
    cum.push_back((cum.empty() ? 0.0 : cum.back()) + w);
  }
  bool empty() const { return items.empty(); }
  NodeId draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, cum.back());
    const auto it = std::upper_bound(cum.begin(), cum.end(), u(rng));
    return items[std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), items.size() - 1)];
  }
};

}  // namespace

PaymentGraph gen_powerlaw_digraph(const PowerLawSpec& spec) {
  if (!(spec.alpha_in > 2.0) || !(spec.alpha_out > 2.0)) throw DomainError("power-law generator needs alphas > 2");
  if (spec.n < 2) throw DomainError("power-law generator needs n >= 2");
  std::mt19937_64 rng(spec.seed);
  const std::uint64_t cap = spec.n - 1;
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<NodeId> out_stubs, in_stubs;
    for (NodeId v = 0; v < spec.n; ++v) {
      out_stubs.insert(out_stubs.end(), std::min(sample_zeta(spec.alpha_out, rng), cap), v);
      in_stubs.insert(in_stubs.end(), std::min(sample_zeta(spec.alpha_in, rng), cap), v);
    }
    std::shuffle(out_stubs.begin(), out_stubs.end(), rng);
    std::shuffle(in_stubs.begin(), in_stubs.end(), rng);
    const std::size_t m = std::min(out_stubs.size(), in_stubs.size());
    out_stubs.resize(m);
    in_stubs.resize(m);
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double w = draw_weight(spec.weights, rng);
      if (out_stubs[i] != in_stubs[i]) edges.push_back({out_stubs[i], in_stubs[i], w});
    }
    if (edges.empty()) continue;
    return PaymentGraph::from_edges(customers(spec.n, {}), std::move(edges));
  }
  throw DomainError("power-law generator produced no usable degree sequence in 10 attempts");
}

// ---------------------------------------------------------------------------

namespace {

using Volume = std::array<std::array<double, 4>, 4>;

double deviation(const Volume& v, const Mixing& target, Mixing* achieved, double* max_dev) {
  double dist = 0.0;
  *max_dev = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    const double row = v[a][0] + v[a][1] + v[a][2] + v[a][3];
    for (std::size_t b = 0; b < 4; ++b) {
      const double m = row > 0 ? v[a][b] / row : 0.0;
      if (achieved) (*achieved)[a][b] = m;
      if (row <= 0) continue;
      const double d = m - target[a][b];
      dist += d * d;
      *max_dev = std::max(*max_dev, std::abs(d));
    }
  }
  return dist;
}

}  // namespace

PlantResult plant_ratings(const PaymentGraph& g, const Prior& prior, const Mixing& target, std::size_t sweeps,
                          std::uint64_t seed, double tolerance) {
  const std::size_t n = g.node_count();
  std::mt19937_64 rng(seed);
  PlantResult res;
  res.ratings = prior_multiset(prior, n, rng);
  std::vector<Rating>& r = res.ratings;

  Volume vol{};
  for (NodeId u = 0; u < n; ++u)
    for (const Arc& a : g.out_arcs(u)) vol[index_of(r[u])][index_of(r[a.node])] += a.weight;
  double max_dev = 0.0;
  double dist = deviation(vol, target, nullptr, &max_dev);

  std::uniform_int_distribution<NodeId> pick(0, n > 0 ? static_cast<NodeId>(n - 1) : 0);
  auto apply = [&](Volume& v, NodeId, NodeId, double w, Rating rs_old, Rating rt_old, Rating rs_new,
                   Rating rt_new) {
    v[index_of(rs_old)][index_of(rt_old)] -= w;
    v[index_of(rs_new)][index_of(rt_new)] += w;
  };
  while (max_dev > tolerance && res.sweeps < sweeps && n >= 2) {
    ++res.sweeps;
    for (std::size_t step = 0; step < n; ++step) {
      const NodeId u = pick(rng), v = pick(rng);
      const Rating ru = r[u], rv = r[v];
      if (ru == rv) continue;
      Volume trial = vol;
      auto rating_after = [&](NodeId x) { return x == u ? rv : x == v ? ru : r[x]; };
      for (const Arc& a : g.out_arcs(u)) apply(trial, u, a.node, a.weight, ru, r[a.node], rv, rating_after(a.node));
      for (const Arc& a : g.in_arcs(u))
        if (a.node != v) apply(trial, a.node, u, a.weight, r[a.node], ru, r[a.node], rv);
      for (const Arc& a : g.out_arcs(v)) apply(trial, v, a.node, a.weight, rv, r[a.node], ru, rating_after(a.node));
      for (const Arc& a : g.in_arcs(v))
        if (a.node != u) apply(trial, a.node, v, a.weight, r[a.node], rv, r[a.node], ru);
      double trial_max = 0.0;
      const double trial_dist = deviation(trial, target, nullptr, &trial_max);
      if (trial_dist < dist) {
        vol = trial;
        dist = trial_dist;
        max_dev = trial_max;
        std::swap(r[u], r[v]);
        ++res.swaps;
      }
    }
  }
  deviation(vol, target, &res.achieved, &res.max_deviation);
  res.converged = res.max_deviation <= tolerance;
  return res;
}

PaymentGraph with_ratings(const PaymentGraph& g, const std::vector<Rating>& ratings) {
  if (ratings.size() != g.node_count()) throw DomainError("with_ratings: size mismatch");
  std::vector<FirmMeta> nodes(g.nodes().begin(), g.nodes().end());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].rating = ratings[i];
  return PaymentGraph::from_edges(std::move(nodes), g.edges());
}

// ---------------------------------------------------------------------------

HierarchyGraph gen_hierarchy_graph(const HierarchySpec& spec) {
  if (spec.n_ranks < 2) throw DomainError("hierarchy generator needs at least two ranks");
  if (spec.n < 2 * spec.n_ranks) throw DomainError("hierarchy generator needs at least two nodes per rank");
  if (spec.forward_prob < 0 || spec.forward_prob > 1 || spec.noise_prob < 0 || spec.noise_prob > 1)
    throw DomainError("hierarchy generator probabilities must lie in [0, 1]");
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n, R = spec.n_ranks;

  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  HierarchyGraph h;
  h.ranks.assign(n, 0);
  std::vector<std::vector<NodeId>> by_rank(R + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rank = i * R / n + 1;
    h.ranks[perm[i]] = static_cast<std::int64_t>(rank);
    by_rank[rank].push_back(perm[i]);
  }
  for (auto& members : by_rank) std::sort(members.begin(), members.end());
  // Nodes that can emit forward edges: every rank but the top.
  std::vector<NodeId> lower;
  for (std::size_t rank = 1; rank < R; ++rank) lower.insert(lower.end(), by_rank[rank].begin(), by_rank[rank].end());

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto member = [&](std::size_t rank) {
    const auto& v = by_rank[rank];
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  const auto m_target = static_cast<std::size_t>(std::llround(spec.mean_degree * static_cast<double>(n)));
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  for (std::size_t attempt = 0; edges.size() < m_target && attempt < 50 * m_target; ++attempt) {
    NodeId u, v;
    if (unit(rng) < spec.noise_prob) {
      u = static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
      const auto ru = static_cast<std::size_t>(h.ranks[u]);
      const bool lateral = ru == 1 || unit(rng) < 0.75;
      v = member(lateral ? ru : ru - 1);
    } else {
      u = lower[std::uniform_int_distribution<std::size_t>(0, lower.size() - 1)(rng)];
      const auto ru = static_cast<std::size_t>(h.ranks[u]);
      std::size_t rv = ru + 1;
      if (ru + 2 <= R && unit(rng) >= spec.forward_prob)
        rv = std::uniform_int_distribution<std::size_t>(ru + 2, R)(rng);
      v = member(rv);
    }
    if (u == v || !seen.insert(edge_key(u, v)).second) continue;
    edges.push_back({u, v, draw_weight(spec.weights, rng)});
  }
  for (const Edge& e : edges)
    if (h.ranks[e.src] >= h.ranks[e.dst]) ++h.planted_backward;
  h.graph = PaymentGraph::from_edges(customers(n, {}), std::move(edges));
  h.planted_agony = partition::agony(h.graph, h.ranks);
  return h;
}

ModularGraph gen_modular_graph(const ModularSpec& spec) {
  if (!(spec.p_in > spec.p_out)) throw DomainError("modular generator needs p_in > p_out");
  if (spec.p_out < 0 || spec.p_in > 1) throw DomainError("modular generator probabilities must lie in [0, 1]");
  if (spec.n_modules < 1 || spec.n < spec.n_modules) throw DomainError("modular generator needs 1 <= n_modules <= n");
  if (!spec.module_priors.empty() && spec.module_priors.size() != spec.n_modules)
    throw DomainError("module_priors needs one prior per module");
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n, k = spec.n_modules;
  ModularGraph out;
  out.modules.resize(n);
  std::vector<std::size_t> start(k + 1);
  for (std::size_t c = 0; c <= k; ++c) start[c] = c * n / k;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = start[c]; i < start[c + 1]; ++i) out.modules[i] = static_cast<std::uint32_t>(c + 1);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const double p = a == b ? spec.p_in : spec.p_out;
      if (p <= 0) continue;
      const std::size_t rows = start[a + 1] - start[a], cols = start[b + 1] - start[b];
      const std::uint64_t cells = static_cast<std::uint64_t>(rows) * cols;
      const double log_q = p < 1 ? std::log1p(-p) : 0.0;
      // Geometric skips over the cells of the block.
      for (std::uint64_t t = 0;; ++t) {
        if (p < 1) t += static_cast<std::uint64_t>(std::floor(std::log(1.0 - unit(rng)) / log_q));
        if (t >= cells) break;
        const auto u = static_cast<NodeId>(start[a] + t / cols);
        const auto v = static_cast<NodeId>(start[b] + t % cols);
        if (u != v) edges.push_back({u, v, draw_weight(spec.weights, rng)});
      }
    }
  std::vector<Rating> ratings(n);
  for (std::size_t i = 0; i < n; ++i)
    ratings[i] = draw_rating(spec.module_priors.empty() ? spec.prior : spec.module_priors[out.modules[i] - 1], rng);
  out.graph = PaymentGraph::from_edges(customers(n, ratings), std::move(edges));
  return out;
}

CustomerGraph gen_customer_graph(const CustomerSpec& spec) {
  if (spec.n < 10 || spec.n_modules < 1) throw DomainError("customer generator needs n >= 10 and a module");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = spec.n, k = spec.n_modules;

  std::vector<Prior> module_prior(k);
  for (Prior& p : module_prior) {
    double sum = 0.0;
    for (std::size_t x = 0; x < 3; ++x) {
      p[x] = spec.rated_prior[x] * std::exp(spec.module_bias * gauss(rng));
      sum += p[x];
    }
    for (std::size_t x = 0; x < 3; ++x) p[x] /= sum;
    p[3] = 0.0;
  }
  // The tilt skews the pooled shares; rescale columns until the module
  // average matches the prior again.
  for (int iter = 0; iter < 50; ++iter) {
    for (std::size_t x = 0; x < 3; ++x) {
      double mean = 0.0;
      for (const Prior& p : module_prior) mean += p[x] / static_cast<double>(k);
      if (mean > 0.0)
        for (Prior& p : module_prior) p[x] *= spec.rated_prior[x] / mean;
    }
    for (Prior& p : module_prior) {
      const double sum = p[0] + p[1] + p[2];
      for (std::size_t x = 0; x < 3; ++x) p[x] /= sum;
    }
  }

  CustomerGraph out;
  out.modules.resize(n);
  out.true_ratings.resize(n);
  std::vector<double> activity(n);
  Sampler all;
  std::vector<Sampler> by_rating(3), by_module(k);
  for (NodeId i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, k - 1)(rng));
    out.modules[i] = c + 1;
    const Rating r = draw_rating(module_prior[c], rng);
    out.true_ratings[i] = r;
    activity[i] = spec.activity_scale[index_of(r)] * sample_pareto(spec.activity_alpha, 1.0, rng);
    all.add(i, activity[i]);
    by_rating[index_of(r)].add(i, activity[i]);
    by_module[c].add(i, activity[i]);
  }

  const auto m_target = static_cast<std::size_t>(std::llround(spec.mean_degree * static_cast<double>(n)));
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  for (std::size_t attempt = 0; edges.size() < m_target && attempt < 20 * m_target; ++attempt) {
    const NodeId u = all.draw(rng);
    NodeId v;
    if (unit(rng) < spec.homophily)
      v = by_rating[index_of(out.true_ratings[u])].draw(rng);
    else if (unit(rng) < spec.module_affinity)
      v = by_module[out.modules[u] - 1].draw(rng);
    else
      v = all.draw(rng);
    if (u == v || !seen.insert(edge_key(u, v)).second) continue;
    edges.push_back({u, v, draw_weight(spec.weights, rng)});
  }

  std::vector<Rating> visible = out.true_ratings;
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto hidden = static_cast<std::size_t>(std::llround(spec.na_share * static_cast<double>(n)));
  for (std::size_t i = 0; i < hidden; ++i) visible[order[i]] = Rating::NA;
  out.graph = PaymentGraph::from_edges(customers(n, visible), std::move(edges));
  return out;
}

// ---------------------------------------------------------------------------

void write_transactions(std::ostream& out, const PaymentGraph& g, int first_year, int months, std::uint64_t seed) {
  if (months < 1) throw DomainError("write_transactions needs at least one month");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_int_distribution<int> day(1, 28), count(1, 3);
  out << "payer,payee,date,amount,count,kind\n";
  std::vector<double> share(static_cast<std::size_t>(months));
  char buf[128];
  for (const Edge& e : g.edges()) {
    double sum = 0.0;
    for (double& s : share) sum += (s = unit(rng));
    const auto total = static_cast<std::int64_t>(std::llround(e.weight * 100.0));
    std::int64_t left = total;
    for (int mo = 0; mo < months; ++mo) {
      std::int64_t cents = mo + 1 == months ? left
                                            : static_cast<std::int64_t>(std::floor(
                                                  static_cast<double>(total) * share[static_cast<std::size_t>(mo)] / sum));
      cents = std::min(cents, left);
      left -= cents;
      const int d = day(rng), c = count(rng);
      if (cents <= 0) continue;
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d,%lld.%02lld,%d,transfer", first_year + mo / 12, mo % 12 + 1, d,
                    static_cast<long long>(cents / 100), static_cast<long long>(cents % 100), c);
      out << g.meta(e.src).id << ',' << g.meta(e.dst).id << ',' << buf << '\n';
    }
  }
}

void write_firms(std::ostream& out, const PaymentGraph& g) {
  out << "id,status,rating,sector\n";
  for (const FirmMeta& f : g.nodes())
    out << f.id << ',' << to_string(f.status) << ',' << to_string(f.rating) << ',' << f.sector.value_or("") << '\n';
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

std::string_view model_name(Model m) {
  switch (m) {
    case Model::powerlaw: return "powerlaw";
    case Model::hierarchy: return "hierarchy";
    case Model::modular: return "modular";
    case Model::customer: return "customer";
  }
  return "?";
}

void check_prior(const Prior& p, const std::string& what) {
  double s = 0.0;
  for (double x : p) {
    if (x < 0 || x > 1) throw ConfigError(what + ": probabilities must lie in [0, 1]");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-6) throw ConfigError(what + " must sum to 1");
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0 && p <= 1)) throw ConfigError(what + " must lie in [0, 1]");
}

template <class T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) j.at(key).get_to(target);
}

}  // namespace

SynthSpec spec_from_json(const json& j) {
  SynthSpec s;
  try {
    if (!j.is_object()) throw ConfigError("synth spec must be a JSON object");
    if (j.contains("model")) {
      const std::string m = j.at("model").get<std::string>();
      if (m == "powerlaw")
        s.model = Model::powerlaw;
      else if (m == "hierarchy")
        s.model = Model::hierarchy;
      else if (m == "modular")
        s.model = Model::modular;
      else if (m == "customer")
        s.model = Model::customer;
      else
        throw ConfigError("unknown synth model '" + m + "' (powerlaw, hierarchy, modular, customer)");
    }
    read(j, "n", s.n);
    read(j, "degree_alpha_in", s.alpha_in);
    read(j, "degree_alpha_out", s.alpha_out);
    read(j, "rating_prior", s.rating_prior);
    if (j.contains("mixing")) {
      j.at("mixing").get_to(s.mixing);
      s.has_mixing = true;
    }
    read(j, "mixing_sweeps", s.mixing_sweeps);
    read(j, "n_modules", s.n_modules);
    read(j, "p_in", s.p_in);
    read(j, "p_out", s.p_out);
    read(j, "module_priors", s.module_priors);
    read(j, "n_ranks", s.n_ranks);
    read(j, "forward_edge_prob", s.forward_edge_prob);
    read(j, "noise_prob", s.noise_prob);
    read(j, "mean_degree", s.mean_degree);
    read(j, "seed", s.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
  if (s.n < 2) throw ConfigError("synth spec: n must be at least 2");
  check_prior(s.rating_prior, "rating_prior");
  if (s.has_mixing)
    for (std::size_t a = 0; a < 4; ++a) check_prior(s.mixing[a], "mixing row " + std::to_string(a));
  for (std::size_t i = 0; i < s.module_priors.size(); ++i) check_prior(s.module_priors[i], "module prior");
  check_probability(s.forward_edge_prob, "forward_edge_prob");
  check_probability(s.noise_prob, "noise_prob");
  check_probability(s.p_in, "p_in");
  check_probability(s.p_out, "p_out");
  if (s.model == Model::powerlaw && !(s.alpha_in > 2 && s.alpha_out > 2))
    throw ConfigError("synth spec: degree exponents must exceed 2");
  if (s.model == Model::hierarchy && s.n_ranks < 2) throw ConfigError("synth spec: n_ranks must be at least 2");
  if (s.model == Model::modular && !(s.p_in > s.p_out)) throw ConfigError("synth spec: p_in must exceed p_out");
  if (!(s.mean_degree > 0)) throw ConfigError("synth spec: mean_degree must be positive");
  return s;
}

json to_json(const SynthSpec& s) {
  json j{{"model", model_name(s.model)},
         {"n", s.n},
         {"degree_alpha_in", s.alpha_in},
         {"degree_alpha_out", s.alpha_out},
         {"rating_prior", s.rating_prior},
         {"mixing_sweeps", s.mixing_sweeps},
         {"n_modules", s.n_modules},
         {"p_in", s.p_in},
         {"p_out", s.p_out},
         {"module_priors", s.module_priors},
         {"n_ranks", s.n_ranks},
         {"forward_edge_prob", s.forward_edge_prob},
         {"noise_prob", s.noise_prob},
         {"mean_degree", s.mean_degree},
         {"seed", s.seed}};
  if (s.has_mixing) j["mixing"] = s.mixing;
  return j;
}

SynthOutput generate(const SynthSpec& spec) {
  SynthOutput out;
  out.truth = {{"model", model_name(spec.model)}, {"seed", spec.seed}};
  std::mt19937_64 rng(spec.seed ^ 0x5bd1e995ULL);
  PaymentGraph g;
  switch (spec.model) {
    case Model::powerlaw: {
      PowerLawSpec p;
      p.n = spec.n;
      p.alpha_in = spec.alpha_in;
      p.alpha_out = spec.alpha_out;
      p.seed = spec.seed;
      g = gen_powerlaw_digraph(p);
      break;
    }
    case Model::hierarchy: {
      HierarchySpec h;
      h.n = spec.n;
      h.n_ranks = spec.n_ranks;
      h.forward_prob = spec.forward_edge_prob;
      h.noise_prob = spec.noise_prob;
      h.mean_degree = spec.mean_degree;
      h.seed = spec.seed;
      HierarchyGraph hg = gen_hierarchy_graph(h);
      out.truth["ranks"] = hg.ranks;
      out.truth["planted_backward"] = hg.planted_backward;
      out.truth["planted_agony"] = hg.planted_agony;
      g = std::move(hg.graph);
      break;
    }
    case Model::modular: {
      ModularSpec m;
      m.n = spec.n;
      m.n_modules = spec.n_modules;
      m.p_in = spec.p_in;
      m.p_out = spec.p_out;
      m.prior = spec.rating_prior;
      m.module_priors = spec.module_priors;
      m.seed = spec.seed;
      ModularGraph mg = gen_modular_graph(m);
      out.truth["modules"] = mg.modules;
      out.graph = std::move(mg.graph);
      return out;
    }
    case Model::customer: {
      CustomerSpec c;
      c.n = spec.n;
      c.n_modules = spec.n_modules;
      c.mean_degree = spec.mean_degree;
      c.seed = spec.seed;
      CustomerGraph cg = gen_customer_graph(c);
      json ratings = json::array();
      for (Rating r : cg.true_ratings) ratings.push_back(to_string(r));
      out.truth["true_ratings"] = std::move(ratings);
      out.truth["modules"] = cg.modules;
      out.graph = std::move(cg.graph);
      return out;
    }
  }
  // Ratings for the structural models: planted mixing when requested,
  // otherwise the prior's exact multiset.
  if (spec.has_mixing) {
    const PlantResult p = plant_ratings(g, spec.rating_prior, spec.mixing, spec.mixing_sweeps, spec.seed + 1);
    out.truth["mixing_achieved"] = p.achieved;
    out.truth["mixing_converged"] = p.converged;
    out.truth["mixing_max_deviation"] = p.max_deviation;
    out.graph = with_ratings(g, p.ratings);
  } else {
    out.graph = with_ratings(g, prior_multiset(spec.rating_prior, g.node_count(), rng));
  }
  return out;
}

}  // namespace paynet::synth
