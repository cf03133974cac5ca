#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "paynet/ingest.hpp"
#include "paynet/metrics.hpp"
#include "paynet/partition.hpp"
#include "paynet/synth.hpp"

using namespace paynet;
using namespace paynet::synth;

TEST_CASE("zeta and Pareto samplers match their means") {
  const double alpha = 3.5;
  const auto k = zeta_samples(alpha, 200000, 1);
  double mean = 0;
  for (double v : k) {
    CHECK(v >= 1);
    CHECK(v == std::floor(v));
    mean += v / static_cast<double>(k.size());
  }
  const double expected = metrics::hurwitz_zeta(alpha - 1, 1) / metrics::hurwitz_zeta(alpha, 1);
  CHECK(mean == doctest::Approx(expected).epsilon(0.02));
  const auto x = pareto_samples(alpha, 2.0, 200000, 2);
  double mx = 0, lo = 1e9;
  for (double v : x) {
    mx += v / static_cast<double>(x.size());
    lo = std::min(lo, v);
  }
  CHECK(lo >= 2.0);
  CHECK(mx == doctest::Approx(2.0 * (alpha - 1) / (alpha - 2)).epsilon(0.02));
  CHECK(zeta_samples(2.5, 10, 4) == zeta_samples(2.5, 10, 4));
}

TEST_CASE("configuration model graph") {
  PowerLawSpec s;
  s.n = 2000;
  const auto g = gen_powerlaw_digraph(s);
  CHECK(g.node_count() == 2000);
  CHECK(g.edge_count() > 1000);
  for (const auto& e : g.edges()) {
    CHECK(e.src != e.dst);
    CHECK(e.weight > 0);
  }
}

TEST_CASE("rating planting keeps the prior multiset and reports its mixing") {
  PowerLawSpec s;
  s.n = 1500;
  s.alpha_in = s.alpha_out = 2.4;
  const auto g = gen_powerlaw_digraph(s);
  Mixing target{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) target[i][j] = i == j ? 0.7 : 0.1;
  const Prior prior{0.35, 0.38, 0.07, 0.20};
  const PlantResult p = plant_ratings(g, prior, target, 40, 3);
  std::array<std::size_t, 4> count{};
  for (Rating r : p.ratings) ++count[index_of(r)];
  CHECK(count[0] == 525);
  CHECK(count[1] == 570);
  CHECK(count[2] == 105);
  CHECK(count[3] == 300);
  // Row-conditional weighted mixing recomputed from the labels.
  std::array<std::array<double, 4>, 4> vol{};
  for (const auto& e : g.edges()) vol[index_of(p.ratings[e.src])][index_of(p.ratings[e.dst])] += e.weight;
  double dev = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    double row = 0;
    for (double v : vol[i]) row += v;
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(p.achieved[i][j] == doctest::Approx(vol[i][j] / row).epsilon(1e-9));
      dev = std::max(dev, std::fabs(vol[i][j] / row - target[i][j]));
    }
  }
  CHECK(p.max_deviation == doctest::Approx(dev).epsilon(1e-9));
}

TEST_CASE("hierarchy generator reports its own agony") {
  HierarchySpec s;
  s.n = 500;
  const auto h = gen_hierarchy_graph(s);
  CHECK(partition::agony(h.graph, h.ranks) == h.planted_agony);
  std::size_t backward = 0;
  for (const auto& e : h.graph.edges()) backward += h.ranks[e.src] >= h.ranks[e.dst];
  CHECK(backward == h.planted_backward);
  CHECK(static_cast<double>(backward) / static_cast<double>(h.graph.edge_count()) == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("planted partition densities") {
  ModularSpec s;
  const auto mg = gen_modular_graph(s);
  double in = 0, out = 0;
  for (const auto& e : mg.graph.edges()) (mg.modules[e.src] == mg.modules[e.dst] ? in : out) += 1;
  const double pairs_in = 4.0 * 100 * 99, pairs_out = 400.0 * 399 - pairs_in;
  CHECK(in / pairs_in == doctest::Approx(0.3).epsilon(0.05));
  CHECK(out / pairs_out == doctest::Approx(0.01).epsilon(0.15));
  s.p_in = 0.01;
  CHECK_THROWS_AS(gen_modular_graph(s), DomainError);
}

TEST_CASE("customer graph hides the requested share of ratings") {
  CustomerSpec s;
  s.n = 5000;
  const auto cg = gen_customer_graph(s);
  std::size_t hidden = 0, h = 0;
  for (graph::NodeId v = 0; v < cg.graph.node_count(); ++v) {
    hidden += cg.graph.meta(v).rating == Rating::NA;
    h += cg.true_ratings[v] == Rating::H;
    CHECK(is_known(cg.true_ratings[v]));
  }
  CHECK(hidden == 1000);
  CHECK(static_cast<double>(h) / 5000 == doctest::Approx(0.10).epsilon(0.2));
  CHECK(metrics::rating_assortativity(cg.graph, false).r > 0.1);
}

TEST_CASE("transactions written by the generator rebuild the same graph") {
  ModularSpec s;
  s.n = 80;
  s.p_in = 0.2;
  const auto mg = gen_modular_graph(s);
  std::stringstream tx, firms;
  write_transactions(tx, mg.graph, 2014, 3, 5);
  write_firms(firms, mg.graph);
  const auto rec = ingest::parse_transactions(tx);
  const auto fm = ingest::parse_firms(firms);
  CHECK(rec.errors.empty());
  CHECK(fm.errors.empty());
  CHECK(ingest::windows_spanned(rec.rows, ingest::Granularity::monthly).size() == 3);
  const auto rebuilt = ingest::build_network(rec.rows, fm.rows).graph;
  const auto a = mg.graph.edges(), b = rebuilt.edges();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i].weight == doctest::Approx(a[i].weight).epsilon(1e-12));
  // Isolated firms have no transactions and drop out.
  CHECK(rebuilt.node_count() <= mg.graph.node_count());
}

TEST_CASE("spec parsing validates fields") {
  const auto s = spec_from_json({{"model", "modular"}, {"n", 200}, {"p_in", 0.2}, {"p_out", 0.01}});
  CHECK(s.model == Model::modular);
  CHECK(spec_from_json(to_json(s)).n == 200);
  CHECK_THROWS_AS(spec_from_json({{"model", "lattice"}}), ConfigError);
  CHECK_THROWS_AS(spec_from_json({{"rating_prior", {0.5, 0.5, 0.5, 0.0}}}), ConfigError);
  CHECK_THROWS_AS(spec_from_json({{"noise_prob", 1.5}}), ConfigError);
  CHECK_THROWS_AS(spec_from_json({{"n", "many"}}), ConfigError);
}

TEST_CASE("generate is deterministic and records truth") {
  SynthSpec s;
  s.model = Model::hierarchy;
  s.n = 300;
  const SynthOutput a = generate(s), b = generate(s);
  CHECK(a.truth.dump() == b.truth.dump());
  CHECK(a.graph.edges().size() == b.graph.edges().size());
  CHECK(a.truth.contains("ranks"));
  s.model = Model::powerlaw;
  s.has_mixing = true;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) s.mixing[i][j] = i == j ? 0.85 : 0.05;
  const SynthOutput p = generate(s);
  std::set<Rating> seen;
  for (Rating r : p.graph.ratings()) seen.insert(r);
  CHECK(seen.size() == 4);
}
