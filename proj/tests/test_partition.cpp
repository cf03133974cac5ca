#include <random>

#include "doctest.h"
#include "paynet/partition.hpp"
#include "paynet/synth.hpp"
#include "support.hpp"

using namespace paynet;
using namespace paynet::partition;
using namespace testing_support;

TEST_CASE("modularity matches the edge-by-edge definition") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::uint32_t> lab(0, 3);
  for (int t = 0; t < 30; ++t) {
    const auto g = random_digraph(10, 0.25, rng);
    if (g.edge_count() == 0) continue;
    std::vector<std::uint32_t> c(10);
    for (auto& v : c) v = lab(rng);
    CHECK(modularity(g, c) == doctest::Approx(modularity_oracle(g, c)).epsilon(1e-12));
  }
}

TEST_CASE("weighted modularity uses edge weights") {
  const auto g = make_graph(4, {{0, 1}, {2, 3}, {1, 2}}, {}, {2, 2, 4});
  const std::vector<std::uint32_t> c{1, 1, 2, 2};
  // W = 8; inside 4; K_out(A)=6 K_in(A)=2, K_out(B)=2 K_in(B)=6.
  CHECK(modularity(g, c, true) == doctest::Approx((4 - (6 * 2 + 2 * 6) / 8.0) / 8.0));
  CHECK(modularity(g, c, false) == doctest::Approx((2 - (2 * 1 + 1 * 2) / 3.0) / 3.0));
}

TEST_CASE("Louvain matches the exhaustive optimum on small graphs") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 15; ++t) {
    const auto g = random_digraph(7, 0.3, rng);
    if (g.edge_count() == 0) continue;
    double best = -2;
    for_each_set_partition(7, [&](const std::vector<std::uint32_t>& c) { best = std::max(best, modularity_oracle(g, c)); });
    const auto p = louvain(g, {.seed = 3, .restarts = 4});
    // Louvain is a heuristic; it must reach a valid partition not above the optimum.
    CHECK(p.score <= best + 1e-12);
    CHECK(p.score == doctest::Approx(modularity(g, p.assignment)).epsilon(1e-12));
    CHECK(p.score >= best - 0.1);
  }
}

TEST_CASE("Louvain groups are numbered by size and deterministic per seed") {
  synth::ModularSpec spec;
  spec.n = 120;
  spec.n_modules = 3;
  spec.p_in = 0.3;
  spec.p_out = 0.02;
  const auto mg = synth::gen_modular_graph(spec);
  const auto a = louvain(mg.graph, {.seed = 9});
  const auto b = louvain(mg.graph, {.seed = 9});
  CHECK(a.assignment == b.assignment);
  const auto sizes = a.group_sizes();
  for (std::size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i - 1] >= sizes[i]);
  for (auto g : a.assignment) CHECK((g >= 1 && g <= a.n_groups));
  CHECK_FALSE(a.ordered);
}

TEST_CASE("agony of explicit rankings") {
  const auto g = make_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  const std::vector<std::int64_t> up{1, 2, 3};
  CHECK(agony(g, up) == 3);  // back edge 2 -> 0 spans 2 levels: 2 + 1
  const std::vector<std::int64_t> flat{5, 5, 5};
  CHECK(agony(g, flat) == 3);
}

TEST_CASE("exact agony equals brute force") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 60; ++t) {
    const auto g = random_digraph(2 + t % 6, 0.35, rng);
    if (g.edge_count() == 0) continue;
    const auto p = minimize_agony(g, AgonyMode::exact_small);
    CHECK(p.agony == brute_force_agony(g));
    CHECK(p.ordered);
    CHECK(p.score == doctest::Approx(1.0 - static_cast<double>(p.agony) / static_cast<double>(g.edge_count())));
  }
}

TEST_CASE("heuristic agony: certified bounds and exact on small graphs") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_digraph(8, 0.3, rng);
    if (g.edge_count() == 0) continue;
    const auto h = minimize_agony(g, AgonyMode::heuristic);
    const auto e = minimize_agony(g, AgonyMode::exact_small);
    CHECK(h.agony >= e.agony);
    CHECK(h.agony_lower_bound <= e.agony);
    std::vector<std::int64_t> r(h.assignment.begin(), h.assignment.end());
    CHECK(agony(g, r) == h.agony);
  }
}

TEST_CASE("agony guards") {
  CHECK_THROWS_AS(minimize_agony(make_graph(3, {}), AgonyMode::heuristic), DomainError);
  std::mt19937_64 rng(1);
  const auto big = random_digraph(kExactAgonyLimit + 1, 0.2, rng);
  CHECK_THROWS_AS(minimize_agony(big, AgonyMode::exact_small), DomainError);
}

TEST_CASE("hierarchy recovers planted levels on a clean layered graph") {
  synth::HierarchySpec spec;
  spec.n = 400;
  spec.noise_prob = 0.0;
  const auto hg = synth::gen_hierarchy_graph(spec);
  const auto p = minimize_agony(hg.graph, AgonyMode::heuristic);
  CHECK(p.agony == 0);
  CHECK(p.score == 1.0);
}

TEST_CASE("nmi") {
  const std::vector<std::uint32_t> a{1, 1, 2, 2, 3, 3}, b{7, 7, 4, 4, 9, 9}, c{1, 2, 1, 2, 1, 2};
  CHECK(nmi(a, b) == doctest::Approx(1.0));
  CHECK(nmi(a, c) == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<std::uint32_t> k1(6, 1), k2(6, 4);
  CHECK(nmi(k1, k2) == 1.0);
}

TEST_CASE("group risk profiles: thresholds and skipped groups") {
  RankedPartition p;
  p.n_groups = 3;
  std::vector<Rating> r;
  // Group 1: 60 nodes all H; group 2: 60 nodes all L; group 3: 5 nodes.
  for (int i = 0; i < 60; ++i) {
    p.assignment.push_back(1);
    r.push_back(Rating::H);
  }
  for (int i = 0; i < 60; ++i) {
    p.assignment.push_back(2);
    r.push_back(i % 2 ? Rating::L : Rating::NA);
  }
  for (int i = 0; i < 5; ++i) {
    p.assignment.push_back(3);
    r.push_back(Rating::M);
  }
  const auto rep = group_risk_profiles(p, r, 20, 0.01);
  CHECK(rep.tested_groups == 2);
  CHECK(rep.total_groups == 3);
  CHECK(rep.skipped == std::vector<std::uint32_t>{3});
  CHECK(rep.rated_population == 95);
  REQUIRE(rep.results.size() == 6);
  for (const auto& e : rep.results) {
    CHECK(e.threshold == doctest::Approx(0.01 / 6));
    if (e.group == 1 && e.rating == Rating::H) {
      CHECK(e.direction == riskstats::Over::over);
      CHECK(e.significant);
      CHECK(e.draws == 60);
      CHECK(e.successes == 60);
    }
  }
}
