#include <cmath>
#include <random>

#include "doctest.h"
#include "paynet/riskstats.hpp"
#include "support.hpp"

using namespace paynet;
using namespace paynet::riskstats;
using testing_support::make_graph;

TEST_CASE("rating shares by degree") {
  // In-degrees: v1 = 1 (L), v2 = 2 (H), v3 = 1 (M), v0 = 0 (NA, ignored).
  const auto g = make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}}, {Rating::NA, Rating::L, Rating::H, Rating::M});
  const auto in = rating_given_degree(g, Direction::in);
  REQUIRE(in.count(1) == 1);
  CHECK(in.at(1).rated == 2);
  CHECK(in.at(1).share[0] == doctest::Approx(0.5));
  CHECK(in.at(1).share[1] == doctest::Approx(0.5));
  CHECK(in.at(2).share[2] == doctest::Approx(1.0));
  CHECK(in.count(0) == 0);
  const auto none = make_graph(2, {{0, 1}});
  CHECK_THROWS_AS(rating_given_degree(none, Direction::out), DomainError);
}

TEST_CASE("binary logit: score equations hold at the optimum") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 3000; ++i) {
    const std::array<double, 2> row{nd(rng), nd(rng)};
    x.append_row(row);
    y.push_back(u(rng) < 1 / (1 + std::exp(-(0.3 + 1.2 * row[0] - 0.7 * row[1]))));
  }
  const BinaryLogitFit f = fit_binary_logit(x, y);
  CHECK(f.converged);
  CHECK_FALSE(f.separated);
  std::vector<double> grad;
  const std::vector<double> p{f.intercept, f.slopes[0], f.slopes[1]};
  binary_logit_loglik(p, x, y, &grad);
  for (double g : grad) CHECK(std::fabs(g) < 1e-6);
  CHECK(f.slopes[0] == doctest::Approx(1.2).epsilon(0.15));
  CHECK(f.std_errors.size() == 3);
  CHECK(f.std_errors[1] > 0);
}

TEST_CASE("binary logit flags separation") {
  Matrix x;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 40; ++i) {
    const std::array<double, 1> row{static_cast<double>(i)};
    x.append_row(row);
    y.push_back(i < 20);
  }
  CHECK(fit_binary_logit(x, y).separated);
}

TEST_CASE("cumulative logit needs two ratings and predicts a distribution") {
  Matrix x;
  std::vector<Rating> y;
  for (int i = 0; i < 30; ++i) {
    const std::array<double, 1> row{static_cast<double>(i % 7)};
    x.append_row(row);
    y.push_back(Rating::M);
  }
  CHECK_THROWS_AS(fit_cumulative_logit(x, y), DomainError);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> r(0, 2);
  for (auto& v : y) v = kKnownRatings[static_cast<std::size_t>(r(rng))];
  const auto m = fit_cumulative_logit(x, y);
  const std::array<double, 1> probe{3.0};
  const auto p = m.predict(probe);
  CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
}

TEST_CASE("hypergeometric tails: both inclusive, complementary") {
  for (std::uint64_t k = 0; k <= 5; ++k) {
    const double up = hypergeom_upper(k, 5, 8, 20), down = hypergeom_lower(k, 5, 8, 20);
    const double next_up = k < 5 ? hypergeom_upper(k + 1, 5, 8, 20) : 0.0;
    CHECK(down + next_up == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(static_cast<double>(testing_support::hypergeom_tail_oracle(k, 5, 8, 20, true)) ==
          doctest::Approx(up).epsilon(1e-14));
  }
  CHECK(hypergeom_upper(0, 5, 8, 20) == doctest::Approx(1.0));
  CHECK(hypergeom_upper(6, 5, 8, 20) == 0.0);
}

TEST_CASE("hypergeometric tails stay accurate far in the tail") {
  // C(100,50)C(100,0)/C(200,50) written out as a product.
  double p = 1;
  for (int i = 0; i < 50; ++i) p *= static_cast<double>(100 - i) / static_cast<double>(200 - i);
  CHECK(hypergeom_upper(50, 50, 100, 200) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("hypergeometric test: direction, ties and Bonferroni") {
  const auto over = hypergeom_test(9, 10, 30, 100, 1, 0.01);
  CHECK(over.direction == Over::over);
  CHECK(over.significant);
  CHECK(over.p_value == doctest::Approx(hypergeom_upper(9, 10, 30, 100)));
  const auto under = hypergeom_test(0, 20, 50, 100, 1, 0.01);
  CHECK(under.direction == Over::under);
  CHECK(under.p_value == doctest::Approx(hypergeom_lower(0, 20, 50, 100)));
  const auto tie = hypergeom_test(3, 10, 30, 100, 1, 0.01);
  CHECK(tie.tie);
  CHECK(tie.p_value == doctest::Approx(hypergeom_lower(3, 10, 30, 100)));
  const auto many = hypergeom_test(9, 10, 30, 100, 1000000, 0.01);
  CHECK(many.threshold == doctest::Approx(1e-8));
  CHECK_THROWS(hypergeom_test(11, 10, 30, 100, 1, 0.01));
  CHECK_THROWS(hypergeom_test(1, 10, 30, 100, 0, 0.01));
}

TEST_CASE("binomial tails against direct sums") {
  const std::uint64_t n = 30;
  const double p = 0.23;
  std::vector<double> pmf(n + 1);
  for (std::uint64_t i = 0; i <= n; ++i)
    pmf[i] = static_cast<double>(testing_support::binom128(n, i)) * std::pow(p, i) * std::pow(1 - p, n - i);
  for (std::uint64_t k = 0; k <= n; ++k) {
    double up = 0, down = 0;
    for (std::uint64_t i = 0; i <= n; ++i) (i >= k ? up : down) += pmf[i];
    down += pmf[k];
    CHECK(binomial_upper(k, n, p) == doctest::Approx(up).epsilon(1e-10));
    CHECK(binomial_lower(k, n, p) == doctest::Approx(down).epsilon(1e-10));
  }
}

TEST_CASE("distance table counts pairs by hop distance") {
  // 0(L) -> 1(NA) -> 2(H) -> 3(L); 0 -> 3 as well; 4(M) -> 0.
  const auto g = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {4, 0}},
                            {Rating::L, Rating::NA, Rating::H, Rating::L, Rating::M});
  const DistanceTable t = distance_conditional_ratings(g, Rating::L, 5);
  CHECK(t.sources == 2);
  CHECK(t.null_share[0] == doctest::Approx(0.5));
  REQUIRE(t.shells.size() == 2);
  CHECK(t.shells[0].k == 1);
  CHECK(t.shells[0].pairs == std::array<std::uint64_t, 3>{1, 0, 0});  // 0 -> 3
  CHECK(t.shells[1].k == 2);
  CHECK(t.shells[1].pairs == std::array<std::uint64_t, 3>{0, 0, 1});  // 0 -> 2 through NA
  CHECK(t.shells[1].share[2] == doctest::Approx(1.0));
  CHECK(distance_conditional_ratings(g, Rating::L, 1).shells.size() == 1);
  CHECK_THROWS_AS(distance_conditional_ratings(g, Rating::NA), DomainError);
}

TEST_CASE("excess volume follows the normalized deviation formula") {
  // L: 0, 1; H: 2. Volumes: 0->1 3, 0->2 1, 2->1 4.
  const auto g = make_graph(3, {{0, 1}, {0, 2}, {2, 1}}, {Rating::L, Rating::L, Rating::H}, {3, 1, 4});
  const ExcessVolume ev = excess_volume_samples(g);
  const double a_l = 0.5, a_h = 0.5, b_l = 7.0 / 8.0, b_h = 1.0 / 8.0;
  CHECK(ev.a[0] == doctest::Approx(a_l));
  CHECK(ev.a[2] == doctest::Approx(a_h));
  CHECK(ev.b[0] == doctest::Approx(b_l));
  CHECK(ev.b[2] == doctest::Approx(b_h));
  // Node 0 out: 3/4 to L, 1/4 to H.
  const auto& out_ll = ev.get(Direction::out, Rating::L, Rating::L);
  REQUIRE(out_ll.size() == 1);
  CHECK(out_ll[0] == doctest::Approx((0.75 - a_l * b_l) / (1 - a_l * b_l)));
  // Node 1 in: 3 from L, 4 from H.
  const auto& in_lh = ev.get(Direction::in, Rating::L, Rating::H);
  REQUIRE(in_lh.size() == 1);  // node 0 receives nothing
  CHECK(in_lh[0] == doctest::Approx((4.0 / 7.0 - a_h * b_l) / (1 - a_h * b_l)));
}

TEST_CASE("Mann-Whitney: exact small samples, normal approximation above") {
  const std::vector<double> a{1.1, 2.5, 3.3, 4.8}, b{0.2, 0.4, 1.0};
  const auto r = mann_whitney_u(a, b, Alternative::greater);
  CHECK(r.exact);
  CHECK(r.u == 12.0);
  CHECK(r.p == doctest::Approx(1.0 / 35.0));
  std::vector<double> big_a, big_b;
  for (int i = 0; i < 30; ++i) {
    big_a.push_back(i);
    big_b.push_back(i + 0.5);
  }
  const auto n = mann_whitney_u(big_a, big_b, Alternative::two_sided);
  CHECK_FALSE(n.exact);
  CHECK(n.p > 0.5);
  CHECK_THROWS(mann_whitney_u(std::vector<double>{}, b, Alternative::less));
}

TEST_CASE("Mann-Whitney exact p with ties matches enumeration") {
  const std::vector<double> a{1, 2, 2, 3, 3}, b{2, 3, 3, 4, 5, 5};
  const auto oracle = testing_support::mann_whitney_enumerated(a, b);
  CHECK(mann_whitney_u(a, b, Alternative::less).p == doctest::Approx(oracle.less).epsilon(1e-12));
  CHECK(mann_whitney_u(a, b, Alternative::two_sided).p == doctest::Approx(oracle.two_sided).epsilon(1e-12));
}

TEST_CASE("excess volume test labels") {
  const auto g = make_graph(3, {{0, 1}, {0, 2}, {2, 1}, {1, 0}}, {Rating::L, Rating::L, Rating::H}, {3, 1, 4, 2});
  const auto tests = excess_volume_tests(excess_volume_samples(g));
  REQUIRE_FALSE(tests.empty());
  bool found = false;
  for (const auto& t : tests) found = found || (t.label_a == "out_L(L)" && t.label_b == "in_L(L)");
  CHECK(found);
}
