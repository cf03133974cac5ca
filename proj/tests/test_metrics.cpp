#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "paynet/metrics.hpp"
#include "paynet/synth.hpp"
#include "support.hpp"

using namespace paynet;
using namespace paynet::metrics;
using testing_support::make_graph;

TEST_CASE("ccdf on sorted unique values") {
  const std::vector<double> x{3, 1, 2, 2, 5};
  const auto c = ccdf(x);
  REQUIRE(c.size() == 4);
  CHECK(c[0].x == 1);
  CHECK(c[0].p == doctest::Approx(1.0));
  CHECK(c[1].p == doctest::Approx(0.8));
  CHECK(c[2].p == doctest::Approx(0.4));
  CHECK(c[3].p == doctest::Approx(0.2));
}

TEST_CASE("hurwitz zeta against known values") {
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-10));
  CHECK(hurwitz_zeta(3.0, 2.0) == doctest::Approx(1.2020569031595942 - 1.0).epsilon(1e-10));
  // Direct partial sum with a tail integral for a non-integer q.
  double s = 0;
  for (int k = 0; k < 200000; ++k) s += std::pow(2.5 + k, -2.7);
  s += std::pow(2.5 + 200000 - 0.5, -1.7) / 1.7;
  CHECK(hurwitz_zeta(2.7, 2.5) == doctest::Approx(s).epsilon(1e-8));
}

TEST_CASE("power-law fit recovers the exponent and xmin region") {
  const auto x = synth::pareto_samples(2.4, 3.0, 20000, 5);
  const PowerLawFit f = powerlaw_fit(x, false);
  CHECK(f.alpha == doctest::Approx(2.4).epsilon(0.05));
  CHECK(f.xmin >= 3.0);
  CHECK(f.tail_fraction > 0.0);
  CHECK(f.tail_fraction <= 1.0);
  const auto k = synth::zeta_samples(2.3, 20000, 6);
  const PowerLawFit d = powerlaw_fit(k, true);
  CHECK(d.discrete);
  CHECK(d.alpha == doctest::Approx(2.3).epsilon(0.07));
}

TEST_CASE("continuous MLE formula at a fixed xmin") {
  // With every candidate but the smallest eligible value excluded by
  // min_tail, the fit is the closed form 1 + n / sum log(x / xmin).
  std::vector<double> x;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 60; ++i) x.push_back(std::pow(1 - u(rng), -1 / 1.8));
  PowerLawOptions opt;
  opt.min_tail = 60;
  const PowerLawFit f = powerlaw_fit(x, false, opt);
  const double xmin = *std::min_element(x.begin(), x.end());
  double s = 0;
  for (double v : x) s += std::log(v / xmin);
  CHECK(f.xmin == xmin);
  CHECK(f.alpha == doctest::Approx(1 + 60 / s).epsilon(1e-12));
}

TEST_CASE("power-law fit errors") {
  const std::vector<double> tiny{1, 2, 3};
  CHECK_THROWS_AS(powerlaw_fit(tiny, true), FitError);
  const std::vector<double> flat(500, 4.0);
  CHECK_THROWS_AS(powerlaw_fit(flat, false), FitError);
}

TEST_CASE("mixing matrix and assortativity of a graph") {
  // L->L twice, M->M, L->M.
  const auto g = make_graph(4, {{0, 1}, {1, 0}, {2, 3}, {0, 2}}, {Rating::L, Rating::L, Rating::M, Rating::M},
                            {1, 1, 1, 5});
  const std::vector<std::uint32_t> labels{0, 0, 1, 1};
  const auto mix = mixing_matrix(g, labels, 2, false);
  CHECK(mix(0, 0) == doctest::Approx(0.5));
  CHECK(mix(0, 1) == doctest::Approx(0.25));
  CHECK(mix.a[0] == doctest::Approx(0.75));
  CHECK(mix.b[1] == doctest::Approx(0.5));
  const auto w = mixing_matrix(g, labels, 2, true);
  CHECK(w(0, 1) == doctest::Approx(5.0 / 8.0));
  // r from the textbook formula.
  const double sab = 0.75 * 0.5 + 0.25 * 0.5;
  CHECK(assortativity(mix).r == doctest::Approx((0.75 - sab) / (1 - sab)));
  CHECK(rating_assortativity(g, false).r == doctest::Approx((0.75 - sab) / (1 - sab)));
}

TEST_CASE("assortativity is undefined for one category") {
  const auto one = MixingMatrix::from_counts(2, {3, 0, 0, 0});
  CHECK_THROWS_AS(assortativity(one), DomainError);
  CHECK_THROWS_AS(MixingMatrix::from_counts(2, {0, 0, 0, 0}), DomainError);
}

TEST_CASE("degree-class assortativity of a star is negative") {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (std::uint32_t i = 1; i < 40; ++i) arcs.emplace_back(0, i);
  for (std::uint32_t i = 1; i < 40; ++i) arcs.emplace_back(i, 0);
  const auto g = make_graph(40, arcs);
  CHECK(degree_class_assortativity(g, NodeAttribute::degree) < -0.9);
}

TEST_CASE("log bins are monotone") {
  const std::vector<double> v{0, 1, 2, 3, 4, 8, 100};
  std::size_t n = 0;
  const auto b = log_bins(v, {}, &n);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(b[i] >= b[i - 1]);
  CHECK(b[0] != b[1]);
  CHECK(n == static_cast<std::size_t>(b.back()) + 1);
}

TEST_CASE("tertiles (1..3) split at the lower empirical quantiles") {
  std::vector<double> v;
  for (int i = 1; i <= 9; ++i) v.push_back(i);
  const auto t = tertiles(v);
  CHECK(t == std::vector<std::uint8_t>{1, 1, 1, 2, 2, 2, 3, 3, 3});
  const std::vector<double> ties{1, 1, 1, 1, 5, 6};
  const auto tt = tertiles(ties);
  CHECK(tt[0] == 1);
  CHECK(tt[3] == 1);  // boundary value goes to the lower tertile
  CHECK(tt[5] == 3);
}

TEST_CASE("discrete fit maximizes the zeta likelihood at its xmin") {
  const auto k = synth::zeta_samples(2.6, 5000, 12);
  PowerLawOptions opt;
  opt.min_tail = 5000;  // only xmin = 1 is eligible
  const PowerLawFit f = powerlaw_fit(k, true, opt);
  REQUIRE(f.xmin == 1.0);
  double mean_log = 0;
  for (double v : k) mean_log += std::log(v) / static_cast<double>(k.size());
  auto loglik = [&](double a) { return -a * mean_log - std::log(hurwitz_zeta(a, 1.0)); };
  const double h = 1e-4;
  const double slope = (loglik(f.alpha + h) - loglik(f.alpha - h)) / (2 * h);
  CHECK(std::fabs(slope) < 1e-4);
  CHECK(loglik(f.alpha) >= loglik(f.alpha + 0.01));
  CHECK(loglik(f.alpha) >= loglik(f.alpha - 0.01));
}
