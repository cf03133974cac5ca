#include <cmath>
#include <random>

#include "doctest.h"
#include "paynet/classify.hpp"
#include "support.hpp"

using namespace paynet;
using namespace paynet::classify;
using testing_support::make_graph;

namespace {

// Three Gaussian blobs in 2-D, one per rating; H is the small class.
void blobs(std::size_t n, double spread, std::uint64_t seed, Matrix& x, std::vector<Rating>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0, spread);
  std::uniform_real_distribution<double> u(0, 1);
  const double cx[3] = {-2, 0, 2}, cy[3] = {0, 2, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u(rng);
    const std::size_t c = t < 0.45 ? 0 : (t < 0.9 ? 1 : 2);
    const std::array<double, 2> row{cx[c] + nd(rng), cy[c] + nd(rng)};
    x.append_row(row);
    y.push_back(kKnownRatings[c]);
  }
}

std::vector<Label> labels(const std::vector<Rating>& y) {
  std::vector<Label> l;
  for (Rating r : y) l.push_back(static_cast<Label>(index_of(r)));
  return l;
}

double accuracy(const Model& m, const Matrix& x, const std::vector<Label>& y) {
  double hit = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) hit += m.predict(x.row(i)) == y[i];
  return hit / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("quantile transform uses mid-ranks") {
  const std::vector<double> ref{1, 2, 2, 3};
  const QuantileTable q = QuantileTable::fit(ref);
  CHECK(q(2) == doctest::Approx((1 + 1.0) / 4));
  CHECK(q(1) == doctest::Approx(0.5 / 4));
  CHECK(q(0) == 0.0);
  CHECK(q(10) == 1.0);
  CHECK(q(2.5) == doctest::Approx(3.0 / 4));
}

TEST_CASE("feature rows") {
  // 0(L) -> 1(M) weight 3, 2(H) -> 1 weight 1, 1 -> 3(NA) weight 2.
  const auto g = make_graph(4, {{0, 1}, {2, 1}, {1, 3}}, {Rating::L, Rating::M, Rating::H, Rating::NA}, {3, 1, 2});
  partition::RankedPartition mod, hier;
  mod.assignment = {1, 1, 2, 2};
  mod.n_groups = 2;
  hier.assignment = {1, 2, 1, 3};
  hier.n_groups = 3;
  hier.ordered = true;
  const Preprocessing prep = fit_preprocessing(g, mod, hier, {.min_module_size = 2});
  CHECK(prep.module_groups.size() == 2);
  const FeatureSet fs = build_features(g, mod, hier, prep);
  REQUIRE(fs.x.rows() == 3);  // rated nodes only
  CHECK(fs.nodes == std::vector<graph::NodeId>{0, 1, 2});
  const auto row = fs.x.row(1);
  CHECK(row[col::in_fraction + 0] == doctest::Approx(0.75));
  CHECK(row[col::in_fraction + 2] == doctest::Approx(0.25));
  CHECK(row[col::out_fraction + 3] == doctest::Approx(1.0));
  CHECK(row[col::module + 0] + row[col::module + 1] == 1.0);
  CHECK(row[col::module_residual] == 0.0);
  CHECK(fs.zero_in_volume[0] == 1);
  CHECK(fs.zero_out_volume[0] == 0);
  const double mean = 7.0 / 4, sd = std::sqrt((0.5625 + 0.0625 + 0.5625 + 1.5625) / 4);
  CHECK(row[col::rank] == doctest::Approx((2 - mean) / sd));

  // Modules below the size floor land in the residual column.
  const Preprocessing strict = fit_preprocessing(g, mod, hier, {.min_module_size = 3});
  CHECK(strict.module_groups.empty());
  CHECK(build_features(g, mod, hier, strict).x.row(0)[col::module_residual] == 1.0);

  partition::RankedPartition partial = mod;
  partial.assignment.pop_back();
  CHECK_THROWS_AS(build_features(g, partial, hier, prep), DataError);
  partial = mod;
  partial.assignment[0] = 0;
  CHECK_THROWS_AS(fit_preprocessing(g, partial, hier), DataError);
}

TEST_CASE("SMOTE points lie between a base point and one of its k nearest neighbours") {
  Matrix m;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0, 1);
  for (int i = 0; i < 12; ++i) {
    const std::array<double, 3> r{nd(rng), nd(rng), nd(rng)};
    m.append_row(r);
  }
  const std::size_t k = 3;
  bool reduced = true;
  const Matrix s = smote(m, 40, k, 9, &reduced);
  CHECK_FALSE(reduced);
  REQUIRE(s.rows() == 40);
  for (std::size_t t = 0; t < s.rows(); ++t) {
    const std::size_t base = t % 12;
    // Brute-force neighbour set of the base point.
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < 12; ++j) {
      if (j == base) continue;
      double dd = 0;
      for (std::size_t c = 0; c < 3; ++c) dd += std::pow(m(base, c) - m(j, c), 2);
      d.emplace_back(dd, j);
    }
    std::sort(d.begin(), d.end());
    bool on_segment = false;
    for (std::size_t q = 0; q < k && !on_segment; ++q) {
      const std::size_t j = d[q].second;
      double u = -1;
      bool ok = true;
      for (std::size_t c = 0; c < 3 && ok; ++c) {
        const double span = m(j, c) - m(base, c);
        const double uc = (s(t, c) - m(base, c)) / span;
        if (u < 0) u = uc;
        ok = std::fabs(uc - u) < 1e-9;
      }
      on_segment = ok && u >= -1e-12 && u <= 1 + 1e-12;
    }
    CHECK(on_segment);
  }
}

TEST_CASE("SMOTE edge cases") {
  Matrix two;
  two.append_row(std::array<double, 1>{0.0});
  two.append_row(std::array<double, 1>{1.0});
  bool reduced = false;
  const Matrix s = smote(two, 5, 5, 1, &reduced);
  CHECK(reduced);
  for (std::size_t i = 0; i < 5; ++i) CHECK((s(i, 0) >= 0.0 && s(i, 0) <= 1.0));
  Matrix one;
  one.append_row(std::array<double, 1>{0.0});
  CHECK_THROWS_AS(smote(one, 3, 5, 1), DomainError);
  CHECK(smote_factor(two, 3.0, 1, 1).rows() == 4);
  CHECK_THROWS_AS(smote_factor(two, 0.5, 1, 1), DomainError);
}

TEST_CASE("base learners fit separable blobs") {
  Matrix x, xt;
  std::vector<Rating> y, yt;
  blobs(1500, 0.4, 1, x, y);
  blobs(500, 0.4, 2, xt, yt);
  const auto l = labels(y), lt = labels(yt);
  Hyper h;
  h.mlp.epochs = 30;
  for (BaseLearner b : {BaseLearner::softmax, BaseLearner::tree, BaseLearner::mlp}) {
    const Model m = train(b, x, l, 3, h);
    CHECK(accuracy(m, xt, lt) > 0.95);
    const auto p = m.predict_proba(xt.row(0));
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
  }
  std::vector<Label> constant(l.size(), 1);
  CHECK_THROWS_AS(train(BaseLearner::tree, x, constant, 3, h), DomainError);
}

TEST_CASE("tree respects depth and leaf size") {
  Matrix x;
  std::vector<Rating> y;
  blobs(800, 1.0, 3, x, y);
  const auto l = labels(y);
  const TreeModel t = train_tree(x, l, 3, {.max_depth = 2, .min_leaf = 50});
  CHECK(t.depth <= 2);
  // Leaf sample counts from routing the training data.
  std::vector<std::size_t> hits(t.nodes.size(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::int32_t node = 0;
    while (t.nodes[static_cast<std::size_t>(node)].feature >= 0) {
      const auto& nd = t.nodes[static_cast<std::size_t>(node)];
      node = x(i, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left : nd.right;
    }
    ++hits[static_cast<std::size_t>(node)];
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    if (t.nodes[i].feature < 0) CHECK(hits[i] >= 50);
}

TEST_CASE("softmax gradient against finite differences") {
  Matrix x;
  std::vector<Rating> y;
  blobs(50, 1.0, 5, x, y);
  const auto l = labels(y);
  SoftmaxModel m;
  m.n_classes = 3;
  m.n_features = 2;
  m.weights = {0.1, -0.2, 0.3, 0.0, 0.5, -0.4, 0.2, 0.1, -0.3};
  std::vector<double> g;
  softmax_loss(m, x, l, 0.01, &g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    auto p = m, q = m;
    p.weights[j] += 1e-6;
    q.weights[j] -= 1e-6;
    CHECK(g[j] == doctest::Approx((softmax_loss(p, x, l, 0.01, nullptr) - softmax_loss(q, x, l, 0.01, nullptr)) / 2e-6)
                      .epsilon(1e-5));
  }
}

TEST_CASE("combining pipeline outputs") {
  using P = PipelineOutput;
  CHECK(combine_outputs({P{Rating::L, true}, P{Rating::L, false}, P{Rating::H, true}}, TiePolicy::step1_wins) ==
        Rating::L);
  CHECK(combine_outputs({P{Rating::M, false}, P{Rating::H, false}, P{Rating::H, true}}, TiePolicy::step1_wins) ==
        Rating::H);
  // All distinct: the single step-1 answer wins.
  CHECK(combine_outputs({P{Rating::H, false}, P{Rating::L, false}, P{Rating::H, true}}, TiePolicy::step1_wins) ==
        Rating::H);
  CHECK(combine_outputs({P{Rating::M, false}, P{Rating::L, false}, P{Rating::H, true}}, TiePolicy::step1_wins) ==
        Rating::H);
  CHECK(combine_outputs({P{Rating::M, false}, P{Rating::L, false}, P{Rating::H, true}}, TiePolicy::median) ==
        Rating::M);
  CHECK(combine_outputs({P{Rating::M, false}, P{Rating::L, false}, P{Rating::H, false}}, TiePolicy::step1_wins) ==
        Rating::M);
}

TEST_CASE("random baselines") {
  const std::array<double, 3> q{0.45, 0.45, 0.10};
  const Scores one = random_baseline(q, Strategy::one_step);
  CHECK(one.accuracy == doctest::Approx(0.45 * 0.45 * 2 + 0.01));
  CHECK(one.recall[2] == doctest::Approx(0.10));

  // Monte Carlo of the 2-step null: every pipeline outputs a rating drawn
  // from q and flags step 1 when it names its own class.
  std::mt19937_64 rng(8);
  std::discrete_distribution<int> draw(q.begin(), q.end());
  ConfusionMatrix c{};
  for (int i = 0; i < 400000; ++i) {
    const int truth = draw(rng);
    std::array<PipelineOutput, 3> out;
    for (int p = 0; p < 3; ++p) {
      const int a = draw(rng);
      out[static_cast<std::size_t>(p)] = {kKnownRatings[static_cast<std::size_t>(a)], a == p};
    }
    c[static_cast<std::size_t>(truth)][index_of(combine_outputs(out, TiePolicy::step1_wins))] += 1;
  }
  const Scores mc = evaluate(c);
  const Scores two = random_baseline(q, Strategy::two_step);
  CHECK(two.accuracy == doctest::Approx(mc.accuracy).epsilon(0.01));
  CHECK(two.recall[2] == doctest::Approx(mc.recall[2]).epsilon(0.03));
  CHECK_THROWS_AS(random_baseline({0.5, 0.2, 0.2}, Strategy::one_step), DomainError);
}

TEST_CASE("scores") {
  const ConfusionMatrix c{{{8, 2, 0}, {1, 3, 0}, {1, 1, 4}}};
  const Scores s = evaluate(c);
  CHECK(s.accuracy == doctest::Approx(15.0 / 20));
  CHECK(s.recall[0] == doctest::Approx(0.8));
  CHECK(s.ws_acc == doctest::Approx((8 - 0.5 - 0.75 + 3 - 1 - 0.75 + 4) / 20));
  CHECK(s.ws_rec == doctest::Approx((0.8 - 0.05) + (-0.1875 + 0.75) + (-1.0 / 6 - 0.75 / 6 + 1.75 * 4 / 6)));
  const ConfusionMatrix empty_row{{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}}};
  CHECK_THROWS_AS(evaluate(empty_row), DomainError);
  CHECK(s.metric("recall_L") == s.recall[0]);
  CHECK_THROWS_AS(s.metric("f1"), ConfigError);
}

TEST_CASE("stratified split keeps class proportions") {
  std::vector<Rating> y;
  for (int i = 0; i < 100; ++i) y.push_back(i < 60 ? Rating::L : (i < 90 ? Rating::M : Rating::H));
  const Split s = stratified_split(y, 0.7, 3);
  CHECK(s.train.size() + s.test.size() == 100);
  std::array<int, 3> tr{};
  for (auto i : s.train) ++tr[index_of(y[i])];
  CHECK(tr == std::array<int, 3>{42, 21, 7});
  CHECK(stratified_split(y, 0.7, 3).train == s.train);
}

TEST_CASE("two-step classifier trains, predicts and round-trips through JSON") {
  Matrix x, xt;
  std::vector<Rating> y, yt;
  blobs(1200, 0.8, 6, x, y);
  blobs(300, 0.8, 7, xt, yt);
  GridPoint gp;
  gp.label = "t";
  gp.step1.tree.max_depth = 4;
  for (BaseLearner b : {BaseLearner::tree, BaseLearner::softmax}) {
    const Classifier c = train_classifier(x, y, b, Strategy::two_step, gp);
    CHECK(c.pipelines[2].smote_added > 0);  // H is the minority
    CHECK(c.pipelines[0].smote_added == 0);
    const Scores s = evaluate(confusion(c, xt, yt));
    CHECK(s.accuracy > 0.8);
    const Classifier back = classifier_from_json(to_json(c));
    for (std::size_t i = 0; i < xt.rows(); ++i) CHECK(back.predict(xt.row(i)) == c.predict(xt.row(i)));
  }
  const Classifier one = train_classifier(x, y, BaseLearner::mlp, Strategy::one_step, gp);
  const Classifier back = classifier_from_json(to_json(one));
  for (std::size_t i = 0; i < 50; ++i) CHECK(back.predict(xt.row(i)) == one.predict(xt.row(i)));
}

TEST_CASE("grid search picks the best point on validation data") {
  Matrix x, xv;
  std::vector<Rating> y, yv;
  blobs(800, 0.9, 8, x, y);
  blobs(300, 0.9, 9, xv, yv);
  std::vector<GridPoint> grid(2);
  grid[0].label = "stump";
  grid[0].step1.tree.max_depth = 1;
  grid[1].label = "deeper";
  grid[1].step1.tree.max_depth = 4;
  const GridResult r = grid_search(x, y, xv, yv, BaseLearner::tree, Strategy::one_step, grid, "accuracy");
  REQUIRE(r.table.size() == 2);
  CHECK(r.best == 1);
  CHECK(r.table[1].scores.accuracy >= r.table[0].scores.accuracy);
  CHECK(default_grid(BaseLearner::tree).size() == 8);
}

TEST_CASE("preprocessing round-trips through JSON") {
  const auto g = make_graph(3, {{0, 1}, {1, 2}}, {Rating::L, Rating::M, Rating::H}, {1, 2});
  partition::RankedPartition mod, hier;
  mod.assignment = {1, 1, 1};
  mod.n_groups = 1;
  hier.assignment = {1, 2, 3};
  hier.n_groups = 3;
  const Preprocessing p = fit_preprocessing(g, mod, hier, {.min_module_size = 1});
  const Preprocessing q = preprocessing_from_json(to_json(p));
  const auto a = build_features(g, mod, hier, p), b = build_features(g, mod, hier, q);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < kFeatureCount; ++c) CHECK(a.x(i, c) == b.x(i, c));
}

TEST_CASE("names parse") {
  CHECK(parse_base_learner("mlp") == BaseLearner::mlp);
  CHECK(parse_strategy("two-step") == Strategy::two_step);
  CHECK(to_string(Strategy::one_step) == "one-step");
  CHECK_THROWS(parse_base_learner("svm"));
}
