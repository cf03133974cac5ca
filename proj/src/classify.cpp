#include "paynet/classify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace paynet::classify {

using graph::Arc;
using graph::NodeId;
using graph::PaymentGraph;
using partition::RankedPartition;

// ---------------------------------------------------------------------------
// Features

QuantileTable QuantileTable::fit(std::span<const double> reference) {
  QuantileTable t;
  std::vector<double> v(reference.begin(), reference.end());
  std::sort(v.begin(), v.end());
  t.n = v.size();
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    t.values.push_back(v[i]);
    t.cum_below.push_back(i);
    t.count.push_back(j - i);
    i = j;
  }
  return t;
}

double QuantileTable::operator()(double x) const {
  if (n == 0) return 0.5;
  const auto it = std::lower_bound(values.begin(), values.end(), x);
  const auto i = static_cast<std::size_t>(it - values.begin());
  double below;
  if (i == values.size())
    below = static_cast<double>(n);
  else if (*it == x)
    below = static_cast<double>(cum_below[i]) + 0.5 * static_cast<double>(count[i]);
  else
    below = static_cast<double>(cum_below[i]);
  return below / static_cast<double>(n);
}

namespace {

void check_cover(const PaymentGraph& g, const RankedPartition& p, const char* what) {
  if (p.assignment.size() != g.node_count())
    throw DataError(std::string(what) + " does not cover the graph (" + std::to_string(p.assignment.size()) +
                    " assignments for " + std::to_string(g.node_count()) + " nodes)");
  for (std::size_t i = 0; i < p.assignment.size(); ++i)
    if (p.assignment[i] == 0)
      throw DataError("node '" + g.meta(static_cast<NodeId>(i)).id + "' is absent from the " + what);
}

double strength(std::span<const Arc> arcs) {
  double s = 0.0;
  for (const Arc& a : arcs) s += a.weight;
  return s;
}

}  // namespace

Preprocessing fit_preprocessing(const PaymentGraph& g, const RankedPartition& modules,
                                const RankedPartition& hierarchy, const FeatureOptions& options) {
  check_cover(g, modules, "module partition");
  check_cover(g, hierarchy, "hierarchy");
  Preprocessing p;
  p.min_module_size = options.min_module_size;
  const std::size_t n = g.node_count();
  std::vector<double> in_deg(n), out_deg(n), size(n), rank(n);
  for (NodeId v = 0; v < n; ++v) {
    in_deg[v] = std::log1p(static_cast<double>(g.in_degree(v)));
    out_deg[v] = std::log1p(static_cast<double>(g.out_degree(v)));
    size[v] = std::log1p(strength(g.in_arcs(v)) + strength(g.out_arcs(v)));
    rank[v] = static_cast<double>(hierarchy.assignment[v]);
  }
  p.in_degree = QuantileTable::fit(in_deg);
  p.out_degree = QuantileTable::fit(out_deg);
  p.size = QuantileTable::fit(size);
  if (n > 0) {
    p.rank_mean = std::accumulate(rank.begin(), rank.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double r : rank) var += (r - p.rank_mean) * (r - p.rank_mean);
    var /= static_cast<double>(n);
    p.rank_sd = var > 0.0 ? std::sqrt(var) : 0.0;
  }

  std::vector<std::size_t> sizes(modules.n_groups + 1, 0);
  for (std::uint32_t grp : modules.assignment) ++sizes[grp];
  std::vector<std::uint32_t> groups;
  for (std::uint32_t grp = 1; grp <= modules.n_groups; ++grp)
    if (sizes[grp] >= options.min_module_size) groups.push_back(grp);
  std::stable_sort(groups.begin(), groups.end(), [&](std::uint32_t a, std::uint32_t b) { return sizes[a] > sizes[b]; });
  if (groups.size() > kModuleSlots) groups.resize(kModuleSlots);
  p.module_groups = groups;
  return p;
}

FeatureSet build_features(const PaymentGraph& g, const RankedPartition& modules, const RankedPartition& hierarchy,
                          const Preprocessing& prep, std::span<const NodeId> nodes) {
  check_cover(g, modules, "module partition");
  check_cover(g, hierarchy, "hierarchy");
  FeatureSet fs;
  fs.x = Matrix(nodes.size(), kFeatureCount);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    if (v >= g.node_count()) throw DataError("feature row for a node outside the graph");
    auto row = fs.x.row(i);
    row[col::in_degree] = prep.in_degree(std::log1p(static_cast<double>(g.in_degree(v))));
    row[col::out_degree] = prep.out_degree(std::log1p(static_cast<double>(g.out_degree(v))));
    const double in_s = strength(g.in_arcs(v)), out_s = strength(g.out_arcs(v));
    for (const Arc& a : g.in_arcs(v)) row[col::in_fraction + index_of(g.meta(a.node).rating)] += a.weight;
    for (const Arc& a : g.out_arcs(v)) row[col::out_fraction + index_of(g.meta(a.node).rating)] += a.weight;
    for (std::size_t r = 0; r < 4; ++r) {
      if (in_s > 0) row[col::in_fraction + r] /= in_s;
      if (out_s > 0) row[col::out_fraction + r] /= out_s;
    }
    row[col::rank] =
        prep.rank_sd > 0 ? (static_cast<double>(hierarchy.assignment[v]) - prep.rank_mean) / prep.rank_sd : 0.0;
    const auto slot = std::find(prep.module_groups.begin(), prep.module_groups.end(), modules.assignment[v]);
    if (slot == prep.module_groups.end())
      row[col::module_residual] = 1.0;
    else
      row[col::module + static_cast<std::size_t>(slot - prep.module_groups.begin())] = 1.0;
    row[col::size] = prep.size(std::log1p(in_s + out_s));
    fs.y.push_back(g.meta(v).rating);
    fs.nodes.push_back(v);
    fs.zero_in_volume.push_back(in_s > 0 ? 0 : 1);
    fs.zero_out_volume.push_back(out_s > 0 ? 0 : 1);
  }
  return fs;
}

FeatureSet build_features(const PaymentGraph& g, const RankedPartition& modules, const RankedPartition& hierarchy,
                          const Preprocessing& prep) {
  std::vector<NodeId> rated;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (is_known(g.meta(v).rating)) rated.push_back(v);
  return build_features(g, modules, hierarchy, prep, rated);
}

// ---------------------------------------------------------------------------
// SMOTE

Matrix smote(const Matrix& minority, std::size_t n_new, std::size_t k, std::uint64_t seed, bool* k_reduced) {
  const std::size_t n = minority.rows(), p = minority.cols();
  if (n < 2) throw DomainError("smote needs at least two minority samples");
  if (k_reduced) *k_reduced = false;
  if (k == 0) throw DomainError("smote needs k >= 1");
  if (n <= k) {
    k = n - 1;
    if (k_reduced) *k_reduced = true;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);

  std::vector<std::vector<std::size_t>> neighbours(n);
  auto knn = [&](std::size_t i) -> const std::vector<std::size_t>& {
    auto& nb = neighbours[i];
    if (!nb.empty()) return nb;
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(n - 1);
    const auto xi = minority.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto xj = minority.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) s += (xi[c] - xj[c]) * (xi[c] - xj[c]);
      d.emplace_back(s, j);
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    for (std::size_t t = 0; t < k; ++t) nb.push_back(d[t].second);
    return nb;
  };

  Matrix out(n_new, p);
  for (std::size_t s = 0; s < n_new; ++s) {
    const std::size_t base = s % n;
    const std::size_t other = knn(base)[pick(rng)];
    const double u = unit(rng);
    const auto xb = minority.row(base), xo = minority.row(other);
    auto dst = out.row(s);
    for (std::size_t c = 0; c < p; ++c) dst[c] = xb[c] + u * (xo[c] - xb[c]);
  }
  return out;
}

Matrix smote_factor(const Matrix& minority, double factor, std::size_t k, std::uint64_t seed, bool* k_reduced) {
  if (!(factor >= 1.0)) throw DomainError("smote factor must be at least 1");
  const auto n_new = static_cast<std::size_t>(std::llround((factor - 1.0) * static_cast<double>(minority.rows())));
  return smote(minority, n_new, k, seed, k_reduced);
}

// ---------------------------------------------------------------------------
// Strategies

std::string_view to_string(Strategy s) { return s == Strategy::one_step ? "one-step" : "two-step"; }

Strategy parse_strategy(std::string_view s) {
  if (s == "one-step" || s == "one_step" || s == "1") return Strategy::one_step;
  if (s == "two-step" || s == "two_step" || s == "2") return Strategy::two_step;
  throw ConfigError("unknown strategy '" + std::string(s) + "' (one-step, two-step)");
}

Rating combine_outputs(const std::array<PipelineOutput, 3>& outputs, TiePolicy policy) {
  std::array<Rating, 3> sorted{outputs[0].label, outputs[1].label, outputs[2].label};
  std::sort(sorted.begin(), sorted.end());
  const bool distinct = sorted[0] != sorted[1] && sorted[1] != sorted[2];
  if (!distinct) return sorted[1];
  if (policy == TiePolicy::step1_wins) {
    int n_step1 = 0;
    Rating winner = Rating::M;
    for (const PipelineOutput& o : outputs)
      if (o.from_step1) {
        ++n_step1;
        winner = o.label;
      }
    if (n_step1 == 1) return winner;
  }
  return Rating::M;
}

namespace {

// The two ratings other than c, in order.
std::array<Rating, 2> others(Rating c) {
  switch (c) {
    case Rating::L: return {Rating::M, Rating::H};
    case Rating::M: return {Rating::L, Rating::H};
    default: return {Rating::L, Rating::M};
  }
}

Label label_of(Rating r) { return static_cast<Label>(index_of(r)); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Hyper seeded(Hyper h, std::uint64_t seed) {
  h.mlp.seed = seed;
  return h;
}

Pipeline train_pipeline(const Matrix& x, std::span<const Rating> y, Rating c, BaseLearner kind,
                        const GridPoint& hyper, const TrainOptions& options) {
  Pipeline p;
  p.cls = c;
  const std::uint64_t salt = index_of(c) * 2;
  Matrix x1 = x;
  std::vector<Label> y1(y.size());
  std::vector<std::size_t> minority_rows;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y1[i] = y[i] == c ? 1 : 0;
    if (y[i] == c) minority_rows.push_back(i);
  }
  if (c == Rating::H) {
    const std::size_t rest = y.size() - minority_rows.size();
    if (rest > minority_rows.size()) {
      const Matrix extra = smote(x.select_rows(minority_rows), rest - minority_rows.size(), options.smote_k,
                                 mix_seed(options.seed, 100), &p.smote_k_reduced);
      for (std::size_t i = 0; i < extra.rows(); ++i) {
        x1.append_row(extra.row(i));
        y1.push_back(1);
      }
      p.smote_added = extra.rows();
    }
  }
  p.step1 = train(kind, x1, y1, 2, seeded(hyper.step1, mix_seed(options.seed, salt)));

  const auto pair = others(c);
  std::vector<std::size_t> rows;
  std::vector<Label> y2;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] != c) {
      rows.push_back(i);
      y2.push_back(y[i] == pair[0] ? 0 : 1);
    }
  p.step2 = train(kind, x.select_rows(rows), y2, 2, seeded(hyper.step2, mix_seed(options.seed, salt + 1)));
  return p;
}

}  // namespace

std::array<PipelineOutput, 3> Classifier::pipeline_outputs(std::span<const double> x) const {
  std::array<PipelineOutput, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const Pipeline& p = pipelines[i];
    if (p.step1.predict(x) == 1) {
      out[i] = {p.cls, true};
    } else {
      const auto pair = others(p.cls);
      out[i] = {pair[p.step2.predict(x)], false};
    }
  }
  return out;
}

Rating Classifier::predict(std::span<const double> x) const {
  if (strategy == Strategy::one_step) return kKnownRatings[one_step.predict(x)];
  return combine_outputs(pipeline_outputs(x), policy);
}

Classifier train_classifier(const Matrix& x, std::span<const Rating> y, BaseLearner kind, Strategy strategy,
                            const GridPoint& hyper, const TrainOptions& options) {
  if (x.rows() != y.size()) throw std::invalid_argument("train_classifier: row count mismatch");
  std::array<std::size_t, 3> present{};
  for (Rating r : y) {
    if (!is_known(r)) throw DomainError("training labels must be known ratings");
    ++present[index_of(r)];
  }
  Classifier c;
  c.strategy = strategy;
  c.kind = kind;
  c.policy = options.policy;
  if (strategy == Strategy::one_step) {
    std::vector<Label> labels(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) labels[i] = label_of(y[i]);
    c.one_step = train(kind, x, labels, 3, seeded(hyper.step1, mix_seed(options.seed, 50)));
    return c;
  }
  for (Rating r : kKnownRatings)
    if (present[index_of(r)] == 0)
      throw DomainError("two-step training needs every rating; " + std::string(to_string(r)) + " is absent");
  std::array<std::future<Pipeline>, 3> jobs;
  for (std::size_t i = 0; i < 3; ++i)
    jobs[i] = std::async(std::launch::async, train_pipeline, std::cref(x), y, kKnownRatings[i], kind,
                         std::cref(hyper), std::cref(options));
  for (std::size_t i = 0; i < 3; ++i) c.pipelines[i] = jobs[i].get();
  return c;
}

// ---------------------------------------------------------------------------
// Evaluation

double Scores::metric(std::string_view name) const {
  if (name == "accuracy") return accuracy;
  if (name == "recall_L") return recall[0];
  if (name == "recall_M") return recall[1];
  if (name == "recall_H") return recall[2];
  if (name == "ws_acc") return ws_acc;
  if (name == "ws_rec") return ws_rec;
  if (name == "ws_pr") return ws_pr;
  throw ConfigError("unknown metric '" + std::string(name) +
                    "' (accuracy, recall_L, recall_M, recall_H, ws_acc, ws_rec, ws_pr)");
}

namespace {

Scores score_matrix(const ConfusionMatrix& c, bool strict) {
  Scores s;
  double total = 0.0, trace = 0.0;
  std::array<double, 3> row{}, column{};
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 3; ++y) {
      if (c[x][y] < 0) throw DomainError("confusion matrix entries must be non-negative");
      row[x] += c[x][y];
      column[y] += c[x][y];
      total += c[x][y];
      if (x == y) trace += c[x][y];
    }
  for (std::size_t x = 0; x < 3; ++x)
    if (strict && row[x] <= 0)
      throw DomainError("confusion matrix row " + std::string(to_string(kKnownRatings[x])) + " is empty");
  if (total <= 0) throw DomainError("confusion matrix is empty");
  s.accuracy = trace / total;
  for (std::size_t x = 0; x < 3; ++x) {
    s.recall[x] = row[x] > 0 ? c[x][x] / row[x] : 0.0;
    for (std::size_t y = 0; y < 3; ++y) {
      s.ws_acc += c[x][y] * kPenaltyAccuracy[x][y];
      if (row[x] > 0) s.ws_rec += c[x][y] / row[x] * kPenaltyRecall[x][y];
      if (column[y] > 0) s.ws_pr += c[x][y] / column[y] * kPenaltyPrecision[x][y];
    }
  }
  s.ws_acc /= total;
  return s;
}

}  // namespace

Scores evaluate(const ConfusionMatrix& c) { return score_matrix(c, true); }

ConfusionMatrix confusion(std::span<const Rating> truth, std::span<const Rating> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix c{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!is_known(truth[i]) || !is_known(predicted[i])) throw DomainError("confusion: unrated entry");
    c[index_of(truth[i])][index_of(predicted[i])] += 1.0;
  }
  return c;
}

ConfusionMatrix confusion(const Classifier& model, const Matrix& x, std::span<const Rating> y) {
  std::vector<Rating> pred(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) pred[i] = model.predict(x.row(i));
  return confusion(y, pred);
}

Scores random_baseline(const std::array<double, 3>& q, Strategy strategy, TiePolicy policy) {
  double sum = 0.0;
  for (double v : q) {
    if (v < 0) throw DomainError("class distribution must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("class distribution must sum to 1");
  std::array<double, 3> pi{};
  if (strategy == Strategy::one_step) {
    pi = q;
  } else {
    // Pipeline c emits rating a with probability q_a either way; it comes
    // from step 1 exactly when a == c.
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t d = 0; d < 3; ++d) {
          const double prob = q[a] * q[b] * q[d];
          if (prob == 0.0) continue;
          const std::array<PipelineOutput, 3> out{PipelineOutput{kKnownRatings[a], a == 0},
                                                  PipelineOutput{kKnownRatings[b], b == 1},
                                                  PipelineOutput{kKnownRatings[d], d == 2}};
          pi[index_of(combine_outputs(out, policy))] += prob;
        }
  }
  ConfusionMatrix c{};
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 3; ++y) c[x][y] = q[x] * pi[y];
  return score_matrix(c, false);
}

Split stratified_split(std::span<const Rating> y, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DomainError("train fraction must be in (0, 1)");
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!is_known(y[i])) throw DomainError("stratified_split: unrated row");
    by_class[index_of(y[i])].push_back(i);
  }
  std::mt19937_64 rng(seed);
  Split s;
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(rows.size())));
    s.train.insert(s.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.insert(s.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

GridResult grid_search(const Matrix& train_x, std::span<const Rating> train_y, const Matrix& valid_x,
                       std::span<const Rating> valid_y, BaseLearner kind, Strategy strategy,
                       std::span<const GridPoint> grid, std::string_view objective, const TrainOptions& options) {
  if (grid.empty()) throw ConfigError("grid search needs at least one grid point");
  Scores{}.metric(objective);  // validates the name up front
  GridResult r;
  for (const GridPoint& point : grid) {
    const Classifier c = train_classifier(train_x, train_y, kind, strategy, point, options);
    r.table.push_back({point.label, evaluate(confusion(c, valid_x, valid_y))});
  }
  for (std::size_t i = 1; i < r.table.size(); ++i)
    if (r.table[i].scores.metric(objective) > r.table[r.best].scores.metric(objective)) r.best = i;
  return r;
}

std::vector<GridPoint> default_grid(BaseLearner kind) {
  std::vector<GridPoint> grid;
  switch (kind) {
    case BaseLearner::tree:
      for (std::size_t d = 3; d <= 10; ++d) {
        GridPoint p;
        p.label = "depth=" + std::to_string(d);
        p.step1.tree.max_depth = d;
        p.step2.tree.max_depth = d;
        grid.push_back(p);
      }
      break;
    case BaseLearner::mlp: {
      GridPoint p;
      p.label = "hidden=50";
      grid.push_back(p);
      break;
    }
    case BaseLearner::softmax:
      for (double l2 : {1e-4, 1e-3, 1e-2}) {
        GridPoint p;
        p.label = "l2=" + std::to_string(l2);
        p.step1.softmax.l2 = l2;
        p.step2.softmax.l2 = l2;
        grid.push_back(p);
      }
      break;
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json quantile_json(const QuantileTable& t) {
  return {{"values", t.values}, {"cum_below", t.cum_below}, {"count", t.count}, {"n", t.n}};
}

QuantileTable quantile_from(const json& j) {
  QuantileTable t;
  j.at("values").get_to(t.values);
  j.at("cum_below").get_to(t.cum_below);
  j.at("count").get_to(t.count);
  j.at("n").get_to(t.n);
  return t;
}

json model_json(const Model& m) {
  json j{{"kind", to_string(m.kind)}, {"n_classes", m.n_classes}};
  switch (m.kind) {
    case BaseLearner::softmax:
      j["n_features"] = m.softmax.n_features;
      j["weights"] = m.softmax.weights;
      j["iterations"] = m.softmax.iterations;
      break;
    case BaseLearner::tree: {
      json nodes = json::array();
      for (const TreeNode& n : m.tree.nodes)
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"label", n.label},
                         {"distribution", n.distribution}});
      j["depth"] = m.tree.depth;
      j["nodes"] = std::move(nodes);
      break;
    }
    case BaseLearner::mlp:
      j["sizes"] = m.mlp.sizes;
      j["params"] = m.mlp.params;
      break;
  }
  return j;
}

Model model_from(const json& j) {
  Model m;
  m.kind = parse_base_learner(j.at("kind").get<std::string>());
  j.at("n_classes").get_to(m.n_classes);
  switch (m.kind) {
    case BaseLearner::softmax:
      m.softmax.n_classes = m.n_classes;
      j.at("n_features").get_to(m.softmax.n_features);
      j.at("weights").get_to(m.softmax.weights);
      j.at("iterations").get_to(m.softmax.iterations);
      break;
    case BaseLearner::tree:
      m.tree.n_classes = m.n_classes;
      j.at("depth").get_to(m.tree.depth);
      for (const json& n : j.at("nodes")) {
        TreeNode t;
        n.at("feature").get_to(t.feature);
        n.at("threshold").get_to(t.threshold);
        n.at("left").get_to(t.left);
        n.at("right").get_to(t.right);
        n.at("label").get_to(t.label);
        n.at("distribution").get_to(t.distribution);
        m.tree.nodes.push_back(std::move(t));
      }
      break;
    case BaseLearner::mlp:
      j.at("sizes").get_to(m.mlp.sizes);
      j.at("params").get_to(m.mlp.params);
      break;
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const Preprocessing& p) {
  return {{"in_degree", quantile_json(p.in_degree)},
          {"out_degree", quantile_json(p.out_degree)},
          {"size", quantile_json(p.size)},
          {"rank_mean", p.rank_mean},
          {"rank_sd", p.rank_sd},
          {"module_groups", p.module_groups},
          {"min_module_size", p.min_module_size}};
}

Preprocessing preprocessing_from_json(const nlohmann::json& j) {
  Preprocessing p;
  p.in_degree = quantile_from(j.at("in_degree"));
  p.out_degree = quantile_from(j.at("out_degree"));
  p.size = quantile_from(j.at("size"));
  j.at("rank_mean").get_to(p.rank_mean);
  j.at("rank_sd").get_to(p.rank_sd);
  j.at("module_groups").get_to(p.module_groups);
  j.at("min_module_size").get_to(p.min_module_size);
  return p;
}

nlohmann::json to_json(const Classifier& c) {
  json j{{"strategy", to_string(c.strategy)},
         {"base", to_string(c.kind)},
         {"tie_policy", c.policy == TiePolicy::step1_wins ? "step1_wins" : "median"}};
  if (c.strategy == Strategy::one_step) {
    j["model"] = model_json(c.one_step);
  } else {
    json pipes = json::array();
    for (const Pipeline& p : c.pipelines)
      pipes.push_back({{"class", to_string(p.cls)},
                       {"step1", model_json(p.step1)},
                       {"step2", model_json(p.step2)},
                       {"smote_added", p.smote_added},
                       {"smote_k_reduced", p.smote_k_reduced}});
    j["pipelines"] = std::move(pipes);
  }
  return j;
}

Classifier classifier_from_json(const nlohmann::json& j) {
  try {
    Classifier c;
    c.strategy = parse_strategy(j.at("strategy").get<std::string>());
    c.kind = parse_base_learner(j.at("base").get<std::string>());
    c.policy = j.at("tie_policy").get<std::string>() == "median" ? TiePolicy::median : TiePolicy::step1_wins;
    if (c.strategy == Strategy::one_step) {
      c.one_step = model_from(j.at("model"));
    } else {
      const json& pipes = j.at("pipelines");
      if (pipes.size() != 3) throw DataError("two-step model needs three pipelines");
      for (std::size_t i = 0; i < 3; ++i) {
        Pipeline& p = c.pipelines[i];
        p.cls = parse_rating(pipes[i].at("class").get<std::string>());
        p.step1 = model_from(pipes[i].at("step1"));
        p.step2 = model_from(pipes[i].at("step2"));
        pipes[i].at("smote_added").get_to(p.smote_added);
        pipes[i].at("smote_k_reduced").get_to(p.smote_k_reduced);
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

nlohmann::json to_json(const Scores& s) {
  return {{"accuracy", s.accuracy},
          {"recall_L", s.recall[0]},
          {"recall_M", s.recall[1]},
          {"recall_H", s.recall[2]},
          {"ws_acc", s.ws_acc},
          {"ws_rec", s.ws_rec},
          {"ws_pr", s.ws_pr}};
}

}  // namespace paynet::classify
