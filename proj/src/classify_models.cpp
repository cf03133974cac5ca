#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "paynet/classify.hpp"

namespace paynet::classify {

std::string_view to_string(BaseLearner b) {
  switch (b) {
    case BaseLearner::softmax: return "softmax";
    case BaseLearner::tree: return "tree";
    case BaseLearner::mlp: return "mlp";
  }
  return "?";
}

BaseLearner parse_base_learner(std::string_view s) {
  if (s == "softmax") return BaseLearner::softmax;
  if (s == "tree") return BaseLearner::tree;
  if (s == "mlp") return BaseLearner::mlp;
  throw ConfigError("unknown base learner '" + std::string(s) + "' (softmax, tree, mlp)");
}

namespace {

void check_training_data(const Matrix& x, std::span<const Label> y, std::size_t n_classes) {
  if (x.rows() != y.size()) throw std::invalid_argument("training data: row count mismatch");
  if (x.rows() == 0) throw DomainError("training data is empty");
  for (double v : x.data())
    if (!std::isfinite(v)) throw DomainError("training data contains non-finite features");
  std::vector<bool> seen(n_classes, false);
  for (Label l : y) {
    if (l >= n_classes) throw DomainError("label out of range");
    seen[l] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2) throw DomainError("training data needs at least two classes");
}

void softmax_inplace(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

Label argmax(std::span<const double> p) {
  return static_cast<Label>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Softmax regression

double softmax_loss(const SoftmaxModel& model, const Matrix& x, std::span<const Label> y, double l2,
                    std::vector<double>* gradient) {
  const std::size_t k = model.n_classes, p = model.n_features, stride = p + 1;
  if (gradient) gradient->assign(model.weights.size(), 0.0);
  std::vector<double> z(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      const double* w = model.weights.data() + c * stride;
      double s = w[0];
      for (std::size_t j = 0; j < p; ++j) s += w[j + 1] * row[j];
      z[c] = s;
    }
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    loss -= z[y[i]] - top - std::log(sum);
    if (gradient) {
      for (std::size_t c = 0; c < k; ++c) {
        const double r = std::exp(z[c] - top) / sum - (c == y[i] ? 1.0 : 0.0);
        double* g = gradient->data() + c * stride;
        g[0] += r;
        for (std::size_t j = 0; j < p; ++j) g[j + 1] += r * row[j];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  loss *= inv_n;
  if (gradient)
    for (double& g : *gradient) g *= inv_n;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 1; j < stride; ++j) {
      const double w = model.weights[c * stride + j];
      loss += 0.5 * l2 * w * w;
      if (gradient) (*gradient)[c * stride + j] += l2 * w;
    }
  return loss;
}

SoftmaxModel train_softmax(const Matrix& x, std::span<const Label> y, std::size_t n_classes,
                           const SoftmaxHyper& hyper) {
  check_training_data(x, y, n_classes);
  SoftmaxModel m;
  m.n_classes = n_classes;
  m.n_features = x.cols();
  m.weights.assign(n_classes * (x.cols() + 1), 0.0);

  // Gradient descent with Barzilai-Borwein step lengths.
  std::vector<double> grad, prev_w, prev_g;
  softmax_loss(m, x, y, hyper.l2, &grad);
  double step = 1.0;
  for (m.iterations = 0; m.iterations < hyper.max_iter; ++m.iterations) {
    m.gradient_norm = norm2(grad);
    if (m.gradient_norm < hyper.tolerance) break;
    prev_w = m.weights;
    prev_g = grad;
    for (std::size_t i = 0; i < grad.size(); ++i) m.weights[i] -= step * grad[i];
    softmax_loss(m, x, y, hyper.l2, &grad);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double s = m.weights[i] - prev_w[i], d = grad[i] - prev_g[i];
      ss += s * s;
      sy += s * d;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-8, 1e8) : 1.0;
  }
  m.gradient_norm = norm2(grad);
  return m;
}

// ---------------------------------------------------------------------------
// CART

namespace {

double gini(std::span<const double> counts, double n) {
  if (n <= 0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += (c / n) * (c / n);
  return 1.0 - s;
}

}  // namespace

TreeModel train_tree(const Matrix& x, std::span<const Label> y, std::size_t n_classes, const TreeHyper& hyper) {
  if (hyper.max_depth < 1 || hyper.max_depth > 30) throw DomainError("tree depth must be in [1, 30]");
  if (x.rows() != y.size() || x.rows() == 0) throw DomainError("tree: empty or mismatched training data");
  for (double v : x.data())
    if (!std::isfinite(v)) throw DomainError("training data contains non-finite features");
  const std::size_t min_leaf = std::max<std::size_t>(1, hyper.min_leaf);
  TreeModel t;
  t.n_classes = n_classes;

  struct Task {
    std::int32_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  std::vector<Task> stack;
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), 0);
  t.nodes.emplace_back();
  stack.push_back({0, std::move(all), 0});

  std::vector<double> left(n_classes), right(n_classes);
  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    const std::size_t n = task.rows.size();
    std::vector<double> counts(n_classes, 0.0);
    for (std::size_t r : task.rows) counts[y[r]] += 1.0;
    {
      TreeNode& node = t.nodes[static_cast<std::size_t>(task.node)];
      node.label = argmax(counts);
      node.distribution = counts;
      for (double& d : node.distribution) d /= static_cast<double>(n);
    }
    t.depth = std::max(t.depth, task.depth);
    const double parent = gini(counts, static_cast<double>(n));
    if (task.depth >= hyper.max_depth || parent == 0.0 || n < 2 * min_leaf) continue;

    double best_gain = -1.0;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(task.rows);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
      std::fill(left.begin(), left.end(), 0.0);
      right = counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left[y[order[i]]] += 1.0;
        right[y[order[i]]] -= 1.0;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double a = x(order[i], f), b = x(order[i + 1], f);
        if (a == b) continue;
        const double child = (static_cast<double>(nl) * gini(left, static_cast<double>(nl)) +
                              static_cast<double>(nr) * gini(right, static_cast<double>(nr))) /
                             static_cast<double>(n);
        const double gain = parent - child;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = a + (b - a) / 2.0;
        }
      }
    }
    // Zero-gain splits are allowed: impurity can drop only one level down
    // (XOR-like structure).
    if (best_feature < 0 || best_gain < -1e-12) continue;

    std::vector<std::size_t> lrows, rrows;
    for (std::size_t r : task.rows) (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? lrows : rrows).push_back(r);
    const auto li = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes.emplace_back();
    TreeNode& node = t.nodes[static_cast<std::size_t>(task.node)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = li;
    node.right = li + 1;
    stack.push_back({li + 1, std::move(rrows), task.depth + 1});
    stack.push_back({li, std::move(lrows), task.depth + 1});
  }
  return t;
}

// ---------------------------------------------------------------------------
// MLP

namespace {

struct LayerView {
  std::size_t in, out, w_offset, b_offset;
};

std::vector<LayerView> layer_views(const MlpModel& m) {
  std::vector<LayerView> v;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
    LayerView lv{m.sizes[l], m.sizes[l + 1], off, off + m.sizes[l] * m.sizes[l + 1]};
    off = lv.b_offset + lv.out;
    v.push_back(lv);
  }
  return v;
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// Forward pass; acts[l] holds the activations entering layer l, the last
// entry the output probabilities.
void forward(const MlpModel& m, const std::vector<LayerView>& views, std::span<const double> x,
             std::vector<std::vector<double>>& acts) {
  acts.resize(views.size() + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < views.size(); ++l) {
    const LayerView& v = views[l];
    auto& out = acts[l + 1];
    out.resize(v.out);
    const double* w = m.params.data() + v.w_offset;
    const double* b = m.params.data() + v.b_offset;
    for (std::size_t o = 0; o < v.out; ++o) {
      double s = b[o];
      const double* wr = w + o * v.in;
      for (std::size_t i = 0; i < v.in; ++i) s += wr[i] * acts[l][i];
      out[o] = s;
    }
    if (l + 1 < views.size())
      for (double& a : out) a = sigmoid(a);
    else
      softmax_inplace(out);
  }
}

// Adds the gradient of the summed cross-entropy over `rows` to grad and
// returns the summed loss.
double accumulate(const MlpModel& m, const std::vector<LayerView>& views, const Matrix& x,
                  std::span<const Label> y, std::span<const std::size_t> rows, std::vector<double>& grad) {
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, prev;
  double loss = 0.0;
  for (std::size_t r : rows) {
    forward(m, views, x.row(r), acts);
    const auto& p = acts.back();
    loss -= std::log(std::max(p[y[r]], 1e-300));
    delta = p;
    delta[y[r]] -= 1.0;
    for (std::size_t l = views.size(); l-- > 0;) {
      const LayerView& v = views[l];
      const double* w = m.params.data() + v.w_offset;
      double* gw = grad.data() + v.w_offset;
      double* gb = grad.data() + v.b_offset;
      const auto& a = acts[l];
      for (std::size_t o = 0; o < v.out; ++o) {
        gb[o] += delta[o];
        double* gwr = gw + o * v.in;
        for (std::size_t i = 0; i < v.in; ++i) gwr[i] += delta[o] * a[i];
      }
      if (l == 0) break;
      prev.assign(v.in, 0.0);
      for (std::size_t o = 0; o < v.out; ++o) {
        const double* wr = w + o * v.in;
        for (std::size_t i = 0; i < v.in; ++i) prev[i] += wr[i] * delta[o];
      }
      for (std::size_t i = 0; i < v.in; ++i) prev[i] *= a[i] * (1.0 - a[i]);
      delta.swap(prev);
    }
  }
  return loss;
}

double weight_penalty(const MlpModel& m, const std::vector<LayerView>& views, double l2, std::vector<double>* grad) {
  double pen = 0.0;
  for (const LayerView& v : views)
    for (std::size_t i = v.w_offset; i < v.b_offset; ++i) {
      pen += 0.5 * l2 * m.params[i] * m.params[i];
      if (grad) (*grad)[i] += l2 * m.params[i];
    }
  return pen;
}

}  // namespace

MlpModel init_mlp(std::size_t n_features, std::size_t n_classes, const std::vector<std::size_t>& layers,
                  std::uint64_t seed) {
  MlpModel m;
  m.sizes.push_back(n_features);
  for (std::size_t h : layers) {
    if (h == 0) throw DomainError("mlp layer sizes must be at least 1");
    m.sizes.push_back(h);
  }
  m.sizes.push_back(n_classes);
  const auto views = layer_views(m);
  m.params.assign(views.back().b_offset + views.back().out, 0.0);
  std::mt19937_64 rng(seed);
  for (const LayerView& v : views) {
    const double limit = std::sqrt(6.0 / static_cast<double>(v.in + v.out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = v.w_offset; i < v.b_offset; ++i) m.params[i] = u(rng);
  }
  return m;
}

double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const Label> y, double l2,
                std::vector<double>* gradient) {
  const auto views = layer_views(model);
  std::vector<double> grad(model.params.size(), 0.0);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  double loss = accumulate(model, views, x, y, rows, grad) / static_cast<double>(x.rows());
  for (double& g : grad) g /= static_cast<double>(x.rows());
  loss += weight_penalty(model, views, l2, &grad);
  if (gradient) *gradient = std::move(grad);
  return loss;
}

MlpModel train_mlp(const Matrix& x, std::span<const Label> y, std::size_t n_classes, const MlpHyper& hyper) {
  check_training_data(x, y, n_classes);
  MlpModel m = init_mlp(x.cols(), n_classes, hyper.layers, hyper.seed);
  const auto views = layer_views(m);
  std::mt19937_64 rng(hyper.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> velocity(m.params.size(), 0.0), grad(m.params.size());
  const std::size_t batch = std::max<std::size_t>(1, hyper.batch_size);
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      epoch_loss += accumulate(m, views, x, y, std::span(order).subspan(start, len), grad);
      for (double& g : grad) g /= static_cast<double>(len);
      weight_penalty(m, views, hyper.l2, &grad);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        velocity[i] = hyper.momentum * velocity[i] - hyper.learning_rate * grad[i];
        m.params[i] += velocity[i];
      }
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      std::ostringstream msg;
      msg << "mlp training diverged at epoch " << epoch + 1 << " (mean loss " << epoch_loss
          << ", learning rate " << hyper.learning_rate << ", momentum " << hyper.momentum << ")";
      throw DomainError(msg.str());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

std::vector<double> Model::predict_proba(std::span<const double> x) const {
  switch (kind) {
    case BaseLearner::softmax: {
      const std::size_t stride = softmax.n_features + 1;
      std::vector<double> z(n_classes);
      for (std::size_t c = 0; c < n_classes; ++c) {
        const double* w = softmax.weights.data() + c * stride;
        double s = w[0];
        for (std::size_t j = 0; j < softmax.n_features; ++j) s += w[j + 1] * x[j];
        z[c] = s;
      }
      softmax_inplace(z);
      return z;
    }
    case BaseLearner::tree: {
      std::size_t i = 0;
      while (tree.nodes[i].feature >= 0) {
        const TreeNode& n = tree.nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
      }
      return tree.nodes[i].distribution;
    }
    case BaseLearner::mlp: {
      std::vector<std::vector<double>> acts;
      forward(mlp, layer_views(mlp), x, acts);
      return acts.back();
    }
  }
  return {};
}

Label Model::predict(std::span<const double> x) const {
  if (kind == BaseLearner::tree) {
    std::size_t i = 0;
    while (tree.nodes[i].feature >= 0) {
      const TreeNode& n = tree.nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return tree.nodes[i].label;
  }
  return argmax(predict_proba(x));
}

Model train(BaseLearner kind, const Matrix& x, std::span<const Label> y, std::size_t n_classes, const Hyper& hyper) {
  check_training_data(x, y, n_classes);
  Model m;
  m.kind = kind;
  m.n_classes = n_classes;
  switch (kind) {
    case BaseLearner::softmax: m.softmax = train_softmax(x, y, n_classes, hyper.softmax); break;
    case BaseLearner::tree: m.tree = train_tree(x, y, n_classes, hyper.tree); break;
    case BaseLearner::mlp: m.mlp = train_mlp(x, y, n_classes, hyper.mlp); break;
  }
  return m;
}

}  // namespace paynet::classify
