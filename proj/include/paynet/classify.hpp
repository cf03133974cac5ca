#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "paynet/graph.hpp"
#include "paynet/linalg.hpp"
#include "paynet/partition.hpp"

namespace paynet::classify {

using Label = std::uint8_t;

// ---------------------------------------------------------------------------
// Features

inline constexpr std::size_t kFeatureCount = 25;
inline constexpr std::size_t kModuleSlots = 12;

// Column layout of a feature row.
namespace col {
inline constexpr std::size_t in_degree = 0;
inline constexpr std::size_t out_degree = 1;
inline constexpr std::size_t in_fraction = 2;    // L, M, H, NA
inline constexpr std::size_t out_fraction = 6;   // L, M, H, NA
inline constexpr std::size_t rank = 10;
inline constexpr std::size_t module = 11;        // 12 slots
inline constexpr std::size_t module_residual = 23;
inline constexpr std::size_t size = 24;
}  // namespace col

/// Empirical quantile transform q(x) = (#{v < x} + #{v = x} / 2) / n.
struct QuantileTable {
  std::vector<double> values;            // sorted unique reference values
  std::vector<std::uint64_t> cum_below;  // #{v < values[i]}
  std::vector<std::uint64_t> count;      // #{v == values[i]}
  std::uint64_t n = 0;

  static QuantileTable fit(std::span<const double> reference);
  double operator()(double x) const;
};

struct FeatureOptions {
  std::size_t min_module_size = 500;
};

/// Everything needed to turn a node into a feature row, fitted once on the
/// analysed graph and stored with the model.
struct Preprocessing {
  QuantileTable in_degree, out_degree, size;  // on log(1 + x)
  double rank_mean = 0.0;
  double rank_sd = 1.0;
  std::vector<std::uint32_t> module_groups;  // group id per indicator slot
  std::size_t min_module_size = 500;
};

Preprocessing fit_preprocessing(const graph::PaymentGraph& g, const partition::RankedPartition& modules,
                                const partition::RankedPartition& hierarchy, const FeatureOptions& options = {});

struct FeatureSet {
  Matrix x;
  std::vector<Rating> y;  // node ratings (NA for unrated inference targets)
  std::vector<graph::NodeId> nodes;
  std::vector<std::uint8_t> zero_in_volume;
  std::vector<std::uint8_t> zero_out_volume;
};

/// Rows for `nodes`. DataError when the partitions do not cover the graph.
FeatureSet build_features(const graph::PaymentGraph& g, const partition::RankedPartition& modules,
                          const partition::RankedPartition& hierarchy, const Preprocessing& prep,
                          std::span<const graph::NodeId> nodes);

/// Rows for every rated node.
FeatureSet build_features(const graph::PaymentGraph& g, const partition::RankedPartition& modules,
                          const partition::RankedPartition& hierarchy, const Preprocessing& prep);

// ---------------------------------------------------------------------------
// SMOTE

/// n_new synthetic points x + u (x_nn - x); the base points cycle through the
/// minority rows, x_nn is drawn from the k nearest minority neighbours. With
/// fewer than k+1 points k drops to size-1 and *k_reduced is set. DomainError
/// below two points.
Matrix smote(const Matrix& minority, std::size_t n_new, std::size_t k, std::uint64_t seed,
             bool* k_reduced = nullptr);

/// Oversampling by factor f >= 1: (f - 1) * n new points, rounded.
Matrix smote_factor(const Matrix& minority, double factor, std::size_t k, std::uint64_t seed,
                    bool* k_reduced = nullptr);

// ---------------------------------------------------------------------------
// Base learners. Labels are 0..n_classes-1.

enum class BaseLearner { softmax, tree, mlp };
std::string_view to_string(BaseLearner b);
BaseLearner parse_base_learner(std::string_view s);

struct SoftmaxHyper {
  double l2 = 1e-4;
  std::size_t max_iter = 2000;
  double tolerance = 1e-6;
};

struct TreeHyper {
  std::size_t max_depth = 5;
  std::size_t min_leaf = 5;
};

struct MlpHyper {
  std::vector<std::size_t> layers{50};
  std::size_t epochs = 40;
  double learning_rate = 0.05;
  std::size_t batch_size = 64;
  double momentum = 0.9;
  double l2 = 1e-5;
  std::uint64_t seed = 1;
};

struct Hyper {
  SoftmaxHyper softmax;
  TreeHyper tree;
  MlpHyper mlp;
};

struct SoftmaxModel {
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  std::vector<double> weights;  // n_classes rows of (bias, w_1..w_p)
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

/// Mean cross-entropy plus l2/2 |W|^2 (biases excluded) and its gradient.
double softmax_loss(const SoftmaxModel& model, const Matrix& x, std::span<const Label> y, double l2,
                    std::vector<double>* gradient);
SoftmaxModel train_softmax(const Matrix& x, std::span<const Label> y, std::size_t n_classes,
                           const SoftmaxHyper& hyper);

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  Label label = 0;
  std::vector<double> distribution;
};

struct TreeModel {
  std::size_t n_classes = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t depth = 0;
};

TreeModel train_tree(const Matrix& x, std::span<const Label> y, std::size_t n_classes, const TreeHyper& hyper);

struct MlpModel {
  std::vector<std::size_t> sizes;  // input, hidden..., output
  std::vector<double> params;      // per layer: weights (out x in) then biases
};

MlpModel init_mlp(std::size_t n_features, std::size_t n_classes, const std::vector<std::size_t>& layers,
                  std::uint64_t seed);
/// Mean cross-entropy plus l2/2 |W|^2 (biases excluded) and its gradient.
double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const Label> y, double l2,
                std::vector<double>* gradient);
MlpModel train_mlp(const Matrix& x, std::span<const Label> y, std::size_t n_classes, const MlpHyper& hyper);

/// Any trained base learner.
struct Model {
  BaseLearner kind = BaseLearner::softmax;
  std::size_t n_classes = 0;
  SoftmaxModel softmax;
  TreeModel tree;
  MlpModel mlp;

  std::vector<double> predict_proba(std::span<const double> x) const;
  Label predict(std::span<const double> x) const;
};

/// Throws DomainError when fewer than two classes are present.
Model train(BaseLearner kind, const Matrix& x, std::span<const Label> y, std::size_t n_classes, const Hyper& hyper);

// ---------------------------------------------------------------------------
// 1-step and 2-step strategies over the ratings L, M, H.

enum class Strategy { one_step, two_step };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

// How to resolve three distinct pipeline outputs.
enum class TiePolicy { step1_wins, median };

struct Pipeline {
  Rating cls = Rating::L;
  Model step1;             // 1 = cls, 0 = merged rest
  Model step2;             // 0 = lower of the other two ratings, 1 = higher
  std::size_t smote_added = 0;
  bool smote_k_reduced = false;
};

struct PipelineOutput {
  Rating label = Rating::L;
  bool from_step1 = false;
};

/// Median of three pipeline outputs. All distinct: a unique step-1 label wins
/// under step1_wins, otherwise M.
Rating combine_outputs(const std::array<PipelineOutput, 3>& outputs, TiePolicy policy);

struct Classifier {
  Strategy strategy = Strategy::one_step;
  BaseLearner kind = BaseLearner::softmax;
  TiePolicy policy = TiePolicy::step1_wins;
  Model one_step;
  std::array<Pipeline, 3> pipelines;

  Rating predict(std::span<const double> x) const;
  std::array<PipelineOutput, 3> pipeline_outputs(std::span<const double> x) const;
};

struct GridPoint {
  std::string label;
  Hyper step1;  // also the 1-step hyper-parameters
  Hyper step2;
};

struct TrainOptions {
  std::size_t smote_k = 5;
  std::uint64_t seed = 1;
  TiePolicy policy = TiePolicy::step1_wins;
};

/// y must hold known ratings; every class must be present for two_step.
Classifier train_classifier(const Matrix& x, std::span<const Rating> y, BaseLearner kind, Strategy strategy,
                            const GridPoint& hyper, const TrainOptions& options = {});

// ---------------------------------------------------------------------------
// Evaluation

using ConfusionMatrix = std::array<std::array<double, 3>, 3>;  // rows true, columns predicted
using PenaltyMatrix = std::array<std::array<double, 3>, 3>;

inline constexpr PenaltyMatrix kPenaltyAccuracy{{{1.0, -0.25, -0.5}, {-0.75, 1.0, -0.25}, {-1.0, -0.75, 1.0}}};
inline constexpr PenaltyMatrix kPenaltyRecall{{{1.0, -0.25, -0.75}, {-0.75, 1.0, -0.25}, {-1.0, -0.75, 1.75}}};
inline constexpr PenaltyMatrix kPenaltyPrecision = kPenaltyRecall;

struct Scores {
  double accuracy = 0.0;
  std::array<double, 3> recall{};
  double ws_acc = 0.0;
  double ws_rec = 0.0;
  double ws_pr = 0.0;

  double metric(std::string_view name) const;
};

/// DomainError when a row of C is empty.
Scores evaluate(const ConfusionMatrix& c);

ConfusionMatrix confusion(std::span<const Rating> truth, std::span<const Rating> predicted);
ConfusionMatrix confusion(const Classifier& model, const Matrix& x, std::span<const Rating> y);

/// Expected scores of a prevalence-proportional random guess. two_step runs
/// the guess through the three pipelines: step 1 of pipeline c says c with
/// probability q_c, step 2 splits the rest in proportion to q.
Scores random_baseline(const std::array<double, 3>& q, Strategy strategy, TiePolicy policy = TiePolicy::step1_wins);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified by rating, train_fraction of each class (rounded) to train.
Split stratified_split(std::span<const Rating> y, double train_fraction, std::uint64_t seed);

struct GridRow {
  std::string label;
  Scores scores;
};

struct GridResult {
  std::size_t best = 0;
  std::vector<GridRow> table;
};

/// Trains every grid point on the training rows and scores it on the
/// validation rows; the first point with the highest objective wins.
GridResult grid_search(const Matrix& train_x, std::span<const Rating> train_y, const Matrix& valid_x,
                       std::span<const Rating> valid_y, BaseLearner kind, Strategy strategy,
                       std::span<const GridPoint> grid, std::string_view objective,
                       const TrainOptions& options = {});

/// The default grid for a base learner: tree depths 3..10, MLP with one
/// hidden layer of 50, softmax over a few l2 strengths.
std::vector<GridPoint> default_grid(BaseLearner kind);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const Preprocessing& p);
Preprocessing preprocessing_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Classifier& c);
Classifier classifier_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scores& s);

}  // namespace paynet::classify
