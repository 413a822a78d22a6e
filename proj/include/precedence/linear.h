#ifndef PRECEDENCE_LINEAR_H_
#define PRECEDENCE_LINEAR_H_

// Sparse one-vs-rest linear classifiers (logistic regression, linear SVM)
// and a random forest over binary feature vectors.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"
#include "precedence/features.h"

namespace precedence {

using ClassScores = std::array<double, kNumCoarseLabels>;

struct Prediction {
  CoarseLabel label = CoarseLabel::Nil;
  ClassScores scores{};
};

// Highest score; ties go to the earliest class in CoarseLabel order.
CoarseLabel argmax_label(const ClassScores& scores);

enum class Loss { Logistic, Hinge };
enum class Regularizer { L1, L2 };

std::string_view to_string(Loss loss);
std::string_view to_string(Regularizer regularizer);
Loss parse_loss(std::string_view text);
Regularizer parse_regularizer(std::string_view text);

struct TrainConfig {
  int epochs = 50;
  double eta0 = 0.1;
  double decay = 1e-3;  // eta_t = eta0 / (1 + t * decay)
  double lambda = 1e-4;
  std::uint64_t seed = 1;
  bool shuffle = true;
  bool class_weighting = false;  // inverse class frequency
  // Full-gradient steps instead of per-example SGD; t counts epochs.
  bool full_batch = false;

  // Throws ConfigError.
  void validate() const;
};

class LinearModel {
 public:
  Loss loss = Loss::Logistic;
  Regularizer regularizer = Regularizer::L2;
  TrainConfig config;
  std::size_t dimension = 0;  // feature index size
  std::array<std::vector<double>, kNumCoarseLabels> weights;
  ClassScores bias{};

  // Throws ValidationError if `fv` has a column outside the model.
  Prediction predict(const FeatureVector& fv) const;
  // Non-zero non-bias weights over all classes.
  std::size_t nonzero_weights() const;

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

// Per-class regularized objective after every epoch.
struct LinearTrace {
  std::array<std::vector<double>, kNumCoarseLabels> objective;
};

// One binary problem per class, parallel over classes.
LinearModel train_linear(std::span<const FeatureVector> data,
                         std::size_t dimension, Loss loss,
                         Regularizer regularizer, const TrainConfig& config,
                         LinearTrace* trace = nullptr);

// Regularized mean objective of one binary problem (labels +1 / -1).
// Empty `example_weights` weighs every example 1.
double binary_objective(std::span<const FeatureVector> data,
                        std::span<const int> signs, Loss loss,
                        Regularizer regularizer, double lambda,
                        std::span<const double> w, double b,
                        std::span<const double> example_weights = {});

// Dense L2-regularized logistic objective over rows x with labels y in
// {+1, -1}. `w` holds the weights followed by the bias; the gradient has
// the same layout.
struct DenseObjective {
  double value = 0.0;
  std::vector<double> gradient;
};
DenseObjective logistic_objective(const std::vector<std::vector<double>>& x,
                                  std::span<const int> y,
                                  std::span<const double> w, double lambda);

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 8;
  // Fraction of the node's active features tried per split; <= 0 means
  // sqrt(m) of m.
  double feature_subsample = 0.0;
  bool bootstrap = true;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  int present = -1;  // child when the feature is active
  int absent = -1;
  ClassScores distribution{};

  bool leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const ClassScores& leaf_distribution(const FeatureVector& fv) const;
  int depth() const;
};

class ForestModel {
 public:
  ForestConfig config;
  std::size_t dimension = 0;
  std::vector<DecisionTree> trees;

  // Mean of the trees' leaf distributions.
  Prediction predict(const FeatureVector& fv) const;

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);
};

// Parallel over trees; each tree draws from its own seeded stream.
ForestModel train_forest(std::span<const FeatureVector> data,
                         std::size_t dimension, const ForestConfig& config);

namespace reference {
LinearModel train_linear(std::span<const FeatureVector> data,
                         std::size_t dimension, Loss loss,
                         Regularizer regularizer, const TrainConfig& config,
                         LinearTrace* trace = nullptr);
ForestModel train_forest(std::span<const FeatureVector> data,
                         std::size_t dimension, const ForestConfig& config);
}  // namespace reference

}  // namespace precedence

#endif  // PRECEDENCE_LINEAR_H_
