#ifndef PRECEDENCE_EVALUATION_H_
#define PRECEDENCE_EVALUATION_H_

// Cross-validation harness, significance testing and corpus reports.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"
#include "precedence/metrics.h"
#include "precedence/models.h"
#include "precedence/pipeline.h"

namespace precedence {

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold;  // per item
  std::vector<std::string> warnings;

  std::vector<std::size_t> members(int f) const;
  std::vector<std::size_t> complement(std::span<const int> excluded) const;
};

// Each class is shuffled under `seed` and dealt round-robin, continuing the
// rotation across classes, so per-class fold counts differ by at most one.
// Throws ConfigError for k < 2 and ValidationError for k > size.
FoldAssignment stratified_folds(std::span<const CoarseLabel> labels, int k,
                                std::uint64_t seed);

// One-sided paired bootstrap: fraction of resamples in which b's micro F1
// is at least a's. Parallel over iterations, each with its own stream.
double bootstrap_compare(std::span<const CoarseLabel> preds_a,
                         std::span<const CoarseLabel> preds_b,
                         std::span<const CoarseLabel> gold,
                         int iterations = 10000, std::uint64_t seed = 1);

namespace reference {
double bootstrap_compare(std::span<const CoarseLabel> preds_a,
                         std::span<const CoarseLabel> preds_b,
                         std::span<const CoarseLabel> gold,
                         int iterations = 10000, std::uint64_t seed = 1);
}  // namespace reference

struct OverlapReport {
  std::vector<std::string> models;
  struct Intersection {
    std::vector<std::string> members;
    std::size_t count = 0;
  };
  // Every subset of 1..max_k models: ids shared by all members.
  std::vector<Intersection> intersections;
  // Venn regions: ids belonging to exactly `members`. Only non-empty
  // regions are listed.
  std::vector<Intersection> regions;
  struct Pairwise {
    std::string a;
    std::string b;
    std::size_t intersection = 0;
    std::size_t only_a = 0;
    std::size_t only_b = 0;
  };
  std::vector<Pairwise> pairwise;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Throws ValidationError for ids outside `universe` (when non-empty).
OverlapReport overlap_report(const std::map<std::string, std::set<std::string>>& sets,
                             const std::set<std::string>& universe = {},
                             int max_k = 3);

struct LabelDistribution {
  RelationLabel label = RelationLabel::None;
  std::size_t within_sentence = 0;
  std::size_t across_sentences = 0;
  std::size_t with_coref = 0;

  std::size_t total() const { return within_sentence + across_sentences; }
  double coref_fraction() const;
};

struct DistributionReport {
  std::vector<LabelDistribution> rows;  // one per relation label
  std::size_t unlabeled = 0;
  std::size_t discarded = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

DistributionReport distribution_report(std::span<const AnnotatedPair> pairs);

enum class PlanMode { Nested, Pooled };
std::string_view to_string(PlanMode mode);
PlanMode parse_plan_mode(std::string_view text);

struct CvConfig {
  int folds = 10;
  std::uint64_t seed = 1;
  std::vector<ModelSpec> models;
  PlanMode plan_mode = PlanMode::Nested;
  int bootstrap_iterations = 10000;

  nlohmann::json to_json() const;
};

struct ModelReport {
  std::string model_id;
  Prf metrics;
  Confusion confusion;
  std::vector<Confusion> per_fold;
  std::vector<CoarseLabel> predictions;  // pooled, aligned with the dataset

  nlohmann::json to_json(bool with_predictions = false) const;
};

struct CurvePoint {
  std::size_t sieves = 0;
  std::string added_model;
  Prf metrics;
};

struct EvalReport {
  CvConfig config;
  std::size_t pairs = 0;
  std::vector<std::string> pair_ids;
  std::vector<CoarseLabel> gold;
  std::vector<ModelReport> models;
  ModelReport combined;
  // Nested mode: one plan per test fold. Pooled mode: a single plan.
  std::vector<SievePlan> plans;
  // Combined performance as sieves are appended in the (first) plan order.
  std::vector<CurvePoint> curve;
  std::string best_single_model;
  double combined_vs_best_p = 1.0;

  const ModelReport* find(std::string_view model_id) const;
  // True positive pair ids per model, for overlap analysis.
  std::map<std::string, std::set<std::string>> true_positives() const;

  nlohmann::json to_json() const;
  std::string to_text() const;
  std::string curve_csv() const;
};

// Folds are evaluated independently (in parallel). For test fold f the dev
// fold is (f + 1) mod k; models train on the remaining folds and the dev
// fold supplies lambda selection, early stopping and the fold's sieve plan.
EvalReport run_cv(std::span<const AnnotatedPair> dataset, const Corpus& corpus,
                  const CvConfig& config);

namespace reference {
EvalReport run_cv(std::span<const AnnotatedPair> dataset, const Corpus& corpus,
                  const CvConfig& config);
}  // namespace reference

// Labeled, non-discarded pairs.
std::vector<AnnotatedPair> labeled_pairs(std::span<const AnnotatedPair> pairs);

// Recall/precision curve for plan prefixes over fixed predictions.
std::vector<CurvePoint> prefix_curve(
    const SievePlan& plan,
    const std::map<std::string, std::vector<CoarseLabel>>& predictions,
    std::span<const CoarseLabel> gold);

}  // namespace precedence

#endif  // PRECEDENCE_EVALUATION_H_
