#ifndef PRECEDENCE_PIPELINE_H_
#define PRECEDENCE_PIPELINE_H_

// Sieve combination: models applied in descending order of measured
// precision, where the first positive decision is final.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"

namespace precedence {

class PairClassifier;

enum class PrecisionSource { DevFolds, Configured };
std::string_view to_string(PrecisionSource source);

struct SieveEntry {
  std::string model_id;
  double precision = 0.0;
  PrecisionSource source = PrecisionSource::DevFolds;

  friend bool operator==(const SieveEntry&, const SieveEntry&) = default;
};

struct SievePlan {
  std::vector<SieveEntry> entries;

  std::vector<std::string> model_ids() const;
  // Throws ValidationError on duplicate ids or increasing precision.
  void validate() const;

  nlohmann::json to_json() const;
  static SievePlan from_json(const nlohmann::json& j);
  friend bool operator==(const SievePlan&, const SievePlan&) = default;
};

// Micro precision over the precedence classes on the dev predictions.
// Models with positive precision come first, by precision then id; the
// zero-precision rest follows `prior_order` (ids not listed go last, by id).
// Models that predicted no positives are marked Configured.
SievePlan rank_sieves(const std::vector<std::string>& model_ids,
                      const std::vector<std::vector<CoarseLabel>>& dev_predictions,
                      std::span<const CoarseLabel> gold,
                      const std::vector<std::string>& prior_order = {});

// First non-Nil label in plan order, else Nil.
CoarseLabel combine(std::span<const CoarseLabel> outputs_in_plan_order);

// Combined predictions for every pair; `predictions` maps model id to
// labels aligned with the pairs.
std::vector<CoarseLabel> combine_predictions(
    const SievePlan& plan,
    const std::map<std::string, std::vector<CoarseLabel>>& predictions);

// Lazily queries the models in plan order, stopping at the first positive.
CoarseLabel combine(const SievePlan& plan,
                    const std::map<std::string, const PairClassifier*>& models,
                    const AnnotatedPair& pair, const Corpus& corpus);

}  // namespace precedence

#endif  // PRECEDENCE_PIPELINE_H_
