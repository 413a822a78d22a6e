#include "precedence/pipeline.h"

#include <algorithm>
#include <set>

#include "precedence/errors.h"
#include "precedence/metrics.h"
#include "precedence/models.h"

namespace precedence {

std::string_view to_string(PrecisionSource source) {
  return source == PrecisionSource::DevFolds ? "dev_folds" : "configured";
}

std::vector<std::string> SievePlan::model_ids() const {
  std::vector<std::string> ids;
  for (const SieveEntry& e : entries) ids.push_back(e.model_id);
  return ids;
}

void SievePlan::validate() const {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!seen.insert(entries[i].model_id).second) {
      throw ValidationError("model '" + entries[i].model_id + "' appears twice in the plan");
    }
    if (i > 0 && entries[i].precision > entries[i - 1].precision) {
      throw ValidationError("plan is not ordered by non-increasing precision at '" +
                            entries[i].model_id + "'");
    }
  }
}

nlohmann::json SievePlan::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const SieveEntry& e : entries) {
    out.push_back({{"model_id", e.model_id},
                   {"precision", e.precision},
                   {"source", to_string(e.source)}});
  }
  return out;
}

SievePlan SievePlan::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("sieve plan must be a JSON list");
  SievePlan plan;
  try {
    for (const auto& e : j) {
      SieveEntry entry;
      entry.model_id = e.at("model_id").get<std::string>();
      entry.precision = e.at("precision").get<double>();
      const std::string source = e.at("source").get<std::string>();
      if (source == "dev_folds") {
        entry.source = PrecisionSource::DevFolds;
      } else if (source == "configured") {
        entry.source = PrecisionSource::Configured;
      } else {
        throw ValidationError("unknown precision source '" + source + "'");
      }
      plan.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed sieve plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

SievePlan rank_sieves(const std::vector<std::string>& model_ids,
                      const std::vector<std::vector<CoarseLabel>>& dev_predictions,
                      std::span<const CoarseLabel> gold,
                      const std::vector<std::string>& prior_order) {
  if (model_ids.size() != dev_predictions.size()) {
    throw ValidationError("one prediction list is required per model");
  }
  std::vector<SieveEntry> ranked;
  std::vector<SieveEntry> zero;
  for (std::size_t m = 0; m < model_ids.size(); ++m) {
    const Prf prf = micro_prf(dev_predictions[m], gold);
    SieveEntry entry{model_ids[m], 0.0, PrecisionSource::DevFolds};
    if (prf.tp + prf.fp == 0) {
      entry.source = PrecisionSource::Configured;
    } else {
      entry.precision = prf.precision;
    }
    (entry.precision > 0.0 ? ranked : zero).push_back(std::move(entry));
  }
  std::sort(ranked.begin(), ranked.end(), [](const SieveEntry& a, const SieveEntry& b) {
    if (a.precision != b.precision) return a.precision > b.precision;
    return a.model_id < b.model_id;
  });
  const auto prior = [&](const std::string& id) {
    const auto it = std::find(prior_order.begin(), prior_order.end(), id);
    return static_cast<std::size_t>(it - prior_order.begin());
  };
  std::sort(zero.begin(), zero.end(), [&](const SieveEntry& a, const SieveEntry& b) {
    const std::size_t pa = prior(a.model_id);
    const std::size_t pb = prior(b.model_id);
    if (pa != pb) return pa < pb;
    return a.model_id < b.model_id;
  });
  SievePlan plan;
  plan.entries = std::move(ranked);
  plan.entries.insert(plan.entries.end(), zero.begin(), zero.end());
  plan.validate();
  return plan;
}

CoarseLabel combine(std::span<const CoarseLabel> outputs_in_plan_order) {
  for (CoarseLabel label : outputs_in_plan_order) {
    if (is_positive(label)) return label;
  }
  return CoarseLabel::Nil;
}

std::vector<CoarseLabel> combine_predictions(
    const SievePlan& plan,
    const std::map<std::string, std::vector<CoarseLabel>>& predictions) {
  std::vector<const std::vector<CoarseLabel>*> columns;
  std::size_t n = 0;
  for (const SieveEntry& e : plan.entries) {
    const auto it = predictions.find(e.model_id);
    if (it == predictions.end()) {
      throw ValidationError("no predictions for plan model '" + e.model_id + "'");
    }
    if (!columns.empty() && it->second.size() != n) {
      throw ValidationError("prediction lists are not aligned");
    }
    n = it->second.size();
    columns.push_back(&it->second);
  }
  std::vector<CoarseLabel> out(n, CoarseLabel::Nil);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto* column : columns) {
      if (is_positive((*column)[i])) {
        out[i] = (*column)[i];
        break;
      }
    }
  }
  return out;
}

CoarseLabel combine(const SievePlan& plan,
                    const std::map<std::string, const PairClassifier*>& models,
                    const AnnotatedPair& pair, const Corpus& corpus) {
  for (const SieveEntry& e : plan.entries) {
    const auto it = models.find(e.model_id);
    if (it == models.end() || it->second == nullptr) {
      throw ValidationError("plan model '" + e.model_id + "' is not loaded");
    }
    const CoarseLabel label = it->second->predict(pair, corpus);
    if (is_positive(label)) return label;
  }
  return CoarseLabel::Nil;
}

}  // namespace precedence
