#ifndef PRECEDENCE_MODELS_H_
#define PRECEDENCE_MODELS_H_

// Uniform interface over every pair classifier: the three deterministic
// sieves, the feature-based models and the LSTM variants.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"
#include "precedence/features.h"
#include "precedence/linear.h"
#include "precedence/neural.h"
#include "precedence/sieves.h"

namespace precedence {

enum class ModelKind { IntraRules, InterRules, Reichenbach, Linear, Forest, Lstm };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
bool is_deterministic(ModelKind kind);

struct ModelSpec {
  std::string id;
  ModelKind kind = ModelKind::Linear;

  // Rule sieves: rule file / mapping contents; empty means built-in.
  std::string rules_text;
  std::string mapping_text;

  Loss loss = Loss::Logistic;
  Regularizer regularizer = Regularizer::L2;
  TrainConfig linear;
  // Non-empty: lambda is chosen on the dev split from this grid.
  std::vector<double> lambda_grid;

  ForestConfig forest;

  NetConfig net;
  std::string embeddings_path;  // required when net.pretrained

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

// Ids with a built-in spec, deterministic sieves first. This order is also
// the configured prior order for sieve ranking.
const std::vector<std::string>& builtin_model_ids();
// Throws ConfigError for unknown ids.
ModelSpec builtin_spec(std::string_view id);

inline const std::vector<double> kLambdaGrid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};

class PairClassifier {
 public:
  virtual ~PairClassifier() = default;
  virtual const ModelSpec& spec() const = 0;
  virtual CoarseLabel predict(const AnnotatedPair& pair,
                              const Corpus& corpus) const = 0;
  virtual nlohmann::json to_json() const = 0;

  const std::string& id() const { return spec().id; }
};

// Gold coarse label; throws ValidationError for unlabeled pairs.
CoarseLabel gold_label(const AnnotatedPair& pair);
std::vector<CoarseLabel> gold_labels(std::span<const AnnotatedPair> pairs);

// Token sequences for the recurrent models: mention spans and the
// encompassing span.
NetInput net_input(const AnnotatedPair& pair, const Corpus& corpus);

// `dev` is used for lambda selection and as the early-stopping validation
// set; it may be empty. Deterministic sieves ignore both. `seed` overrides
// the seeds in the spec so that one top-level seed drives a run.
std::unique_ptr<PairClassifier> train_model(const ModelSpec& spec,
                                            std::span<const AnnotatedPair> train,
                                            std::span<const AnnotatedPair> dev,
                                            const Corpus& corpus,
                                            std::uint64_t seed);
std::unique_ptr<PairClassifier> load_model(const nlohmann::json& j);

// Parallel over pairs; output aligned with `pairs`.
std::vector<CoarseLabel> predict_all(const PairClassifier& model,
                                     std::span<const AnnotatedPair> pairs,
                                     const Corpus& corpus);

namespace reference {
std::vector<CoarseLabel> predict_all(const PairClassifier& model,
                                     std::span<const AnnotatedPair> pairs,
                                     const Corpus& corpus);
}  // namespace reference

}  // namespace precedence

#endif  // PRECEDENCE_MODELS_H_
