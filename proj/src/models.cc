#include "precedence/models.h"

#include <algorithm>
#include <variant>

#include "precedence/candidates.h"
#include "precedence/errors.h"
#include "precedence/metrics.h"
#include "util.h"

namespace precedence {

namespace {

constexpr std::string_view kModelSchema = "precedence.model/1";

struct KindName {
  ModelKind kind;
  std::string_view name;
};
constexpr KindName kKindNames[] = {
    {ModelKind::IntraRules, "intra-rules"}, {ModelKind::InterRules, "inter-rules"},
    {ModelKind::Reichenbach, "reichenbach"}, {ModelKind::Linear, "linear"},
    {ModelKind::Forest, "forest"},           {ModelKind::Lstm, "lstm"},
};

}  // namespace

std::string_view to_string(ModelKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (util::iequals(text, name)) return k;
  }
  throw ConfigError("unknown model kind '" + std::string(text) + "'");
}

bool is_deterministic(ModelKind kind) {
  return kind == ModelKind::IntraRules || kind == ModelKind::InterRules ||
         kind == ModelKind::Reichenbach;
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j = {{"id", id}, {"kind", precedence::to_string(kind)}};
  switch (kind) {
    case ModelKind::IntraRules:
    case ModelKind::InterRules:
      if (!rules_text.empty()) j["rules"] = rules_text;
      break;
    case ModelKind::Reichenbach:
      if (!mapping_text.empty()) j["mapping"] = mapping_text;
      break;
    case ModelKind::Linear:
      j["loss"] = precedence::to_string(loss);
      j["regularizer"] = precedence::to_string(regularizer);
      j["epochs"] = linear.epochs;
      j["eta0"] = linear.eta0;
      j["decay"] = linear.decay;
      j["lambda"] = linear.lambda;
      j["lambda_grid"] = lambda_grid;
      j["shuffle"] = linear.shuffle;
      j["class_weighting"] = linear.class_weighting;
      break;
    case ModelKind::Forest:
      j["n_trees"] = forest.n_trees;
      j["max_depth"] = forest.max_depth;
      j["feature_subsample"] = forest.feature_subsample;
      j["bootstrap"] = forest.bootstrap;
      break;
    case ModelKind::Lstm:
      j["architecture"] = precedence::to_string(net.architecture);
      j["pretrained"] = net.pretrained;
      j["hidden"] = net.hidden;
      j["embedding_dim"] = net.embedding_dim;
      j["dropout"] = net.dropout;
      j["epochs"] = net.max_epochs;
      j["batch"] = net.batch_size;
      j["patience"] = net.patience;
      j["learning_rate"] = net.learning_rate;
      j["clip_norm"] = net.clip_norm;
      j["max_length"] = net.max_length;
      if (!embeddings_path.empty()) j["embeddings"] = embeddings_path;
      break;
  }
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  try {
    const std::string id = j.at("id").get<std::string>();
    ModelSpec s;
    if (j.contains("kind")) {
      s.id = id;
      s.kind = parse_model_kind(j.at("kind").get<std::string>());
    } else {
      s = builtin_spec(id);
    }
    s.rules_text = j.value("rules", s.rules_text);
    s.mapping_text = j.value("mapping", s.mapping_text);
    if (j.contains("loss")) s.loss = parse_loss(j["loss"].get<std::string>());
    if (j.contains("regularizer")) {
      s.regularizer = parse_regularizer(j["regularizer"].get<std::string>());
    }
    if (s.kind == ModelKind::Linear) {
      s.linear.epochs = j.value("epochs", s.linear.epochs);
      s.linear.eta0 = j.value("eta0", s.linear.eta0);
      s.linear.decay = j.value("decay", s.linear.decay);
      s.linear.lambda = j.value("lambda", s.linear.lambda);
      s.lambda_grid = j.value("lambda_grid", s.lambda_grid);
      s.linear.shuffle = j.value("shuffle", s.linear.shuffle);
      s.linear.class_weighting = j.value("class_weighting", s.linear.class_weighting);
      s.linear.validate();
    }
    if (s.kind == ModelKind::Forest) {
      s.forest.n_trees = j.value("n_trees", s.forest.n_trees);
      s.forest.max_depth = j.value("max_depth", s.forest.max_depth);
      s.forest.feature_subsample = j.value("feature_subsample", s.forest.feature_subsample);
      s.forest.bootstrap = j.value("bootstrap", s.forest.bootstrap);
      s.forest.validate();
    }
    if (s.kind == ModelKind::Lstm) {
      if (j.contains("architecture")) {
        s.net.architecture = parse_architecture(j["architecture"].get<std::string>());
      }
      s.net.pretrained = j.value("pretrained", s.net.pretrained);
      s.net.hidden = j.value("hidden", s.net.hidden);
      s.net.embedding_dim = j.value("embedding_dim", s.net.embedding_dim);
      s.net.dropout = j.value("dropout", s.net.dropout);
      s.net.max_epochs = j.value("epochs", s.net.max_epochs);
      s.net.batch_size = j.value("batch", s.net.batch_size);
      s.net.patience = j.value("patience", s.net.patience);
      s.net.learning_rate = j.value("learning_rate", s.net.learning_rate);
      s.net.clip_norm = j.value("clip_norm", s.net.clip_norm);
      s.net.max_length = j.value("max_length", s.net.max_length);
      s.embeddings_path = j.value("embeddings", s.embeddings_path);
      s.net.validate();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model spec: ") + e.what());
  }
}

const std::vector<std::string>& builtin_model_ids() {
  static const std::vector<std::string> ids = {
      "intra",  "inter",  "reichenbach", "lr-l1", "lr-l2",   "svm-l1",
      "svm-l2", "rf",     "lstm",        "lstm+p", "flstm", "flstm+p"};
  return ids;
}

ModelSpec builtin_spec(std::string_view id) {
  ModelSpec s;
  s.id = std::string(id);
  if (id == "intra") {
    s.kind = ModelKind::IntraRules;
  } else if (id == "inter") {
    s.kind = ModelKind::InterRules;
  } else if (id == "reichenbach") {
    s.kind = ModelKind::Reichenbach;
  } else if (id == "lr-l1" || id == "lr-l2" || id == "svm-l1" || id == "svm-l2") {
    s.kind = ModelKind::Linear;
    s.loss = id.starts_with("lr") ? Loss::Logistic : Loss::Hinge;
    s.regularizer = id.ends_with("l1") ? Regularizer::L1 : Regularizer::L2;
    s.lambda_grid = kLambdaGrid;
  } else if (id == "rf") {
    s.kind = ModelKind::Forest;
  } else if (id == "lstm" || id == "lstm+p" || id == "flstm" || id == "flstm+p") {
    s.kind = ModelKind::Lstm;
    s.net.architecture =
        id.starts_with("f") ? Architecture::Pitchfork : Architecture::Basic;
    s.net.pretrained = id.ends_with("+p");
  } else {
    throw ConfigError("unknown model id '" + std::string(id) + "'");
  }
  return s;
}

CoarseLabel gold_label(const AnnotatedPair& pair) {
  if (!pair.label) {
    throw ValidationError("pair " + pair.pair_id + " has no label");
  }
  return reduce_label(*pair.label);
}

std::vector<CoarseLabel> gold_labels(std::span<const AnnotatedPair> pairs) {
  std::vector<CoarseLabel> out;
  out.reserve(pairs.size());
  for (const AnnotatedPair& p : pairs) out.push_back(gold_label(p));
  return out;
}

NetInput net_input(const AnnotatedPair& pair, const Corpus& corpus) {
  const Document& doc = corpus.document(pair.doc_id());
  const auto mention_tokens = [&](const EventMention& e) {
    const Sentence& s = doc.sentence(e.sentence);
    std::vector<std::string> out;
    for (int t = e.span.start; t < e.span.end; ++t) {
      out.push_back(s.tokens[static_cast<std::size_t>(t)].text);
    }
    return out;
  };
  NetInput input;
  input.e1 = mention_tokens(pair.e1());
  input.e2 = mention_tokens(pair.e2());
  EncompassingSpan region = pair.encompassing;
  if (region.spans.empty()) region = encompassing_span(pair.events, doc);
  for (const Token* t : span_tokens(region, doc)) input.span.push_back(t->text);
  return input;
}

namespace {

std::uint64_t model_seed(const ModelSpec& spec, std::uint64_t seed) {
  return util::mix_seed(seed, util::fnv1a(spec.id));
}

class SieveModel final : public PairClassifier {
 public:
  explicit SieveModel(ModelSpec spec) : spec_(std::move(spec)) {
    if (spec_.kind == ModelKind::Reichenbach) {
      mapping_ = spec_.mapping_text.empty()
                     ? ReichenbachMapping::standard()
                     : ReichenbachMapping::parse(spec_.mapping_text);
    } else {
      rules_ = spec_.rules_text.empty() ? default_rules() : parse_rules(spec_.rules_text);
    }
  }

  const ModelSpec& spec() const override { return spec_; }

  CoarseLabel predict(const AnnotatedPair& pair, const Corpus& corpus) const override {
    const Document& doc = corpus.document(pair.doc_id());
    std::optional<CoarseLabel> label;
    switch (spec_.kind) {
      case ModelKind::IntraRules:
        label = classify_intra(pair.events, doc, rules_);
        break;
      case ModelKind::InterRules:
        label = classify_inter(pair.events, doc, rules_);
        break;
      default:
        label = classify_reichenbach(pair.events, doc, mapping_);
        break;
    }
    return label.value_or(CoarseLabel::Nil);
  }

  nlohmann::json to_json() const override {
    return {{"schema", kModelSchema}, {"spec", spec_.to_json()}};
  }

 private:
  ModelSpec spec_;
  std::vector<PrecedenceRule> rules_;
  ReichenbachMapping mapping_;
};

class FeatureModel final : public PairClassifier {
 public:
  FeatureModel(ModelSpec spec, FeatureIndex index,
               std::variant<LinearModel, ForestModel> model)
      : spec_(std::move(spec)), index_(std::move(index)), model_(std::move(model)) {}

  const ModelSpec& spec() const override { return spec_; }

  CoarseLabel predict(const AnnotatedPair& pair, const Corpus& corpus) const override {
    const FeatureVector fv =
        vectorize(pair.events, corpus.document(pair.doc_id()), index_);
    return std::visit([&](const auto& m) { return m.predict(fv).label; }, model_);
  }

  nlohmann::json to_json() const override {
    std::vector<std::string> features;
    features.reserve(index_.size());
    for (std::size_t c = 0; c < index_.size(); ++c) {
      features.push_back(index_.feature(static_cast<int>(c)));
    }
    return {{"schema", kModelSchema},
            {"spec", spec_.to_json()},
            {"features", features},
            {"model", std::visit([](const auto& m) { return m.to_json(); }, model_)}};
  }

  static std::unique_ptr<PairClassifier> from_json(ModelSpec spec,
                                                   const nlohmann::json& j) {
    FeatureIndex index;
    for (const auto& f : j.at("features")) index.add(f.get<std::string>());
    index.freeze();
    const auto& m = j.at("model");
    std::variant<LinearModel, ForestModel> model;
    if (spec.kind == ModelKind::Linear) {
      model = LinearModel::from_json(m);
    } else {
      model = ForestModel::from_json(m);
    }
    const std::size_t dimension =
        std::visit([](const auto& x) { return x.dimension; }, model);
    if (dimension != index.size()) {
      throw ValidationError("model dimension does not match its feature index");
    }
    return std::make_unique<FeatureModel>(std::move(spec), std::move(index),
                                          std::move(model));
  }

 private:
  ModelSpec spec_;
  FeatureIndex index_;
  std::variant<LinearModel, ForestModel> model_;
};

class LstmModel final : public PairClassifier {
 public:
  LstmModel(ModelSpec spec, Network network, TrainingLog log)
      : spec_(std::move(spec)), network_(std::move(network)), log_(std::move(log)) {}

  const ModelSpec& spec() const override { return spec_; }

  CoarseLabel predict(const AnnotatedPair& pair, const Corpus& corpus) const override {
    return precedence::predict(network_, net_input(pair, corpus));
  }

  nlohmann::json to_json() const override {
    nlohmann::json epochs = nlohmann::json::array();
    for (const EpochLog& e : log_.epochs) {
      epochs.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"validation_loss", e.validation_loss}});
    }
    return {{"schema", kModelSchema},
            {"spec", spec_.to_json()},
            {"network", network_.to_json()},
            {"log",
             {{"epochs", epochs},
              {"best_epoch", log_.best_epoch},
              {"early_stopped", log_.early_stopped}}}};
  }

  const Network& network() const { return network_; }

 private:
  ModelSpec spec_;
  Network network_;
  TrainingLog log_;
};

std::vector<FeatureVector> vectorize_all(std::span<const FeatureSet> sets,
                                         const FeatureIndex& index,
                                         std::span<const CoarseLabel> labels) {
  std::vector<FeatureVector> out;
  out.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out.push_back(vectorize(sets[i], index, labels.empty() ? CoarseLabel::Nil : labels[i]));
  }
  return out;
}

std::unique_ptr<PairClassifier> train_feature_model(
    ModelSpec spec, std::span<const AnnotatedPair> train,
    std::span<const AnnotatedPair> dev, const Corpus& corpus, std::uint64_t seed) {
  const std::vector<FeatureSet> sets = extract_features(train, corpus);
  FeatureIndex index = build_index(sets);
  const std::vector<FeatureVector> data =
      vectorize_all(sets, index, gold_labels(train));

  if (spec.kind == ModelKind::Forest) {
    spec.forest.seed = model_seed(spec, seed);
    ForestModel forest = train_forest(data, index.size(), spec.forest);
    return std::make_unique<FeatureModel>(std::move(spec), std::move(index),
                                          std::move(forest));
  }

  spec.linear.seed = model_seed(spec, seed);
  if (spec.lambda_grid.empty() || dev.empty()) {
    LinearModel m = train_linear(data, index.size(), spec.loss, spec.regularizer,
                                 spec.linear);
    return std::make_unique<FeatureModel>(std::move(spec), std::move(index),
                                          std::move(m));
  }
  const std::vector<FeatureVector> dev_data =
      vectorize_all(extract_features(dev, corpus), index, {});
  const std::vector<CoarseLabel> dev_gold = gold_labels(dev);
  std::optional<LinearModel> best;
  double best_f1 = -1.0;
  for (double lambda : spec.lambda_grid) {
    TrainConfig config = spec.linear;
    config.lambda = lambda;
    LinearModel m =
        train_linear(data, index.size(), spec.loss, spec.regularizer, config);
    std::vector<CoarseLabel> predicted;
    predicted.reserve(dev_data.size());
    for (const FeatureVector& fv : dev_data) predicted.push_back(m.predict(fv).label);
    const double f1 = micro_prf(predicted, dev_gold).f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = std::move(m);
    }
  }
  spec.linear.lambda = best->config.lambda;
  return std::make_unique<FeatureModel>(std::move(spec), std::move(index),
                                        std::move(*best));
}

std::vector<NetExample> net_examples(std::span<const AnnotatedPair> pairs,
                                     const Corpus& corpus) {
  std::vector<NetExample> out;
  out.reserve(pairs.size());
  for (const AnnotatedPair& p : pairs) out.push_back({net_input(p, corpus), gold_label(p)});
  return out;
}

std::unique_ptr<PairClassifier> train_lstm_model(
    ModelSpec spec, std::span<const AnnotatedPair> train,
    std::span<const AnnotatedPair> dev, const Corpus& corpus, std::uint64_t seed) {
  spec.net.seed = model_seed(spec, seed);
  std::optional<EmbeddingTable> table;
  if (spec.net.pretrained) {
    if (spec.embeddings_path.empty()) {
      throw ConfigError("model " + spec.id + " needs pre-trained embeddings");
    }
    table = load_embeddings_file(spec.embeddings_path, spec.net.seed);
  }
  const std::vector<NetExample> train_ex = net_examples(train, corpus);
  const std::vector<NetExample> dev_ex = net_examples(dev, corpus);
  TrainedNetwork trained =
      train_net(train_ex, dev_ex, spec.net, table ? &*table : nullptr);
  return std::make_unique<LstmModel>(std::move(spec), std::move(trained.network),
                                     std::move(trained.log));
}

}  // namespace

std::unique_ptr<PairClassifier> train_model(const ModelSpec& spec,
                                            std::span<const AnnotatedPair> train,
                                            std::span<const AnnotatedPair> dev,
                                            const Corpus& corpus,
                                            std::uint64_t seed) {
  if (is_deterministic(spec.kind)) return std::make_unique<SieveModel>(spec);
  if (train.empty()) throw ValidationError("no training pairs for model " + spec.id);
  if (spec.kind == ModelKind::Lstm) return train_lstm_model(spec, train, dev, corpus, seed);
  return train_feature_model(spec, train, dev, corpus, seed);
}

std::unique_ptr<PairClassifier> load_model(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", std::string()) != kModelSchema) {
    throw ValidationError("expected a model file with schema " + std::string(kModelSchema));
  }
  try {
    ModelSpec spec = ModelSpec::from_json(j.at("spec"));
    if (is_deterministic(spec.kind)) return std::make_unique<SieveModel>(std::move(spec));
    if (spec.kind == ModelKind::Lstm) {
      TrainingLog log;
      if (j.contains("log")) {
        for (const auto& e : j["log"].at("epochs")) {
          log.epochs.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(),
                                e.at("validation_loss").get<double>()});
        }
        log.best_epoch = j["log"].value("best_epoch", -1);
        log.early_stopped = j["log"].value("early_stopped", false);
      }
      return std::make_unique<LstmModel>(std::move(spec),
                                         Network::from_json(j.at("network")),
                                         std::move(log));
    }
    return FeatureModel::from_json(std::move(spec), j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

std::vector<CoarseLabel> predict_all(const PairClassifier& model,
                                     std::span<const AnnotatedPair> pairs,
                                     const Corpus& corpus) {
  std::vector<CoarseLabel> out(pairs.size(), CoarseLabel::Nil);
  std::exception_ptr failure;
  const auto n = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          model.predict(pairs[static_cast<std::size_t>(i)], corpus);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace reference {
std::vector<CoarseLabel> predict_all(const PairClassifier& model,
                                     std::span<const AnnotatedPair> pairs,
                                     const Corpus& corpus) {
  std::vector<CoarseLabel> out;
  out.reserve(pairs.size());
  for (const AnnotatedPair& p : pairs) out.push_back(model.predict(p, corpus));
  return out;
}
}  // namespace reference

}  // namespace precedence
