#include "precedence/linear.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "precedence/errors.h"
#include "util.h"

namespace precedence {

namespace {

constexpr std::string_view kLinearSchema = "precedence.linear/1";
constexpr std::string_view kForestSchema = "precedence.forest/1";

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  return margin > 0 ? std::log1p(std::exp(-margin))
                    : -margin + std::log1p(std::exp(margin));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double loss_value(Loss loss, double margin) {
  return loss == Loss::Logistic ? logistic_loss(margin)
                                : std::max(0.0, 1.0 - margin);
}

// d loss / d score for label sign y.
double loss_derivative(Loss loss, double margin, int y) {
  if (loss == Loss::Logistic) return -y * sigmoid(-margin);
  return margin < 1.0 ? -static_cast<double>(y) : 0.0;
}

double sparse_dot(const FeatureVector& fv, std::span<const double> w) {
  double s = 0.0;
  for (int j : fv.indices) s += w[static_cast<std::size_t>(j)];
  return s;
}

void check_columns(const FeatureVector& fv, std::size_t dimension) {
  if (!fv.indices.empty() &&
      (fv.indices.front() < 0 ||
       static_cast<std::size_t>(fv.indices.back()) >= dimension)) {
    throw ValidationError("feature column out of range for model of dimension " +
                          std::to_string(dimension));
  }
}

std::vector<double> class_weights(std::span<const FeatureVector> data,
                                  bool enabled) {
  std::vector<double> out(data.size(), 1.0);
  if (!enabled) return out;
  std::array<std::size_t, kNumCoarseLabels> counts{};
  for (const FeatureVector& fv : data) ++counts[class_index(fv.label)];
  const auto present = static_cast<double>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = static_cast<double>(data.size()) /
             (present * static_cast<double>(counts[class_index(data[i].label)]));
  }
  return out;
}

struct BinaryResult {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> objective;
};

[[noreturn]] void numeric_failure(std::size_t cls, int epoch, std::size_t example) {
  throw NumericError("non-finite update training class " +
                     std::string(to_string(kCoarseLabels[cls])) + " at epoch " +
                     std::to_string(epoch) + ", example " +
                     std::to_string(example));
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

BinaryResult train_binary_batch(std::span<const FeatureVector> data,
                                const std::vector<int>& signs,
                                const std::vector<double>& cw,
                                std::size_t dimension, Loss loss,
                                Regularizer reg, const TrainConfig& config,
                                std::size_t cls, bool record) {
  BinaryResult r;
  r.w.assign(dimension, 0.0);
  const double n = static_cast<double>(data.size());
  std::vector<double> grad(dimension);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double eta = config.eta0 / (1.0 + epoch * config.decay);
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double margin = signs[i] * (sparse_dot(data[i], r.w) + r.b);
      const double g = cw[i] * loss_derivative(loss, margin, signs[i]) / n;
      for (int j : data[i].indices) grad[static_cast<std::size_t>(j)] += g;
      grad_b += g;
    }
    for (std::size_t j = 0; j < dimension; ++j) {
      if (reg == Regularizer::L2) {
        r.w[j] -= eta * (grad[j] + config.lambda * r.w[j]);
      } else {
        r.w[j] = soft_threshold(r.w[j] - eta * grad[j], eta * config.lambda);
      }
      if (!std::isfinite(r.w[j])) numeric_failure(cls, epoch, 0);
    }
    r.b -= eta * grad_b;
    if (!std::isfinite(r.b)) numeric_failure(cls, epoch, 0);
    if (record) {
      r.objective.push_back(binary_objective(data, signs, loss, reg, config.lambda,
                                             r.w, r.b, cw));
    }
  }
  return r;
}

BinaryResult train_binary_sgd(std::span<const FeatureVector> data,
                              const std::vector<int>& signs,
                              const std::vector<double>& cw,
                              std::size_t dimension, Loss loss, Regularizer reg,
                              const TrainConfig& config, std::size_t cls,
                              bool record) {
  BinaryResult r;
  // L2 keeps w = scale * v so the shrink step costs O(1).
  std::vector<double> v(dimension, 0.0);
  double scale = 1.0;
  // L1 cumulative penalty: u is the total penalty any weight could have
  // received, q[j] what weight j actually received.
  std::vector<double> q(reg == Regularizer::L1 ? dimension : 0, 0.0);
  double u = 0.0;

  const auto apply_penalty = [&](std::size_t j) {
    const double z = v[j];
    if (z > 0) {
      v[j] = std::max(0.0, z - (u + q[j]));
    } else if (z < 0) {
      v[j] = std::min(0.0, z + (u - q[j]));
    }
    q[j] += v[j] - z;
  };
  const auto current_weights = [&]() {
    std::vector<double> w(v);
    if (reg == Regularizer::L2) {
      for (double& x : w) x *= scale;
    }
    return w;
  };

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      util::Rng rng = util::stream(config.seed, static_cast<std::uint64_t>(epoch));
      std::shuffle(order.begin(), order.end(), rng);
    }
    for (std::size_t i : order) {
      const double eta = config.eta0 / (1.0 + static_cast<double>(t) * config.decay);
      ++t;
      const FeatureVector& fv = data[i];
      const double score = scale * sparse_dot(fv, v) + r.b;
      const double g = cw[i] * loss_derivative(loss, signs[i] * score, signs[i]);
      if (!std::isfinite(score) || !std::isfinite(g)) numeric_failure(cls, epoch, i);
      if (reg == Regularizer::L2) {
        const double factor = 1.0 - eta * config.lambda;
        if (factor <= 0.0) {
          std::fill(v.begin(), v.end(), 0.0);
          scale = 1.0;
        } else {
          scale *= factor;
          if (scale < 1e-9) {
            for (double& x : v) x *= scale;
            scale = 1.0;
          }
        }
        if (g != 0.0) {
          for (int j : fv.indices) v[static_cast<std::size_t>(j)] -= eta * g / scale;
        }
      } else {
        u += eta * config.lambda;
        for (int j : fv.indices) {
          v[static_cast<std::size_t>(j)] -= eta * g;
          apply_penalty(static_cast<std::size_t>(j));
        }
      }
      r.b -= eta * g;
    }
    if (record) {
      r.objective.push_back(binary_objective(data, signs, loss, reg, config.lambda,
                                             current_weights(), r.b, cw));
    }
  }
  if (reg == Regularizer::L1) {
    for (std::size_t j = 0; j < dimension; ++j) apply_penalty(j);
  }
  r.w = current_weights();
  for (double x : r.w) {
    if (!std::isfinite(x)) numeric_failure(cls, config.epochs - 1, 0);
  }
  return r;
}

BinaryResult train_class(std::span<const FeatureVector> data,
                         const std::vector<double>& cw, std::size_t dimension,
                         Loss loss, Regularizer reg, const TrainConfig& config,
                         std::size_t cls, bool record) {
  std::vector<int> signs(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    signs[i] = class_index(data[i].label) == cls ? 1 : -1;
  }
  return config.full_batch
             ? train_binary_batch(data, signs, cw, dimension, loss, reg, config,
                                  cls, record)
             : train_binary_sgd(data, signs, cw, dimension, loss, reg, config,
                                cls, record);
}

void check_training_input(std::span<const FeatureVector> data,
                          std::size_t dimension) {
  if (data.empty()) throw ValidationError("training data is empty");
  for (const FeatureVector& fv : data) check_columns(fv, dimension);
}

LinearModel assemble(std::array<BinaryResult, kNumCoarseLabels>& parts,
                     std::size_t dimension, Loss loss, Regularizer reg,
                     const TrainConfig& config, LinearTrace* trace) {
  LinearModel model;
  model.loss = loss;
  model.regularizer = reg;
  model.config = config;
  model.dimension = dimension;
  for (std::size_t c = 0; c < kNumCoarseLabels; ++c) {
    model.weights[c] = std::move(parts[c].w);
    model.bias[c] = parts[c].b;
    if (trace) trace->objective[c] = std::move(parts[c].objective);
  }
  return model;
}

}  // namespace

CoarseLabel argmax_label(const ClassScores& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return kCoarseLabels[best];
}

std::string_view to_string(Loss loss) {
  return loss == Loss::Logistic ? "logistic" : "hinge";
}

std::string_view to_string(Regularizer regularizer) {
  return regularizer == Regularizer::L1 ? "l1" : "l2";
}

Loss parse_loss(std::string_view text) {
  if (util::iequals(text, "logistic")) return Loss::Logistic;
  if (util::iequals(text, "hinge")) return Loss::Hinge;
  throw ConfigError("unknown loss '" + std::string(text) + "'");
}

Regularizer parse_regularizer(std::string_view text) {
  if (util::iequals(text, "l1")) return Regularizer::L1;
  if (util::iequals(text, "l2")) return Regularizer::L2;
  throw ConfigError("unknown regularizer '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(eta0 > 0.0)) throw ConfigError("eta0 must be > 0");
  if (!(decay >= 0.0)) throw ConfigError("decay must be >= 0");
}

Prediction LinearModel::predict(const FeatureVector& fv) const {
  check_columns(fv, dimension);
  Prediction p;
  for (std::size_t c = 0; c < kNumCoarseLabels; ++c) {
    p.scores[c] = sparse_dot(fv, weights[c]) + bias[c];
  }
  p.label = argmax_label(p.scores);
  return p;
}

std::size_t LinearModel::nonzero_weights() const {
  std::size_t n = 0;
  for (const auto& w : weights) {
    n += static_cast<std::size_t>(
        std::count_if(w.begin(), w.end(), [](double x) { return x != 0.0; }));
  }
  return n;
}

namespace {
nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},         {"eta0", c.eta0},
          {"decay", c.decay},           {"lambda", c.lambda},
          {"seed", c.seed},             {"shuffle", c.shuffle},
          {"class_weighting", c.class_weighting},
          {"full_batch", c.full_batch}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.eta0 = j.at("eta0").get<double>();
  c.decay = j.at("decay").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shuffle = j.at("shuffle").get<bool>();
  c.class_weighting = j.at("class_weighting").get<bool>();
  c.full_batch = j.value("full_batch", false);
  return c;
}

void expect_schema(const nlohmann::json& j, std::string_view schema) {
  if (!j.is_object() || j.value("schema", std::string()) != schema) {
    throw ValidationError("expected a model with schema " + std::string(schema));
  }
}
}  // namespace

nlohmann::json LinearModel::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  nlohmann::json w = nlohmann::json::array();
  for (std::size_t c = 0; c < kNumCoarseLabels; ++c) {
    classes.push_back(std::string(to_string(kCoarseLabels[c])));
    nlohmann::json sparse = nlohmann::json::array();
    for (std::size_t j = 0; j < weights[c].size(); ++j) {
      if (weights[c][j] != 0.0) sparse.push_back({j, weights[c][j]});
    }
    w.push_back(std::move(sparse));
  }
  return {{"schema", kLinearSchema},
          {"loss", to_string(loss)},
          {"regularizer", to_string(regularizer)},
          {"config", config_to_json(config)},
          {"dimension", dimension},
          {"classes", classes},
          {"bias", bias},
          {"weights", w}};
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  expect_schema(j, kLinearSchema);
  try {
    LinearModel m;
    m.loss = parse_loss(j.at("loss").get<std::string>());
    m.regularizer = parse_regularizer(j.at("regularizer").get<std::string>());
    m.config = config_from_json(j.at("config"));
    m.dimension = j.at("dimension").get<std::size_t>();
    m.bias = j.at("bias").get<ClassScores>();
    const auto& w = j.at("weights");
    if (w.size() != kNumCoarseLabels) throw ValidationError("expected 3 weight vectors");
    for (std::size_t c = 0; c < kNumCoarseLabels; ++c) {
      m.weights[c].assign(m.dimension, 0.0);
      for (const auto& entry : w[c]) {
        const auto col = entry.at(0).get<std::size_t>();
        if (col >= m.dimension) throw ValidationError("weight column out of range");
        m.weights[c][col] = entry.at(1).get<double>();
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed linear model: ") + e.what());
  }
}

double binary_objective(std::span<const FeatureVector> data,
                        std::span<const int> signs, Loss loss,
                        Regularizer regularizer, double lambda,
                        std::span<const double> w, double b,
                        std::span<const double> example_weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double cw = example_weights.empty() ? 1.0 : example_weights[i];
    total += cw * loss_value(loss, signs[i] * (sparse_dot(data[i], w) + b));
  }
  double penalty = 0.0;
  for (double x : w) {
    penalty += regularizer == Regularizer::L2 ? 0.5 * x * x : std::abs(x);
  }
  return total / static_cast<double>(std::max<std::size_t>(1, data.size())) +
         lambda * penalty;
}

DenseObjective logistic_objective(const std::vector<std::vector<double>>& x,
                                  std::span<const int> y,
                                  std::span<const double> w, double lambda) {
  if (x.size() != y.size()) throw ValidationError("row/label count mismatch");
  const std::size_t d = w.size() - 1;
  DenseObjective out;
  out.gradient.assign(w.size(), 0.0);
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw ValidationError("row dimension mismatch");
    double score = w[d];
    for (std::size_t j = 0; j < d; ++j) score += w[j] * x[i][j];
    const double margin = y[i] * score;
    out.value += logistic_loss(margin) / n;
    const double g = loss_derivative(Loss::Logistic, margin, y[i]) / n;
    for (std::size_t j = 0; j < d; ++j) out.gradient[j] += g * x[i][j];
    out.gradient[d] += g;
  }
  for (std::size_t j = 0; j < d; ++j) {
    out.value += 0.5 * lambda * w[j] * w[j];
    out.gradient[j] += lambda * w[j];
  }
  return out;
}

LinearModel train_linear(std::span<const FeatureVector> data,
                         std::size_t dimension, Loss loss,
                         Regularizer regularizer, const TrainConfig& config,
                         LinearTrace* trace) {
  config.validate();
  check_training_input(data, dimension);
  const std::vector<double> cw = class_weights(data, config.class_weighting);
  std::array<BinaryResult, kNumCoarseLabels> parts;
  std::exception_ptr failure;
#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < static_cast<int>(kNumCoarseLabels); ++c) {
    try {
      parts[static_cast<std::size_t>(c)] =
          train_class(data, cw, dimension, loss, regularizer, config,
                      static_cast<std::size_t>(c), trace != nullptr);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(parts, dimension, loss, regularizer, config, trace);
}

namespace reference {
LinearModel train_linear(std::span<const FeatureVector> data,
                         std::size_t dimension, Loss loss,
                         Regularizer regularizer, const TrainConfig& config,
                         LinearTrace* trace) {
  config.validate();
  check_training_input(data, dimension);
  const std::vector<double> cw = class_weights(data, config.class_weighting);
  std::array<BinaryResult, kNumCoarseLabels> parts;
  for (std::size_t c = 0; c < kNumCoarseLabels; ++c) {
    parts[c] = train_class(data, cw, dimension, loss, regularizer, config, c,
                           trace != nullptr);
  }
  return assemble(parts, dimension, loss, regularizer, config, trace);
}
}  // namespace reference

// ---------------------------------------------------------------------------
// Forest

void ForestConfig::validate() const {
  if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (feature_subsample > 1.0) throw ConfigError("feature_subsample must be <= 1");
}

const ClassScores& DecisionTree::leaf_distribution(const FeatureVector& fv) const {
  std::size_t node = 0;
  while (!nodes[node].leaf()) {
    const TreeNode& n = nodes[node];
    node = static_cast<std::size_t>(fv.has(n.feature) ? n.present : n.absent);
  }
  return nodes[node].distribution;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].leaf()) {
      d[static_cast<std::size_t>(nodes[i].present)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].absent)] = d[i] + 1;
    }
  }
  return deepest;
}

Prediction ForestModel::predict(const FeatureVector& fv) const {
  check_columns(fv, dimension);
  Prediction p;
  for (const DecisionTree& tree : trees) {
    const ClassScores& dist = tree.leaf_distribution(fv);
    for (std::size_t c = 0; c < kNumCoarseLabels; ++c) p.scores[c] += dist[c];
  }
  if (!trees.empty()) {
    for (double& s : p.scores) s /= static_cast<double>(trees.size());
  }
  p.label = argmax_label(p.scores);
  return p;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json t = nlohmann::json::array();
  for (const DecisionTree& tree : trees) {
    nlohmann::json feature = nlohmann::json::array();
    nlohmann::json present = nlohmann::json::array();
    nlohmann::json absent = nlohmann::json::array();
    nlohmann::json dist = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
      feature.push_back(n.feature);
      present.push_back(n.present);
      absent.push_back(n.absent);
      dist.push_back(n.distribution);
    }
    t.push_back({{"feature", feature}, {"present", present},
                 {"absent", absent}, {"distribution", dist}});
  }
  return {{"schema", kForestSchema},
          {"config",
           {{"n_trees", config.n_trees},
            {"max_depth", config.max_depth},
            {"feature_subsample", config.feature_subsample},
            {"bootstrap", config.bootstrap},
            {"seed", config.seed}}},
          {"dimension", dimension},
          {"trees", t}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  expect_schema(j, kForestSchema);
  try {
    ForestModel m;
    const auto& c = j.at("config");
    m.config.n_trees = c.at("n_trees").get<int>();
    m.config.max_depth = c.at("max_depth").get<int>();
    m.config.feature_subsample = c.at("feature_subsample").get<double>();
    m.config.bootstrap = c.at("bootstrap").get<bool>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.dimension = j.at("dimension").get<std::size_t>();
    for (const auto& t : j.at("trees")) {
      DecisionTree tree;
      const auto& feature = t.at("feature");
      for (std::size_t i = 0; i < feature.size(); ++i) {
        TreeNode n;
        n.feature = feature[i].get<int>();
        n.present = t.at("present")[i].get<int>();
        n.absent = t.at("absent")[i].get<int>();
        n.distribution = t.at("distribution")[i].get<ClassScores>();
        const auto in_range = [&](int child) {
          return child > static_cast<int>(i) &&
                 child < static_cast<int>(feature.size());
        };
        if (!n.leaf() && (static_cast<std::size_t>(n.feature) >= m.dimension ||
                          !in_range(n.present) || !in_range(n.absent))) {
          throw ValidationError("malformed tree node " + std::to_string(i));
        }
        tree.nodes.push_back(n);
      }
      if (tree.nodes.empty()) throw ValidationError("empty tree");
      m.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed forest model: ") + e.what());
  }
}

namespace {

using Counts = std::array<double, kNumCoarseLabels>;

double gini(const Counts& counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureVector> data,
              const std::vector<double>& multiplicity, const ForestConfig& config,
              util::Rng& rng)
      : data_(data), weight_(multiplicity), config_(config), rng_(rng) {}

  DecisionTree build(const std::vector<std::size_t>& samples) {
    grow(samples, 0);
    return std::move(tree_);
  }

 private:
  Counts counts_of(const std::vector<std::size_t>& samples) const {
    Counts counts{};
    for (std::size_t i : samples) counts[class_index(data_[i].label)] += weight_[i];
    return counts;
  }

  int grow(const std::vector<std::size_t>& samples, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const Counts counts = counts_of(samples);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    for (std::size_t c = 0; c < kNumCoarseLabels; ++c) {
      tree_.nodes[static_cast<std::size_t>(id)].distribution[c] = counts[c] / total;
    }
    const bool pure = std::count_if(counts.begin(), counts.end(),
                                    [](double c) { return c > 0; }) <= 1;
    if (pure || depth >= config_.max_depth || samples.size() < 2) return id;

    std::vector<int> active;
    for (std::size_t i : samples) {
      active.insert(active.end(), data_[i].indices.begin(), data_[i].indices.end());
    }
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    if (active.empty()) return id;

    const std::size_t m = active.size();
    std::size_t k = config_.feature_subsample <= 0.0
                        ? static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(m))))
                        : static_cast<std::size_t>(std::ceil(config_.feature_subsample * static_cast<double>(m)));
    k = std::clamp<std::size_t>(k, 1, m);
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(active[i], active[i + util::uniform_index(rng_, m - i)]);
    }
    active.resize(k);
    std::sort(active.begin(), active.end());

    // Zero-gain splits are allowed so interactions (XOR) can be found.
    const double parent = gini(counts);
    int best_feature = -1;
    double best_gain = -1.0;
    for (int f : active) {
      Counts present{};
      for (std::size_t i : samples) {
        if (data_[i].has(f)) present[class_index(data_[i].label)] += weight_[i];
      }
      Counts absent{};
      for (std::size_t c = 0; c < kNumCoarseLabels; ++c) absent[c] = counts[c] - present[c];
      const double wp = std::accumulate(present.begin(), present.end(), 0.0);
      const double wa = total - wp;
      if (wp <= 0.0 || wa <= 0.0) continue;
      const double gain = parent - (wp * gini(present) + wa * gini(absent)) / total;
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_feature = f;
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> with;
    std::vector<std::size_t> without;
    for (std::size_t i : samples) {
      (data_[i].has(best_feature) ? with : without).push_back(i);
    }
    const int present_child = grow(with, depth + 1);
    const int absent_child = grow(without, depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.present = present_child;
    node.absent = absent_child;
    return id;
  }

  std::span<const FeatureVector> data_;
  const std::vector<double>& weight_;
  const ForestConfig& config_;
  util::Rng& rng_;
  DecisionTree tree_;
};

DecisionTree train_tree(std::span<const FeatureVector> data,
                        const ForestConfig& config, std::size_t tree_index) {
  util::Rng rng = util::stream(config.seed, tree_index);
  std::vector<double> multiplicity(data.size(), config.bootstrap ? 0.0 : 1.0);
  if (config.bootstrap) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      multiplicity[util::uniform_index(rng, data.size())] += 1.0;
    }
  }
  std::vector<std::size_t> samples;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (multiplicity[i] > 0) samples.push_back(i);
  }
  return TreeBuilder(data, multiplicity, config, rng).build(samples);
}

ForestModel forest_shell(std::span<const FeatureVector> data,
                         std::size_t dimension, const ForestConfig& config) {
  config.validate();
  check_training_input(data, dimension);
  ForestModel model;
  model.config = config;
  model.dimension = dimension;
  model.trees.resize(static_cast<std::size_t>(config.n_trees));
  return model;
}

}  // namespace

ForestModel train_forest(std::span<const FeatureVector> data,
                         std::size_t dimension, const ForestConfig& config) {
  ForestModel model = forest_shell(data, dimension, config);
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < config.n_trees; ++t) {
    model.trees[static_cast<std::size_t>(t)] =
        train_tree(data, config, static_cast<std::size_t>(t));
  }
  return model;
}

namespace reference {
ForestModel train_forest(std::span<const FeatureVector> data,
                         std::size_t dimension, const ForestConfig& config) {
  ForestModel model = forest_shell(data, dimension, config);
  for (int t = 0; t < config.n_trees; ++t) {
    model.trees[static_cast<std::size_t>(t)] =
        train_tree(data, config, static_cast<std::size_t>(t));
  }
  return model;
}
}  // namespace reference

}  // namespace precedence
