#ifndef PRECEDENCE_NEURAL_H_
#define PRECEDENCE_NEURAL_H_

// LSTM pair classifiers: a single recurrent encoder over the encompassing
// span ("basic") and a three-branch encoder over E1, the span and E2
// ("pitchfork"), trained with full backpropagation through time and SGD.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"

namespace precedence {

// Pre-trained vectors in word2vec text format.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(int dim, std::uint64_t oov_seed = 0);

  int dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Returns false (and records a warning) if `token` is already present.
  bool add(const std::string& token, const Eigen::VectorXd& vector);
  std::optional<int> find(std::string_view token) const;
  const Eigen::VectorXd& row(int index) const { return rows_[static_cast<std::size_t>(index)]; }
  // Stored vector, or a deterministic pseudo-random one for unseen tokens.
  Eigen::VectorXd lookup(std::string_view token) const;

 private:
  int dim_ = 0;
  std::uint64_t oov_seed_ = 0;
  std::vector<std::string> tokens_;
  std::vector<Eigen::VectorXd> rows_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> warnings_;
};

// Header "count dim", then "token v1 ... vd". Throws ParseError naming the
// offending line.
EmbeddingTable load_embeddings(std::istream& in, std::uint64_t oov_seed = 0);
EmbeddingTable load_embeddings_file(const std::string& path,
                                    std::uint64_t oov_seed = 0);

enum class Architecture { Basic, Pitchfork };
std::string_view to_string(Architecture architecture);
Architecture parse_architecture(std::string_view text);

struct NetConfig {
  Architecture architecture = Architecture::Basic;
  bool pretrained = false;
  int hidden = 64;
  int embedding_dim = 200;
  double dropout = 0.5;
  int output_dim = static_cast<int>(kNumCoarseLabels);
  int max_epochs = 100;
  int batch_size = 32;
  int patience = 5;
  double learning_rate = 0.1;
  double clip_norm = 5.0;
  int max_length = 200;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

// Gate blocks of W and b are stacked in the order input, forget, output,
// candidate; W is 4h x (d + h) acting on [x; h_prev].
struct LstmParams {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;

  int hidden() const { return static_cast<int>(b.size() / 4); }
};

struct Branch {
  Eigen::MatrixXd embeddings;  // |V| x d
  LstmParams lstm;
};

// Token sequences for one pair. The basic architecture reads `span` only.
struct NetInput {
  std::vector<std::string> e1;
  std::vector<std::string> span;
  std::vector<std::string> e2;
};

struct NetExample {
  NetInput input;
  CoarseLabel label = CoarseLabel::Nil;
};

// Intermediate states of one forward pass.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> branch_hidden;  // final hidden state per branch
  Eigen::VectorXd merged;                      // dense-layer input
  Eigen::VectorXd probabilities;
};

class Network {
 public:
  NetConfig config;
  // Row 0 is the unknown-token row.
  std::vector<std::string> vocabulary;
  std::vector<Branch> branches;  // 1 (basic) or 3 (pitchfork: e1, span, e2)
  Eigen::MatrixXd dense_w;       // 3 x (branches * h)
  Eigen::VectorXd dense_b;

  // Random initialization under config.seed; with `pretrained`, rows of
  // tokens present in the table are copied from it.
  static Network initialize(const NetConfig& config,
                            std::vector<std::string> vocabulary,
                            const EmbeddingTable* pretrained = nullptr);

  // Lowercased row ids, tail truncated to config.max_length.
  std::vector<int> encode(std::span<const std::string> tokens) const;
  int row_of(std::string_view token) const;

  std::size_t parameter_count() const;
  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);

 private:
  std::unordered_map<std::string, int> rows_;
  void index_vocabulary();
};

// Sorted lowercased tokens of all inputs, preceded by the unknown token.
std::vector<std::string> build_vocabulary(std::span<const NetExample> examples);

inline constexpr std::string_view kUnknownToken = "<unk>";

// Probability 3-vector. Dropout (inverted) only when `train`, with masks
// drawn from `dropout_seed`. Throws ValidationError on empty sequences.
Eigen::VectorXd forward_basic(const Network& net,
                              std::span<const std::string> tokens, bool train,
                              std::uint64_t dropout_seed = 0,
                              ForwardTrace* trace = nullptr);
Eigen::VectorXd forward_pitchfork(const Network& net,
                                  std::span<const std::string> e1,
                                  std::span<const std::string> span,
                                  std::span<const std::string> e2, bool train,
                                  std::uint64_t dropout_seed = 0,
                                  ForwardTrace* trace = nullptr);
// Dispatches on the architecture.
Eigen::VectorXd forward(const Network& net, const NetInput& input, bool train,
                        std::uint64_t dropout_seed = 0,
                        ForwardTrace* trace = nullptr);
CoarseLabel predict(const Network& net, const NetInput& input);

// Inverted dropout mask: each unit is 0 with probability `rate`, else
// 1 / (1 - rate).
Eigen::VectorXd dropout_mask(int size, double rate, std::uint64_t seed);

struct BranchGradients {
  std::map<int, Eigen::VectorXd> embeddings;  // touched rows only
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

struct NetGradients {
  double loss = 0.0;
  std::vector<BranchGradients> branches;
  Eigen::MatrixXd dense_w;
  Eigen::VectorXd dense_b;

  static NetGradients zeros_like(const Network& net);
  void add(const NetGradients& other);
  void scale(double factor);
  double norm() const;
};

// Fault injection for verifying the gradient checker.
struct BackpropOptions {
  bool corrupt_forget_gate = false;
};

// Cross-entropy loss and its gradient for one example.
NetGradients backprop(const Network& net, const NetExample& example, bool train,
                      std::uint64_t dropout_seed = 0,
                      const BackpropOptions& options = {});
double example_loss(const Network& net, const NetExample& example, bool train,
                    std::uint64_t dropout_seed = 0);

// Summed gradients over `batch` (indices into `examples`); example k of the
// batch uses dropout seed mix(seed, k). Parallel over examples, reduced in
// batch order.
NetGradients batch_gradient(const Network& net,
                            std::span<const NetExample> examples,
                            std::span<const std::size_t> batch,
                            std::uint64_t seed);

namespace reference {
NetGradients batch_gradient(const Network& net,
                            std::span<const NetExample> examples,
                            std::span<const std::size_t> batch,
                            std::uint64_t seed);
}  // namespace reference

// net -= learning_rate * gradients.
void apply_gradients(Network& net, const NetGradients& gradients,
                     double learning_rate);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  int best_epoch = -1;
  bool early_stopped = false;
};

struct TrainedNetwork {
  Network network;
  TrainingLog log;
};

// Mini-batch SGD with global-norm clipping; keeps the parameters of the
// epoch with the lowest validation loss. An empty validation set monitors
// the training loss. Throws NumericError on a non-finite loss.
TrainedNetwork train_net(std::span<const NetExample> train,
                         std::span<const NetExample> validation,
                         const NetConfig& config,
                         const EmbeddingTable* pretrained = nullptr);

double mean_loss(const Network& net, std::span<const NetExample> examples);

struct GradientCheckGroup {
  std::string name;
  std::size_t parameters = 0;
  double max_relative_error = 0.0;
};

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::vector<GradientCheckGroup> groups;
};

// Analytic gradients against central differences on every parameter
// touched by `example`. Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradientCheckReport gradient_check(const Network& net, const NetExample& example,
                                   double epsilon = 1e-5, bool train = false,
                                   std::uint64_t dropout_seed = 0,
                                   const BackpropOptions& options = {});

}  // namespace precedence

#endif  // PRECEDENCE_NEURAL_H_
