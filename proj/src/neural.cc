#include "precedence/neural.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include "precedence/errors.h"
#include "util.h"

namespace precedence {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Embedding table

EmbeddingTable::EmbeddingTable(int dim, std::uint64_t oov_seed)
    : dim_(dim), oov_seed_(oov_seed) {
  if (dim <= 0) throw ConfigError("embedding dimension must be > 0");
}

bool EmbeddingTable::add(const std::string& token, const VectorXd& vector) {
  if (vector.size() != dim_) {
    throw ValidationError("embedding for '" + token + "' has dimension " +
                          std::to_string(vector.size()) + ", expected " +
                          std::to_string(dim_));
  }
  if (!vector.allFinite()) {
    throw ValidationError("embedding for '" + token + "' is not finite");
  }
  if (index_.count(token)) {
    warnings_.push_back("duplicate token '" + token + "' ignored");
    return false;
  }
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
  rows_.push_back(vector);
  return true;
}

std::optional<int> EmbeddingTable::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VectorXd EmbeddingTable::lookup(std::string_view token) const {
  if (auto i = find(token)) return rows_[static_cast<std::size_t>(*i)];
  util::Rng rng = util::stream(oov_seed_, util::fnv1a(token));
  std::normal_distribution<double> normal(0.0, 0.1);
  VectorXd v(dim_);
  for (int k = 0; k < dim_; ++k) v[k] = normal(rng);
  return v;
}

EmbeddingTable load_embeddings(std::istream& in, std::uint64_t oov_seed) {
  std::string line;
  std::size_t line_number = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", line_number);
  const auto header = util::split_whitespace(line);
  long count = 0;
  int dim = 0;
  try {
    if (header.size() != 2) throw std::invalid_argument("arity");
    count = std::stol(std::string(header[0]));
    dim = std::stoi(std::string(header[1]));
  } catch (const std::exception&) {
    throw ParseError("header must be 'count dim'", line_number);
  }
  if (count < 0 || dim <= 0) throw ParseError("invalid header values", line_number);

  EmbeddingTable table(dim, oov_seed);
  long rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = util::split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw ParseError("expected " + std::to_string(dim + 1) + " fields, found " +
                           std::to_string(fields.size()),
                       line_number);
    }
    VectorXd v(dim);
    for (int k = 0; k < dim; ++k) {
      const std::string field(fields[static_cast<std::size_t>(k) + 1]);
      std::size_t used = 0;
      try {
        v[k] = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size() || !std::isfinite(v[k])) {
        throw ParseError("non-numeric value '" + field + "'", line_number);
      }
    }
    table.add(std::string(fields[0]), v);
    ++rows;
  }
  if (rows != count) {
    throw ParseError("header declares " + std::to_string(count) + " rows, found " +
                     std::to_string(rows));
  }
  return table;
}

EmbeddingTable load_embeddings_file(const std::string& path,
                                    std::uint64_t oov_seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings file " + path);
  return load_embeddings(in, oov_seed);
}

// ---------------------------------------------------------------------------
// Configuration and network

std::string_view to_string(Architecture architecture) {
  return architecture == Architecture::Basic ? "basic" : "pitchfork";
}

Architecture parse_architecture(std::string_view text) {
  if (util::iequals(text, "basic")) return Architecture::Basic;
  if (util::iequals(text, "pitchfork")) return Architecture::Pitchfork;
  throw ConfigError("unknown architecture '" + std::string(text) + "'");
}

void NetConfig::validate() const {
  if (hidden < 1) throw ConfigError("hidden size must be >= 1");
  if (embedding_dim < 1) throw ConfigError("embedding dimension must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (output_dim != static_cast<int>(kNumCoarseLabels)) {
    throw ConfigError("output dimension must be 3");
  }
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(clip_norm > 0.0)) throw ConfigError("clip norm must be > 0");
  if (max_length < 1) throw ConfigError("max_length must be >= 1");
}

std::vector<std::string> build_vocabulary(std::span<const NetExample> examples) {
  std::vector<std::string> tokens;
  for (const NetExample& ex : examples) {
    for (const auto* seq : {&ex.input.e1, &ex.input.span, &ex.input.e2}) {
      for (const std::string& t : *seq) tokens.push_back(util::lowercase(t));
    }
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  tokens.erase(std::remove(tokens.begin(), tokens.end(), std::string(kUnknownToken)),
               tokens.end());
  tokens.insert(tokens.begin(), std::string(kUnknownToken));
  return tokens;
}

void Network::index_vocabulary() {
  rows_.clear();
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    rows_.emplace(vocabulary[i], static_cast<int>(i));
  }
}

Network Network::initialize(const NetConfig& config,
                            std::vector<std::string> vocabulary,
                            const EmbeddingTable* pretrained) {
  config.validate();
  if (vocabulary.empty() || vocabulary.front() != kUnknownToken) {
    vocabulary.insert(vocabulary.begin(), std::string(kUnknownToken));
  }
  const EmbeddingTable* table = config.pretrained ? pretrained : nullptr;
  if (config.pretrained && table == nullptr) {
    throw ConfigError("pretrained initialization requested without embeddings");
  }
  if (table != nullptr && table->dim() != config.embedding_dim) {
    throw ConfigError("embedding dimension " + std::to_string(table->dim()) +
                      " does not match configured " +
                      std::to_string(config.embedding_dim));
  }

  Network net;
  net.config = config;
  net.vocabulary = std::move(vocabulary);
  net.index_vocabulary();
  const int h = config.hidden;
  const int d = config.embedding_dim;
  const int v = static_cast<int>(net.vocabulary.size());
  const int n_branches = config.architecture == Architecture::Basic ? 1 : 3;
  for (int k = 0; k < n_branches; ++k) {
    util::Rng rng = util::stream(config.seed, 100 + static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal(0.0, 0.1);
    const double a = 1.0 / std::sqrt(static_cast<double>(h));
    std::uniform_real_distribution<double> uniform(-a, a);
    Branch b;
    b.embeddings.resize(v, d);
    for (int r = 0; r < v; ++r) {
      if (table != nullptr) {
        b.embeddings.row(r) = table->lookup(net.vocabulary[static_cast<std::size_t>(r)]).transpose();
      } else {
        for (int c = 0; c < d; ++c) b.embeddings(r, c) = normal(rng);
      }
    }
    b.lstm.w.resize(4 * h, d + h);
    for (int r = 0; r < 4 * h; ++r) {
      for (int c = 0; c < d + h; ++c) b.lstm.w(r, c) = uniform(rng);
    }
    b.lstm.b = VectorXd::Zero(4 * h);
    b.lstm.b.segment(h, h).setOnes();  // forget gate
    net.branches.push_back(std::move(b));
  }
  util::Rng rng = util::stream(config.seed, 200);
  const double a = 1.0 / std::sqrt(static_cast<double>(n_branches * h));
  std::uniform_real_distribution<double> uniform(-a, a);
  net.dense_w.resize(config.output_dim, n_branches * h);
  for (int r = 0; r < net.dense_w.rows(); ++r) {
    for (int c = 0; c < net.dense_w.cols(); ++c) net.dense_w(r, c) = uniform(rng);
  }
  net.dense_b = VectorXd::Zero(config.output_dim);
  return net;
}

int Network::row_of(std::string_view token) const {
  const auto it = rows_.find(util::lowercase(token));
  return it == rows_.end() ? 0 : it->second;
}

std::vector<int> Network::encode(std::span<const std::string> tokens) const {
  std::vector<int> rows;
  const std::size_t n =
      std::min(tokens.size(), static_cast<std::size_t>(config.max_length));
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(row_of(tokens[i]));
  return rows;
}

std::size_t Network::parameter_count() const {
  std::size_t n = static_cast<std::size_t>(dense_w.size() + dense_b.size());
  for (const Branch& b : branches) {
    n += static_cast<std::size_t>(b.embeddings.size() + b.lstm.w.size() +
                                  b.lstm.b.size());
  }
  return n;
}

namespace {

nlohmann::json matrix_to_json(const MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("shape").at(0).get<Eigen::Index>();
  const auto cols = j.at("shape").at(1).get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ValidationError("parameter array does not match its declared shape");
  }
  MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  if (!m.allFinite()) throw ValidationError("non-finite network parameter");
  return m;
}

constexpr std::string_view kNetworkSchema = "precedence.lstm/1";

}  // namespace

nlohmann::json Network::to_json() const {
  nlohmann::json bs = nlohmann::json::array();
  for (const Branch& b : branches) {
    bs.push_back({{"embeddings", matrix_to_json(b.embeddings)},
                  {"lstm_w", matrix_to_json(b.lstm.w)},
                  {"lstm_b", matrix_to_json(b.lstm.b)}});
  }
  return {{"schema", kNetworkSchema},
          {"config",
           {{"architecture", to_string(config.architecture)},
            {"pretrained", config.pretrained},
            {"hidden", config.hidden},
            {"embedding_dim", config.embedding_dim},
            {"dropout", config.dropout},
            {"output_dim", config.output_dim},
            {"max_epochs", config.max_epochs},
            {"batch_size", config.batch_size},
            {"patience", config.patience},
            {"learning_rate", config.learning_rate},
            {"clip_norm", config.clip_norm},
            {"max_length", config.max_length},
            {"seed", config.seed}}},
          {"vocabulary", vocabulary},
          {"branches", bs},
          {"dense_w", matrix_to_json(dense_w)},
          {"dense_b", matrix_to_json(dense_b)}};
}

Network Network::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", std::string()) != kNetworkSchema) {
    throw ValidationError("expected a model with schema " + std::string(kNetworkSchema));
  }
  try {
    Network net;
    const auto& c = j.at("config");
    net.config.architecture = parse_architecture(c.at("architecture").get<std::string>());
    net.config.pretrained = c.at("pretrained").get<bool>();
    net.config.hidden = c.at("hidden").get<int>();
    net.config.embedding_dim = c.at("embedding_dim").get<int>();
    net.config.dropout = c.at("dropout").get<double>();
    net.config.output_dim = c.at("output_dim").get<int>();
    net.config.max_epochs = c.at("max_epochs").get<int>();
    net.config.batch_size = c.at("batch_size").get<int>();
    net.config.patience = c.at("patience").get<int>();
    net.config.learning_rate = c.at("learning_rate").get<double>();
    net.config.clip_norm = c.at("clip_norm").get<double>();
    net.config.max_length = c.at("max_length").get<int>();
    net.config.seed = c.at("seed").get<std::uint64_t>();
    net.config.validate();
    net.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    net.index_vocabulary();
    const int h = net.config.hidden;
    const int d = net.config.embedding_dim;
    const auto v = static_cast<Eigen::Index>(net.vocabulary.size());
    for (const auto& bj : j.at("branches")) {
      Branch b;
      b.embeddings = matrix_from_json(bj.at("embeddings"));
      b.lstm.w = matrix_from_json(bj.at("lstm_w"));
      b.lstm.b = matrix_from_json(bj.at("lstm_b"));
      if (b.embeddings.rows() != v || b.embeddings.cols() != d ||
          b.lstm.w.rows() != 4 * h || b.lstm.w.cols() != d + h ||
          b.lstm.b.size() != 4 * h) {
        throw ValidationError("branch parameter shapes do not match the config");
      }
      net.branches.push_back(std::move(b));
    }
    const std::size_t expected =
        net.config.architecture == Architecture::Basic ? 1 : 3;
    if (net.branches.size() != expected) throw ValidationError("wrong branch count");
    net.dense_w = matrix_from_json(j.at("dense_w"));
    net.dense_b = matrix_from_json(j.at("dense_b"));
    if (net.dense_w.rows() != net.config.output_dim ||
        net.dense_w.cols() != static_cast<Eigen::Index>(expected) * h ||
        net.dense_b.size() != net.config.output_dim) {
      throw ValidationError("dense parameter shapes do not match the config");
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed network: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Forward and backward passes

Eigen::VectorXd dropout_mask(int size, double rate, std::uint64_t seed) {
  VectorXd mask = VectorXd::Ones(size);
  if (rate <= 0.0) return mask;
  util::Rng rng(seed);
  const double keep = 1.0 / (1.0 - rate);
  for (int k = 0; k < size; ++k) mask[k] = util::uniform_unit(rng) < rate ? 0.0 : keep;
  return mask;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LstmStep {
  VectorXd input;  // [x; h_prev]
  VectorXd i, f, o, g, c, c_prev, tanh_c;
};

struct BranchState {
  std::vector<int> rows;
  std::vector<LstmStep> steps;
  VectorXd h;
  VectorXd mask;
};

struct ForwardState {
  std::vector<BranchState> branches;
  VectorXd concat;      // masked branch outputs, concatenated
  VectorXd merge_mask;  // pitchfork only
  VectorXd merged;
  VectorXd probabilities;
};

BranchState run_branch(const Branch& branch, std::vector<int> rows) {
  const int h = branch.lstm.hidden();
  const int d = static_cast<int>(branch.embeddings.cols());
  BranchState s;
  s.rows = std::move(rows);
  VectorXd h_prev = VectorXd::Zero(h);
  VectorXd c_prev = VectorXd::Zero(h);
  for (int row : s.rows) {
    LstmStep step;
    step.input.resize(d + h);
    step.input.head(d) = branch.embeddings.row(row).transpose();
    step.input.tail(h) = h_prev;
    const VectorXd z = branch.lstm.w * step.input + branch.lstm.b;
    step.i = z.segment(0, h).unaryExpr(&sigmoid);
    step.f = z.segment(h, h).unaryExpr(&sigmoid);
    step.o = z.segment(2 * h, h).unaryExpr(&sigmoid);
    step.g = z.segment(3 * h, h).array().tanh().matrix();
    step.c_prev = c_prev;
    step.c = step.f.cwiseProduct(c_prev) + step.i.cwiseProduct(step.g);
    step.tanh_c = step.c.array().tanh().matrix();
    h_prev = step.o.cwiseProduct(step.tanh_c);
    c_prev = step.c;
    s.steps.push_back(std::move(step));
  }
  s.h = h_prev;
  return s;
}

VectorXd softmax(const VectorXd& logits) {
  const VectorXd shifted = logits.array() - logits.maxCoeff();
  const VectorXd e = shifted.array().exp();
  return e / e.sum();
}

std::vector<std::span<const std::string>> branch_inputs(const Network& net,
                                                        const NetInput& input) {
  if (net.config.architecture == Architecture::Basic) return {input.span};
  return {input.e1, input.span, input.e2};
}

ForwardState run_forward(const Network& net,
                         const std::vector<std::span<const std::string>>& inputs,
                         bool train, std::uint64_t seed) {
  if (inputs.size() != net.branches.size()) {
    throw UsageError("input count does not match the network architecture");
  }
  static const char* kNames[] = {"E1", "span", "E2"};
  ForwardState state;
  const int h = net.config.hidden;
  const bool basic = net.branches.size() == 1;
  state.concat.resize(static_cast<Eigen::Index>(net.branches.size()) * h);
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    if (inputs[k].empty()) {
      throw ValidationError(std::string(basic ? "span" : kNames[k]) +
                            " token sequence is empty");
    }
    BranchState s = run_branch(net.branches[k], net.encode(inputs[k]));
    s.mask = train ? dropout_mask(h, net.config.dropout, util::mix_seed(seed, k))
                   : VectorXd::Ones(h);
    state.concat.segment(static_cast<Eigen::Index>(k) * h, h) = s.mask.cwiseProduct(s.h);
    state.branches.push_back(std::move(s));
  }
  if (basic) {
    state.merged = state.concat;
  } else {
    const auto n = static_cast<int>(state.concat.size());
    state.merge_mask = train ? dropout_mask(n, net.config.dropout, util::mix_seed(seed, 3))
                             : VectorXd::Ones(n);
    state.merged = state.merge_mask.cwiseProduct(state.concat);
  }
  state.probabilities = softmax(net.dense_w * state.merged + net.dense_b);
  return state;
}

void fill_trace(const ForwardState& state, ForwardTrace* trace) {
  if (trace == nullptr) return;
  trace->branch_hidden.clear();
  for (const BranchState& s : state.branches) trace->branch_hidden.push_back(s.h);
  trace->merged = state.merged;
  trace->probabilities = state.probabilities;
}

double cross_entropy(const VectorXd& p, CoarseLabel label) {
  return -std::log(std::max(p[static_cast<Eigen::Index>(class_index(label))],
                            std::numeric_limits<double>::min()));
}

void backprop_branch(const Branch& branch, const BranchState& s, VectorXd dh,
                     BranchGradients& grads, const BackpropOptions& options) {
  const int h = branch.lstm.hidden();
  const int d = static_cast<int>(branch.embeddings.cols());
  VectorXd dc = VectorXd::Zero(h);
  VectorXd dz(4 * h);
  for (std::size_t t = s.steps.size(); t-- > 0;) {
    const LstmStep& st = s.steps[t];
    const VectorXd d_o = dh.cwiseProduct(st.tanh_c);
    dc += dh.cwiseProduct(st.o).cwiseProduct(
        (1.0 - st.tanh_c.array().square()).matrix());
    const VectorXd d_i = dc.cwiseProduct(st.g);
    const VectorXd d_g = dc.cwiseProduct(st.i);
    const VectorXd d_f = dc.cwiseProduct(st.c_prev);
    dz.segment(0, h) = d_i.cwiseProduct((st.i.array() * (1.0 - st.i.array())).matrix());
    dz.segment(h, h) = d_f.cwiseProduct((st.f.array() * (1.0 - st.f.array())).matrix());
    if (options.corrupt_forget_gate) dz.segment(h, h) *= 1.5;
    dz.segment(2 * h, h) = d_o.cwiseProduct((st.o.array() * (1.0 - st.o.array())).matrix());
    dz.segment(3 * h, h) = d_g.cwiseProduct((1.0 - st.g.array().square()).matrix());
    grads.w.noalias() += dz * st.input.transpose();
    grads.b += dz;
    const VectorXd d_input = branch.lstm.w.transpose() * dz;
    auto [it, inserted] = grads.embeddings.try_emplace(s.rows[t], VectorXd::Zero(d));
    it->second += d_input.head(d);
    dh = d_input.tail(h);
    dc = dc.cwiseProduct(st.f).eval();
  }
}

}  // namespace

Eigen::VectorXd forward_basic(const Network& net,
                              std::span<const std::string> tokens, bool train,
                              std::uint64_t dropout_seed, ForwardTrace* trace) {
  if (net.config.architecture != Architecture::Basic) {
    throw UsageError("forward_basic called on a pitchfork network");
  }
  const ForwardState s = run_forward(net, {tokens}, train, dropout_seed);
  fill_trace(s, trace);
  return s.probabilities;
}

Eigen::VectorXd forward_pitchfork(const Network& net,
                                  std::span<const std::string> e1,
                                  std::span<const std::string> span,
                                  std::span<const std::string> e2, bool train,
                                  std::uint64_t dropout_seed,
                                  ForwardTrace* trace) {
  if (net.config.architecture != Architecture::Pitchfork) {
    throw UsageError("forward_pitchfork called on a basic network");
  }
  const ForwardState s = run_forward(net, {e1, span, e2}, train, dropout_seed);
  fill_trace(s, trace);
  return s.probabilities;
}

Eigen::VectorXd forward(const Network& net, const NetInput& input, bool train,
                        std::uint64_t dropout_seed, ForwardTrace* trace) {
  const ForwardState s =
      run_forward(net, branch_inputs(net, input), train, dropout_seed);
  fill_trace(s, trace);
  return s.probabilities;
}

CoarseLabel predict(const Network& net, const NetInput& input) {
  const VectorXd p = forward(net, input, false);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return kCoarseLabels[static_cast<std::size_t>(best)];
}

NetGradients NetGradients::zeros_like(const Network& net) {
  NetGradients g;
  for (const Branch& b : net.branches) {
    BranchGradients bg;
    bg.w = MatrixXd::Zero(b.lstm.w.rows(), b.lstm.w.cols());
    bg.b = VectorXd::Zero(b.lstm.b.size());
    g.branches.push_back(std::move(bg));
  }
  g.dense_w = MatrixXd::Zero(net.dense_w.rows(), net.dense_w.cols());
  g.dense_b = VectorXd::Zero(net.dense_b.size());
  return g;
}

void NetGradients::add(const NetGradients& other) {
  loss += other.loss;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    BranchGradients& mine = branches[k];
    const BranchGradients& theirs = other.branches[k];
    for (const auto& [row, v] : theirs.embeddings) {
      auto [it, inserted] = mine.embeddings.try_emplace(row, v);
      if (!inserted) it->second += v;
    }
    mine.w += theirs.w;
    mine.b += theirs.b;
  }
  dense_w += other.dense_w;
  dense_b += other.dense_b;
}

void NetGradients::scale(double factor) {
  loss *= factor;
  for (BranchGradients& b : branches) {
    for (auto& [row, v] : b.embeddings) v *= factor;
    b.w *= factor;
    b.b *= factor;
  }
  dense_w *= factor;
  dense_b *= factor;
}

double NetGradients::norm() const {
  double sq = dense_w.squaredNorm() + dense_b.squaredNorm();
  for (const BranchGradients& b : branches) {
    for (const auto& [row, v] : b.embeddings) sq += v.squaredNorm();
    sq += b.w.squaredNorm() + b.b.squaredNorm();
  }
  return std::sqrt(sq);
}

NetGradients backprop(const Network& net, const NetExample& example, bool train,
                      std::uint64_t dropout_seed, const BackpropOptions& options) {
  const ForwardState s =
      run_forward(net, branch_inputs(net, example.input), train, dropout_seed);
  NetGradients g = NetGradients::zeros_like(net);
  g.loss = cross_entropy(s.probabilities, example.label);

  VectorXd dlogits = s.probabilities;
  dlogits[static_cast<Eigen::Index>(class_index(example.label))] -= 1.0;
  g.dense_w = dlogits * s.merged.transpose();
  g.dense_b = dlogits;
  VectorXd dconcat = net.dense_w.transpose() * dlogits;
  if (net.branches.size() > 1) dconcat = dconcat.cwiseProduct(s.merge_mask);
  const int h = net.config.hidden;
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const BranchState& bs = s.branches[k];
    const VectorXd dh =
        dconcat.segment(static_cast<Eigen::Index>(k) * h, h).cwiseProduct(bs.mask);
    backprop_branch(net.branches[k], bs, dh, g.branches[k], options);
  }
  return g;
}

double example_loss(const Network& net, const NetExample& example, bool train,
                    std::uint64_t dropout_seed) {
  const ForwardState s =
      run_forward(net, branch_inputs(net, example.input), train, dropout_seed);
  return cross_entropy(s.probabilities, example.label);
}

NetGradients batch_gradient(const Network& net,
                            std::span<const NetExample> examples,
                            std::span<const std::size_t> batch,
                            std::uint64_t seed) {
  std::vector<NetGradients> parts(batch.size());
  std::exception_ptr failure;
  const auto n = static_cast<long>(batch.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < n; ++k) {
    try {
      const auto i = static_cast<std::size_t>(k);
      parts[i] = backprop(net, examples[batch[i]], true, util::mix_seed(seed, i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  NetGradients total = NetGradients::zeros_like(net);
  for (const NetGradients& p : parts) total.add(p);
  return total;
}

namespace reference {
NetGradients batch_gradient(const Network& net,
                            std::span<const NetExample> examples,
                            std::span<const std::size_t> batch,
                            std::uint64_t seed) {
  NetGradients total = NetGradients::zeros_like(net);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total.add(backprop(net, examples[batch[i]], true, util::mix_seed(seed, i)));
  }
  return total;
}
}  // namespace reference

void apply_gradients(Network& net, const NetGradients& gradients,
                     double learning_rate) {
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    Branch& b = net.branches[k];
    const BranchGradients& g = gradients.branches[k];
    for (const auto& [row, v] : g.embeddings) {
      b.embeddings.row(row) -= learning_rate * v.transpose();
    }
    b.lstm.w -= learning_rate * g.w;
    b.lstm.b -= learning_rate * g.b;
  }
  net.dense_w -= learning_rate * gradients.dense_w;
  net.dense_b -= learning_rate * gradients.dense_b;
}

double mean_loss(const Network& net, std::span<const NetExample> examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const NetExample& ex : examples) total += example_loss(net, ex, false);
  return total / static_cast<double>(examples.size());
}

TrainedNetwork train_net(std::span<const NetExample> train,
                         std::span<const NetExample> validation,
                         const NetConfig& config,
                         const EmbeddingTable* pretrained) {
  config.validate();
  if (train.empty()) throw ValidationError("training set is empty");
  TrainedNetwork result{Network::initialize(config, build_vocabulary(train), pretrained), {}};
  Network net = result.network;
  double best_loss = std::numeric_limits<double>::infinity();
  int wait = 0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    util::Rng rng = util::stream(config.seed, 1000 + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batch_number = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size, ++batch_number) {
      const std::span<const std::size_t> batch(
          order.data() + start, std::min(batch_size, order.size() - start));
      const std::uint64_t batch_seed = util::mix_seed(
          util::mix_seed(config.seed, 2000 + static_cast<std::uint64_t>(epoch)),
          batch_number);
      NetGradients g = batch_gradient(net, train, batch, batch_seed);
      if (!std::isfinite(g.loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_number));
      }
      total += g.loss;
      g.scale(1.0 / static_cast<double>(batch.size()));
      const double norm = g.norm();
      if (!std::isfinite(norm)) {
        throw NumericError("non-finite gradient at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_number));
      }
      if (norm > config.clip_norm) g.scale(config.clip_norm / norm);
      apply_gradients(net, g, config.learning_rate);
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = total / static_cast<double>(train.size());
    entry.validation_loss =
        validation.empty() ? mean_loss(net, train) : mean_loss(net, validation);
    if (!std::isfinite(entry.validation_loss)) {
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.log.epochs.push_back(entry);
    if (entry.validation_loss < best_loss) {
      best_loss = entry.validation_loss;
      result.network = net;
      result.log.best_epoch = epoch;
      wait = 0;
    } else if (++wait > config.patience) {
      result.log.early_stopped = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gradient check

GradientCheckReport gradient_check(const Network& net, const NetExample& example,
                                   double epsilon, bool train,
                                   std::uint64_t dropout_seed,
                                   const BackpropOptions& options) {
  constexpr double kFloor = 1e-6;
  Network probe = net;
  const NetGradients analytic = backprop(net, example, train, dropout_seed, options);
  GradientCheckReport report;

  const auto check = [&](GradientCheckGroup& group, double& param, double a) {
    const double saved = param;
    param = saved + epsilon;
    const double up = example_loss(probe, example, train, dropout_seed);
    param = saved - epsilon;
    const double down = example_loss(probe, example, train, dropout_seed);
    param = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double err =
        std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kFloor});
    group.max_relative_error = std::max(group.max_relative_error, err);
    ++group.parameters;
  };
  const auto finish = [&](GradientCheckGroup group) {
    report.max_relative_error = std::max(report.max_relative_error, group.max_relative_error);
    report.groups.push_back(std::move(group));
  };

  static const char* kGates[] = {"i", "f", "o", "g"};
  const int h = net.config.hidden;
  for (std::size_t k = 0; k < probe.branches.size(); ++k) {
    Branch& b = probe.branches[k];
    const BranchGradients& g = analytic.branches[k];
    const std::string prefix = "branch" + std::to_string(k) + ".";
    GradientCheckGroup emb{prefix + "embeddings"};
    for (int r = 0; r < b.embeddings.rows(); ++r) {
      const auto it = g.embeddings.find(r);
      for (int c = 0; c < b.embeddings.cols(); ++c) {
        check(emb, b.embeddings(r, c), it == g.embeddings.end() ? 0.0 : it->second[c]);
      }
    }
    finish(std::move(emb));
    for (int gate = 0; gate < 4; ++gate) {
      GradientCheckGroup w{prefix + "W_" + kGates[gate]};
      GradientCheckGroup bias{prefix + "b_" + kGates[gate]};
      for (int r = gate * h; r < (gate + 1) * h; ++r) {
        for (int c = 0; c < b.lstm.w.cols(); ++c) check(w, b.lstm.w(r, c), g.w(r, c));
        check(bias, b.lstm.b[r], g.b[r]);
      }
      finish(std::move(w));
      finish(std::move(bias));
    }
  }
  GradientCheckGroup dw{"dense.w"};
  for (int r = 0; r < probe.dense_w.rows(); ++r) {
    for (int c = 0; c < probe.dense_w.cols(); ++c) {
      check(dw, probe.dense_w(r, c), analytic.dense_w(r, c));
    }
  }
  finish(std::move(dw));
  GradientCheckGroup db{"dense.b"};
  for (int r = 0; r < probe.dense_b.size(); ++r) {
    check(db, probe.dense_b[r], analytic.dense_b[r]);
  }
  finish(std::move(db));
  return report;
}

}  // namespace precedence
