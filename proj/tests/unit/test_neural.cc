#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "precedence/errors.h"
#include "precedence/neural.h"
#include "testing.h"

namespace precedence {
namespace {

using L = CoarseLabel;
using testing::Rng;
using testing::uniform_int;

NetConfig small_config(Architecture a) {
  NetConfig c;
  c.architecture = a;
  c.hidden = 4;
  c.embedding_dim = 5;
  c.dropout = 0.3;
  c.seed = 9;
  return c;
}

std::vector<std::string> words(Rng& rng, int n) {
  static const std::vector<std::string> pool = {"alpha", "beta",  "gamma", "delta",
                                                "eps",   "zeta",  "eta",   "theta"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(pool[static_cast<std::size_t>(uniform_int(rng, 0, 7))]);
  }
  return out;
}

NetExample random_example(Rng& rng) {
  NetExample ex;
  ex.input.e1 = words(rng, uniform_int(rng, 1, 3));
  ex.input.span = words(rng, uniform_int(rng, 2, 6));
  ex.input.e2 = words(rng, uniform_int(rng, 1, 3));
  ex.label = testing::random_coarse(rng);
  return ex;
}

std::vector<NetExample> random_examples(Rng& rng, int n) {
  std::vector<NetExample> out;
  for (int i = 0; i < n; ++i) out.push_back(random_example(rng));
  return out;
}

void expect_same(const NetGradients& a, const NetGradients& b) {
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.dense_w, b.dense_w);
  EXPECT_EQ(a.dense_b, b.dense_b);
  ASSERT_EQ(a.branches.size(), b.branches.size());
  for (std::size_t k = 0; k < a.branches.size(); ++k) {
    EXPECT_EQ(a.branches[k].w, b.branches[k].w);
    EXPECT_EQ(a.branches[k].b, b.branches[k].b);
    ASSERT_EQ(a.branches[k].embeddings.size(), b.branches[k].embeddings.size());
    for (const auto& [row, v] : a.branches[k].embeddings) {
      ASSERT_TRUE(b.branches[k].embeddings.count(row));
      EXPECT_EQ(v, b.branches[k].embeddings.at(row));
    }
  }
}

class Architectures : public ::testing::TestWithParam<Architecture> {};

TEST_P(Architectures, GradientsMatchCentralDifferences) {
  Rng rng(31);
  const auto examples = random_examples(rng, 6);
  const Network net =
      Network::initialize(small_config(GetParam()), build_vocabulary(examples));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const bool train = i % 2 == 1;
    const GradientCheckReport r = gradient_check(net, examples[i], 1e-5, train, 40 + i);
    EXPECT_LT(r.max_relative_error, 1e-4) << "example " << i;
    std::size_t checked = 0;
    for (const auto& g : r.groups) checked += g.parameters;
    EXPECT_GT(checked, 0u);
  }
}

TEST_P(Architectures, CheckerDetectsCorruptedForgetGate) {
  Rng rng(32);
  const auto examples = random_examples(rng, 3);
  const Network net =
      Network::initialize(small_config(GetParam()), build_vocabulary(examples));
  BackpropOptions broken;
  broken.corrupt_forget_gate = true;
  double worst = 0.0;
  for (const NetExample& ex : examples) {
    worst = std::max(worst, gradient_check(net, ex, 1e-5, false, 0, broken).max_relative_error);
  }
  EXPECT_GT(worst, 1e-2);
}

TEST_P(Architectures, BatchGradientMatchesReference) {
  Rng rng(33);
  const auto examples = random_examples(rng, 20);
  const Network net =
      Network::initialize(small_config(GetParam()), build_vocabulary(examples));
  const std::vector<std::size_t> batch = {3, 0, 7, 7, 12, 19, 5};
  expect_same(batch_gradient(net, examples, batch, 77),
              reference::batch_gradient(net, examples, batch, 77));
}

TEST_P(Architectures, JsonRoundTripPreservesOutputs) {
  Rng rng(34);
  const auto examples = random_examples(rng, 5);
  const Network net =
      Network::initialize(small_config(GetParam()), build_vocabulary(examples));
  const Network back = Network::from_json(net.to_json());
  EXPECT_EQ(back.parameter_count(), net.parameter_count());
  for (const NetExample& ex : examples) {
    EXPECT_EQ(forward(back, ex.input, false), forward(net, ex.input, false));
  }
  nlohmann::json broken = net.to_json();
  broken["schema"] = "other";
  EXPECT_THROW(Network::from_json(broken), ValidationError);
}

TEST_P(Architectures, OutputsAreDistributions) {
  Rng rng(35);
  const auto examples = random_examples(rng, 10);
  const Network net =
      Network::initialize(small_config(GetParam()), build_vocabulary(examples));
  for (const NetExample& ex : examples) {
    const Eigen::VectorXd p = forward(net, ex.input, true, 3);
    ASSERT_EQ(p.size(), 3);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(All, Architectures,
                         ::testing::Values(Architecture::Basic, Architecture::Pitchfork));

TEST(Pitchfork, BranchesSeeOnlyTheirOwnSequence) {
  Rng rng(36);
  const auto examples = random_examples(rng, 4);
  const Network net = Network::initialize(small_config(Architecture::Pitchfork),
                                          build_vocabulary(examples));
  NetInput a = examples[0].input;
  NetInput b = a;
  b.span = {"zeta", "zeta", "eta"};
  b.e2 = {"theta"};
  ForwardTrace ta;
  ForwardTrace tb;
  forward(net, a, false, 0, &ta);
  forward(net, b, false, 0, &tb);
  ASSERT_EQ(ta.branch_hidden.size(), 3u);
  EXPECT_EQ(ta.branch_hidden[0], tb.branch_hidden[0]);
  EXPECT_NE(ta.branch_hidden[2], tb.branch_hidden[2]);

  NetExample ex;
  ex.input.e1 = {"alpha"};
  ex.input.span = {"beta", "gamma"};
  ex.input.e2 = {"delta"};
  const NetGradients g = backprop(net, ex, false);
  const auto rows = [&](int k) {
    std::set<int> out;
    for (const auto& [row, v] : g.branches[static_cast<std::size_t>(k)].embeddings) {
      out.insert(row);
    }
    return out;
  };
  EXPECT_EQ(rows(0), (std::set<int>{net.row_of("alpha")}));
  EXPECT_EQ(rows(1), (std::set<int>{net.row_of("beta"), net.row_of("gamma")}));
  EXPECT_EQ(rows(2), (std::set<int>{net.row_of("delta")}));
}

TEST(Network, EncodeLowercasesAndTruncates) {
  NetConfig c = small_config(Architecture::Basic);
  c.max_length = 3;
  std::vector<NetExample> ex(1);
  ex[0].input.span = {"Alpha", "beta"};
  const Network net = Network::initialize(c, build_vocabulary(ex));
  EXPECT_EQ(net.vocabulary.front(), kUnknownToken);
  const std::vector<std::string> tokens = {"ALPHA", "unseen", "beta", "alpha"};
  const std::vector<int> rows = net.encode(tokens);
  EXPECT_EQ(rows, (std::vector<int>{net.row_of("alpha"), 0, net.row_of("beta")}));
  EXPECT_THROW(forward_basic(net, {}, false), ValidationError);
}

TEST(Network, ConfigValidation) {
  NetConfig c;
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetConfig{};
  c.hidden = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = NetConfig{};
  c.pretrained = true;
  EXPECT_THROW(Network::initialize(c, {"<unk>"}), ConfigError);
  const EmbeddingTable table(7);
  EXPECT_THROW(Network::initialize(c, {"<unk>"}, &table), ConfigError);
  EXPECT_THROW(parse_architecture("gru"), ConfigError);
  EXPECT_EQ(parse_architecture("Pitchfork"), Architecture::Pitchfork);
}

TEST(Dropout, ZeroFractionAndScale) {
  for (double rate : {0.1, 0.5, 0.8}) {
    const Eigen::VectorXd m = dropout_mask(10000, rate, 123);
    int zeros = 0;
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] == 0.0) {
        ++zeros;
      } else {
        ASSERT_DOUBLE_EQ(m[i], 1.0 / (1.0 - rate));
      }
    }
    EXPECT_NEAR(zeros / 10000.0, rate, 0.02) << "rate " << rate;
  }
  EXPECT_EQ(dropout_mask(50, 0.5, 1), dropout_mask(50, 0.5, 1));
  EXPECT_NE(dropout_mask(50, 0.5, 1), dropout_mask(50, 0.5, 2));
  EXPECT_EQ(dropout_mask(20, 0.0, 1), Eigen::VectorXd::Ones(20));
}

TEST(Embeddings, LoadsWord2VecText) {
  std::istringstream in("2 3\nras 0.1 0.2 0.3\nRaf -1 0 1e-2\n\n");
  const EmbeddingTable t = load_embeddings(in, 5);
  EXPECT_EQ(t.dim(), 3);
  EXPECT_EQ(t.size(), 2u);
  ASSERT_TRUE(t.find("Raf").has_value());
  EXPECT_DOUBLE_EQ(t.row(*t.find("Raf"))[2], 0.01);
  EXPECT_EQ(t.lookup("ras"), t.row(*t.find("ras")));
}

TEST(Embeddings, MalformedInputNamesTheLine) {
  const auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      load_embeddings(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 999;
  };
  EXPECT_EQ(line_of(""), 1u);
  EXPECT_EQ(line_of("two 3\n"), 1u);
  EXPECT_EQ(line_of("1 0\n"), 1u);
  EXPECT_EQ(line_of("2 2\na 1 2\nb 1\n"), 3u);
  EXPECT_EQ(line_of("1 2\na 1 x\n"), 2u);
  EXPECT_EQ(line_of("1 2\na 1 nan\n"), 2u);
  std::istringstream short_file("3 2\na 1 2\n");
  EXPECT_THROW(load_embeddings(short_file), ParseError);
  EXPECT_THROW(load_embeddings_file("/nonexistent/vectors.txt"), IoError);
}

TEST(Embeddings, DuplicatesWarnAndOovIsDeterministic) {
  std::istringstream in("2 2\na 1 2\na 3 4\n");
  const EmbeddingTable t = load_embeddings(in, 8);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.warnings().size(), 1u);
  EXPECT_DOUBLE_EQ(t.row(0)[0], 1.0);

  const EmbeddingTable u(2, 8);
  EXPECT_EQ(t.lookup("zzz"), u.lookup("zzz"));
  EXPECT_NE(t.lookup("zzz"), t.lookup("yyy"));
  EXPECT_NE(EmbeddingTable(2, 9).lookup("zzz"), t.lookup("zzz"));
}

TEST(Embeddings, PretrainedRowsCopiedIntoNetwork) {
  EmbeddingTable table(5, 3);
  Eigen::VectorXd v(5);
  v << 1, 2, 3, 4, 5;
  table.add("alpha", v);
  NetConfig c = small_config(Architecture::Basic);
  c.pretrained = true;
  const Network net = Network::initialize(c, {"<unk>", "alpha", "beta"}, &table);
  EXPECT_EQ(Eigen::VectorXd(net.branches[0].embeddings.row(net.row_of("alpha")).transpose()), v);
  EXPECT_EQ(Eigen::VectorXd(net.branches[0].embeddings.row(net.row_of("beta")).transpose()),
            table.lookup("beta"));
}

// Label is a function of the first span token only.
std::vector<NetExample> first_token_toy(Rng& rng, int n) {
  const std::vector<std::pair<std::string, L>> keys = {
      {"before", L::E1PrecedesE2}, {"after", L::E2PrecedesE1}, {"and", L::Nil}};
  std::vector<NetExample> out;
  for (int i = 0; i < n; ++i) {
    const auto& [token, label] = keys[static_cast<std::size_t>(i % 3)];
    NetExample ex;
    ex.input.span = {token};
    for (const std::string& w : words(rng, uniform_int(rng, 1, 3))) ex.input.span.push_back(w);
    ex.input.e1 = {ex.input.span.front()};
    ex.input.e2 = {ex.input.span.back()};
    ex.label = label;
    out.push_back(ex);
  }
  return out;
}

TEST(Training, SameSeedIsBitIdentical) {
  Rng rng(37);
  const auto train = random_examples(rng, 24);
  const auto dev = random_examples(rng, 6);
  NetConfig c = small_config(Architecture::Pitchfork);
  c.max_epochs = 4;
  c.batch_size = 5;
  const TrainedNetwork a = train_net(train, dev, c);
  const TrainedNetwork b = train_net(train, dev, c);
  EXPECT_EQ(a.network.to_json(), b.network.to_json());
  ASSERT_EQ(a.log.epochs.size(), b.log.epochs.size());
  for (std::size_t e = 0; e < a.log.epochs.size(); ++e) {
    EXPECT_EQ(a.log.epochs[e].train_loss, b.log.epochs[e].train_loss);
  }
  c.seed = 10;
  EXPECT_NE(train_net(train, dev, c).network.to_json(), a.network.to_json());
}

TEST(Training, LearnsFirstTokenToy) {
  Rng rng(38);
  const auto train = first_token_toy(rng, 60);
  const auto test = first_token_toy(rng, 30);
  for (Architecture arch : {Architecture::Basic, Architecture::Pitchfork}) {
    NetConfig c = small_config(arch);
    c.hidden = 8;
    c.embedding_dim = 8;
    c.dropout = 0.0;
    c.learning_rate = 0.5;
    c.max_epochs = 60;
    c.batch_size = 6;
    c.patience = 60;
    const TrainedNetwork t = train_net(train, {}, c);
    int right = 0;
    for (const NetExample& ex : test) right += predict(t.network, ex.input) == ex.label;
    EXPECT_EQ(right, static_cast<int>(test.size())) << to_string(arch);
    EXPECT_GE(t.log.best_epoch, 0);
  }
}

TEST(Training, EarlyStoppingKeepsBestEpoch) {
  Rng rng(39);
  const auto train = random_examples(rng, 20);
  const auto dev = random_examples(rng, 10);
  NetConfig c = small_config(Architecture::Basic);
  c.max_epochs = 50;
  c.patience = 1;
  c.learning_rate = 1.0;
  const TrainedNetwork t = train_net(train, dev, c);
  ASSERT_GE(t.log.best_epoch, 0);
  double best = std::numeric_limits<double>::infinity();
  for (const EpochLog& e : t.log.epochs) best = std::min(best, e.validation_loss);
  EXPECT_DOUBLE_EQ(t.log.epochs[static_cast<std::size_t>(t.log.best_epoch)].validation_loss, best);
  EXPECT_NEAR(mean_loss(t.network, dev), best, 1e-12);
  if (t.log.early_stopped) {
    EXPECT_LT(t.log.epochs.size(), 50u);
  }
  EXPECT_THROW(train_net({}, dev, c), ValidationError);
}

}  // namespace
}  // namespace precedence
