// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if
// any criterion fails. The corpus tier runs only when
// PRECEDENCE_CORPUS_DIR names a directory with corpus.conllu,
// mentions.json and annotations.json.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cli.h"
#include "precedence/candidates.h"
#include "precedence/evaluation.h"
#include "precedence/features.h"
#include "precedence/linear.h"
#include "precedence/metrics.h"
#include "precedence/neural.h"
#include "precedence/pipeline.h"
#include "precedence/sieves.h"
#include "precedence/synthetic.h"
#include "testing.h"

namespace precedence {
namespace {

namespace fs = std::filesystem;
using L = CoarseLabel;
using testing::Rng;
using testing::uniform_int;
using testing::uniform_real;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first failed expectation of a criterion.
class Check {
 public:
  void expect(bool condition, const std::string& what) {
    if (!condition && outcome_.ok) {
      outcome_.ok = false;
      outcome_.detail = what;
    }
  }
  void note(const std::string& text) {
    if (outcome_.ok) outcome_.detail = text;
  }
  bool ok() const { return outcome_.ok; }
  Outcome outcome() const { return outcome_; }

 private:
  Outcome outcome_;
};

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome metric_oracle() {
  Check c;
  Rng rng(1001);
  for (int trial = 0; trial < 1000 && c.ok(); ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 50));
    const auto gold = testing::random_coarse_labels(rng, n);
    const auto pred = testing::random_coarse_labels(rng, n);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool gp = gold[i] != L::Nil;
      const bool pp = pred[i] != L::Nil;
      if (pp && pred[i] == gold[i]) {
        ++tp;
      } else {
        if (pp) ++fp;
        if (gp) ++fn;
      }
    }
    const double p = tp + fp == 0 ? (fn == 0 ? 1.0 : 0.0)
                                  : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double f = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
    const Prf got = micro_prf(pred, gold);
    c.expect(got.tp == tp && got.fp == fp && got.fn == fn,
             "count mismatch on fixture " + std::to_string(trial));
    c.expect(got.precision == p && got.recall == r && got.f1 == f,
             "score mismatch on fixture " + std::to_string(trial));
  }
  c.note("1000 fixtures");
  return c.outcome();
}

Outcome kappa_cases() {
  Check c;
  const std::vector<int> a = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<int> b = {1, 1, 1, 1, 1, 0, 0, 0, 0, 1};
  c.expect(std::abs(cohens_kappa(a, b) - 0.8) < 1e-12, "0.8 case gave " + fmt(cohens_kappa(a, b)));
  c.expect(std::abs(cohens_kappa(a, a) - 1.0) < 1e-12, "perfect agreement");
  const std::vector<int> x = {1, 1, 0, 0};
  const std::vector<int> y = {1, 0, 1, 0};
  c.expect(std::abs(cohens_kappa(x, y)) < 1e-12, "independent marginals");
  return c.outcome();
}

Outcome candidate_constraints() {
  Check c;
  const SyntheticCorpus s = generate_synthetic({});
  c.expect(s.corpus.documents().size() == 20, "expected 20 documents");
  c.expect(!s.violations.empty(), "no planted violations");
  const auto emitted = generate_corpus_candidates(s.corpus);
  std::set<std::string> ids;
  for (const AnnotatedPair& p : emitted) {
    ids.insert(p.pair_id);
    const auto mentions = s.corpus.mentions_of(p.doc_id());
    c.expect(shares_participant(p.e1(), p.e2()), p.pair_id + " shares no participant");
    c.expect(sentence_distance(p.e1(), p.e2()) <= 1, p.pair_id + " too far apart");
    c.expect(!same_type(p.e1(), p.e2()), p.pair_id + " has one type");
    c.expect(!nested_in_regulation(p.e1(), p.e2(), mentions), p.pair_id + " is nested");
  }
  for (const AnnotatedPair& p : s.pairs) {
    c.expect(ids.count(p.pair_id) == 1, "planted pair " + p.pair_id + " not emitted");
  }
  for (const PlantedViolation& v : s.violations) {
    c.expect(ids.count(v.doc_id + ":" + v.e1_id + ":" + v.e2_id) == 0,
             v.kind + " violation emitted");
  }
  c.note(std::to_string(emitted.size()) + " pairs, " + std::to_string(s.violations.size()) +
         " violations rejected");
  return c.outcome();
}

Outcome worked_examples() {
  Check c;
  const Corpus& corpus = testing::example_corpus();
  const auto pair = [&](const char* a, const char* b) {
    return testing::make_pair(corpus, a, b);
  };
  const auto doc = [&](const char* id) -> const Document& { return corpus.document(id); };
  c.expect(classify_intra(pair("ex1.e1", "ex1.e2"), doc("ex1")) == L::E2PrecedesE1,
           "ex1");
  c.expect(classify_intra(pair("ex2.e1", "ex2.e2"), doc("ex2")) == L::E1PrecedesE2,
           "ex2");
  c.expect(classify_inter(pair("ex3.e1", "ex3.e2"), doc("ex3")) == L::E1PrecedesE2,
           "ex3");
  c.expect(classify_inter(pair("ex4.e1", "ex4.e2"), doc("ex4")) == L::E1PrecedesE2,
           "ex4");
  // Binding is e1, phosphorylation e2.
  c.expect(classify_reichenbach(pair("ex5.e1", "ex5.e2"), doc("ex5")) == L::E2PrecedesE1,
           "ex5");
  const FeatureSet f = syntax_features(pair("ex6.e1", "ex6.e3"), doc("ex6"));
  const std::string path = "path:cross=root >nsubj + root >prep_to >prep_such_as >rcmod";
  c.expect(std::find(f.begin(), f.end(), path) != f.end(), "ex6 cross path feature");
  return c.outcome();
}

Outcome gradient_checks() {
  Check c;
  Rng rng(2002);
  double worst_linear = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = uniform_int(rng, 1, 10);
    const int d = uniform_int(rng, 1, 6);
    std::vector<std::vector<double>> x(static_cast<std::size_t>(n));
    std::vector<int> y;
    for (auto& row : x) {
      for (int j = 0; j < d; ++j) row.push_back(uniform_real(rng, -2, 2));
      y.push_back(uniform_int(rng, 0, 1) ? 1 : -1);
    }
    std::vector<double> w;
    for (int j = 0; j <= d; ++j) w.push_back(uniform_real(rng, -1, 1));
    const double lambda = uniform_real(rng, 0, 0.3);
    const DenseObjective at = logistic_objective(x, y, w, lambda);
    for (std::size_t j = 0; j < w.size(); ++j) {
      auto plus = w;
      auto minus = w;
      plus[j] += 1e-5;
      minus[j] -= 1e-5;
      const double numeric = (logistic_objective(x, y, plus, lambda).value -
                              logistic_objective(x, y, minus, lambda).value) / 2e-5;
      const double err = std::abs(numeric - at.gradient[j]) /
                         std::max({std::abs(numeric), std::abs(at.gradient[j]), 1e-6});
      worst_linear = std::max(worst_linear, err);
    }
  }
  c.expect(worst_linear < 1e-4, "logistic gradient error " + fmt(worst_linear));

  static const std::vector<std::string> pool = {"ras", "raf", "binds", "to", "and", "then"};
  const auto tokens = [&](int lo, int hi) {
    std::vector<std::string> out;
    for (int i = uniform_int(rng, lo, hi); i > 0; --i) {
      out.push_back(pool[static_cast<std::size_t>(uniform_int(rng, 0, 5))]);
    }
    return out;
  };
  double worst_net = 0.0;
  for (Architecture arch : {Architecture::Basic, Architecture::Pitchfork}) {
    std::vector<NetExample> examples;
    for (int i = 0; i < 4; ++i) {
      examples.push_back({{tokens(1, 3), tokens(2, 6), tokens(1, 3)}, testing::random_coarse(rng)});
    }
    NetConfig config;
    config.architecture = arch;
    config.hidden = 5;
    config.embedding_dim = 4;
    config.seed = 17;
    const Network net = Network::initialize(config, build_vocabulary(examples));
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const double e = gradient_check(net, examples[i], 1e-5, i % 2 == 1, 100 + i)
                           .max_relative_error;
      worst_net = std::max(worst_net, e);
    }
  }
  c.expect(worst_net < 1e-4, "BPTT gradient error " + fmt(worst_net));
  c.note("max relative error logistic " + fmt(worst_linear) + ", BPTT " + fmt(worst_net));
  return c.outcome();
}

FeatureVector vec(std::vector<int> idx, L label) {
  FeatureVector v;
  v.indices = std::move(idx);
  v.label = label;
  return v;
}

template <typename Model>
double accuracy(const Model& m, const std::vector<FeatureVector>& data) {
  int right = 0;
  for (const FeatureVector& v : data) right += m.predict(v).label == v.label;
  return static_cast<double>(right) / static_cast<double>(data.size());
}

Outcome learnability() {
  Check c;
  Rng rng(3003);
  std::vector<FeatureVector> separable;
  for (int i = 0; i < 90; ++i) {
    const L label = kCoarseLabels[static_cast<std::size_t>(i % 3)];
    std::vector<int> idx{static_cast<int>(class_index(label))};
    for (int j = 0; j < 5; ++j) {
      if (uniform_int(rng, 0, 1)) idx.push_back(3 + j);
    }
    separable.push_back(vec(idx, label));
  }
  for (Loss loss : {Loss::Logistic, Loss::Hinge}) {
    for (Regularizer reg : {Regularizer::L1, Regularizer::L2}) {
      const LinearModel m = train_linear(separable, 8, loss, reg, TrainConfig{});
      c.expect(accuracy(m, separable) == 1.0,
               std::string(to_string(loss)) + "/" + std::string(to_string(reg)) +
                   " below 100% on separable data");
    }
  }

  const auto xor_set = [&](int n) {
    std::vector<FeatureVector> out;
    for (int i = 0; i < n; ++i) {
      const bool a = i % 2 == 1;
      const bool b = (i / 2) % 2 == 1;
      std::vector<int> idx;
      if (a) idx.push_back(0);
      if (b) idx.push_back(1);
      for (int j = 0; j < 6; ++j) {
        if (uniform_int(rng, 0, 1)) idx.push_back(2 + j);
      }
      out.push_back(vec(idx, a != b ? L::E1PrecedesE2 : L::Nil));
    }
    return out;
  };
  const auto train = xor_set(400);
  const auto test = xor_set(400);
  ForestConfig fc;
  fc.n_trees = 50;
  fc.feature_subsample = 1.0;
  const double forest = accuracy(train_forest(train, 8, fc), test);
  double best_linear = 0.0;
  for (Loss loss : {Loss::Logistic, Loss::Hinge}) {
    for (Regularizer reg : {Regularizer::L1, Regularizer::L2}) {
      best_linear = std::max(best_linear,
                             accuracy(train_linear(train, 8, loss, reg, TrainConfig{}), test));
    }
  }
  c.expect(forest > 0.9, "forest XOR accuracy " + fmt(forest));
  c.expect(best_linear <= 0.75, "linear XOR accuracy " + fmt(best_linear));

  const std::vector<std::pair<std::string, L>> keys = {
      {"before", L::E1PrecedesE2}, {"after", L::E2PrecedesE1}, {"and", L::Nil}};
  static const std::vector<std::string> filler = {"ras", "raf", "mek", "erk", "binds"};
  std::vector<NetExample> toy;
  for (int i = 0; i < 60; ++i) {
    NetExample ex;
    ex.input.span = {keys[static_cast<std::size_t>(i % 3)].first};
    for (int k = uniform_int(rng, 1, 4); k > 0; --k) {
      ex.input.span.push_back(filler[static_cast<std::size_t>(uniform_int(rng, 0, 4))]);
    }
    ex.label = keys[static_cast<std::size_t>(i % 3)].second;
    toy.push_back(ex);
  }
  NetConfig nc;
  nc.hidden = 8;
  nc.embedding_dim = 8;
  nc.dropout = 0.0;
  nc.learning_rate = 0.5;
  nc.batch_size = 6;
  nc.max_epochs = 100;
  nc.patience = 100;
  const TrainedNetwork net = train_net(toy, {}, nc);
  int right = 0;
  for (const NetExample& ex : toy) right += predict(net.network, ex.input) == ex.label;
  const double lstm = static_cast<double>(right) / static_cast<double>(toy.size());
  c.expect(lstm == 1.0, "LSTM toy training accuracy " + fmt(lstm));
  c.note("forest XOR " + fmt(forest) + ", best linear XOR " + fmt(best_linear) +
         ", LSTM toy " + fmt(lstm) + " (best epoch " + std::to_string(net.log.best_epoch) + ")");
  return c.outcome();
}

Outcome sieve_monotonicity() {
  Check c;
  Rng rng(4004);
  for (int trial = 0; trial < 100 && c.ok(); ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 60));
    const auto gold = testing::random_coarse_labels(rng, n);
    const int k = uniform_int(rng, 1, 8);
    std::vector<std::string> ids;
    std::vector<std::vector<L>> columns;
    std::map<std::string, std::vector<L>> predictions;
    for (int m = 0; m < k; ++m) {
      ids.push_back("model" + std::to_string(m));
      // Noisy copies of gold so precision varies across models.
      std::vector<L> col(n);
      const double keep = uniform_real(rng, 0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        col[i] = uniform_real(rng, 0, 1) < keep ? gold[i] : testing::random_coarse(rng);
      }
      columns.push_back(col);
      predictions[ids.back()] = col;
    }
    const SievePlan plan = rank_sieves(ids, columns, gold);
    double previous = -1.0;
    for (const CurvePoint& point : prefix_curve(plan, predictions, gold)) {
      c.expect(point.metrics.recall >= previous, "recall dropped in trial " + std::to_string(trial));
      previous = point.metrics.recall;
    }
    const auto combined = combine_predictions(plan, predictions);
    for (std::size_t i = 0; i < n; ++i) {
      L replay = L::Nil;
      for (const SieveEntry& e : plan.entries) {
        if (predictions[e.model_id][i] != L::Nil) {
          replay = predictions[e.model_id][i];
          break;
        }
      }
      c.expect(combined[i] == replay, "first-positive replay mismatch in trial " +
                                          std::to_string(trial));
    }
  }
  c.note("100 stacks");
  return c.outcome();
}

int invoke(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::vector<const char*> argv{"precedence"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str() + e.str();
  return code;
}

Outcome determinism() {
  Check c;
  testing::TempDir dir("acceptance");
  const std::string root = dir.str();
  std::string log;
  c.expect(invoke({"synth", "--seed", "11", "--out", root + "/synth"}, &log) == 0, "synth: " + log);
  // Every built-in model without pretrained vectors; LSTMs trimmed for time.
  const std::vector<std::string> args = {
      "evaluate", "--corpus", root + "/synth/corpus.json", "--pairs",
      root + "/synth/annotations.json", "--seed", "5", "--epochs", "3",
      "--embedding-dim", "16", "--bootstrap", "1000"};
  for (const char* run : {"/run1", "/run2"}) {
    std::vector<std::string> a = args;
    a.insert(a.end(), {"--out", root + run});
    c.expect(invoke(a, &log) == 0, std::string("evaluate failed: ") + log);
  }
  for (const char* f : {"report.json", "report.txt", "curve.csv"}) {
    if (!c.ok()) break;
    c.expect(testing::read_text(root + "/run1/" + f) == testing::read_text(root + "/run2/" + f),
             std::string(f) + " differs between runs");
  }
  c.note("report.json, report.txt and curve.csv identical");
  return c.outcome();
}

// Optional tier on an external corpus.
Outcome corpus_tier(const std::string& dir) {
  Check c;
  const auto docs = parse_documents(testing::read_text(dir + "/corpus.conllu"));
  auto mentions = load_event_mentions(testing::read_text(dir + "/mentions.json"), docs);
  const Corpus corpus(docs, std::move(mentions));
  const auto pairs = labeled_pairs(load_annotations(testing::read_text(dir + "/annotations.json"), corpus));
  CvConfig cv;
  for (const std::string& id : builtin_model_ids()) {
    ModelSpec s = builtin_spec(id);
    if (s.net.pretrained) {
      if (!fs::exists(dir + "/embeddings.txt")) continue;
      s.embeddings_path = dir + "/embeddings.txt";
    }
    cv.models.push_back(s);
  }
  const EvalReport r = run_cv(pairs, corpus, cv);
  const ModelReport* svm = r.find("svm-l1");
  const ModelReport* best = r.find(r.best_single_model);
  const ModelReport* reich = r.find("reichenbach");
  c.expect(std::abs(svm->metrics.f1 - 0.43) <= 0.08, "svm-l1 F1 " + fmt(svm->metrics.f1));
  c.expect(r.combined.metrics.f1 >= best->metrics.f1,
           "combined F1 " + fmt(r.combined.metrics.f1) + " below " + r.best_single_model);
  const auto positives = std::count_if(reich->predictions.begin(), reich->predictions.end(),
                                       [](L l) { return l != L::Nil; });
  c.expect(positives <= 2, "reichenbach emitted " + std::to_string(positives) + " positives");
  c.note("svm-l1 F1 " + fmt(svm->metrics.f1) + ", combined " + fmt(r.combined.metrics.f1));
  return c.outcome();
}

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

bool report(const Criterion& criterion) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = criterion.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.ok && seconds >= criterion.budget_seconds) {
    o = {false, "took " + fmt(seconds) + " s, budget " + fmt(criterion.budget_seconds) + " s"};
  }
  std::ostringstream line;
  line.precision(3);
  line << (o.ok ? "PASS " : "FAIL ") << criterion.name << " (" << std::fixed << seconds << " s)";
  if (!o.detail.empty()) line << ": " << o.detail;
  std::cout << line.str() << std::endl;
  return o.ok;
}

}  // namespace
}  // namespace precedence

int main() {
  using namespace precedence;
  const std::vector<Criterion> criteria = {
      {"metric-oracle", 1, metric_oracle},
      {"kappa", 1, kappa_cases},
      {"candidate-constraints", 5, candidate_constraints},
      {"worked-examples", 5, worked_examples},
      {"gradient-checks", 30, gradient_checks},
      {"learnability", 120, learnability},
      {"sieve-monotonicity", 10, sieve_monotonicity},
      {"determinism", 60, determinism},
  };
  bool all = true;
  for (const Criterion& c : criteria) all = report(c) && all;

  if (const char* dir = std::getenv("PRECEDENCE_CORPUS_DIR"); dir && *dir) {
    // Drift against the external corpus is reported, not fatal.
    report({"corpus-tier", 1800, [&] { return corpus_tier(dir); }});
  } else {
    std::cout << "SKIP corpus-tier: PRECEDENCE_CORPUS_DIR not set" << std::endl;
  }
  return all ? 0 : 1;
}
