#include "cli.h"

#include <omp.h>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "precedence/candidates.h"
#include "precedence/corpus.h"
#include "precedence/errors.h"
#include "precedence/evaluation.h"
#include "precedence/metrics.h"
#include "precedence/models.h"
#include "precedence/pipeline.h"
#include "precedence/synthetic.h"

#ifndef PRECEDENCE_VERSION
#define PRECEDENCE_VERSION "dev"
#endif

namespace precedence::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("error writing " + path.string());
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// Shortest round-trip decimal, always with a fractional part.
std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  std::string text(buffer, result.ptr);
  if (text.find_first_of(".en") == std::string::npos) text += ".0";
  return text;
}

// Reads inputs (recording their digests) and writes outputs plus the run
// manifest into an optional output directory.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv, std::string out_dir)
      : command_(std::move(command)), argv_(std::move(argv)), dir_(std::move(out_dir)) {}

  std::string input(const std::string& path) {
    std::string data = read_file(path);
    inputs_[path] = sha256_hex(data);
    return data;
  }

  bool has_output() const { return !dir_.empty(); }

  void output(const std::string& name, const std::string& content) {
    if (dir_.empty()) return;
    ensure_dir();
    write_file(fs::path(dir_) / name, content);
    outputs_.push_back(name);
  }

  void finish(const json& config, std::uint64_t seed) {
    if (dir_.empty()) return;
    ensure_dir();
    json manifest = {{"command", command_},
                     {"argv", argv_},
                     {"config", config},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"seed", seed},
                     {"version", PRECEDENCE_VERSION},
                     {"timestamp", utc_timestamp()}};
    write_file(fs::path(dir_) / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  void ensure_dir() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_ + ": " + ec.message());
  }

  std::string command_;
  std::vector<std::string> argv_;
  std::string dir_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

struct Globals {
  int jobs = 0;
  bool json_output = false;
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct CorpusArgs {
  std::string bundle;
  std::string conllu;
  std::string mentions;

  void add(CLI::App* app) {
    app->add_option("--corpus", bundle, "Corpus bundle from `ingest` (.json or .cbor)");
    app->add_option("--conllu", conllu, "CoNLL-U documents (instead of --corpus)");
    app->add_option("--mentions", mentions, "Event mention JSON (with --conllu)");
  }

  Corpus load(Run& run) const {
    if (!bundle.empty()) {
      const std::string data = run.input(bundle);
      json j;
      try {
        j = fs::path(bundle).extension() == ".cbor"
                ? json::from_cbor(data)
                : json::parse(data);
      } catch (const json::exception& e) {
        throw ParseError(bundle + ": " + e.what());
      }
      return corpus_from_json(j);
    }
    if (conllu.empty() || mentions.empty()) {
      throw UsageError("give --corpus, or both --conllu and --mentions");
    }
    std::vector<Document> docs = parse_documents(run.input(conllu));
    std::vector<EventMention> ms = load_event_mentions(run.input(mentions), docs);
    return Corpus(std::move(docs), std::move(ms));
  }
};

// Flags that override every model spec when given explicitly.
struct ModelArgs {
  std::string models;
  std::string spec_file;
  int epochs = 100;
  int batch = 32;
  double dropout = 0.5;
  int embedding_dim = 200;
  std::string embeddings;
  bool class_weighting = false;
  std::vector<CLI::App*> apps;  // every subcommand sharing these flags

  void add(CLI::App* a, bool single) {
    apps.push_back(a);
    a->add_option("--models", models,
                  single ? "Built-in model id" : "Comma-separated built-in model ids");
    a->add_option("--spec", spec_file, "Model spec JSON (object or array)");
    a->add_option("--epochs", epochs, "Maximum LSTM epochs")->check(CLI::PositiveNumber);
    a->add_option("--batch", batch, "LSTM minibatch size")->check(CLI::PositiveNumber);
    a->add_option("--dropout", dropout, "LSTM dropout rate")->check(CLI::Range(0.0, 0.99));
    a->add_option("--embedding-dim", embedding_dim, "Embedding dimension")
        ->check(CLI::PositiveNumber);
    a->add_option("--embeddings", embeddings, "Pretrained embeddings (word2vec text)");
    a->add_flag("--class-weighting", class_weighting,
                "Inverse class frequency weights for linear models");
  }

  std::vector<ModelSpec> load(Run& run) const {
    std::vector<ModelSpec> specs;
    if (!spec_file.empty()) {
      json j;
      try {
        j = json::parse(run.input(spec_file));
      } catch (const json::exception& e) {
        throw ParseError(spec_file + ": " + e.what());
      }
      if (j.is_array()) {
        for (const json& item : j) specs.push_back(ModelSpec::from_json(item));
      } else {
        specs.push_back(ModelSpec::from_json(j));
      }
    }
    if (!models.empty()) {
      std::stringstream list(models);
      std::string id;
      while (std::getline(list, id, ',')) {
        if (!id.empty()) specs.push_back(builtin_spec(id));
      }
    }
    if (specs.empty()) {
      for (const std::string& id : builtin_model_ids()) {
        ModelSpec s = builtin_spec(id);
        if (s.kind == ModelKind::Lstm && s.net.pretrained && embeddings.empty() &&
            s.embeddings_path.empty()) {
          continue;
        }
        specs.push_back(std::move(s));
      }
    }
    for (ModelSpec& s : specs) apply_overrides(s);
    return specs;
  }

  void apply_overrides(ModelSpec& s) const {
    const auto given = [&](const char* flag) {
      return std::any_of(apps.begin(), apps.end(),
                         [&](const CLI::App* a) { return a->count(flag) > 0; });
    };
    if (s.kind == ModelKind::Lstm) {
      if (given("--epochs")) s.net.max_epochs = epochs;
      if (given("--batch")) s.net.batch_size = batch;
      if (given("--dropout")) s.net.dropout = dropout;
      if (given("--embedding-dim")) s.net.embedding_dim = embedding_dim;
      if (given("--embeddings")) s.embeddings_path = embeddings;
      s.net.validate();
    }
    if (s.kind == ModelKind::Linear && class_weighting) s.linear.class_weighting = true;
  }
};

std::vector<AnnotatedPair> load_pairs(Run& run, const std::string& path,
                                      const Corpus& corpus) {
  if (path.empty()) throw UsageError("--pairs is required");
  return load_annotations(run.input(path), corpus);
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

void check_min_folds(int folds) {
  // One fold is held out for testing and one for development.
  if (folds < 3) throw ConfigError("--folds must be at least 3");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Causal precedence between biomedical events", "precedence"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--jobs", g.jobs, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json_output, "Machine-readable output on stdout");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out_dir, "Output directory (gets a manifest.json)");

  std::string command;
  const auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&command, name] { command = name; });
    return s;
  };

  // ingest
  CorpusArgs ingest_corpus;
  bool ingest_binary = false;
  {
    CLI::App* s = sub("ingest", "CoNLL-U + mention JSON -> corpus bundle");
    s->add_option("--conllu", ingest_corpus.conllu, "CoNLL-U documents")->required();
    s->add_option("--mentions", ingest_corpus.mentions, "Event mention JSON")->required();
    s->add_flag("--binary", ingest_binary, "Write CBOR instead of JSON");
  }

  // candidates
  CorpusArgs cand_corpus;
  CandidateConfig cand_config;
  bool allow_unshared = false, allow_same_type = false, allow_nested = false;
  {
    CLI::App* s = sub("candidates", "Corpus -> unlabeled candidate pairs");
    cand_corpus.add(s);
    s->add_option("--max-sentence-distance", cand_config.max_sentence_distance,
                  "Maximum sentence distance between the events")
        ->check(CLI::NonNegativeNumber);
    s->add_flag("--allow-unshared", allow_unshared, "Drop the shared participant test");
    s->add_flag("--allow-same-type", allow_same_type, "Drop the distinct type test");
    s->add_flag("--allow-nested", allow_nested, "Drop the nested regulation test");
  }

  // kappa
  std::string kappa_a, kappa_b;
  bool kappa_coarse = false;
  {
    CLI::App* s = sub("kappa", "Cohen's kappa between two annotation files");
    s->add_option("a", kappa_a, "First annotation JSON")->required();
    s->add_option("b", kappa_b, "Second annotation JSON")->required();
    s->add_flag("--coarse", kappa_coarse, "Compare the three precedence classes");
  }

  // train
  CorpusArgs train_corpus;
  ModelArgs train_models;
  std::string train_pairs, train_dev;
  {
    CLI::App* s = sub("train", "Model spec + labeled pairs -> serialized model");
    train_corpus.add(s);
    train_models.add(s, true);
    s->add_option("--pairs", train_pairs, "Training annotations")->required();
    s->add_option("--dev", train_dev, "Development annotations (lambda, early stopping)");
  }

  // predict
  CorpusArgs pred_corpus;
  std::string pred_model, pred_pairs;
  {
    CLI::App* s = sub("predict", "Serialized model + pairs -> predictions");
    pred_corpus.add(s);
    s->add_option("--model", pred_model, "Model JSON from `train`")->required();
    s->add_option("--pairs", pred_pairs, "Pairs to label")->required();
  }

  // evaluate and sieve share the cross-validation settings.
  CorpusArgs cv_corpus;
  ModelArgs cv_models;
  std::string cv_pairs;
  int folds = 10;
  std::string plan_mode = "nested";
  int bootstrap = 10000;
  const auto add_cv = [&](CLI::App* s) {
    cv_corpus.add(s);
    cv_models.add(s, false);
    s->add_option("--pairs", cv_pairs, "Labeled annotations")->required();
    s->add_option("--folds", folds, "Cross-validation folds");
    s->add_option("--plan-mode", plan_mode, "Sieve plan ranking: nested or pooled")
        ->check(CLI::IsMember({"nested", "pooled"}));
    s->add_option("--bootstrap", bootstrap, "Bootstrap resamples")
        ->check(CLI::PositiveNumber);
  };
  add_cv(sub("evaluate", "Cross-validated comparison of every model"));
  add_cv(sub("sieve", "Sieve plan construction and combined recall curve"));

  // overlap
  std::string overlap_report_path;
  int overlap_k = 3;
  {
    CLI::App* s = sub("overlap", "True-positive overlap between models");
    s->add_option("--report", overlap_report_path, "Report JSON from `evaluate`")
        ->required();
    s->add_option("--max-k", overlap_k, "Largest model subset")->check(CLI::Range(1, 12));
  }

  // distributions
  CorpusArgs dist_corpus;
  std::string dist_pairs;
  {
    CLI::App* s = sub("distributions", "Label counts within/across sentences");
    dist_corpus.add(s);
    s->add_option("--pairs", dist_pairs, "Annotations")->required();
  }

  // synth
  SyntheticConfig synth;
  {
    CLI::App* s = sub("synth", "Write a seeded synthetic corpus");
    s->add_option("--documents", synth.documents, "Documents")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--violation-rate", synth.violation_rate,
                  "Share of blocks planting filtered pairs");
    s->add_option("--label-noise", synth.label_noise, "Share of randomized labels");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  if (g.jobs > 0) omp_set_num_threads(g.jobs);
  Run run(command, args, g.out_dir);

  try {
    if (command == "ingest") {
      Corpus corpus = ingest_corpus.load(run);
      const json bundle = corpus_to_json(corpus);
      if (ingest_binary) {
        const std::vector<std::uint8_t> bytes = json::to_cbor(bundle);
        run.output("corpus.cbor", std::string(bytes.begin(), bytes.end()));
      } else {
        run.output("corpus.json", bundle.dump() + "\n");
      }
      if (!run.has_output()) out << bundle.dump() << "\n";
      run.finish({{"binary", ingest_binary}}, g.seed);
      if (g.json_output) {
        out << json{{"documents", corpus.documents().size()},
                    {"mentions", corpus.mentions().size()}}
                   .dump()
            << "\n";
      } else if (run.has_output()) {
        out << "ingested " << corpus.documents().size() << " documents, "
            << corpus.mentions().size() << " mentions\n";
      }
    } else if (command == "candidates") {
      cand_config.require_shared_participant = !allow_unshared;
      cand_config.forbid_same_type = !allow_same_type;
      cand_config.forbid_nested_regulation = !allow_nested;
      Corpus corpus = cand_corpus.load(run);
      const std::vector<AnnotatedPair> pairs = generate_corpus_candidates(corpus, cand_config);
      const json j = export_annotations(pairs);
      run.output("candidates.json", pretty(j));
      run.finish({{"max_sentence_distance", cand_config.max_sentence_distance},
                  {"require_shared_participant", cand_config.require_shared_participant},
                  {"forbid_same_type", cand_config.forbid_same_type},
                  {"forbid_nested_regulation", cand_config.forbid_nested_regulation}},
                 g.seed);
      if (!run.has_output() || g.json_output) {
        out << pretty(j);
      } else {
        out << pairs.size() << " candidate pairs\n";
      }
    } else if (command == "kappa") {
      // Pairs are aligned by id; a pair listed in the opposite order in one
      // file has its label mirrored. Unlabeled and discarded pairs are skipped.
      struct Entry {
        std::string e1, e2;
        RelationLabel label;
      };
      const auto read = [&](const std::string& path) {
        json j;
        try {
          j = json::parse(run.input(path));
        } catch (const json::exception& e) {
          throw ParseError(path + ": " + e.what());
        }
        if (!j.is_array()) throw ValidationError(path + ": expected an array of pairs");
        std::map<std::string, Entry> entries;
        for (const json& p : j) {
          if (!p.is_object()) throw ValidationError(path + ": pair is not an object");
          const std::string label = p.at("label").get<std::string>();
          if (label == kUnlabeled || p.value("discarded", false)) continue;
          const std::string id = p.at("pair_id").get<std::string>();
          if (!entries
                   .emplace(id, Entry{p.at("e1_id").get<std::string>(),
                                      p.at("e2_id").get<std::string>(),
                                      parse_relation_label(label)})
                   .second) {
            throw ValidationError(path + ": duplicate pair " + id);
          }
        }
        return entries;
      };
      const auto a = read(kappa_a);
      const auto b = read(kappa_b);
      std::vector<RelationLabel> la, lb;
      for (const auto& [id, ea] : a) {
        const auto it = b.find(id);
        if (it == b.end()) continue;
        RelationLabel other = it->second.label;
        if (it->second.e1 == ea.e2 && it->second.e2 == ea.e1) {
          other = mirror(other);
        } else if (it->second.e1 != ea.e1 || it->second.e2 != ea.e2) {
          throw ValidationError("pair " + id + " names different events in the two files");
        }
        la.push_back(ea.label);
        lb.push_back(other);
      }
      double kappa = 0.0;
      if (kappa_coarse) {
        std::vector<CoarseLabel> ca, cb;
        for (RelationLabel l : la) ca.push_back(reduce_label(l));
        for (RelationLabel l : lb) cb.push_back(reduce_label(l));
        kappa = cohens_kappa(ca, cb);
      } else {
        kappa = cohens_kappa(la, lb);
      }
      const json result = {{"kappa", kappa}, {"pairs", la.size()}, {"coarse", kappa_coarse}};
      run.output("kappa.json", pretty(result));
      run.finish({{"coarse", kappa_coarse}}, g.seed);
      if (g.json_output) {
        out << result.dump() << "\n";
      } else {
        out << format_double(kappa) << "\n";
      }
    } else if (command == "train") {
      Corpus corpus = train_corpus.load(run);
      std::vector<ModelSpec> specs = train_models.load(run);
      if (train_models.models.empty() && train_models.spec_file.empty()) {
        throw UsageError("train needs --models or --spec");
      }
      if (specs.size() != 1) throw UsageError("train takes exactly one model");
      const std::vector<AnnotatedPair> train = labeled_pairs(load_pairs(run, train_pairs, corpus));
      std::vector<AnnotatedPair> dev;
      if (!train_dev.empty()) {
        dev = labeled_pairs(load_annotations(run.input(train_dev), corpus));
      }
      const auto model = train_model(specs[0], train, dev, corpus, g.seed);
      const json j = model->to_json();
      run.output("model.json", j.dump() + "\n");
      if (!run.has_output()) out << j.dump() << "\n";
      const Prf fit = micro_prf(predict_all(*model, train, corpus), gold_labels(train));
      run.finish({{"model", specs[0].to_json()}}, g.seed);
      if (g.json_output) {
        out << json{{"model_id", model->id()}, {"training", to_json(fit)}}.dump() << "\n";
      } else if (run.has_output()) {
        out << "trained " << model->id() << " on " << train.size()
            << " pairs; training F1 " << format_double(fit.f1) << "\n";
      }
    } else if (command == "predict") {
      Corpus corpus = pred_corpus.load(run);
      json mj;
      try {
        mj = json::parse(run.input(pred_model));
      } catch (const json::exception& e) {
        throw ParseError(pred_model + ": " + e.what());
      }
      const auto model = load_model(mj);
      const std::vector<AnnotatedPair> pairs = load_pairs(run, pred_pairs, corpus);
      std::vector<AnnotatedPair> usable;
      for (const AnnotatedPair& p : pairs) {
        if (!p.discarded) usable.push_back(p);
      }
      const std::vector<CoarseLabel> preds = predict_all(*model, usable, corpus);
      json list = json::array();
      std::vector<CoarseLabel> pg, gg;
      for (std::size_t i = 0; i < usable.size(); ++i) {
        list.push_back({{"pair_id", usable[i].pair_id},
                        {"doc_id", usable[i].doc_id()},
                        {"e1_id", usable[i].e1().id},
                        {"e2_id", usable[i].e2().id},
                        {"label", to_string(preds[i])}});
        if (usable[i].label) {
          pg.push_back(preds[i]);
          gg.push_back(gold_label(usable[i]));
        }
      }
      const json result = {{"model_id", model->id()}, {"predictions", list}};
      run.output("predictions.json", pretty(result));
      run.finish({{"model_id", model->id()}}, g.seed);
      if (g.json_output || !run.has_output()) {
        json r = result;
        if (!gg.empty()) r["metrics"] = to_json(micro_prf(pg, gg));
        out << pretty(r);
      } else {
        out << "labeled " << usable.size() << " pairs with " << model->id() << "\n";
        if (!gg.empty()) {
          const Prf m = micro_prf(pg, gg);
          out << "against gold: P " << format_double(m.precision) << " R "
              << format_double(m.recall) << " F1 " << format_double(m.f1) << "\n";
        }
      }
    } else if (command == "evaluate" || command == "sieve") {
      check_min_folds(folds);
      Corpus corpus = cv_corpus.load(run);
      CvConfig config;
      config.folds = folds;
      config.seed = g.seed;
      config.models = cv_models.load(run);
      config.plan_mode = parse_plan_mode(plan_mode);
      config.bootstrap_iterations = bootstrap;
      const std::vector<AnnotatedPair> data = labeled_pairs(load_pairs(run, cv_pairs, corpus));
      const EvalReport report = run_cv(data, corpus, config);
      if (command == "evaluate") {
        run.output("report.json", pretty(report.to_json()));
        run.output("report.txt", report.to_text());
        run.output("curve.csv", report.curve_csv());
        if (g.json_output) {
          out << pretty(report.to_json());
        } else {
          out << report.to_text();
        }
      } else {
        json plans = json::array();
        for (const SievePlan& p : report.plans) plans.push_back(p.to_json());
        json curve = json::array();
        for (const CurvePoint& c : report.curve) {
          curve.push_back({{"sieves", c.sieves},
                           {"added_model", c.added_model},
                           {"metrics", to_json(c.metrics)}});
        }
        const json result = {{"plan_mode", plan_mode},
                             {"plans", plans},
                             {"curve", curve},
                             {"combined", report.combined.to_json(true)},
                             {"pair_ids", report.pair_ids}};
        run.output("sieve.json", pretty(result));
        run.output("curve.csv", report.curve_csv());
        if (g.json_output) {
          out << pretty(result);
        } else {
          out << "sieve order (" << plan_mode << "): "
              << [&] {
                   std::string ids;
                   for (const std::string& id : report.plans.front().model_ids()) {
                     ids += (ids.empty() ? "" : " > ") + id;
                   }
                   return ids;
                 }()
              << "\n"
              << report.curve_csv();
        }
      }
      run.finish(config.to_json(), g.seed);
    } else if (command == "overlap") {
      json rj;
      try {
        rj = json::parse(run.input(overlap_report_path));
      } catch (const json::exception& e) {
        throw ParseError(overlap_report_path + ": " + e.what());
      }
      const auto ids = rj.at("pair_ids").get<std::vector<std::string>>();
      const auto gold = rj.at("gold").get<std::vector<std::string>>();
      if (ids.size() != gold.size()) throw ValidationError("report: pair_ids and gold differ");
      std::map<std::string, std::set<std::string>> sets;
      for (const json& m : rj.at("models")) {
        const auto preds = m.at("predictions").get<std::vector<std::string>>();
        if (preds.size() != ids.size()) {
          throw ValidationError("report: predictions misaligned for " +
                                m.at("model_id").get<std::string>());
        }
        std::set<std::string>& tp = sets[m.at("model_id").get<std::string>()];
        for (std::size_t i = 0; i < ids.size(); ++i) {
          const CoarseLabel gl = parse_coarse_label(gold[i]);
          if (is_positive(gl) && parse_coarse_label(preds[i]) == gl) tp.insert(ids[i]);
        }
      }
      const OverlapReport report =
          overlap_report(sets, std::set<std::string>(ids.begin(), ids.end()), overlap_k);
      run.output("overlap.json", pretty(report.to_json()));
      run.output("overlap.csv", report.to_csv());
      run.finish({{"max_k", overlap_k}}, g.seed);
      out << (g.json_output ? pretty(report.to_json()) : report.to_csv());
    } else if (command == "distributions") {
      Corpus corpus = dist_corpus.load(run);
      const DistributionReport report =
          distribution_report(load_pairs(run, dist_pairs, corpus));
      run.output("distributions.json", pretty(report.to_json()));
      run.output("distributions.csv", report.to_csv());
      run.finish(json::object(), g.seed);
      out << (g.json_output ? pretty(report.to_json()) : report.to_csv());
    } else if (command == "synth") {
      synth.seed = g.seed;
      if (!run.has_output()) throw UsageError("synth needs --out");
      const SyntheticCorpus s = generate_synthetic(synth);
      run.output("corpus.conllu", s.conllu());
      run.output("mentions.json", pretty(s.mentions_json()));
      run.output("annotations.json", pretty(s.annotations_json()));
      run.output("corpus.json", corpus_to_json(s.corpus).dump() + "\n");
      json violations = json::array();
      for (const PlantedViolation& v : s.violations) {
        violations.push_back(
            {{"doc_id", v.doc_id}, {"e1_id", v.e1_id}, {"e2_id", v.e2_id}, {"kind", v.kind}});
      }
      run.output("violations.json", pretty(violations));
      run.finish({{"documents", synth.documents},
                  {"min_blocks", synth.min_blocks},
                  {"max_blocks", synth.max_blocks},
                  {"violation_rate", synth.violation_rate},
                  {"label_noise", synth.label_noise}},
                 g.seed);
      out << "wrote " << s.corpus.documents().size() << " documents, " << s.pairs.size()
          << " labeled pairs, " << s.violations.size() << " planted violations\n";
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace precedence::cli
