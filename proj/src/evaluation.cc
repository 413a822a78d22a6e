#include "precedence/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "precedence/errors.h"
#include "util.h"

namespace precedence {

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> FoldAssignment::members(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == f) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::complement(std::span<const int> excluded) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), fold[i]) == excluded.end()) {
      out.push_back(i);
    }
  }
  return out;
}

FoldAssignment stratified_folds(std::span<const CoarseLabel> labels, int k,
                                std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > labels.size()) {
    throw ValidationError("cannot split " + std::to_string(labels.size()) +
                          " items into " + std::to_string(k) + " folds");
  }
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold.assign(labels.size(), -1);
  std::size_t next = 0;
  for (CoarseLabel label : kCoarseLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(k)) {
      out.warnings.push_back("class " + std::string(to_string(label)) + " has " +
                             std::to_string(members.size()) + " instances for " +
                             std::to_string(k) + " folds");
    }
    util::Rng rng = util::stream(seed, class_index(label));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) {
      out.fold[i] = static_cast<int>(next % static_cast<std::size_t>(k));
      ++next;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bootstrap

namespace {

void check_aligned(std::span<const CoarseLabel> a, std::span<const CoarseLabel> b,
                   std::span<const CoarseLabel> gold, int iterations) {
  if (iterations <= 0) throw ConfigError("bootstrap needs at least one iteration");
  if (a.size() != gold.size() || b.size() != gold.size()) {
    throw ValidationError("bootstrap inputs are not aligned");
  }
  if (gold.empty()) throw ValidationError("bootstrap needs at least one instance");
}

bool resample_favors_b(std::span<const CoarseLabel> a, std::span<const CoarseLabel> b,
                       std::span<const CoarseLabel> gold, std::uint64_t seed,
                       int iteration) {
  util::Rng rng = util::stream(seed, static_cast<std::uint64_t>(iteration));
  Confusion ca;
  Confusion cb;
  for (std::size_t draw = 0; draw < gold.size(); ++draw) {
    const std::size_t i = util::uniform_index(rng, gold.size());
    ca.add(gold[i], a[i]);
    cb.add(gold[i], b[i]);
  }
  return micro_prf(cb).f1 >= micro_prf(ca).f1;
}

}  // namespace

double bootstrap_compare(std::span<const CoarseLabel> preds_a,
                         std::span<const CoarseLabel> preds_b,
                         std::span<const CoarseLabel> gold, int iterations,
                         std::uint64_t seed) {
  check_aligned(preds_a, preds_b, gold, iterations);
  long favors_b = 0;
#pragma omp parallel for reduction(+ : favors_b) schedule(static)
  for (int it = 0; it < iterations; ++it) {
    if (resample_favors_b(preds_a, preds_b, gold, seed, it)) ++favors_b;
  }
  return static_cast<double>(favors_b) / iterations;
}

namespace reference {
double bootstrap_compare(std::span<const CoarseLabel> preds_a,
                         std::span<const CoarseLabel> preds_b,
                         std::span<const CoarseLabel> gold, int iterations,
                         std::uint64_t seed) {
  check_aligned(preds_a, preds_b, gold, iterations);
  long favors_b = 0;
  for (int it = 0; it < iterations; ++it) {
    if (resample_favors_b(preds_a, preds_b, gold, seed, it)) ++favors_b;
  }
  return static_cast<double>(favors_b) / iterations;
}
}  // namespace reference

// ---------------------------------------------------------------------------
// Overlap

OverlapReport overlap_report(const std::map<std::string, std::set<std::string>>& sets,
                             const std::set<std::string>& universe, int max_k) {
  OverlapReport r;
  for (const auto& [model, ids] : sets) {
    r.models.push_back(model);
    if (universe.empty()) continue;
    for (const std::string& id : ids) {
      if (!universe.count(id)) {
        throw ValidationError("pair id '" + id + "' of model '" + model +
                              "' is outside the evaluated universe");
      }
    }
  }
  const std::size_t m = r.models.size();
  if (m > 20) throw ConfigError("overlap analysis supports at most 20 models");
  std::vector<const std::set<std::string>*> columns;
  for (const auto& [model, ids] : sets) columns.push_back(&ids);

  // Membership mask per id.
  std::map<std::string, std::uint32_t> membership;
  for (std::size_t k = 0; k < m; ++k) {
    for (const std::string& id : *columns[k]) membership[id] |= 1u << k;
  }
  const auto members_of = [&](std::uint32_t mask) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < m; ++k) {
      if (mask & (1u << k)) out.push_back(r.models[k]);
    }
    return out;
  };

  std::map<std::uint32_t, std::size_t> region_counts;
  for (const auto& [id, mask] : membership) ++region_counts[mask];
  for (const auto& [mask, count] : region_counts) {
    r.regions.push_back({members_of(mask), count});
  }

  // Subsets in order of size, then lexicographic by member index.
  const int limit = std::min<int>(max_k, static_cast<int>(m));
  for (int size = 1; size <= limit; ++size) {
    std::vector<std::uint32_t> masks;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      if (__builtin_popcount(mask) == size) masks.push_back(mask);
    }
    std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
      return members_of(a) < members_of(b);
    });
    for (std::uint32_t mask : masks) {
      std::size_t count = 0;
      for (const auto& [id, member_mask] : membership) {
        if ((member_mask & mask) == mask) ++count;
      }
      r.intersections.push_back({members_of(mask), count});
    }
  }

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      OverlapReport::Pairwise p{r.models[a], r.models[b]};
      for (const auto& [id, mask] : membership) {
        const bool in_a = mask & (1u << a);
        const bool in_b = mask & (1u << b);
        if (in_a && in_b) ++p.intersection;
        else if (in_a) ++p.only_a;
        else if (in_b) ++p.only_b;
      }
      r.pairwise.push_back(std::move(p));
    }
  }
  return r;
}

nlohmann::json OverlapReport::to_json() const {
  const auto list = [](const std::vector<Intersection>& xs) {
    nlohmann::json out = nlohmann::json::array();
    for (const Intersection& x : xs) out.push_back({{"members", x.members}, {"count", x.count}});
    return out;
  };
  nlohmann::json pw = nlohmann::json::array();
  for (const Pairwise& p : pairwise) {
    pw.push_back({{"a", p.a}, {"b", p.b}, {"intersection", p.intersection},
                  {"only_a", p.only_a}, {"only_b", p.only_b}});
  }
  return {{"models", models},
          {"intersections", list(intersections)},
          {"regions", list(regions)},
          {"pairwise", pw}};
}

std::string OverlapReport::to_csv() const {
  std::ostringstream out;
  out << "kind,members,count\n";
  for (const Intersection& x : intersections) {
    out << "intersection," << util::join(x.members, "&") << ',' << x.count << '\n';
  }
  for (const Intersection& x : regions) {
    out << "region," << util::join(x.members, "&") << ',' << x.count << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Distributions

double LabelDistribution::coref_fraction() const {
  return total() == 0 ? 0.0
                      : static_cast<double>(with_coref) / static_cast<double>(total());
}

DistributionReport distribution_report(std::span<const AnnotatedPair> pairs) {
  DistributionReport r;
  for (RelationLabel label : kRelationLabels) r.rows.push_back({label});
  for (const AnnotatedPair& p : pairs) {
    if (p.discarded) {
      ++r.discarded;
      continue;
    }
    if (!p.label) {
      ++r.unlabeled;
      continue;
    }
    LabelDistribution& row = r.rows[static_cast<std::size_t>(*p.label)];
    if (p.e1().sentence == p.e2().sentence) {
      ++row.within_sentence;
    } else {
      ++row.across_sentences;
    }
    if (p.involves_coref) ++row.with_coref;
  }
  return r;
}

nlohmann::json DistributionReport::to_json() const {
  nlohmann::json labels = nlohmann::json::array();
  for (const LabelDistribution& row : rows) {
    labels.push_back({{"label", to_string(row.label)},
                      {"within_sentence", row.within_sentence},
                      {"across_sentences", row.across_sentences},
                      {"with_coref", row.with_coref},
                      {"coref_fraction", row.coref_fraction()}});
  }
  return {{"labels", labels}, {"unlabeled", unlabeled}, {"discarded", discarded}};
}

std::string DistributionReport::to_csv() const {
  std::ostringstream out;
  out << "label,within_sentence,across_sentences,with_coref,coref_fraction\n";
  for (const LabelDistribution& row : rows) {
    char fraction[32];
    std::snprintf(fraction, sizeof fraction, "%.6f", row.coref_fraction());
    out << to_string(row.label) << ',' << row.within_sentence << ','
        << row.across_sentences << ',' << row.with_coref << ',' << fraction << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Cross-validation

std::string_view to_string(PlanMode mode) {
  return mode == PlanMode::Nested ? "nested" : "pooled";
}

PlanMode parse_plan_mode(std::string_view text) {
  if (util::iequals(text, "nested")) return PlanMode::Nested;
  if (util::iequals(text, "pooled")) return PlanMode::Pooled;
  throw ConfigError("unknown plan mode '" + std::string(text) + "'");
}

nlohmann::json CvConfig::to_json() const {
  nlohmann::json specs = nlohmann::json::array();
  for (const ModelSpec& s : models) specs.push_back(s.to_json());
  return {{"folds", folds},
          {"seed", seed},
          {"plan_mode", to_string(plan_mode)},
          {"bootstrap_iterations", bootstrap_iterations},
          {"models", specs}};
}

nlohmann::json ModelReport::to_json(bool with_predictions) const {
  nlohmann::json folds = nlohmann::json::array();
  for (const Confusion& c : per_fold) {
    folds.push_back({{"metrics", precedence::to_json(micro_prf(c))},
                     {"confusion", precedence::to_json(c)}});
  }
  nlohmann::json j = {{"model_id", model_id},
                      {"metrics", precedence::to_json(metrics)},
                      {"confusion", precedence::to_json(confusion)},
                      {"per_fold", folds}};
  if (with_predictions) {
    nlohmann::json p = nlohmann::json::array();
    for (CoarseLabel l : predictions) p.push_back(to_string(l));
    j["predictions"] = p;
  }
  return j;
}

const ModelReport* EvalReport::find(std::string_view model_id) const {
  if (model_id == combined.model_id) return &combined;
  for (const ModelReport& m : models) {
    if (m.model_id == model_id) return &m;
  }
  return nullptr;
}

std::map<std::string, std::set<std::string>> EvalReport::true_positives() const {
  std::map<std::string, std::set<std::string>> out;
  for (const ModelReport& m : models) {
    std::set<std::string>& ids = out[m.model_id];
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (is_positive(gold[i]) && m.predictions[i] == gold[i]) ids.insert(pair_ids[i]);
    }
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const ModelReport& m : models) ms.push_back(m.to_json(true));
  nlohmann::json ps = nlohmann::json::array();
  for (const SievePlan& p : plans) ps.push_back(p.to_json());
  nlohmann::json cv = nlohmann::json::array();
  for (const CurvePoint& c : curve) {
    cv.push_back({{"sieves", c.sieves},
                  {"added_model", c.added_model},
                  {"metrics", precedence::to_json(c.metrics)}});
  }
  nlohmann::json g = nlohmann::json::array();
  for (CoarseLabel l : gold) g.push_back(to_string(l));
  return {{"schema", "precedence.report/1"},
          {"metric_convention",
           "micro P/R/F1 pooled over 'E1 precedes E2' and 'E2 precedes E1'; a "
           "positive prediction in the wrong direction counts as FP and FN"},
          {"config", config.to_json()},
          {"pairs", pairs},
          {"pair_ids", pair_ids},
          {"gold", g},
          {"models", ms},
          {"combined", combined.to_json(true)},
          {"plans", ps},
          {"curve", cv},
          {"best_single_model", best_single_model},
          {"combined_vs_best_p", combined_vs_best_p}};
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "Micro P/R/F1 over both precedence directions; " << config.folds
      << "-fold stratified CV, seed " << config.seed << ", " << pairs << " pairs, "
      << to_string(config.plan_mode) << " sieve plans\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %6s %6s %6s %6s %6s %6s\n", "model", "p", "r",
                "f1", "tp", "fp", "fn");
  out << line;
  const auto row = [&](const ModelReport& m) {
    std::snprintf(line, sizeof line, "%-14s %6.3f %6.3f %6.3f %6zu %6zu %6zu\n",
                  m.model_id.c_str(), m.metrics.precision, m.metrics.recall,
                  m.metrics.f1, m.metrics.tp, m.metrics.fp, m.metrics.fn);
    out << line;
  };
  for (const ModelReport& m : models) row(m);
  row(combined);
  if (!best_single_model.empty()) {
    std::snprintf(line, sizeof line,
                  "\ncombined vs %s: bootstrap p = %.4f (%d resamples)\n",
                  best_single_model.c_str(), combined_vs_best_p,
                  config.bootstrap_iterations);
    out << line;
  }
  if (!curve.empty()) {
    out << "\nsieve curve\n";
    for (const CurvePoint& c : curve) {
      std::snprintf(line, sizeof line, "%3zu  +%-14s p=%.3f r=%.3f f1=%.3f\n", c.sieves,
                    c.added_model.c_str(), c.metrics.precision, c.metrics.recall,
                    c.metrics.f1);
      out << line;
    }
  }
  return out.str();
}

std::string EvalReport::curve_csv() const {
  std::ostringstream out;
  out << "sieves,added_model,precision,recall,f1\n";
  for (const CurvePoint& c : curve) {
    char line[160];
    std::snprintf(line, sizeof line, "%zu,%s,%.6f,%.6f,%.6f\n", c.sieves,
                  c.added_model.c_str(), c.metrics.precision, c.metrics.recall,
                  c.metrics.f1);
    out << line;
  }
  return out.str();
}

std::vector<AnnotatedPair> labeled_pairs(std::span<const AnnotatedPair> pairs) {
  std::vector<AnnotatedPair> out;
  for (const AnnotatedPair& p : pairs) {
    if (!p.discarded && p.label) out.push_back(p);
  }
  return out;
}

std::vector<CurvePoint> prefix_curve(
    const SievePlan& plan,
    const std::map<std::string, std::vector<CoarseLabel>>& predictions,
    std::span<const CoarseLabel> gold) {
  std::vector<CurvePoint> out;
  SievePlan prefix;
  for (const SieveEntry& e : plan.entries) {
    prefix.entries.push_back(e);
    out.push_back({prefix.entries.size(), e.model_id,
                   micro_prf(combine_predictions(prefix, predictions), gold)});
  }
  return out;
}

namespace {

template <typename T>
std::vector<T> select(std::span<const T> items, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

struct FoldResult {
  std::vector<std::vector<CoarseLabel>> test;  // per model, aligned with test idx
  std::vector<std::vector<CoarseLabel>> dev;
  SievePlan plan;
};

std::vector<std::string> prior_order(const std::vector<ModelSpec>& specs) {
  std::vector<std::string> out;
  for (const ModelSpec& s : specs) {
    if (is_deterministic(s.kind)) out.push_back(s.id);
  }
  for (const ModelSpec& s : specs) {
    if (!is_deterministic(s.kind)) out.push_back(s.id);
  }
  return out;
}

// Inputs shared by every fold of one cross-validation run.
struct CvSetup {
  std::vector<std::string> ids;
  std::vector<std::string> prior;
  std::vector<AnnotatedPair> data;
  std::vector<CoarseLabel> gold;
  FoldAssignment folds;
};

CvSetup prepare_cv(std::span<const AnnotatedPair> dataset, const CvConfig& config) {
  if (config.folds < 3) {
    throw ConfigError("cross-validation needs at least 3 folds (test, dev, train)");
  }
  if (config.models.empty()) throw ConfigError("no models to evaluate");
  CvSetup setup;
  for (const ModelSpec& s : config.models) {
    if (std::find(setup.ids.begin(), setup.ids.end(), s.id) != setup.ids.end()) {
      throw ConfigError("duplicate model id '" + s.id + "'");
    }
    setup.ids.push_back(s.id);
  }
  setup.prior = prior_order(config.models);
  setup.data = labeled_pairs(dataset);
  setup.gold = gold_labels(setup.data);
  setup.folds = stratified_folds(setup.gold, config.folds, config.seed);
  return setup;
}

// Trains every model for test fold f; the dev fold is (f + 1) mod k.
FoldResult run_fold(const CvSetup& setup, const Corpus& corpus, const CvConfig& config,
                    int f) {
  const std::span<const AnnotatedPair> all(setup.data);
  const std::span<const CoarseLabel> gold(setup.gold);
  const int dev_fold = (f + 1) % config.folds;
  const std::vector<std::size_t> test_idx = setup.folds.members(f);
  const std::vector<std::size_t> dev_idx = setup.folds.members(dev_fold);
  const int excluded[] = {f, dev_fold};
  const std::vector<std::size_t> train_idx = setup.folds.complement(excluded);
  const std::vector<AnnotatedPair> train = select(all, train_idx);
  const std::vector<AnnotatedPair> dev = select(all, dev_idx);
  const std::vector<AnnotatedPair> test = select(all, test_idx);
  FoldResult r;
  const std::uint64_t fold_seed = util::mix_seed(config.seed, static_cast<std::uint64_t>(f));
  for (const ModelSpec& spec : config.models) {
    const auto model = train_model(spec, train, dev, corpus, fold_seed);
    r.dev.push_back(predict_all(*model, dev, corpus));
    r.test.push_back(predict_all(*model, test, corpus));
  }
  r.plan = rank_sieves(setup.ids, r.dev, select(gold, dev_idx), setup.prior);
  return r;
}

EvalReport assemble_report(const CvSetup& setup, const CvConfig& config,
                           const std::vector<FoldResult>& results) {
  const std::vector<std::string>& ids = setup.ids;
  const std::vector<std::string>& prior = setup.prior;
  const std::vector<AnnotatedPair>& data = setup.data;
  const FoldAssignment& folds = setup.folds;
  EvalReport report;
  report.config = config;
  report.pairs = data.size();
  for (const AnnotatedPair& p : data) report.pair_ids.push_back(p.pair_id);
  report.gold = setup.gold;
  const std::span<const CoarseLabel> gold(report.gold);
  const std::size_t n_models = config.models.size();

  // Pool test-fold predictions back into dataset order.
  std::map<std::string, std::vector<CoarseLabel>> pooled;
  for (std::size_t m = 0; m < n_models; ++m) {
    ModelReport mr;
    mr.model_id = ids[m];
    mr.predictions.assign(data.size(), CoarseLabel::Nil);
    for (int f = 0; f < config.folds; ++f) {
      const std::vector<std::size_t> test_idx = folds.members(f);
      const auto& preds = results[static_cast<std::size_t>(f)].test[m];
      for (std::size_t j = 0; j < test_idx.size(); ++j) {
        mr.predictions[test_idx[j]] = preds[j];
      }
      mr.per_fold.push_back(confusion(preds, select(gold, test_idx)));
      mr.confusion += mr.per_fold.back();
    }
    mr.metrics = micro_prf(mr.confusion);
    pooled[mr.model_id] = mr.predictions;
    report.models.push_back(std::move(mr));
  }

  ModelReport& combined = report.combined;
  combined.model_id = "combined";
  combined.predictions.assign(data.size(), CoarseLabel::Nil);
  if (config.plan_mode == PlanMode::Pooled) {
    std::vector<std::vector<CoarseLabel>> columns;
    for (const ModelReport& m : report.models) columns.push_back(m.predictions);
    const SievePlan plan = rank_sieves(ids, columns, gold, prior);
    report.plans.push_back(plan);
    combined.predictions = combine_predictions(plan, pooled);
    for (int f = 0; f < config.folds; ++f) {
      const std::vector<std::size_t> idx = folds.members(f);
      combined.per_fold.push_back(
          confusion(select(std::span<const CoarseLabel>(combined.predictions), idx),
                    select(gold, idx)));
      combined.confusion += combined.per_fold.back();
    }
    report.curve = prefix_curve(plan, pooled, gold);
  } else {
    // Each fold combines with its own plan; the curve pools prefixes of
    // equal length across folds.
    std::vector<std::vector<CoarseLabel>> prefix_preds(
        n_models, std::vector<CoarseLabel>(data.size(), CoarseLabel::Nil));
    std::vector<std::map<std::string, std::size_t>> added(n_models);
    for (int f = 0; f < config.folds; ++f) {
      const FoldResult& r = results[static_cast<std::size_t>(f)];
      report.plans.push_back(r.plan);
      const std::vector<std::size_t> test_idx = folds.members(f);
      std::map<std::string, std::vector<CoarseLabel>> fold_preds;
      for (std::size_t m = 0; m < n_models; ++m) fold_preds[ids[m]] = r.test[m];
      SievePlan prefix;
      for (std::size_t s = 0; s < r.plan.entries.size(); ++s) {
        prefix.entries.push_back(r.plan.entries[s]);
        ++added[s][r.plan.entries[s].model_id];
        const std::vector<CoarseLabel> out = combine_predictions(prefix, fold_preds);
        for (std::size_t j = 0; j < test_idx.size(); ++j) {
          prefix_preds[s][test_idx[j]] = out[j];
        }
      }
      const std::vector<CoarseLabel> out = combine_predictions(r.plan, fold_preds);
      for (std::size_t j = 0; j < test_idx.size(); ++j) {
        combined.predictions[test_idx[j]] = out[j];
      }
      combined.per_fold.push_back(confusion(out, select(gold, test_idx)));
      combined.confusion += combined.per_fold.back();
    }
    for (std::size_t s = 0; s < n_models; ++s) {
      // Most frequent model at this plan position; ties go to the smaller id.
      std::string common;
      std::size_t best = 0;
      for (const auto& [id, count] : added[s]) {
        if (count > best) {
          best = count;
          common = id;
        }
      }
      report.curve.push_back({s + 1, common, micro_prf(prefix_preds[s], gold)});
    }
  }
  combined.metrics = micro_prf(combined.confusion);

  const ModelReport* best = nullptr;
  for (const ModelReport& m : report.models) {
    if (best == nullptr || m.metrics.f1 > best->metrics.f1) best = &m;
  }
  report.best_single_model = best->model_id;
  if (!data.empty() && config.bootstrap_iterations > 0) {
    report.combined_vs_best_p =
        bootstrap_compare(combined.predictions, best->predictions, gold,
                          config.bootstrap_iterations, config.seed);
  }
  return report;
}

}  // namespace

EvalReport run_cv(std::span<const AnnotatedPair> dataset, const Corpus& corpus,
                  const CvConfig& config) {
  const CvSetup setup = prepare_cv(dataset, config);
  std::vector<FoldResult> results(static_cast<std::size_t>(config.folds));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int f = 0; f < config.folds; ++f) {
    try {
      results[static_cast<std::size_t>(f)] = run_fold(setup, corpus, config, f);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble_report(setup, config, results);
}

namespace reference {
EvalReport run_cv(std::span<const AnnotatedPair> dataset, const Corpus& corpus,
                  const CvConfig& config) {
  const CvSetup setup = prepare_cv(dataset, config);
  std::vector<FoldResult> results;
  for (int f = 0; f < config.folds; ++f) results.push_back(run_fold(setup, corpus, config, f));
  return assemble_report(setup, config, results);
}
}  // namespace reference

}  // namespace precedence
