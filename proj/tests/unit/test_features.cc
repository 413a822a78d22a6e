#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "precedence/candidates.h"
#include "precedence/errors.h"
#include "precedence/features.h"
#include "precedence/synthetic.h"
#include "testing.h"

namespace precedence {
namespace {

using testing::make_annotated;
using testing::make_pair;
using testing::example_corpus;

bool contains(const FeatureSet& set, const std::string& feature) {
  return std::find(set.begin(), set.end(), feature) != set.end();
}

std::size_t count_prefix(const FeatureSet& set, const std::string& prefix) {
  return static_cast<std::size_t>(std::count_if(
      set.begin(), set.end(),
      [&](const std::string& f) { return f.rfind(prefix, 0) == 0; }));
}

const Document& doc(const std::string& id) { return example_corpus().document(id); }

TEST(EventFeatures, LabelTriggerAndNgrams) {
  const EventPair p = make_pair(example_corpus(), "ex2.e1", "ex2.e2");
  const FeatureSet f = event_features(p.e1, doc("ex2"), "event1:", &p.e2);
  EXPECT_TRUE(contains(f, "event1:label=Ubiquitination"));
  EXPECT_TRUE(contains(f, "event1:trigger=ubiquitination"));
  EXPECT_TRUE(contains(f, "event1:trigger+label=ubiquitination_Ubiquitination"));
  EXPECT_TRUE(contains(f, "event1:ent-ngram=the"));
  EXPECT_TRUE(contains(f, "event1:ent-ngram=PROTEIN"));
  EXPECT_TRUE(contains(f, "event1:ent-ngram=ubiquitination of PROTEIN"));
  EXPECT_TRUE(contains(f, "event1:role-ngram=of THEME"));
  // Four tokens: 4 unigrams, 3 bigrams, 2 trigrams.
  EXPECT_EQ(count_prefix(f, "event1:ent-ngram="), 9u);
  EXPECT_EQ(count_prefix(f, "event1:role-ngram="), 9u);
  EXPECT_FALSE(contains(f, "event1:ent-ngram=a"));
}

TEST(EventFeatures, ArgumentPaths) {
  const EventPair p = make_pair(example_corpus(), "ex2.e1", "ex2.e2");
  const FeatureSet f = event_features(p.e1, doc("ex2"), "event1:", &p.e2);
  EXPECT_TRUE(contains(f, "event1:arg-path=>prep_of"));
  EXPECT_TRUE(contains(f, "event1:arg-path-lemmas=>prep_of:a"));
  EXPECT_TRUE(contains(f, "event1:arg-path-role=ubiquitination >prep_of THEME"));
  EXPECT_TRUE(contains(f, "event1:arg-path-label=ubiquitination >prep_of Protein"));
}

TEST(EventFeatures, SharedParticipantMarked) {
  const EventPair p = make_pair(example_corpus(), "ex5.e1", "ex5.e2");
  const FeatureSet with = event_features(p.e1, doc("ex5"), "event1:", &p.e2);
  EXPECT_TRUE(contains(with, "event1:ent-ngram=bind SHARED"));
  EXPECT_FALSE(contains(with, "event1:ent-ngram=bind PROTEIN"));
  const FeatureSet alone = event_features(p.e1, doc("ex5"), "event1:");
  EXPECT_TRUE(contains(alone, "event1:ent-ngram=bind PROTEIN"));
}

TEST(EventFeatures, NgramWindowClipsLongSpans) {
  Document d;
  d.id = "long";
  Sentence s;
  s.index = 0;
  const int n = 40;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    const std::string w = "w" + std::to_string(i);
    s.tokens.push_back({i, w, w, "NN"});
    if (i > 0) edges.push_back({0, i, "dep"});
  }
  s.graph = DependencyGraph(static_cast<std::size_t>(n), std::move(edges), {0});
  d.sentences.push_back(s);
  EventMention m;
  m.id = "long.e1";
  m.doc_id = "long";
  m.trigger = {30, 31};
  m.span = {0, n};
  m.labels = {"Binding"};
  const FeatureSet f = event_features(m, d, "event1:");
  EXPECT_EQ(count_prefix(f, "event1:ent-ngram="),
            static_cast<std::size_t>(kNgramWindow + (kNgramWindow - 1) + (kNgramWindow - 2)));
  EXPECT_TRUE(contains(f, "event1:ent-ngram=w20"));
  EXPECT_TRUE(contains(f, "event1:ent-ngram=w39"));
  EXPECT_FALSE(contains(f, "event1:ent-ngram=w19"));
  EXPECT_EQ(count_prefix(f, "event1:role-ngram="), 0u);
}

TEST(SurfaceFeatures, TokensBetweenSpans) {
  const EventPair p = make_pair(example_corpus(), "ex2.e1", "ex2.e2");
  const FeatureSet f = surface_features(p, doc("ex2"));
  const std::set<std::string> got(f.begin(), f.end());
  const std::set<std::string> want = {
      "between:is",        "between:followed", "between:by",
      "between:is followed", "between:followed by", "between:is followed by"};
  EXPECT_EQ(got, want);
  // Order of e1 and e2 does not matter.
  const EventPair swapped{p.doc_id, p.e2, p.e1};
  const FeatureSet g = surface_features(swapped, doc("ex2"));
  EXPECT_EQ(std::set<std::string>(g.begin(), g.end()), want);
}

TEST(SurfaceFeatures, SentenceBoundaryMarker) {
  const EventPair p = make_pair(example_corpus(), "ex6.e1", "ex6.e3");
  const FeatureSet f = surface_features(p, doc("ex6"));
  EXPECT_EQ(count_prefix(f, "between:<S>"), 3u);
}

TEST(SyntaxFeatures, TriggerToTriggerPath) {
  const EventPair p = make_pair(example_corpus(), "ex2.e1", "ex2.e2");
  const FeatureSet f = syntax_features(p, doc("ex2"));
  EXPECT_TRUE(contains(f, "path:t2t=<nsubjpass >prep_by"));
  EXPECT_TRUE(contains(f, "path:t2t-lemmas=<nsubjpass:follow >prep_by:phosphorylation"));
  EXPECT_TRUE(contains(f, "path:dist=2"));
  EXPECT_EQ(count_prefix(f, "path:shortest="), 1u);
  EXPECT_TRUE(contains(f, "path:shortest-dist=2"));
  EXPECT_EQ(count_prefix(f, "path:cross"), 0u);
}

TEST(SyntaxFeatures, CrossSentencePathsFromRoots) {
  const EventPair p = make_pair(example_corpus(), "ex6.e1", "ex6.e3");
  const FeatureSet f = syntax_features(p, doc("ex6"));
  EXPECT_TRUE(contains(f, "path:cross=root >nsubj + root >prep_to >prep_such_as >rcmod"));
  EXPECT_EQ(count_prefix(f, "path:cross-lemmas="), 1u);
  EXPECT_EQ(count_prefix(f, "path:t2t"), 0u);
}

TEST(CorefFeatures, ResolvedArgumentAndAnaphor) {
  const EventPair p = make_pair(example_corpus(), "ex5.e1", "ex5.e2");
  const FeatureSet f = coref_features(p, doc("ex5"));
  EXPECT_EQ(f, (FeatureSet{"coref:event2:THEME:resolved"}));

  EventPair anaphoric = p;
  anaphoric.e1.is_anaphor = true;
  const FeatureSet g = coref_features(anaphoric, doc("ex5"));
  EXPECT_TRUE(contains(g, "coref:event1:is_anaphor"));
  EXPECT_TRUE(contains(g, "coref-anaphor:event1:label=Binding"));
  EXPECT_TRUE(contains(g, "coref-anaphor:event1:ent-ngram=bind SHARED"));

  const EventPair plain = make_pair(example_corpus(), "ex2.e1", "ex2.e2");
  EXPECT_TRUE(coref_features(plain, doc("ex2")).empty());
}

TEST(PairFeatures, ConcatenatesFamilies) {
  const EventPair p = make_pair(example_corpus(), "ex2.e1", "ex2.e2");
  const FeatureSet all = pair_features(p, doc("ex2"));
  std::size_t parts = 0;
  for (const FeatureSet& part :
       {event_features(p.e1, doc("ex2"), "event1:", &p.e2),
        event_features(p.e2, doc("ex2"), "event2:", &p.e1),
        surface_features(p, doc("ex2")), syntax_features(p, doc("ex2")),
        coref_features(p, doc("ex2"))}) {
    parts += part.size();
  }
  EXPECT_EQ(all.size(), parts);
  EXPECT_TRUE(contains(all, "event2:label=Phosphorylation"));
}

TEST(ExtractFeatures, ParallelMatchesReference) {
  SyntheticConfig config;
  config.documents = 12;
  config.seed = 5;
  const SyntheticCorpus s = generate_synthetic(config);
  ASSERT_FALSE(s.pairs.empty());
  const auto parallel = extract_features(s.pairs, s.corpus);
  const auto serial = reference::extract_features(s.pairs, s.corpus);
  EXPECT_EQ(parallel, serial);
  EXPECT_EQ(extract_features(s.pairs, s.corpus), parallel);
}

TEST(ExtractFeatures, UnknownDocumentPropagates) {
  AnnotatedPair p = make_annotated(example_corpus(), "ex2.e1", "ex2.e2");
  p.events.doc_id = "missing";
  p.events.e1.doc_id = "missing";
  p.events.e2.doc_id = "missing";
  const std::vector<AnnotatedPair> pairs(20, p);
  EXPECT_THROW(extract_features(pairs, example_corpus()), Error);
}

TEST(FeatureIndex, FirstSeenColumnsAndFreeze) {
  FeatureIndex index;
  EXPECT_EQ(index.add("b"), 0);
  EXPECT_EQ(index.add("a"), 1);
  EXPECT_EQ(index.add("b"), 0);
  EXPECT_EQ(index.size(), 2u);
  EXPECT_EQ(index.feature(1), "a");
  EXPECT_THROW(vectorize(FeatureSet{"a"}, index), UsageError);
  index.freeze();
  EXPECT_EQ(index.add("a"), 1);
  EXPECT_THROW(index.add("c"), UsageError);
  EXPECT_EQ(index.find("c"), std::nullopt);
}

TEST(FeatureIndex, SaveLoadRoundTrip) {
  const std::vector<FeatureSet> sets = {{"z", "y", "z"}, {"x", "y"}};
  const FeatureIndex index = build_index(sets);
  std::ostringstream out;
  index.save(out);
  EXPECT_EQ(out.str(), "x\t2\ny\t1\nz\t0\n");
  std::istringstream in(out.str());
  const FeatureIndex loaded = FeatureIndex::load(in);
  EXPECT_TRUE(loaded.frozen());
  ASSERT_EQ(loaded.size(), 3u);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(loaded.feature(c), index.feature(c));

  std::istringstream gap("a\t0\nb\t2\n");
  EXPECT_THROW(FeatureIndex::load(gap), ParseError);
  std::istringstream notab("a 0\n");
  EXPECT_THROW(FeatureIndex::load(notab), ParseError);
}

TEST(Vectorize, SortedUniqueKnownColumns) {
  const FeatureIndex index = build_index(std::vector<FeatureSet>{{"c", "b", "a"}});
  const FeatureVector v =
      vectorize(FeatureSet{"a", "unseen", "c", "a"}, index, CoarseLabel::E2PrecedesE1);
  EXPECT_EQ(v.indices, (std::vector<int>{0, 2}));
  EXPECT_EQ(v.label, CoarseLabel::E2PrecedesE1);
  EXPECT_TRUE(v.has(2));
  EXPECT_FALSE(v.has(1));
}

}  // namespace
}  // namespace precedence
