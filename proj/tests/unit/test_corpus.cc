#include <gtest/gtest.h>

#include "json.hpp"
#include "precedence/corpus.h"
#include "precedence/errors.h"
#include "testing.h"

namespace precedence {
namespace {

using nlohmann::json;

const char* kTwoSentences =
    "# doc_id = d1\n"
    "1\tRas\t_\tNN\tNN\t_\t2\tnsubj\t_\t_\n"
    "2\tbinds\tbind\tVBZ\tVBZ\t_\t0\troot\t_\t_\n"
    "3\tRaf\t_\tNN\tNN\t_\t2\tdobj\t_\t_\n"
    "\n"
    "1\tIt\tit\tPRP\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tstops\tstop\tVBZ\tVBZ\t_\t0\troot\t_\t_\n"
    "\n";

TEST(Conllu, ParsesTokensAndGraph) {
  const Document d = parse_document(kTwoSentences);
  EXPECT_EQ(d.id, "d1");
  ASSERT_EQ(d.sentences.size(), 2u);
  const Sentence& s = d.sentences[0];
  ASSERT_EQ(s.size(), 3);
  EXPECT_EQ(s.tokens[0].lemma, "ras");  // "_" lemma falls back to the form
  EXPECT_EQ(s.tokens[1].lemma, "bind");
  EXPECT_EQ(s.tokens[1].pos, "VBZ");
  EXPECT_TRUE(s.graph.is_root(1));
  EXPECT_EQ(s.graph.governor(0), 1);
  EXPECT_EQ(s.graph.governor(1), std::nullopt);
  EXPECT_EQ(s.text({0, 3}), "Ras binds Raf");
  EXPECT_EQ(d.sentences[1].tokens[0].pos, "PRP");  // XPOS "_" falls back to UPOS
}

TEST(Conllu, RoundTripsThroughWriter) {
  const Document d = parse_document(kTwoSentences);
  const Document again = parse_document(write_conllu(d));
  EXPECT_EQ(d, again);
}

TEST(Conllu, SplitsDocuments) {
  const std::string text = std::string(kTwoSentences) +
                           "# doc_id = d2\n1\tX\tx\tNN\tNN\t_\t0\troot\t_\t_\n";
  const auto docs = parse_documents(text);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1].id, "d2");
  EXPECT_THROW(parse_document(text), ParseError);
}

TEST(Conllu, ReportsLineNumbers) {
  try {
    parse_document("# doc_id = d\n1\tA\ta\tNN\tNN\t_\t0\troot\t_\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_document("1\tA\ta\tNN\tNN\t_\tx\troot\t_\t_\n"), ParseError);
  EXPECT_THROW(parse_document("2\tA\ta\tNN\tNN\t_\t0\troot\t_\t_\n"), ParseError);
}

TEST(Conllu, RejectsDanglingHeadsAndRootlessSentences) {
  EXPECT_THROW(parse_document("1\tA\ta\tNN\tNN\t_\t5\tdep\t_\t_\n"), StructuralError);
  EXPECT_THROW(parse_document("1\tA\ta\tNN\tNN\t_\t2\tdep\t_\t_\n"
                              "2\tB\tb\tNN\tNN\t_\t1\tdep\t_\t_\n"),
               StructuralError);
}

std::vector<Document> docs() { return {parse_document(kTwoSentences)}; }

json mention(const std::string& id, int sentence, json trigger, json span) {
  return {{"id", id},       {"doc_id", "d1"}, {"sentence", sentence},
          {"trigger", trigger}, {"span", span},  {"labels", {"Binding"}},
          {"args", json::array({{{"role", "Theme"}, {"span", {0, 1}}, {"label", "Protein"},
                                 {"grounding", "uniprot:X"}}})}};
}

TEST(Mentions, LoadsAndFillsArgumentText) {
  const auto d = docs();
  const json j = json::array({mention("m1", 0, {1, 2}, {0, 3})});
  const auto ms = load_event_mentions(j.dump(), d);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].arguments[0].role, "theme");
  EXPECT_EQ(ms[0].arguments[0].text, "Ras");
  EXPECT_EQ(ms[0].most_specific_label(), "Binding");
  const auto again = load_event_mentions(mentions_to_json(ms).dump(), d);
  EXPECT_EQ(ms, again);
}

TEST(Mentions, ValidatesBoundsAndReferences) {
  const auto d = docs();
  const auto load = [&](json m) { return load_event_mentions(json::array({m}).dump(), d); };
  EXPECT_THROW(load(mention("m", 0, {1, 2}, {0, 9})), ValidationError);
  EXPECT_THROW(load(mention("m", 5, {1, 2}, {0, 3})), ValidationError);
  EXPECT_THROW(load(mention("m", 0, {0, 1}, {1, 3})), ValidationError);
  json unknown_doc = mention("m", 0, {1, 2}, {0, 3});
  unknown_doc["doc_id"] = "nope";
  EXPECT_THROW(load(unknown_doc), ValidationError);
  json bad_role = mention("m", 0, {1, 2}, {0, 3});
  bad_role["args"][0]["role"] = "catalyst";
  EXPECT_THROW(load(bad_role), ValidationError);
  EXPECT_THROW(load_event_mentions("[{", d), ParseError);
}

TEST(CorpusIndex, RejectsDuplicatesAndUnknownDocuments) {
  const auto d = docs();
  const auto ms = load_event_mentions(
      json::array({mention("m1", 0, {1, 2}, {0, 3})}).dump(), d);
  EXPECT_THROW(Corpus(d, {ms[0], ms[0]}), ValidationError);
  EXPECT_THROW(Corpus({d[0], d[0]}, {}), ValidationError);
  EventMention orphan = ms[0];
  orphan.doc_id = "elsewhere";
  EXPECT_THROW(Corpus(d, {orphan}), ValidationError);
}

Corpus two_mentions() {
  const auto d = docs();
  auto ms = load_event_mentions(json::array({mention("m1", 0, {1, 2}, {0, 3}),
                                             mention("m2", 1, {1, 2}, {0, 2})})
                                    .dump(),
                                d);
  return Corpus(d, std::move(ms));
}

json annotation(const std::string& e1, const std::string& e2, const std::string& label) {
  return {{"pair_id", "p"}, {"doc_id", "d1"}, {"e1_id", e1},
          {"e2_id", e2},    {"label", label}, {"coref", false}};
}

TEST(Annotations, SwapsIntoTextOrderAndMirrorsLabel) {
  const Corpus c = two_mentions();
  const auto pairs = load_annotations(
      json::array({annotation("m2", "m1", "E1 precedes E2")}).dump(), c);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].e1().id, "m1");
  EXPECT_EQ(pairs[0].label, RelationLabel::E2PrecedesE1);
  EXPECT_EQ(pairs[0].encompassing.first_sentence, 0);
  EXPECT_EQ(pairs[0].encompassing.last_sentence, 1);
  const auto again = load_annotations(export_annotations(pairs).dump(), c);
  EXPECT_EQ(again[0].label, pairs[0].label);
  EXPECT_EQ(again[0].e1().id, "m1");
}

TEST(Annotations, UnlabeledAndErrors) {
  const Corpus c = two_mentions();
  const auto pairs =
      load_annotations(json::array({annotation("m1", "m2", "unlabeled")}).dump(), c);
  EXPECT_FALSE(pairs[0].label.has_value());
  EXPECT_THROW(load_annotations(json::array({annotation("m1", "m9", "None")}).dump(), c),
               ValidationError);
  EXPECT_THROW(load_annotations(json::array({annotation("m1", "m2", "Before")}).dump(), c),
               ValidationError);
  EXPECT_THROW(load_annotations(json::array({annotation("m1", "m2", "None"),
                                             annotation("m1", "m2", "None")})
                                    .dump(),
                                c),
               ValidationError);
}

TEST(Bundle, RoundTrip) {
  const Corpus c = two_mentions();
  const Corpus again = corpus_from_json(corpus_to_json(c));
  EXPECT_EQ(again.documents(), c.documents());
  EXPECT_EQ(again.mentions(), c.mentions());
}

TEST(Labels, WireStringsMirrorAndReduction) {
  for (RelationLabel l : kRelationLabels) {
    EXPECT_EQ(parse_relation_label(to_string(l)), l);
    EXPECT_EQ(mirror(mirror(l)), l);
    EXPECT_EQ(reduce_label(mirror(l)), mirror(reduce_label(l)));
  }
  EXPECT_EQ(reduce_label(RelationLabel::E1PrecedesE2), CoarseLabel::E1PrecedesE2);
  EXPECT_EQ(reduce_label(RelationLabel::E2PrecedesE1), CoarseLabel::E2PrecedesE1);
  for (RelationLabel l : {RelationLabel::Equivalent, RelationLabel::E1SpecifiesE2,
                          RelationLabel::E2SpecifiesE1, RelationLabel::Other,
                          RelationLabel::None}) {
    EXPECT_EQ(reduce_label(l), CoarseLabel::Nil);
  }
  EXPECT_EQ(mirror(RelationLabel::E1SpecifiesE2), RelationLabel::E2SpecifiesE1);
  EXPECT_EQ(mirror(RelationLabel::Equivalent), RelationLabel::Equivalent);
  EXPECT_THROW(parse_relation_label("precedes"), ValidationError);
}

TEST(Kappa, HandComputedCases) {
  // p_o = 0.9, p_e = 0.5*0.6 + 0.5*0.4 = 0.5.
  const std::vector<int> a = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const std::vector<int> b = {1, 1, 1, 1, 1, 0, 0, 0, 0, 1};
  EXPECT_NEAR(cohens_kappa(a, b), 0.8, 1e-12);
  EXPECT_NEAR(cohens_kappa(a, a), 1.0, 1e-12);
  const std::vector<int> c = {1, 1, 0, 0};
  const std::vector<int> d = {1, 0, 1, 0};
  EXPECT_NEAR(cohens_kappa(c, d), 0.0, 1e-12);
  EXPECT_THROW(cohens_kappa(std::vector<int>{}, std::vector<int>{}), ValidationError);
  EXPECT_THROW(cohens_kappa(a, c), ValidationError);
}

TEST(Kappa, SymmetricAndBoundedOnRandomInput) {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::uniform_int(rng, 1, 40);
    std::vector<RelationLabel> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(testing::random_relation(rng));
      b.push_back(testing::uniform_int(rng, 0, 2) == 0 ? testing::random_relation(rng) : a.back());
    }
    const double k = cohens_kappa(a, b);
    EXPECT_DOUBLE_EQ(k, cohens_kappa(b, a));
    EXPECT_LE(k, 1.0 + 1e-12);
    EXPECT_GE(k, -1.0 - 1e-12);
  }
}

}  // namespace
}  // namespace precedence
