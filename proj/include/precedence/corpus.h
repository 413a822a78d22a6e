#ifndef PRECEDENCE_CORPUS_H_
#define PRECEDENCE_CORPUS_H_

// Domain types for the precedence corpus: parsed documents, event mentions,
// annotated event pairs, and the readers/writers for their file formats.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace precedence {

// Half-open token range [start, end).
struct Span {
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
  bool empty() const { return end <= start; }
  bool contains(int index) const { return index >= start && index < end; }
  bool contains(const Span& other) const {
    return other.start >= start && other.end <= end;
  }

  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Token {
  int index = 0;
  std::string text;
  std::string lemma;
  std::string pos;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Edge {
  int governor = 0;
  int dependent = 0;
  std::string relation;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Labeled directed dependency graph over the tokens of one sentence.
class DependencyGraph {
 public:
  DependencyGraph() = default;
  // Throws StructuralError if an endpoint is out of range or a non-empty
  // graph has no root.
  DependencyGraph(std::size_t token_count, std::vector<Edge> edges,
                  std::set<int> roots);

  std::size_t size() const { return token_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::set<int>& roots() const { return roots_; }
  bool is_root(int token) const { return roots_.count(token) > 0; }

  // Indices into edges() of edges leaving / entering `token`.
  const std::vector<std::size_t>& outgoing(int token) const;
  const std::vector<std::size_t>& incoming(int token) const;

  // First governor of `token`, if any.
  std::optional<int> governor(int token) const;

  friend bool operator==(const DependencyGraph& a, const DependencyGraph& b) {
    return a.token_count_ == b.token_count_ && a.edges_ == b.edges_ &&
           a.roots_ == b.roots_;
  }

 private:
  std::size_t token_count_ = 0;
  std::vector<Edge> edges_;
  std::set<int> roots_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<std::vector<std::size_t>> incoming_;
};

struct Sentence {
  int index = 0;
  std::vector<Token> tokens;
  DependencyGraph graph;

  int size() const { return static_cast<int>(tokens.size()); }
  // Surface forms of `span`, joined by single spaces.
  std::string text(const Span& span) const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  // Throws ValidationError if `index` is out of range.
  const Sentence& sentence(int index) const;

  friend bool operator==(const Document&, const Document&) = default;
};

struct SentenceSpan {
  int sentence = 0;
  Span span;

  friend auto operator<=>(const SentenceSpan&, const SentenceSpan&) = default;
};

struct Argument {
  std::string role;        // lowercase, drawn from the declared role set
  Span span;               // in the mention's sentence
  std::string label;       // entity label, e.g. "Protein"
  bool resolved = false;   // resolved through coreference
  std::string grounding;   // grounded entity id, may be empty
  std::string event_id;    // id of the mention this argument denotes, if any
  std::string text;        // surface string, filled in by the loader

  friend bool operator==(const Argument&, const Argument&) = default;
};

struct EventMention {
  std::string id;
  std::string doc_id;
  int sentence = 0;
  Span trigger;
  Span span;
  std::vector<std::string> labels;  // most specific first
  std::vector<Argument> arguments;
  bool is_anaphor = false;
  std::optional<SentenceSpan> antecedent;

  const std::string& most_specific_label() const { return labels.front(); }

  friend bool operator==(const EventMention&, const EventMention&) = default;
};

// True when `a` occurs before `b` in text: sentence index, then trigger
// start, then trigger end, then id.
bool textually_before(const EventMention& a, const EventMention& b);

enum class RelationLabel {
  E1PrecedesE2,
  E2PrecedesE1,
  Equivalent,
  E1SpecifiesE2,
  E2SpecifiesE1,
  Other,
  None,
};

inline constexpr RelationLabel kRelationLabels[] = {
    RelationLabel::E1PrecedesE2,  RelationLabel::E2PrecedesE1,
    RelationLabel::Equivalent,    RelationLabel::E1SpecifiesE2,
    RelationLabel::E2SpecifiesE1, RelationLabel::Other,
    RelationLabel::None,
};

// Declaration order doubles as the prediction tie-break order.
enum class CoarseLabel {
  Nil = 0,
  E1PrecedesE2 = 1,
  E2PrecedesE1 = 2,
};

inline constexpr std::size_t kNumCoarseLabels = 3;
inline constexpr CoarseLabel kCoarseLabels[] = {
    CoarseLabel::Nil, CoarseLabel::E1PrecedesE2, CoarseLabel::E2PrecedesE1};

inline bool is_positive(CoarseLabel label) { return label != CoarseLabel::Nil; }
inline std::size_t class_index(CoarseLabel label) {
  return static_cast<std::size_t>(label);
}

// Wire strings: "E1 precedes E2", ..., "None".
std::string_view to_string(RelationLabel label);
RelationLabel parse_relation_label(std::string_view text);
std::string_view to_string(CoarseLabel label);
CoarseLabel parse_coarse_label(std::string_view text);

// Exchanges the roles of E1 and E2 for direction-bearing labels.
RelationLabel mirror(RelationLabel label);
CoarseLabel mirror(CoarseLabel label);

// Collapses the seven relation labels to the three precedence classes.
CoarseLabel reduce_label(RelationLabel label);

struct EventPair {
  std::string doc_id;
  EventMention e1;
  EventMention e2;
};

// Whole sentences first_sentence..last_sentence; spans[i] covers the tokens
// of sentence first_sentence + i.
struct EncompassingSpan {
  int first_sentence = 0;
  int last_sentence = 0;
  std::vector<Span> spans;

  friend bool operator==(const EncompassingSpan&,
                         const EncompassingSpan&) = default;
};

struct AnnotatedPair {
  std::string pair_id;
  EventPair events;
  std::optional<RelationLabel> label;  // nullopt for "unlabeled"
  EncompassingSpan encompassing;
  bool involves_coref = false;
  bool discarded = false;
  std::string note;

  const std::string& doc_id() const { return events.doc_id; }
  const EventMention& e1() const { return events.e1; }
  const EventMention& e2() const { return events.e2; }
};

inline constexpr std::string_view kUnlabeled = "unlabeled";

// Roles accepted by the mention loader.
std::set<std::string> default_roles();

// Documents plus the mentions extracted from them.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Document> documents, std::vector<EventMention> mentions);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<EventMention>& mentions() const { return mentions_; }

  const Document* find_document(std::string_view id) const;
  const EventMention* find_mention(std::string_view id) const;
  // Throws ValidationError when missing.
  const Document& document(std::string_view id) const;

  // Mentions of one document, in input order.
  std::vector<const EventMention*> mentions_of(std::string_view doc_id) const;

 private:
  std::vector<Document> documents_;
  std::vector<EventMention> mentions_;
  std::map<std::string, std::size_t, std::less<>> document_index_;
  std::map<std::string, std::size_t, std::less<>> mention_index_;
};

// CoNLL-U style reader. One Sentence per blank-line separated block; HEAD=0
// rows become roots. parse_documents splits on `# doc_id = <id>` comments.
Document parse_document(std::string_view conllu_text);
std::vector<Document> parse_documents(std::string_view conllu_text);
std::string write_conllu(const Document& document);

// Mention JSON. Every mention is validated against `documents`.
std::vector<EventMention> load_event_mentions(
    std::string_view json_text, std::span<const Document> documents,
    const std::set<std::string>& roles = default_roles());
nlohmann::json mentions_to_json(std::span<const EventMention> mentions);

// Annotation JSON. Pairs listing the later mention first are swapped and
// their label mirrored, so e1 always precedes e2 in text.
std::vector<AnnotatedPair> load_annotations(std::string_view json_text,
                                            const Corpus& corpus);
nlohmann::json export_annotations(std::span<const AnnotatedPair> pairs);

// Corpus bundle produced by `ingest`: documents and mentions in one JSON.
nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& bundle);

// Cohen's kappa over two aligned label sequences. Throws ValidationError on
// empty input or length mismatch.
double cohens_kappa(std::span<const int> labels_a, std::span<const int> labels_b);
double cohens_kappa(std::span<const RelationLabel> labels_a,
                    std::span<const RelationLabel> labels_b);
double cohens_kappa(std::span<const CoarseLabel> labels_a,
                    std::span<const CoarseLabel> labels_b);

}  // namespace precedence

#endif  // PRECEDENCE_CORPUS_H_
