#include "precedence/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

#include "precedence/candidates.h"
#include "precedence/errors.h"
#include "util.h"

namespace precedence {

using nlohmann::json;

DependencyGraph::DependencyGraph(std::size_t token_count,
                                 std::vector<Edge> edges, std::set<int> roots)
    : token_count_(token_count),
      edges_(std::move(edges)),
      roots_(std::move(roots)),
      outgoing_(token_count),
      incoming_(token_count) {
  const auto valid = [&](int i) {
    return i >= 0 && static_cast<std::size_t>(i) < token_count_;
  };
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (!valid(edge.governor) || !valid(edge.dependent)) {
      throw StructuralError("dependency edge " + std::to_string(edge.governor) +
                            "->" + std::to_string(edge.dependent) +
                            " outside sentence of " +
                            std::to_string(token_count_) + " tokens");
    }
    outgoing_[edge.governor].push_back(e);
    incoming_[edge.dependent].push_back(e);
  }
  for (int root : roots_) {
    if (!valid(root)) {
      throw StructuralError("root " + std::to_string(root) + " out of range");
    }
  }
  if (token_count_ > 0 && roots_.empty()) {
    throw StructuralError("non-empty sentence without a root");
  }
}

const std::vector<std::size_t>& DependencyGraph::outgoing(int token) const {
  return outgoing_.at(static_cast<std::size_t>(token));
}

const std::vector<std::size_t>& DependencyGraph::incoming(int token) const {
  return incoming_.at(static_cast<std::size_t>(token));
}

std::optional<int> DependencyGraph::governor(int token) const {
  const auto& in = incoming(token);
  if (in.empty()) return std::nullopt;
  return edges_[in.front()].governor;
}

std::string Sentence::text(const Span& span) const {
  std::string out;
  for (int i = std::max(0, span.start); i < std::min(span.end, size()); ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[static_cast<std::size_t>(i)].text;
  }
  return out;
}

const Sentence& Document::sentence(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= sentences.size()) {
    throw ValidationError("sentence " + std::to_string(index) +
                          " out of range in document '" + id + "'");
  }
  return sentences[static_cast<std::size_t>(index)];
}

bool textually_before(const EventMention& a, const EventMention& b) {
  return std::tie(a.sentence, a.trigger.start, a.trigger.end, a.id) <
         std::tie(b.sentence, b.trigger.start, b.trigger.end, b.id);
}

// ---------------------------------------------------------------------------
// Labels

std::string_view to_string(RelationLabel label) {
  switch (label) {
    case RelationLabel::E1PrecedesE2: return "E1 precedes E2";
    case RelationLabel::E2PrecedesE1: return "E2 precedes E1";
    case RelationLabel::Equivalent: return "Equivalent";
    case RelationLabel::E1SpecifiesE2: return "E1 specifies E2";
    case RelationLabel::E2SpecifiesE1: return "E2 specifies E1";
    case RelationLabel::Other: return "Other";
    case RelationLabel::None: return "None";
  }
  return "None";
}

RelationLabel parse_relation_label(std::string_view text) {
  for (RelationLabel label : kRelationLabels) {
    if (util::iequals(text, to_string(label))) return label;
  }
  throw ValidationError("unknown relation label '" + std::string(text) + "'");
}

std::string_view to_string(CoarseLabel label) {
  switch (label) {
    case CoarseLabel::Nil: return "Nil";
    case CoarseLabel::E1PrecedesE2: return "E1 precedes E2";
    case CoarseLabel::E2PrecedesE1: return "E2 precedes E1";
  }
  return "Nil";
}

CoarseLabel parse_coarse_label(std::string_view text) {
  for (CoarseLabel label : kCoarseLabels) {
    if (util::iequals(text, to_string(label))) return label;
  }
  throw ValidationError("unknown coarse label '" + std::string(text) + "'");
}

RelationLabel mirror(RelationLabel label) {
  switch (label) {
    case RelationLabel::E1PrecedesE2: return RelationLabel::E2PrecedesE1;
    case RelationLabel::E2PrecedesE1: return RelationLabel::E1PrecedesE2;
    case RelationLabel::E1SpecifiesE2: return RelationLabel::E2SpecifiesE1;
    case RelationLabel::E2SpecifiesE1: return RelationLabel::E1SpecifiesE2;
    default: return label;
  }
}

CoarseLabel mirror(CoarseLabel label) {
  switch (label) {
    case CoarseLabel::E1PrecedesE2: return CoarseLabel::E2PrecedesE1;
    case CoarseLabel::E2PrecedesE1: return CoarseLabel::E1PrecedesE2;
    default: return label;
  }
}

CoarseLabel reduce_label(RelationLabel label) {
  switch (label) {
    case RelationLabel::E1PrecedesE2: return CoarseLabel::E1PrecedesE2;
    case RelationLabel::E2PrecedesE1: return CoarseLabel::E2PrecedesE1;
    default: return CoarseLabel::Nil;
  }
}

std::set<std::string> default_roles() {
  return {"theme",  "controller",  "controlled", "site",
          "cause",  "destination", "source",     "product"};
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<Document> documents,
               std::vector<EventMention> mentions)
    : documents_(std::move(documents)), mentions_(std::move(mentions)) {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (!document_index_.emplace(documents_[i].id, i).second) {
      throw ValidationError("duplicate document id '" + documents_[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < mentions_.size(); ++i) {
    if (!mention_index_.emplace(mentions_[i].id, i).second) {
      throw ValidationError("duplicate mention id '" + mentions_[i].id + "'");
    }
    if (!document_index_.count(mentions_[i].doc_id)) {
      throw ValidationError("mention '" + mentions_[i].id +
                            "' references unknown document '" +
                            mentions_[i].doc_id + "'");
    }
  }
}

const Document* Corpus::find_document(std::string_view id) const {
  const auto it = document_index_.find(id);
  return it == document_index_.end() ? nullptr : &documents_[it->second];
}

const EventMention* Corpus::find_mention(std::string_view id) const {
  const auto it = mention_index_.find(id);
  return it == mention_index_.end() ? nullptr : &mentions_[it->second];
}

const Document& Corpus::document(std::string_view id) const {
  const Document* doc = find_document(id);
  if (doc == nullptr) {
    throw ValidationError("unknown document '" + std::string(id) + "'");
  }
  return *doc;
}

std::vector<const EventMention*> Corpus::mentions_of(
    std::string_view doc_id) const {
  std::vector<const EventMention*> out;
  for (const EventMention& m : mentions_) {
    if (m.doc_id == doc_id) out.push_back(&m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CoNLL-U

namespace {

int parse_int(std::string_view field, std::size_t line, const char* what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string("non-integer ") + what + " '" +
                         std::string(field) + "'",
                     line);
  }
  return value;
}

struct PendingToken {
  Token token;
  int head = 0;
  std::string relation;
  std::size_t line = 0;
};

Sentence finish_sentence(std::vector<PendingToken>& rows, int index) {
  Sentence sentence;
  sentence.index = index;
  std::vector<Edge> edges;
  std::set<int> roots;
  const int n = static_cast<int>(rows.size());
  for (PendingToken& row : rows) {
    if (row.head < 0 || row.head > n) {
      throw StructuralError("line " + std::to_string(row.line) +
                            ": head " + std::to_string(row.head) +
                            " outside sentence of " + std::to_string(n) +
                            " tokens");
    }
    if (row.head == 0) {
      roots.insert(row.token.index);
    } else {
      edges.push_back({row.head - 1, row.token.index, row.relation});
    }
    sentence.tokens.push_back(std::move(row.token));
  }
  sentence.graph = DependencyGraph(rows.size(), std::move(edges),
                                   std::move(roots));
  rows.clear();
  return sentence;
}

}  // namespace

std::vector<Document> parse_documents(std::string_view text) {
  std::vector<Document> documents;
  std::vector<PendingToken> rows;
  bool saw_doc_id = false;

  const auto current = [&]() -> Document& {
    if (documents.empty()) documents.emplace_back();
    return documents.back();
  };
  const auto flush = [&] {
    if (rows.empty()) return;
    Document& doc = current();
    doc.sentences.push_back(
        finish_sentence(rows, static_cast<int>(doc.sentences.size())));
  };

  std::size_t line_number = 0;
  for (std::string_view raw : util::split(text, '\n')) {
    ++line_number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::string_view line = util::trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      const std::string_view body = util::trim(line.substr(1));
      if (body.rfind("doc_id", 0) == 0) {
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
          throw ParseError("malformed doc_id comment", line_number);
        }
        flush();
        documents.emplace_back();
        documents.back().id = std::string(util::trim(body.substr(eq + 1)));
        saw_doc_id = true;
      }
      continue;
    }
    std::vector<std::string_view> fields = util::split(raw, '\t');
    if (fields.size() == 1) fields = util::split_whitespace(raw);
    if (fields.size() != 10) {
      throw ParseError("expected 10 columns, found " +
                           std::to_string(fields.size()),
                       line_number);
    }
    // Multiword ranges and empty nodes carry no graph information.
    if (fields[0].find_first_of("-.") != std::string_view::npos) continue;

    PendingToken row;
    row.line = line_number;
    const int id = parse_int(fields[0], line_number, "ID");
    if (id != static_cast<int>(rows.size()) + 1) {
      throw ParseError("token ID " + std::string(fields[0]) +
                           " breaks contiguity",
                       line_number);
    }
    row.token.index = id - 1;
    row.token.text = std::string(fields[1]);
    if (row.token.text.empty()) throw ParseError("empty FORM", line_number);
    row.token.lemma = fields[2] == "_" ? util::lowercase(fields[1])
                                       : std::string(fields[2]);
    row.token.pos = fields[4] == "_" ? std::string(fields[3])
                                     : std::string(fields[4]);
    row.head = parse_int(fields[6], line_number, "HEAD");
    row.relation = std::string(fields[7]);
    rows.push_back(std::move(row));
  }
  flush();
  if (!saw_doc_id && documents.size() == 1 && documents.front().id.empty()) {
    documents.front().id = "doc";
  }
  return documents;
}

Document parse_document(std::string_view text) {
  std::vector<Document> documents = parse_documents(text);
  if (documents.empty()) return Document{};
  if (documents.size() > 1) {
    throw ParseError("expected a single document, found " +
                     std::to_string(documents.size()));
  }
  return std::move(documents.front());
}

std::string write_conllu(const Document& document) {
  std::string out = "# doc_id = " + document.id + "\n";
  for (const Sentence& sentence : document.sentences) {
    std::vector<int> heads(sentence.tokens.size(), 0);
    std::vector<std::string> relations(sentence.tokens.size(), "root");
    for (const Edge& edge : sentence.graph.edges()) {
      heads[edge.dependent] = edge.governor + 1;
      relations[edge.dependent] = edge.relation;
    }
    for (const Token& token : sentence.tokens) {
      const auto i = static_cast<std::size_t>(token.index);
      out += std::to_string(token.index + 1) + '\t' + token.text + '\t' +
             token.lemma + "\t_\t" + token.pos + "\t_\t" +
             std::to_string(heads[i]) + '\t' + relations[i] + "\t_\t_\n";
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mention JSON

namespace {

Span span_from_json(const json& value, const std::string& what) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw ValidationError(what + ": span must be [start, end]");
  }
  return Span{value[0].get<int>(), value[1].get<int>()};
}

json span_to_json(const Span& span) { return json::array({span.start, span.end}); }

void check_span(const Span& span, const Sentence& sentence,
                const std::string& what) {
  if (span.start < 0 || span.end > sentence.size() || span.start >= span.end) {
    throw ValidationError(what + ": span [" + std::to_string(span.start) + ", " +
                          std::to_string(span.end) + ") out of bounds for " +
                          std::to_string(sentence.size()) + " tokens");
  }
}

template <typename T>
T field(const json& object, const char* key, const std::string& what) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw ValidationError(what + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(what + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const json& object, const char* key, T fallback) {
  const auto it = object.find(key);
  if (it == object.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key +
                          "' has the wrong type");
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::vector<EventMention> load_event_mentions(
    std::string_view json_text, std::span<const Document> documents,
    const std::set<std::string>& roles) {
  const json root = parse_json(json_text);
  if (!root.is_array()) throw ValidationError("mention JSON must be an array");

  std::map<std::string, const Document*, std::less<>> by_id;
  for (const Document& doc : documents) by_id.emplace(doc.id, &doc);

  std::vector<EventMention> mentions;
  mentions.reserve(root.size());
  for (const json& item : root) {
    EventMention m;
    m.id = field<std::string>(item, "id", "mention");
    const std::string what = "mention '" + m.id + "'";
    m.doc_id = field<std::string>(item, "doc_id", what);
    const auto doc_it = by_id.find(m.doc_id);
    if (doc_it == by_id.end()) {
      throw ValidationError(what + ": unknown doc_id '" + m.doc_id + "'");
    }
    const Document& doc = *doc_it->second;
    m.sentence = field<int>(item, "sentence", what);
    if (m.sentence < 0 ||
        static_cast<std::size_t>(m.sentence) >= doc.sentences.size()) {
      throw ValidationError(what + ": sentence " + std::to_string(m.sentence) +
                            " out of bounds");
    }
    const Sentence& sentence = doc.sentences[static_cast<std::size_t>(m.sentence)];
    m.trigger = span_from_json(field<json>(item, "trigger", what), what);
    m.span = span_from_json(field<json>(item, "span", what), what);
    check_span(m.trigger, sentence, what + " trigger");
    check_span(m.span, sentence, what + " span");
    if (!m.span.contains(m.trigger)) {
      throw ValidationError(what + ": trigger outside mention span");
    }
    m.labels = field<std::vector<std::string>>(item, "labels", what);
    if (m.labels.empty()) throw ValidationError(what + ": empty label list");

    for (const json& arg : optional_field<json>(item, "args", json::array())) {
      Argument a;
      a.role = util::lowercase(field<std::string>(arg, "role", what));
      if (!roles.count(a.role)) {
        throw ValidationError(what + ": unknown role '" + a.role + "'");
      }
      a.span = span_from_json(field<json>(arg, "span", what), what);
      check_span(a.span, sentence, what + " argument");
      a.label = optional_field<std::string>(arg, "label", "");
      a.resolved = optional_field<bool>(arg, "resolved", false);
      a.grounding = optional_field<std::string>(arg, "grounding", "");
      a.event_id = optional_field<std::string>(arg, "event_id", "");
      a.text = sentence.text(a.span);
      m.arguments.push_back(std::move(a));
    }
    m.is_anaphor = optional_field<bool>(item, "is_anaphor", false);
    const json antecedent = optional_field<json>(item, "antecedent", json());
    if (!antecedent.is_null()) {
      SentenceSpan ante;
      ante.sentence = field<int>(antecedent, "sentence", what + " antecedent");
      if (ante.sentence < 0 ||
          static_cast<std::size_t>(ante.sentence) >= doc.sentences.size()) {
        throw ValidationError(what + ": antecedent sentence out of bounds");
      }
      ante.span = span_from_json(field<json>(antecedent, "span", what), what);
      check_span(ante.span, doc.sentences[static_cast<std::size_t>(ante.sentence)],
                 what + " antecedent");
      m.antecedent = ante;
    }
    mentions.push_back(std::move(m));
  }
  return mentions;
}

json mentions_to_json(std::span<const EventMention> mentions) {
  json out = json::array();
  for (const EventMention& m : mentions) {
    json args = json::array();
    for (const Argument& a : m.arguments) {
      json arg = {{"role", a.role},
                  {"span", span_to_json(a.span)},
                  {"label", a.label},
                  {"resolved", a.resolved}};
      if (!a.grounding.empty()) arg["grounding"] = a.grounding;
      if (!a.event_id.empty()) arg["event_id"] = a.event_id;
      args.push_back(std::move(arg));
    }
    json item = {{"id", m.id},
                 {"doc_id", m.doc_id},
                 {"sentence", m.sentence},
                 {"trigger", span_to_json(m.trigger)},
                 {"span", span_to_json(m.span)},
                 {"labels", m.labels},
                 {"args", std::move(args)},
                 {"is_anaphor", m.is_anaphor},
                 {"antecedent", nullptr}};
    if (m.antecedent) {
      item["antecedent"] = {{"sentence", m.antecedent->sentence},
                            {"span", span_to_json(m.antecedent->span)}};
    }
    out.push_back(std::move(item));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation JSON

std::vector<AnnotatedPair> load_annotations(std::string_view json_text,
                                            const Corpus& corpus) {
  const json root = parse_json(json_text);
  if (!root.is_array()) throw ValidationError("annotation JSON must be an array");

  std::set<std::string> seen;
  std::vector<AnnotatedPair> pairs;
  pairs.reserve(root.size());
  for (const json& item : root) {
    AnnotatedPair pair;
    pair.pair_id = field<std::string>(item, "pair_id", "annotation");
    const std::string what = "pair '" + pair.pair_id + "'";
    if (!seen.insert(pair.pair_id).second) {
      throw ValidationError(what + ": duplicate pair_id");
    }
    const auto doc_id = field<std::string>(item, "doc_id", what);
    const Document& doc = corpus.document(doc_id);
    const auto resolve = [&](const char* key) -> const EventMention& {
      const auto id = field<std::string>(item, key, what);
      const EventMention* m = corpus.find_mention(id);
      if (m == nullptr) {
        throw ValidationError(what + ": unresolvable mention '" + id + "'");
      }
      if (m->doc_id != doc_id) {
        throw ValidationError(what + ": mention '" + id +
                              "' belongs to another document");
      }
      return *m;
    };
    const EventMention& first = resolve("e1_id");
    const EventMention& second = resolve("e2_id");
    const auto label_text = field<std::string>(item, "label", what);
    if (!util::iequals(label_text, kUnlabeled)) {
      pair.label = parse_relation_label(label_text);
    }
    pair.events.doc_id = doc_id;
    if (textually_before(second, first)) {
      pair.events.e1 = second;
      pair.events.e2 = first;
      if (pair.label) pair.label = mirror(*pair.label);
    } else {
      pair.events.e1 = first;
      pair.events.e2 = second;
    }
    pair.involves_coref = optional_field<bool>(item, "coref", false);
    pair.discarded = optional_field<bool>(item, "discarded", false);
    pair.note = optional_field<std::string>(item, "note", "");
    pair.encompassing = encompassing_span(pair.events, doc);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

json export_annotations(std::span<const AnnotatedPair> pairs) {
  json out = json::array();
  for (const AnnotatedPair& p : pairs) {
    out.push_back({{"pair_id", p.pair_id},
                   {"doc_id", p.doc_id()},
                   {"e1_id", p.e1().id},
                   {"e2_id", p.e2().id},
                   {"label", p.label ? std::string(to_string(*p.label))
                                     : std::string(kUnlabeled)},
                   {"coref", p.involves_coref},
                   {"discarded", p.discarded},
                   {"note", p.note}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus bundle

namespace {

json document_to_json(const Document& doc) {
  json sentences = json::array();
  for (const Sentence& s : doc.sentences) {
    json tokens = json::array();
    for (const Token& t : s.tokens) {
      tokens.push_back(json::array({t.text, t.lemma, t.pos}));
    }
    json edges = json::array();
    for (const Edge& e : s.graph.edges()) {
      edges.push_back(json::array({e.governor, e.dependent, e.relation}));
    }
    sentences.push_back({{"tokens", std::move(tokens)},
                         {"edges", std::move(edges)},
                         {"roots", s.graph.roots()}});
  }
  return {{"id", doc.id}, {"sentences", std::move(sentences)}};
}

Document document_from_json(const json& value) {
  Document doc;
  doc.id = field<std::string>(value, "id", "document");
  const std::string what = "document '" + doc.id + "'";
  for (const json& s : field<json>(value, "sentences", what)) {
    Sentence sentence;
    sentence.index = static_cast<int>(doc.sentences.size());
    for (const json& t : field<json>(s, "tokens", what)) {
      Token token;
      token.index = sentence.size();
      token.text = t.at(0).get<std::string>();
      token.lemma = t.at(1).get<std::string>();
      token.pos = t.at(2).get<std::string>();
      sentence.tokens.push_back(std::move(token));
    }
    std::vector<Edge> edges;
    for (const json& e : field<json>(s, "edges", what)) {
      edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                       e.at(2).get<std::string>()});
    }
    sentence.graph = DependencyGraph(sentence.tokens.size(), std::move(edges),
                                     field<std::set<int>>(s, "roots", what));
    doc.sentences.push_back(std::move(sentence));
  }
  return doc;
}

}  // namespace

json corpus_to_json(const Corpus& corpus) {
  json documents = json::array();
  for (const Document& doc : corpus.documents()) {
    documents.push_back(document_to_json(doc));
  }
  return {{"schema", "precedence.corpus/1"},
          {"documents", std::move(documents)},
          {"mentions", mentions_to_json(corpus.mentions())}};
}

Corpus corpus_from_json(const json& bundle) {
  if (!bundle.is_object() ||
      bundle.value("schema", std::string()) != "precedence.corpus/1") {
    throw ValidationError("not a precedence.corpus/1 bundle");
  }
  std::vector<Document> documents;
  for (const json& d : field<json>(bundle, "documents", "bundle")) {
    documents.push_back(document_from_json(d));
  }
  auto mentions =
      load_event_mentions(field<json>(bundle, "mentions", "bundle").dump(),
                          documents);
  return Corpus(std::move(documents), std::move(mentions));
}

// ---------------------------------------------------------------------------
// Agreement

double cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw ValidationError("kappa: label sequences differ in length (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ValidationError("kappa: empty label sequences");
  const double n = static_cast<double>(a.size());
  std::map<int, double> marginal_a;
  std::map<int, double> marginal_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    marginal_a[a[i]] += 1.0;
    marginal_b[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double observed = agree / n;
  double expected = 0.0;
  for (const auto& [label, count] : marginal_a) {
    const auto it = marginal_b.find(label);
    if (it != marginal_b.end()) expected += (count / n) * (it->second / n);
  }
  if (expected >= 1.0) return observed >= 1.0 ? 1.0 : 0.0;
  return (observed - expected) / (1.0 - expected);
}

namespace {
template <typename Label>
std::vector<int> as_ints(std::span<const Label> labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (Label l : labels) out.push_back(static_cast<int>(l));
  return out;
}
}  // namespace

double cohens_kappa(std::span<const RelationLabel> a,
                    std::span<const RelationLabel> b) {
  const auto x = as_ints(a);
  const auto y = as_ints(b);
  return cohens_kappa(std::span<const int>(x), std::span<const int>(y));
}

double cohens_kappa(std::span<const CoarseLabel> a,
                    std::span<const CoarseLabel> b) {
  const auto x = as_ints(a);
  const auto y = as_ints(b);
  return cohens_kappa(std::span<const int>(x), std::span<const int>(y));
}

}  // namespace precedence
