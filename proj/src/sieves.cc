#include "precedence/sieves.h"

#include <algorithm>
#include <functional>
#include <set>

#include "precedence/errors.h"
#include "precedence/syntax.h"
#include "util.h"

namespace precedence {

std::string_view to_string(Tense tense) {
  switch (tense) {
    case Tense::Past: return "past";
    case Tense::Present: return "present";
    case Tense::Future: return "future";
    case Tense::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Aspect aspect) {
  switch (aspect) {
    case Aspect::Simple: return "simple";
    case Aspect::Perfective: return "perfective";
    case Aspect::Progressive: return "progressive";
    case Aspect::Unknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(const TenseAspect& ta) {
  return std::string(to_string(ta.tense)) + " " + std::string(to_string(ta.aspect));
}

// ---------------------------------------------------------------------------
// Rule files

PrecedenceRule parse_rule(std::string_view id, RuleScope scope,
                          RuleDirection direction, std::string_view pattern) {
  PrecedenceRule rule;
  rule.id = std::string(id);
  rule.scope = scope;
  rule.direction = direction;
  rule.pattern_text = std::string(pattern);
  auto words = util::split_whitespace(pattern);
  if (!words.empty() && words.front() == "@path") {
    rule.dependency_anchored = true;
    words.erase(words.begin());
  }
  bool has_e1 = false;
  bool has_e2 = false;
  bool has_literal = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string_view w = words[i];
    PatternElement element;
    if (w == "^") {
      if (i != 0) throw ParseError("rule " + rule.id + ": '^' must come first");
      element.kind = PatternElement::Kind::Anchor;
    } else if (w == "E1") {
      element.kind = PatternElement::Kind::E1;
      has_e1 = true;
    } else if (w == "E2") {
      element.kind = PatternElement::Kind::E2;
      has_e2 = true;
    } else if (w == ".*") {
      element.kind = PatternElement::Kind::Any;
    } else if (w == "~*") {
      element.kind = PatternElement::Kind::InClause;
    } else {
      element.kind = PatternElement::Kind::Literal;
      for (std::string_view alt : util::split(w, '|')) {
        if (alt.empty()) throw ParseError("rule " + rule.id + ": empty alternative");
        element.alternatives.push_back(util::lowercase(alt));
      }
      has_literal = true;
    }
    rule.pattern.push_back(std::move(element));
  }
  if (!has_literal) throw ParseError("rule " + rule.id + ": pattern has no cue");
  if (scope == RuleScope::Intra && !(has_e1 && has_e2)) {
    throw ParseError("rule " + rule.id + ": intra pattern needs E1 and E2");
  }
  if (scope == RuleScope::Inter && has_e1) {
    throw ParseError("rule " + rule.id +
                     ": inter patterns match E2's sentence and cannot use E1");
  }
  if (scope == RuleScope::Inter && rule.dependency_anchored) {
    throw ParseError("rule " + rule.id + ": @path requires an intra rule");
  }
  return rule;
}

std::vector<PrecedenceRule> parse_rules(std::string_view text) {
  std::vector<PrecedenceRule> rules;
  std::set<std::string> ids;
  std::size_t line_number = 0;
  for (std::string_view raw : util::split(text, '\n')) {
    ++line_number;
    const std::string_view line = util::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = util::split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("expected 4 tab-separated fields", line_number);
    }
    const std::string_view id = util::trim(fields[0]);
    const std::string_view scope_text = util::trim(fields[1]);
    const std::string_view dir_text = util::trim(fields[2]);
    RuleScope scope;
    if (scope_text == "intra") {
      scope = RuleScope::Intra;
    } else if (scope_text == "inter") {
      scope = RuleScope::Inter;
    } else {
      throw ParseError("unknown scope '" + std::string(scope_text) + "'",
                       line_number);
    }
    RuleDirection direction;
    if (dir_text == "e1_first") {
      direction = RuleDirection::E1First;
    } else if (dir_text == "e2_first") {
      direction = RuleDirection::E2First;
    } else {
      throw ParseError("unknown direction '" + std::string(dir_text) + "'",
                       line_number);
    }
    if (!ids.insert(std::string(id)).second) {
      throw ParseError("duplicate rule id '" + std::string(id) + "'",
                       line_number);
    }
    try {
      rules.push_back(parse_rule(id, scope, direction, util::trim(fields[3])));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_number);
    }
  }
  return rules;
}

std::string_view default_rules_text() {
  static constexpr std::string_view kRules =
      "# Intra-sentence cues. E1 is the mention that comes first in text.\n"
      "intra-prior-to-initial\tintra\te2_first\t^ prior to .* E1 .* , .* E2\n"
      "intra-following-initial\tintra\te1_first\t^ following .* E1 .* , .* E2\n"
      "intra-after-initial\tintra\te1_first\t^ after .* E1 .* , .* E2\n"
      "intra-before-initial\tintra\te2_first\t^ before .* E1 .* , .* E2\n"
      "intra-once-initial\tintra\te1_first\t^ once .* E1 .* , .* E2\n"
      "intra-upon-initial\tintra\te1_first\t^ upon .* E1 .* , .* E2\n"
      "intra-when-not\tintra\te2_first\tE1 .* when .* is|was|are|were not E2\n"
      "intra-followed-by\tintra\te1_first\tE1 .* followed by .* E2\n"
      "intra-follows\tintra\te2_first\tE1 .* follows|follow|followed .* E2\n"
      "intra-preceded-by\tintra\te2_first\tE1 .* preceded by .* E2\n"
      "intra-precedes\tintra\te1_first\tE1 .* precedes|precede|preceded .* E2\n"
      "intra-due-to\tintra\te2_first\tE1 .* due to .* E2\n"
      "intra-leads-to\tintra\te1_first\tE1 .* leads|lead|led|leading to .* E2\n"
      "intra-results-in\tintra\te1_first\t"
      "E1 .* results|result|resulted|resulting in .* E2\n"
      "intra-results-from\tintra\te2_first\tE1 .* results|resulted from .* E2\n"
      "intra-prior-to\tintra\te1_first\tE1 .* prior to .* E2\n"
      "intra-subsequent-to\tintra\te2_first\tE1 .* subsequent to .* E2\n"
      "intra-following\tintra\te2_first\t@path E1 .* following .* E2\n"
      "intra-after\tintra\te2_first\t@path E1 .* after .* E2\n"
      "intra-before\tintra\te1_first\t@path E1 .* before .* E2\n"
      "intra-upon\tintra\te2_first\t@path E1 .* upon .* E2\n"
      "intra-in-response-to\tintra\te2_first\tE1 .* in response to .* E2\n"
      "intra-requires\tintra\te2_first\t@path E1 .* requires|require .* E2\n"
      "intra-required-for\tintra\te1_first\tE1 .* required|necessary|essential for .* E2\n"
      "intra-depends-on\tintra\te2_first\tE1 .* depends|depend|dependent on .* E2\n"
      "intra-and-then\tintra\te1_first\tE1 .* and then .* E2\n"
      "intra-subsequently\tintra\te1_first\tE1 .* subsequently .* E2\n"
      "intra-enables\tintra\te1_first\t@path E1 .* enables|enable|allows|allow|permits .* E2\n"
      "intra-triggers\tintra\te1_first\t@path E1 .* triggers|triggered .* E2\n"
      "# Inter-sentence cues, matched against E2's sentence.\n"
      "inter-downstream\tinter\te1_first\t^ as a downstream effect\n"
      "inter-later\tinter\te1_first\t^ later\n"
      "inter-in-response\tinter\te1_first\t^ in response\n"
      "inter-for-this\tinter\te1_first\t^ for this\n"
      "inter-ultimately\tinter\te1_first\t^ ultimately\n"
      "inter-subsequently\tinter\te1_first\t^ subsequently\n"
      "inter-then\tinter\te1_first\t^ ~* then\n";
  return kRules;
}

const std::vector<PrecedenceRule>& default_rules() {
  static const std::vector<PrecedenceRule> rules =
      parse_rules(default_rules_text());
  return rules;
}

// ---------------------------------------------------------------------------
// Pattern matching

namespace {

const std::set<std::string>& negators() {
  static const std::set<std::string> words{"not", "n't", "never", "no"};
  return words;
}

bool clause_boundary(const std::string& token) {
  return token == "," || token == ";" || token == ":";
}

class Matcher {
 public:
  Matcher(const PrecedenceRule& rule, const Sentence& sentence,
          std::optional<Span> e1, std::optional<Span> e2,
          std::function<bool(const std::vector<int>&)> accept)
      : rule_(rule), e1_(e1), e2_(e2), accept_(std::move(accept)) {
    for (const Token& t : sentence.tokens) words_.push_back(util::lowercase(t.text));
  }

  bool run() {
    const bool anchored = !rule_.pattern.empty() &&
                          rule_.pattern.front().kind ==
                              PatternElement::Kind::Anchor;
    const int last_start = anchored ? 0 : static_cast<int>(words_.size());
    for (int start = 0; start <= last_start; ++start) {
      cues_.clear();
      if (step(anchored ? 1 : 0, start)) return true;
    }
    return false;
  }

 private:
  bool step(std::size_t element, int position) {
    if (element == rule_.pattern.size()) return accept_(cues_);
    const PatternElement& e = rule_.pattern[element];
    const int n = static_cast<int>(words_.size());
    switch (e.kind) {
      case PatternElement::Kind::Anchor:
        return position == 0 && step(element + 1, position);
      case PatternElement::Kind::E1:
      case PatternElement::Kind::E2: {
        const auto& trigger = e.kind == PatternElement::Kind::E1 ? e1_ : e2_;
        return trigger && trigger->start == position &&
               step(element + 1, trigger->end);
      }
      case PatternElement::Kind::Any:
        for (int next = position; next <= n; ++next) {
          if (step(element + 1, next)) return true;
        }
        return false;
      case PatternElement::Kind::InClause:
        for (int next = position; next <= n; ++next) {
          if (step(element + 1, next)) return true;
          if (next < n && clause_boundary(words_[next])) return false;
        }
        return false;
      case PatternElement::Kind::Literal: {
        if (position >= n) return false;
        const auto& alts = e.alternatives;
        if (std::find(alts.begin(), alts.end(), words_[position]) == alts.end()) {
          return false;
        }
        cues_.push_back(position);
        if (step(element + 1, position + 1)) return true;
        cues_.pop_back();
        return false;
      }
    }
    return false;
  }

  const PrecedenceRule& rule_;
  std::optional<Span> e1_;
  std::optional<Span> e2_;
  std::function<bool(const std::vector<int>&)> accept_;
  std::vector<std::string> words_;
  std::vector<int> cues_;
};

bool pattern_mentions(const PrecedenceRule& rule,
                      const std::set<std::string>& words) {
  for (const PatternElement& e : rule.pattern) {
    for (const std::string& alt : e.alternatives) {
      if (words.count(alt)) return true;
    }
  }
  return false;
}

// A cue run preceded by a negator the pattern does not itself ask for
// suppresses the match.
bool negated(const PrecedenceRule& rule, const Sentence& sentence,
             const std::vector<int>& cues) {
  if (pattern_mentions(rule, negators())) return false;
  for (std::size_t i = 0; i < cues.size(); ++i) {
    const bool run_start = i == 0 || cues[i - 1] != cues[i] - 1;
    if (!run_start || cues[i] == 0) continue;
    const std::string before = util::lowercase(
        sentence.tokens[static_cast<std::size_t>(cues[i] - 1)].text);
    if (negators().count(before)) return true;
  }
  return false;
}

bool anchored_on_path(const Sentence& sentence, const EventPair& pair,
                      const std::vector<int>& cues) {
  const int from = span_head(sentence, pair.e1.trigger);
  const int to = span_head(sentence, pair.e2.trigger);
  const auto path = shortest_path(sentence.graph, from, to);
  if (!path) return false;
  std::set<int> near;
  for (int node : path->nodes()) {
    near.insert(node);
    for (std::size_t e : sentence.graph.outgoing(node)) {
      near.insert(sentence.graph.edges()[e].dependent);
    }
    for (std::size_t e : sentence.graph.incoming(node)) {
      near.insert(sentence.graph.edges()[e].governor);
    }
  }
  return std::all_of(cues.begin(), cues.end(),
                     [&](int c) { return near.count(c) > 0; });
}

bool rule_fires(const PrecedenceRule& rule, const EventPair& pair,
                const Document& document) {
  if (pair.e1.doc_id != pair.e2.doc_id) return false;
  if (rule.scope == RuleScope::Intra) {
    if (pair.e1.sentence != pair.e2.sentence) return false;
    const Sentence& sentence = document.sentence(pair.e1.sentence);
    Matcher matcher(rule, sentence, pair.e1.trigger, pair.e2.trigger,
                    [&](const std::vector<int>& cues) {
                      if (negated(rule, sentence, cues)) return false;
                      return !rule.dependency_anchored ||
                             anchored_on_path(sentence, pair, cues);
                    });
    return matcher.run();
  }
  if (pair.e2.sentence != pair.e1.sentence + 1) return false;
  const Sentence& sentence = document.sentence(pair.e2.sentence);
  Matcher matcher(rule, sentence, std::nullopt, pair.e2.trigger,
                  [&](const std::vector<int>& cues) {
                    return !negated(rule, sentence, cues);
                  });
  return matcher.run();
}

CoarseLabel label_for(RuleDirection direction) {
  return direction == RuleDirection::E1First ? CoarseLabel::E1PrecedesE2
                                             : CoarseLabel::E2PrecedesE1;
}

std::optional<CoarseLabel> classify_scope(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules, RuleScope scope) {
  for (const PrecedenceRule& rule : rules) {
    if (rule.scope == scope && rule_fires(rule, pair, document)) {
      return label_for(rule.direction);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<CoarseLabel> classify_intra(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules) {
  if (pair.e1.sentence != pair.e2.sentence) return std::nullopt;
  return classify_scope(pair, document, rules, RuleScope::Intra);
}

std::optional<CoarseLabel> classify_inter(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules) {
  if (pair.e2.sentence != pair.e1.sentence + 1) return std::nullopt;
  return classify_scope(pair, document, rules, RuleScope::Inter);
}

std::optional<std::string> matching_rule(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules) {
  for (const PrecedenceRule& rule : rules) {
    if (rule_fires(rule, pair, document)) return rule.id;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tense and aspect

namespace {

bool is_verbal(const Token& t) { return t.pos.rfind("VB", 0) == 0; }

bool is_aux_relation(const std::string& relation) {
  return relation == "aux" || relation == "auxpass" || relation == "aux:pass";
}

struct Auxiliaries {
  bool infinitival = false;  // "to"
  bool future = false;       // will / shall
  bool modal = false;        // other modals
  std::optional<Tense> have;
  std::optional<Tense> be;   // finite forms of be only
  std::optional<Tense> do_support;
  bool any() const {
    return infinitival || future || modal || have || be || do_support;
  }
};

std::vector<int> auxiliary_tokens(const Sentence& sentence, int verb) {
  std::vector<int> out;
  for (std::size_t e : sentence.graph.outgoing(verb)) {
    const Edge& edge = sentence.graph.edges()[e];
    if (is_aux_relation(edge.relation)) out.push_back(edge.dependent);
  }
  bool has_aux_edges = false;
  for (const Edge& edge : sentence.graph.edges()) {
    if (is_aux_relation(edge.relation)) {
      has_aux_edges = true;
      break;
    }
  }
  // Parses without auxiliary relations: scan the contiguous verb group.
  if (!has_aux_edges) {
    for (int t = verb - 1; t >= 0; --t) {
      const Token& tok = sentence.tokens[static_cast<std::size_t>(t)];
      if (is_verbal(tok) || tok.pos == "MD" || tok.pos == "TO") {
        out.push_back(t);
      } else if (tok.pos.rfind("RB", 0) != 0) {
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Auxiliaries read_auxiliaries(const Sentence& sentence, int verb) {
  Auxiliaries aux;
  for (int t : auxiliary_tokens(sentence, verb)) {
    const Token& tok = sentence.tokens[static_cast<std::size_t>(t)];
    const std::string w = util::lowercase(tok.text);
    if (w == "to" || tok.pos == "TO") {
      aux.infinitival = true;
    } else if (w == "will" || w == "shall" || w == "'ll" || w == "wo") {
      aux.future = true;
    } else if (tok.pos == "MD") {
      aux.modal = true;
    } else if (w == "has" || w == "have" || w == "'ve") {
      aux.have = Tense::Past;
    } else if (w == "had" || w == "'d") {
      aux.have = Tense::Past;
    } else if (w == "is" || w == "are" || w == "am" || w == "'s" || w == "'re") {
      aux.be = Tense::Present;
    } else if (w == "was" || w == "were") {
      aux.be = Tense::Past;
    } else if (w == "do" || w == "does") {
      aux.do_support = Tense::Present;
    } else if (w == "did") {
      aux.do_support = Tense::Past;
    }
    // "be", "been", "being": passive or progressive helpers, no tense.
  }
  return aux;
}

// Tense/aspect of `verb` if it is finite; nullopt for non-finite forms.
std::optional<TenseAspect> finite_reading(const Sentence& sentence, int verb) {
  const Token& tok = sentence.tokens[static_cast<std::size_t>(verb)];
  const Auxiliaries aux = read_auxiliaries(sentence, verb);
  if (aux.infinitival) return std::nullopt;
  const std::string& pos = tok.pos;

  if (aux.have) {
    // Perfect auxiliaries: "has been phosphorylated" reads as past
    // perfective; "will have" shifts to the future.
    return TenseAspect{aux.future ? Tense::Future : *aux.have,
                       Aspect::Perfective};
  }
  if (pos == "VBG") {
    if (aux.be) return TenseAspect{*aux.be, Aspect::Progressive};
    if (aux.future) return TenseAspect{Tense::Future, Aspect::Progressive};
    return std::nullopt;
  }
  if (pos == "VBN") {
    if (aux.be) return TenseAspect{*aux.be, Aspect::Simple};
    if (aux.future) return TenseAspect{Tense::Future, Aspect::Simple};
    if (aux.modal) return TenseAspect{Tense::Present, Aspect::Simple};
    return std::nullopt;
  }
  if (aux.future) return TenseAspect{Tense::Future, Aspect::Simple};
  if (aux.do_support) return TenseAspect{*aux.do_support, Aspect::Simple};
  if (aux.modal) return TenseAspect{Tense::Present, Aspect::Simple};
  if (aux.be) return TenseAspect{*aux.be, Aspect::Simple};
  if (pos == "VBD") return TenseAspect{Tense::Past, Aspect::Simple};
  if (pos == "VBZ" || pos == "VBP" || pos == "VB") {
    return TenseAspect{Tense::Present, Aspect::Simple};
  }
  return std::nullopt;
}

}  // namespace

TenseAspect detect_tense_aspect(const EventMention& event,
                                const Sentence& sentence) {
  int node = span_head(sentence, event.trigger);
  std::set<int> visited;
  while (visited.insert(node).second) {
    const Token& tok = sentence.tokens[static_cast<std::size_t>(node)];
    if (is_verbal(tok)) {
      if (auto reading = finite_reading(sentence, node)) return *reading;
    }
    const auto gov = sentence.graph.governor(node);
    if (!gov) break;
    node = *gov;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Reichenbach mapping

void ReichenbachMapping::add(const TenseAspect& earlier,
                             const TenseAspect& later) {
  if (earlier == later) {
    throw ConfigError("a tense/aspect combination cannot precede itself");
  }
  if (earlier < later) {
    earlier_first_[{earlier, later}] = true;
  } else {
    earlier_first_[{later, earlier}] = false;
  }
}

std::optional<CoarseLabel> ReichenbachMapping::lookup(
    const TenseAspect& e1, const TenseAspect& e2) const {
  if (!e1.known() || !e2.known() || e1 == e2) return std::nullopt;
  const bool ordered = e1 < e2;
  const auto key = ordered ? std::make_pair(e1, e2) : std::make_pair(e2, e1);
  const auto it = earlier_first_.find(key);
  if (it == earlier_first_.end()) return std::nullopt;
  // it->second: the smaller key precedes the larger one.
  const bool e1_first = ordered == it->second;
  return e1_first ? CoarseLabel::E1PrecedesE2 : CoarseLabel::E2PrecedesE1;
}

ReichenbachMapping ReichenbachMapping::standard() {
  const TenseAspect past_simple{Tense::Past, Aspect::Simple};
  const TenseAspect past_perf{Tense::Past, Aspect::Perfective};
  const TenseAspect pres_simple{Tense::Present, Aspect::Simple};
  const TenseAspect pres_perf{Tense::Present, Aspect::Perfective};
  const TenseAspect fut_simple{Tense::Future, Aspect::Simple};
  const TenseAspect fut_perf{Tense::Future, Aspect::Perfective};
  ReichenbachMapping m;
  m.add(past_perf, past_simple);
  m.add(past_perf, pres_simple);
  m.add(past_perf, pres_perf);
  m.add(past_perf, fut_simple);
  m.add(past_perf, fut_perf);
  m.add(past_simple, fut_simple);
  m.add(past_simple, fut_perf);
  m.add(pres_simple, fut_simple);
  m.add(pres_perf, fut_simple);
  m.add(pres_perf, fut_perf);
  return m;
}

ReichenbachMapping ReichenbachMapping::parse(std::string_view text) {
  const auto tense_of = [](std::string_view w, std::size_t line) {
    for (Tense t : {Tense::Past, Tense::Present, Tense::Future}) {
      if (w == to_string(t)) return t;
    }
    throw ParseError("unknown tense '" + std::string(w) + "'", line);
  };
  const auto aspect_of = [](std::string_view w, std::size_t line) {
    for (Aspect a : {Aspect::Simple, Aspect::Perfective, Aspect::Progressive}) {
      if (w == to_string(a)) return a;
    }
    throw ParseError("unknown aspect '" + std::string(w) + "'", line);
  };
  ReichenbachMapping m;
  std::size_t line_number = 0;
  for (std::string_view raw : util::split(text, '\n')) {
    ++line_number;
    const std::string_view line = util::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto w = util::split_whitespace(line);
    if (w.size() != 4) {
      throw ParseError("expected 'tense aspect tense aspect'", line_number);
    }
    m.add({tense_of(w[0], line_number), aspect_of(w[1], line_number)},
          {tense_of(w[2], line_number), aspect_of(w[3], line_number)});
  }
  return m;
}

std::optional<CoarseLabel> classify_reichenbach(
    const EventPair& pair, const Document& document,
    const ReichenbachMapping& mapping) {
  const TenseAspect ta1 =
      detect_tense_aspect(pair.e1, document.sentence(pair.e1.sentence));
  const TenseAspect ta2 =
      detect_tense_aspect(pair.e2, document.sentence(pair.e2.sentence));
  return mapping.lookup(ta1, ta2);
}

}  // namespace precedence
