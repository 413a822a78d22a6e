#include "precedence/candidates.h"

#include <algorithm>
#include <cstdlib>

#include "precedence/errors.h"
#include "util.h"

namespace precedence {

bool same_participant(const Argument& a, const Argument& b) {
  if (!a.grounding.empty() && !b.grounding.empty()) {
    return a.grounding == b.grounding;
  }
  return !a.text.empty() && util::iequals(a.text, b.text);
}

bool shares_participant(const EventMention& e1, const EventMention& e2) {
  for (const Argument& a : e1.arguments) {
    for (const Argument& b : e2.arguments) {
      if (same_participant(a, b)) return true;
    }
  }
  return false;
}

int sentence_distance(const EventMention& e1, const EventMention& e2) {
  if (e1.doc_id != e2.doc_id) {
    throw ValidationError("sentence distance across documents ('" + e1.doc_id +
                          "' vs '" + e2.doc_id + "')");
  }
  return std::abs(e1.sentence - e2.sentence);
}

bool same_type(const EventMention& e1, const EventMention& e2) {
  return e1.most_specific_label() == e2.most_specific_label();
}

bool is_regulation(const EventMention& mention) {
  return std::any_of(mention.labels.begin(), mention.labels.end(),
                     [](const std::string& label) {
                       return util::lowercase(label).find("regulation") !=
                              std::string::npos;
                     });
}

bool argument_denotes(const Argument& argument, int argument_sentence,
                      const EventMention& mention) {
  if (!argument.event_id.empty()) return argument.event_id == mention.id;
  return argument_sentence == mention.sentence &&
         argument.span.contains(mention.trigger);
}

bool nested_in_regulation(const EventMention& e1, const EventMention& e2,
                          std::span<const EventMention* const> mentions) {
  for (const EventMention* r : mentions) {
    if (r->id == e1.id || r->id == e2.id || !is_regulation(*r)) continue;
    bool has_e1 = false;
    bool has_e2 = false;
    for (const Argument& arg : r->arguments) {
      has_e1 = has_e1 || argument_denotes(arg, r->sentence, e1);
      has_e2 = has_e2 || argument_denotes(arg, r->sentence, e2);
    }
    if (has_e1 && has_e2) return true;
  }
  return false;
}

std::vector<EventPair> generate_candidates(
    const Document& document, std::span<const EventMention* const> mentions,
    const CandidateConfig& config) {
  if (config.max_sentence_distance < 0) {
    throw ConfigError("max_sentence_distance must be >= 0");
  }
  std::vector<const EventMention*> ordered(mentions.begin(), mentions.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const EventMention* a, const EventMention* b) {
              return textually_before(*a, *b);
            });

  std::vector<EventPair> out;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    for (std::size_t j = i + 1; j < ordered.size(); ++j) {
      const EventMention& e1 = *ordered[i];
      const EventMention& e2 = *ordered[j];
      if (sentence_distance(e1, e2) > config.max_sentence_distance) continue;
      if (config.require_shared_participant && !shares_participant(e1, e2)) {
        continue;
      }
      if (config.forbid_same_type && same_type(e1, e2)) continue;
      if (config.forbid_nested_regulation &&
          nested_in_regulation(e1, e2, ordered)) {
        continue;
      }
      out.push_back(EventPair{document.id, e1, e2});
    }
  }
  return out;
}

EncompassingSpan encompassing_span(const EventPair& pair,
                                   const Document& document) {
  int first = std::min(pair.e1.sentence, pair.e2.sentence);
  int last = std::max(pair.e1.sentence, pair.e2.sentence);
  for (const EventMention* m : {&pair.e1, &pair.e2}) {
    if (m->antecedent) {
      first = std::min(first, m->antecedent->sentence);
      last = std::max(last, m->antecedent->sentence);
    }
  }
  EncompassingSpan span;
  span.first_sentence = first;
  span.last_sentence = last;
  for (int s = first; s <= last; ++s) {
    span.spans.push_back(Span{0, document.sentence(s).size()});
  }
  return span;
}

std::vector<const Token*> span_tokens(const EncompassingSpan& span,
                                      const Document& document) {
  std::vector<const Token*> out;
  for (int s = span.first_sentence; s <= span.last_sentence; ++s) {
    const Sentence& sentence = document.sentence(s);
    const Span& range =
        span.spans.at(static_cast<std::size_t>(s - span.first_sentence));
    for (int t = range.start; t < range.end; ++t) {
      out.push_back(&sentence.tokens.at(static_cast<std::size_t>(t)));
    }
  }
  return out;
}

std::string candidate_pair_id(const EventPair& pair) {
  return pair.doc_id + ":" + pair.e1.id + ":" + pair.e2.id;
}

std::vector<AnnotatedPair> generate_corpus_candidates(
    const Corpus& corpus, const CandidateConfig& config) {
  std::vector<AnnotatedPair> out;
  for (const Document& doc : corpus.documents()) {
    const auto mentions = corpus.mentions_of(doc.id);
    for (EventPair& pair : generate_candidates(doc, mentions, config)) {
      AnnotatedPair annotated;
      annotated.pair_id = candidate_pair_id(pair);
      annotated.encompassing = encompassing_span(pair, doc);
      annotated.involves_coref = pair.e1.is_anaphor || pair.e2.is_anaphor ||
                                 std::any_of(pair.e1.arguments.begin(),
                                             pair.e1.arguments.end(),
                                             [](const Argument& a) {
                                               return a.resolved;
                                             }) ||
                                 std::any_of(pair.e2.arguments.begin(),
                                             pair.e2.arguments.end(),
                                             [](const Argument& a) {
                                               return a.resolved;
                                             });
      annotated.events = std::move(pair);
      out.push_back(std::move(annotated));
    }
  }
  return out;
}

}  // namespace precedence
