#ifndef PRECEDENCE_CANDIDATES_H_
#define PRECEDENCE_CANDIDATES_H_

// Candidate event-pair generation under the corpus filtering constraints.

#include <span>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"

namespace precedence {

struct CandidateConfig {
  int max_sentence_distance = 1;
  bool require_shared_participant = true;
  bool forbid_same_type = true;
  bool forbid_nested_regulation = true;
};

// Participant identity: grounding ids when both sides have one, otherwise
// case-insensitive surface text.
bool same_participant(const Argument& a, const Argument& b);
bool shares_participant(const EventMention& e1, const EventMention& e2);

// |sentence(e1) - sentence(e2)|. Throws ValidationError across documents.
int sentence_distance(const EventMention& e1, const EventMention& e2);

bool same_type(const EventMention& e1, const EventMention& e2);
bool is_regulation(const EventMention& mention);
// True when `argument` denotes `mention` (explicit event id, or a span in
// the same sentence covering the mention's trigger).
bool argument_denotes(const Argument& argument, int argument_sentence,
                      const EventMention& mention);
// True when some Regulation mention in `mentions` (other than e1/e2) has
// both e1 and e2 among its arguments.
bool nested_in_regulation(const EventMention& e1, const EventMention& e2,
                          std::span<const EventMention* const> mentions);

// All unordered pairs passing the enabled constraints, E1 textually first,
// ordered by (E1 position, E2 position).
std::vector<EventPair> generate_candidates(
    const Document& document, std::span<const EventMention* const> mentions,
    const CandidateConfig& config = {});

// Whole-sentence region covering both mentions and any antecedents.
EncompassingSpan encompassing_span(const EventPair& pair,
                                   const Document& document);

// Tokens of the encompassing span in reading order.
std::vector<const Token*> span_tokens(const EncompassingSpan& span,
                                      const Document& document);

std::string candidate_pair_id(const EventPair& pair);

// Candidates of every document in the corpus, as unlabeled pairs.
std::vector<AnnotatedPair> generate_corpus_candidates(
    const Corpus& corpus, const CandidateConfig& config = {});

}  // namespace precedence

#endif  // PRECEDENCE_CANDIDATES_H_
