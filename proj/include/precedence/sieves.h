#ifndef PRECEDENCE_SIEVES_H_
#define PRECEDENCE_SIEVES_H_

// Deterministic precedence sieves: intra-sentence cue rules, inter-sentence
// sentence-initial cues, and tense/aspect (Reichenbach) ordering.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "precedence/corpus.h"

namespace precedence {

enum class Tense { Past, Present, Future, Unknown };
enum class Aspect { Simple, Perfective, Progressive, Unknown };

struct TenseAspect {
  Tense tense = Tense::Unknown;
  Aspect aspect = Aspect::Unknown;

  bool known() const {
    return tense != Tense::Unknown && aspect != Aspect::Unknown;
  }
  friend auto operator<=>(const TenseAspect&, const TenseAspect&) = default;
};

std::string_view to_string(Tense tense);
std::string_view to_string(Aspect aspect);
std::string to_string(const TenseAspect& ta);

enum class RuleScope { Intra, Inter };
enum class RuleDirection { E1First, E2First };

// One element of a token pattern.
struct PatternElement {
  enum class Kind {
    Anchor,     // "^": sentence start
    E1,         // trigger of E1
    E2,         // trigger of E2
    Any,        // ".*": zero or more tokens
    InClause,   // "~*": zero or more tokens, no clause punctuation
    Literal,    // one token matching any of `alternatives`
  };
  Kind kind = Kind::Literal;
  std::vector<std::string> alternatives;  // lowercase
};

struct PrecedenceRule {
  std::string id;
  RuleScope scope = RuleScope::Intra;
  RuleDirection direction = RuleDirection::E1First;
  std::string pattern_text;
  std::vector<PatternElement> pattern;
  // "@path" prefix: every cue token must lie on, or one edge away from, the
  // trigger-to-trigger dependency path.
  bool dependency_anchored = false;
};

// Rule file: `id TAB scope TAB direction TAB pattern` per line; blank lines
// and lines starting with '#' are ignored. Throws ParseError.
std::vector<PrecedenceRule> parse_rules(std::string_view text);
PrecedenceRule parse_rule(std::string_view id, RuleScope scope,
                          RuleDirection direction, std::string_view pattern);
// Seed inventory covering every cue named for the rule sieves.
std::string_view default_rules_text();
const std::vector<PrecedenceRule>& default_rules();

// First matching intra rule, applied when both mentions share a sentence.
std::optional<CoarseLabel> classify_intra(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules = default_rules());
// First matching inter rule, applied when E2's sentence follows E1's.
std::optional<CoarseLabel> classify_inter(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules = default_rules());
// Id of the rule that fires, for diagnostics.
std::optional<std::string> matching_rule(
    const EventPair& pair, const Document& document,
    const std::vector<PrecedenceRule>& rules);

TenseAspect detect_tense_aspect(const EventMention& event,
                                const Sentence& sentence);

// Maps a pair of tense/aspect values to the event that comes first.
// Stored as unordered pairs, so lookups are antisymmetric by construction.
class ReichenbachMapping {
 public:
  // Declares that `earlier` precedes `later`.
  void add(const TenseAspect& earlier, const TenseAspect& later);
  std::optional<CoarseLabel> lookup(const TenseAspect& e1,
                                    const TenseAspect& e2) const;
  std::size_t size() const { return earlier_first_.size(); }

  // The informative combinations over {past, present, future} x
  // {simple, perfective}.
  static ReichenbachMapping standard();
  // Lines of `tense aspect tense aspect`, first pair precedes the second.
  static ReichenbachMapping parse(std::string_view text);

 private:
  std::map<std::pair<TenseAspect, TenseAspect>, bool> earlier_first_;
};

std::optional<CoarseLabel> classify_reichenbach(
    const EventPair& pair, const Document& document,
    const ReichenbachMapping& mapping = ReichenbachMapping::standard());

}  // namespace precedence

#endif  // PRECEDENCE_SIEVES_H_
