#ifndef PRECEDENCE_FEATURES_H_
#define PRECEDENCE_FEATURES_H_

// Sparse lexical, syntactic and coreference features for event pairs.
//
// Feature strings are namespaced: "event1:", "event2:", "between:",
// "path:", "coref:" and "coref-anaphor:". Values are binary.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "precedence/corpus.h"

namespace precedence {

// Generated feature strings in deterministic order; may repeat.
using FeatureSet = std::vector<std::string>;

// Span tokens considered around the trigger for n-gram features.
inline constexpr int kNgramWindow = 20;

// `partner` is the other event of the pair; arguments it shares are
// replaced by SHARED in the entity n-grams.
FeatureSet event_features(const EventMention& event, const Document& document,
                          std::string_view prefix,
                          const EventMention* partner = nullptr);
FeatureSet surface_features(const EventPair& pair, const Document& document);
FeatureSet syntax_features(const EventPair& pair, const Document& document);
FeatureSet coref_features(const EventPair& pair, const Document& document);
// All four families.
FeatureSet pair_features(const EventPair& pair, const Document& document);

// Feature sets for many pairs; parallel over pairs, output in input order.
std::vector<FeatureSet> extract_features(std::span<const AnnotatedPair> pairs,
                                         const Corpus& corpus);

namespace reference {
std::vector<FeatureSet> extract_features(std::span<const AnnotatedPair> pairs,
                                         const Corpus& corpus);
}  // namespace reference

// Dense string -> column vocabulary. Columns are assigned in first-seen
// order; a frozen index rejects additions.
class FeatureIndex {
 public:
  int add(const std::string& feature);
  std::optional<int> find(std::string_view feature) const;
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return columns_.size(); }
  const std::string& feature(int column) const;

  // Sorted "feature TAB column" lines.
  void save(std::ostream& out) const;
  static FeatureIndex load(std::istream& in);

 private:
  std::map<std::string, int, std::less<>> columns_;
  std::vector<std::string> features_;
  bool frozen_ = false;
};

// Strictly increasing column indices of present features.
struct FeatureVector {
  std::vector<int> indices;
  CoarseLabel label = CoarseLabel::Nil;

  bool has(int column) const;
};

// Frozen index over the given (training) feature sets.
FeatureIndex build_index(std::span<const FeatureSet> sets);
// Throws UsageError if `index` is not frozen. Unseen features are dropped.
FeatureVector vectorize(const FeatureSet& features, const FeatureIndex& index,
                        CoarseLabel label = CoarseLabel::Nil);
FeatureVector vectorize(const EventPair& pair, const Document& document,
                        const FeatureIndex& index);

}  // namespace precedence

#endif  // PRECEDENCE_FEATURES_H_
