#ifndef PRECEDENCE_SYNTAX_H_
#define PRECEDENCE_SYNTAX_H_

// Dependency-path utilities shared by the rule sieves and the feature
// extractor.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "precedence/corpus.h"

namespace precedence {

// Down follows an edge governor -> dependent (">"), Up the reverse ("<").
// Enum order is the tie-break order for equal-length paths.
enum class Direction { Down, Up };

struct SynStep {
  Direction direction = Direction::Down;
  std::string relation;
  int landing = 0;

  friend bool operator==(const SynStep&, const SynStep&) = default;
};

struct SynPath {
  int source = 0;
  std::vector<SynStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  int target() const { return steps.empty() ? source : steps.back().landing; }
  // The same path walked from target to source, directions inverted.
  SynPath reversed() const;
  // Token indices visited, source first.
  std::vector<int> nodes() const;

  friend bool operator==(const SynPath&, const SynPath&) = default;
};

// Minimal undirected path, directions recorded per step. Among equal-length
// paths the lexicographically smallest (direction, relation) sequence wins.
// Throws ValidationError on an invalid index.
std::optional<SynPath> shortest_path(const DependencyGraph& graph, int from,
                                     int to);

// Path from the nearest root down to `token`. Falls back to an undirected
// path when no downward path exists. Throws StructuralError when `token` is
// not connected to any root.
SynPath path_to_root(const DependencyGraph& graph, int token);

// Syntactic head of a span: the first token whose governor lies outside it.
int span_head(const Sentence& sentence, const Span& span);

enum class PathMode {
  Unlexicalized,   // ">prep_to >prep_such_as"
  Lemmas,          // ">prep_to:site >prep_such_as:endosome"
  EndpointsRoles,  // "translocate >prep_to THEME"
  EndpointsLabels, // "translocate >prep_to Protein"
};

// `sentence` supplies lemmas (required by every mode except Unlexicalized);
// `endpoint_tag` is the role or label appended by the Endpoints modes.
std::string render_path(const SynPath& path,
                        PathMode mode = PathMode::Unlexicalized,
                        const Sentence* sentence = nullptr,
                        std::string_view endpoint_tag = {});

}  // namespace precedence

#endif  // PRECEDENCE_SYNTAX_H_
