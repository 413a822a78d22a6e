#ifndef PRECEDENCE_SYNTHETIC_H_
#define PRECEDENCE_SYNTHETIC_H_

// Seeded generator of small parsed corpora with event mentions and gold
// precedence labels, for tests, benchmarks and smoke runs.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "precedence/corpus.h"

namespace precedence {

struct SyntheticConfig {
  int documents = 20;
  int min_blocks = 3;  // sentence groups per document
  int max_blocks = 6;
  // Probability that a block plants a pair the candidate filter must drop.
  double violation_rate = 0.25;
  // Probability of replacing a gold label with a random different one.
  double label_noise = 0.0;
  std::uint64_t seed = 1;
};

struct PlantedViolation {
  std::string doc_id;
  std::string e1_id;
  std::string e2_id;
  std::string kind;  // distance, no-shared-participant, same-type, nested
};

struct SyntheticCorpus {
  Corpus corpus;
  // Every valid planted pair, labeled, in text order per document.
  std::vector<AnnotatedPair> pairs;
  std::vector<PlantedViolation> violations;

  std::string conllu() const;
  nlohmann::json mentions_json() const;
  nlohmann::json annotations_json() const;
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config = {});

}  // namespace precedence

#endif  // PRECEDENCE_SYNTHETIC_H_
