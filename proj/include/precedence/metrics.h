#ifndef PRECEDENCE_METRICS_H_
#define PRECEDENCE_METRICS_H_

// Confusion counts and micro precision/recall/F1 over the precedence
// classes.

#include <array>
#include <cstddef>
#include <set>
#include <span>

#include "json.hpp"
#include "precedence/corpus.h"

namespace precedence {

// counts[gold][predicted].
struct Confusion {
  std::array<std::array<std::size_t, kNumCoarseLabels>, kNumCoarseLabels> counts{};

  void add(CoarseLabel gold, CoarseLabel predicted, std::size_t n = 1);
  Confusion& operator+=(const Confusion& other);
  std::size_t total() const;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

Confusion confusion(std::span<const CoarseLabel> predicted,
                    std::span<const CoarseLabel> gold);

const std::set<CoarseLabel>& precedence_classes();

// Pooled over `positives`. A positive prediction in the wrong direction is
// a false positive for its class and a false negative for the gold class.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Precision with no positive predictions is 1 when there is nothing to
// find and 0 otherwise; recall with nothing to find is 1.
Prf micro_prf(const Confusion& confusion,
              const std::set<CoarseLabel>& positives = precedence_classes());
Prf micro_prf(std::span<const CoarseLabel> predicted,
              std::span<const CoarseLabel> gold,
              const std::set<CoarseLabel>& positives = precedence_classes());

nlohmann::json to_json(const Prf& prf);
nlohmann::json to_json(const Confusion& confusion);

}  // namespace precedence

#endif  // PRECEDENCE_METRICS_H_
