#include "precedence/metrics.h"

#include <string>

#include "precedence/errors.h"

namespace precedence {

void Confusion::add(CoarseLabel gold, CoarseLabel predicted, std::size_t n) {
  counts[class_index(gold)][class_index(predicted)] += n;
}

Confusion& Confusion::operator+=(const Confusion& other) {
  for (std::size_t g = 0; g < kNumCoarseLabels; ++g) {
    for (std::size_t p = 0; p < kNumCoarseLabels; ++p) {
      counts[g][p] += other.counts[g][p];
    }
  }
  return *this;
}

std::size_t Confusion::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t c : row) n += c;
  }
  return n;
}

Confusion confusion(std::span<const CoarseLabel> predicted,
                    std::span<const CoarseLabel> gold) {
  if (predicted.size() != gold.size()) {
    throw ValidationError("predictions (" + std::to_string(predicted.size()) +
                          ") and gold labels (" + std::to_string(gold.size()) +
                          ") are not aligned");
  }
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) c.add(gold[i], predicted[i]);
  return c;
}

const std::set<CoarseLabel>& precedence_classes() {
  static const std::set<CoarseLabel> classes{CoarseLabel::E1PrecedesE2,
                                             CoarseLabel::E2PrecedesE1};
  return classes;
}

Prf micro_prf(const Confusion& confusion, const std::set<CoarseLabel>& positives) {
  Prf r;
  for (CoarseLabel g : kCoarseLabels) {
    for (CoarseLabel p : kCoarseLabels) {
      const std::size_t n = confusion.counts[class_index(g)][class_index(p)];
      if (g == p) {
        if (positives.count(g)) r.tp += n;
        continue;
      }
      if (positives.count(p)) r.fp += n;
      if (positives.count(g)) r.fn += n;
    }
  }
  const double tp = static_cast<double>(r.tp);
  if (r.tp + r.fp == 0) {
    r.precision = r.fn == 0 ? 1.0 : 0.0;
  } else {
    r.precision = tp / static_cast<double>(r.tp + r.fp);
  }
  r.recall = r.tp + r.fn == 0 ? 1.0 : tp / static_cast<double>(r.tp + r.fn);
  r.f1 = r.precision + r.recall > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

Prf micro_prf(std::span<const CoarseLabel> predicted,
              std::span<const CoarseLabel> gold,
              const std::set<CoarseLabel>& positives) {
  return micro_prf(confusion(predicted, gold), positives);
}

nlohmann::json to_json(const Prf& prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1},
          {"tp", prf.tp},               {"fp", prf.fp},         {"fn", prf.fn}};
}

nlohmann::json to_json(const Confusion& confusion) {
  nlohmann::json rows = nlohmann::json::object();
  for (CoarseLabel g : kCoarseLabels) {
    nlohmann::json row = nlohmann::json::object();
    for (CoarseLabel p : kCoarseLabels) {
      row[std::string(to_string(p))] = confusion.counts[class_index(g)][class_index(p)];
    }
    rows[std::string(to_string(g))] = row;
  }
  return rows;
}

}  // namespace precedence
