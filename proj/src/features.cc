#include "precedence/features.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "precedence/candidates.h"
#include "precedence/errors.h"
#include "precedence/syntax.h"
#include "util.h"

namespace precedence {

namespace {

void add_ngrams(const std::vector<std::string>& tokens, const std::string& key,
                FeatureSet& out) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      out.push_back(key + gram);
    }
  }
}

Span ngram_window(const EventMention& event) {
  if (event.span.size() <= kNgramWindow) return event.span;
  const int start =
      std::clamp(event.trigger.start - kNgramWindow / 2, event.span.start,
                 event.span.end - kNgramWindow);
  return Span{start, start + kNgramWindow};
}

// Token sequence over `window` with every argument span collapsed into a
// single replacement token. Arguments overlapping the trigger are kept
// verbatim.
template <typename Replacement>
std::vector<std::string> replaced_sequence(const EventMention& event,
                                           const Sentence& sentence,
                                           const Span& window,
                                           Replacement replacement) {
  std::vector<std::string> out;
  for (int t = window.start; t < window.end; ++t) {
    const Argument* covering = nullptr;
    for (const Argument& arg : event.arguments) {
      const bool overlaps_trigger = arg.span.start < event.trigger.end &&
                                    event.trigger.start < arg.span.end;
      if (!overlaps_trigger && arg.span.contains(t)) {
        covering = &arg;
        break;
      }
    }
    if (covering == nullptr) {
      out.push_back(util::lowercase(sentence.tokens[static_cast<std::size_t>(t)].text));
    } else if (t == std::max(covering->span.start, window.start)) {
      out.push_back(replacement(*covering));
    }
  }
  return out;
}

bool shared_with(const Argument& arg, const EventMention* partner) {
  if (partner == nullptr) return false;
  return std::any_of(partner->arguments.begin(), partner->arguments.end(),
                     [&](const Argument& other) {
                       return same_participant(arg, other);
                     });
}

}  // namespace

FeatureSet event_features(const EventMention& event, const Document& document,
                          std::string_view prefix,
                          const EventMention* partner) {
  const Sentence& sentence = document.sentence(event.sentence);
  const std::string p(prefix);
  FeatureSet out;
  for (const std::string& label : event.labels) out.push_back(p + "label=" + label);
  const std::string trigger = util::lowercase(sentence.text(event.trigger));
  out.push_back(p + "trigger=" + trigger);
  out.push_back(p + "trigger+label=" + trigger + "_" + event.most_specific_label());

  const Span window = ngram_window(event);
  add_ngrams(replaced_sequence(event, sentence, window,
                               [&](const Argument& arg) {
                                 if (shared_with(arg, partner)) return std::string("SHARED");
                                 return arg.label.empty() ? std::string("ENTITY")
                                                          : util::uppercase(arg.label);
                               }),
             p + "ent-ngram=", out);
  if (!event.arguments.empty()) {
    add_ngrams(replaced_sequence(event, sentence, window,
                                 [](const Argument& arg) {
                                   return util::uppercase(arg.role);
                                 }),
               p + "role-ngram=", out);
  }

  const int head = span_head(sentence, event.trigger);
  for (const Argument& arg : event.arguments) {
    const auto path = shortest_path(sentence.graph, head, span_head(sentence, arg.span));
    if (!path || path->empty()) continue;
    out.push_back(p + "arg-path=" + render_path(*path, PathMode::Unlexicalized));
    out.push_back(p + "arg-path-lemmas=" +
                  render_path(*path, PathMode::Lemmas, &sentence));
    out.push_back(p + "arg-path-role=" +
                  render_path(*path, PathMode::EndpointsRoles, &sentence,
                              util::uppercase(arg.role)));
    out.push_back(p + "arg-path-label=" +
                  render_path(*path, PathMode::EndpointsLabels, &sentence,
                              arg.label.empty() ? "ENTITY" : arg.label));
  }
  return out;
}

FeatureSet surface_features(const EventPair& pair, const Document& document) {
  const bool ordered =
      std::tie(pair.e1.sentence, pair.e1.span.start) <=
      std::tie(pair.e2.sentence, pair.e2.span.start);
  const EventMention& a = ordered ? pair.e1 : pair.e2;
  const EventMention& b = ordered ? pair.e2 : pair.e1;

  std::vector<std::string> tokens;
  const auto append = [&](const Sentence& s, int from, int to) {
    for (int t = from; t < to; ++t) {
      tokens.push_back(util::lowercase(s.tokens[static_cast<std::size_t>(t)].text));
    }
  };
  if (a.sentence == b.sentence) {
    append(document.sentence(a.sentence), a.span.end, b.span.start);
  } else {
    const Sentence& first = document.sentence(a.sentence);
    append(first, a.span.end, first.size());
    for (int s = a.sentence + 1; s <= b.sentence; ++s) {
      tokens.push_back("<S>");
      const Sentence& sentence = document.sentence(s);
      append(sentence, 0, s == b.sentence ? b.span.start : sentence.size());
    }
  }
  FeatureSet out;
  add_ngrams(tokens, "between:", out);
  return out;
}

FeatureSet syntax_features(const EventPair& pair, const Document& document) {
  FeatureSet out;
  const Sentence& s1 = document.sentence(pair.e1.sentence);
  const Sentence& s2 = document.sentence(pair.e2.sentence);
  const int h1 = span_head(s1, pair.e1.trigger);
  const int h2 = span_head(s2, pair.e2.trigger);

  if (pair.e1.sentence != pair.e2.sentence) {
    SynPath p1;
    SynPath p2;
    try {
      p1 = path_to_root(s1.graph, h1);
      p2 = path_to_root(s2.graph, h2);
    } catch (const StructuralError&) {
      return out;
    }
    const auto from_root = [](const SynPath& p, PathMode mode,
                              const Sentence& s) {
      return p.empty() ? std::string("root")
                       : "root " + render_path(p, mode, &s);
    };
    out.push_back("path:cross=" + from_root(p1, PathMode::Unlexicalized, s1) +
                  " + " + from_root(p2, PathMode::Unlexicalized, s2));
    out.push_back("path:cross-lemmas=" + from_root(p1, PathMode::Lemmas, s1) +
                  " + " + from_root(p2, PathMode::Lemmas, s2));
    return out;
  }

  const auto t2t = shortest_path(s1.graph, h1, h2);
  if (!t2t) return out;
  out.push_back("path:t2t=" + render_path(*t2t, PathMode::Unlexicalized));
  out.push_back("path:t2t-lemmas=" + render_path(*t2t, PathMode::Lemmas, &s1));
  out.push_back("path:dist=" + std::to_string(t2t->size()));

  // Shortest path between any token of the two mention spans.
  std::optional<SynPath> best;
  const Span w1 = ngram_window(pair.e1);
  const Span w2 = ngram_window(pair.e2);
  for (int a = w1.start; a < w1.end; ++a) {
    for (int b = w2.start; b < w2.end; ++b) {
      if (a == b) continue;
      auto p = shortest_path(s1.graph, a, b);
      if (p && (!best || p->size() < best->size())) best = std::move(p);
    }
  }
  if (best) {
    out.push_back("path:shortest=" + render_path(*best, PathMode::Unlexicalized));
    out.push_back("path:shortest-dist=" + std::to_string(best->size()));
  }
  return out;
}

FeatureSet coref_features(const EventPair& pair, const Document& document) {
  FeatureSet out;
  const std::pair<const EventMention*, const EventMention*> sides[] = {
      {&pair.e1, &pair.e2}, {&pair.e2, &pair.e1}};
  const char* names[] = {"event1", "event2"};
  for (int k = 0; k < 2; ++k) {
    const EventMention& event = *sides[k].first;
    const std::string name = names[k];
    if (event.is_anaphor) {
      out.push_back("coref:" + name + ":is_anaphor");
      FeatureSet anaphor = event_features(event, document,
                                          "coref-anaphor:" + name + ":",
                                          sides[k].second);
      out.insert(out.end(), anaphor.begin(), anaphor.end());
    }
    for (const Argument& arg : event.arguments) {
      if (arg.resolved) {
        out.push_back("coref:" + name + ":" + util::uppercase(arg.role) +
                      ":resolved");
      }
    }
  }
  return out;
}

FeatureSet pair_features(const EventPair& pair, const Document& document) {
  FeatureSet out = event_features(pair.e1, document, "event1:", &pair.e2);
  for (FeatureSet part : {event_features(pair.e2, document, "event2:", &pair.e1),
                          surface_features(pair, document),
                          syntax_features(pair, document),
                          coref_features(pair, document)}) {
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<FeatureSet> extract_features(std::span<const AnnotatedPair> pairs,
                                         const Corpus& corpus) {
  std::vector<FeatureSet> out(pairs.size());
  const auto n = static_cast<long>(pairs.size());
  // Exceptions cannot cross the parallel region; rethrow the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    try {
      const AnnotatedPair& p = pairs[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] =
          pair_features(p.events, corpus.document(p.doc_id()));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace reference {
std::vector<FeatureSet> extract_features(std::span<const AnnotatedPair> pairs,
                                         const Corpus& corpus) {
  std::vector<FeatureSet> out;
  out.reserve(pairs.size());
  for (const AnnotatedPair& p : pairs) {
    out.push_back(pair_features(p.events, corpus.document(p.doc_id())));
  }
  return out;
}
}  // namespace reference

// ---------------------------------------------------------------------------
// Index

int FeatureIndex::add(const std::string& feature) {
  const auto it = columns_.find(feature);
  if (it != columns_.end()) return it->second;
  if (frozen_) throw UsageError("cannot add '" + feature + "' to a frozen index");
  const int column = static_cast<int>(features_.size());
  columns_.emplace(feature, column);
  features_.push_back(feature);
  return column;
}

std::optional<int> FeatureIndex::find(std::string_view feature) const {
  const auto it = columns_.find(feature);
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

const std::string& FeatureIndex::feature(int column) const {
  return features_.at(static_cast<std::size_t>(column));
}

void FeatureIndex::save(std::ostream& out) const {
  for (const auto& [feature, column] : columns_) {
    out << feature << '\t' << column << '\n';
  }
}

FeatureIndex FeatureIndex::load(std::istream& in) {
  std::vector<std::pair<int, std::string>> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected 'feature TAB column'", line_number);
    }
    try {
      rows.emplace_back(std::stoi(line.substr(tab + 1)), line.substr(0, tab));
    } catch (const std::exception&) {
      throw ParseError("bad column number", line_number);
    }
  }
  std::sort(rows.begin(), rows.end());
  FeatureIndex index;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<int>(i)) {
      throw ParseError("feature columns are not dense at column " +
                       std::to_string(i));
    }
    index.add(rows[i].second);
  }
  index.freeze();
  return index;
}

bool FeatureVector::has(int column) const {
  return std::binary_search(indices.begin(), indices.end(), column);
}

FeatureIndex build_index(std::span<const FeatureSet> sets) {
  FeatureIndex index;
  for (const FeatureSet& set : sets) {
    for (const std::string& f : set) index.add(f);
  }
  index.freeze();
  return index;
}

FeatureVector vectorize(const FeatureSet& features, const FeatureIndex& index,
                        CoarseLabel label) {
  if (!index.frozen()) {
    throw UsageError("vectorize requires a frozen feature index");
  }
  FeatureVector fv;
  fv.label = label;
  for (const std::string& f : features) {
    if (auto column = index.find(f)) fv.indices.push_back(*column);
  }
  std::sort(fv.indices.begin(), fv.indices.end());
  fv.indices.erase(std::unique(fv.indices.begin(), fv.indices.end()),
                   fv.indices.end());
  return fv;
}

FeatureVector vectorize(const EventPair& pair, const Document& document,
                        const FeatureIndex& index) {
  return vectorize(pair_features(pair, document), index);
}

}  // namespace precedence
