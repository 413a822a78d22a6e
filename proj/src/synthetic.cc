#include "precedence/synthetic.h"

#include <map>
#include <sstream>

#include "precedence/candidates.h"
#include "precedence/errors.h"
#include "util.h"

namespace precedence {

namespace {

// Token specs are form/POS/head/relation with 1-based heads, 0 for the root.
// Slots: {T1} {T2} trigger nouns, {P} the shared protein, {P2} the protein of
// the second event (P unless a violation swaps in another one).
struct MentionTemplate {
  int sentence = 0;  // offset within the block
  int trigger = 0;
  Span span;
  int theme = 0;
  bool second = false;  // uses {T2} and {P2}
};

struct BlockTemplate {
  std::string name;
  std::vector<std::string> sentences;
  std::vector<MentionTemplate> mentions;
  RelationLabel label = RelationLabel::None;
};

const std::string kNoun4 = " of/IN/4/case {P}/NN/2/prep_of";

// Single-sentence noun-phrase templates: "The T1 of P <verb> the T2 of P2 ."
std::string np_sentence(const std::string& first_head, const std::string& rest) {
  return "The/DT/2/det {T1}/NN/" + first_head + kNoun4 + " " + rest;
}

const std::vector<BlockTemplate>& valid_templates() {
  static const std::vector<BlockTemplate> templates = {
      {"followed-by",
       {np_sentence("6/nsubjpass",
                    "is/VBZ/6/auxpass followed/VBN/0/root by/IN/9/case "
                    "the/DT/9/det {T2}/NN/6/prep_by of/IN/11/case "
                    "{P2}/NN/9/prep_of ././6/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 8, {7, 11}, 10, true}},
       RelationLabel::E1PrecedesE2},
      {"follows",
       {np_sentence("5/nsubj",
                    "follows/VBZ/0/root the/DT/7/det {T2}/NN/5/dobj "
                    "of/IN/9/case {P2}/NN/7/prep_of ././5/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 6, {5, 9}, 8, true}},
       RelationLabel::E2PrecedesE1},
      {"requires",
       {np_sentence("5/nsubj",
                    "requires/VBZ/0/root the/DT/7/det {T2}/NN/5/dobj "
                    "of/IN/9/case {P2}/NN/7/prep_of ././5/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 6, {5, 9}, 8, true}},
       RelationLabel::E2PrecedesE1},
      {"leads-to",
       {np_sentence("5/nsubj",
                    "leads/VBZ/0/root to/IN/8/case the/DT/8/det "
                    "{T2}/NN/5/prep_to of/IN/10/case {P2}/NN/8/prep_of "
                    "././5/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 7, {6, 10}, 9, true}},
       RelationLabel::E1PrecedesE2},
      {"conjunction",
       {np_sentence("11/nsubjpass",
                    "and/CC/2/cc the/DT/7/det {T2}/NN/2/conj_and "
                    "of/IN/9/case {P2}/NN/7/prep_of were/VBD/11/auxpass "
                    "observed/VBN/0/root ././11/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 6, {5, 9}, 8, true}},
       RelationLabel::None},
      {"independent",
       {np_sentence("6/nsubj",
                    "is/VBZ/6/cop independent/JJ/0/root of/IN/9/case "
                    "the/DT/9/det {T2}/NN/6/prep_of of/IN/11/case "
                    "{P2}/NN/9/prep_of ././6/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 8, {7, 11}, 10, true}},
       RelationLabel::None},
      {"coincides",
       {np_sentence("5/nsubj",
                    "coincides/VBZ/0/root with/IN/8/case the/DT/8/det "
                    "{T2}/NN/5/prep_with of/IN/10/case {P2}/NN/8/prep_of "
                    "././5/punct")},
       {{0, 1, {0, 4}, 3, false}, {0, 7, {6, 10}, 9, true}},
       RelationLabel::Other},
      {"subsequently",
       {"{P}/NN/2/nsubj undergoes/VBZ/0/root {T1}/NN/2/dobj ././2/punct",
        "Subsequently/RB/4/advmod ,/,/4/punct {P2}/NN/4/nsubj "
        "undergoes/VBZ/0/root {T2}/NN/4/dobj ././4/punct"},
       {{0, 2, {0, 3}, 0, false}, {1, 4, {2, 5}, 2, true}},
       RelationLabel::E1PrecedesE2},
      {"later",
       {"{P}/NN/2/nsubj undergoes/VBZ/0/root {T1}/NN/2/dobj ././2/punct",
        "Later/RB/4/advmod ,/,/4/punct {P2}/NN/4/nsubj "
        "undergoes/VBZ/0/root {T2}/NN/4/dobj ././4/punct"},
       {{0, 2, {0, 3}, 0, false}, {1, 4, {2, 5}, 2, true}},
       RelationLabel::E1PrecedesE2},
      {"previously",
       {"{P}/NN/2/nsubj undergoes/VBZ/0/root {T1}/NN/2/dobj ././2/punct",
        "Previously/RB/4/advmod ,/,/4/punct {P2}/NN/4/nsubj "
        "underwent/VBD/0/root {T2}/NN/4/dobj ././4/punct"},
       {{0, 2, {0, 3}, 0, false}, {1, 4, {2, 5}, 2, true}},
       RelationLabel::E2PrecedesE1},
      {"pluperfect",
       {"{P}/NN/2/nsubj undergoes/VBZ/0/root {T1}/NN/2/dobj ././2/punct",
        "{P2}/NN/3/nsubj had/VBD/3/aux undergone/VBN/0/root "
        "{T2}/NN/3/dobj earlier/RBR/3/advmod ././3/punct"},
       {{0, 2, {0, 3}, 0, false}, {1, 3, {0, 4}, 0, true}},
       RelationLabel::E2PrecedesE1},
      {"in-addition",
       {"{P}/NN/2/nsubj undergoes/VBZ/0/root {T1}/NN/2/dobj ././2/punct",
        "In/IN/2/case addition/NN/5/nmod ,/,/5/punct {P2}/NN/5/nsubj "
        "undergoes/VBZ/0/root {T2}/NN/5/dobj ././5/punct"},
       {{0, 2, {0, 3}, 0, false}, {1, 5, {3, 6}, 3, true}},
       RelationLabel::None},
  };
  return templates;
}

const std::vector<std::string>& violation_kinds() {
  static const std::vector<std::string> kinds = {
      "no-shared-participant", "same-type", "distance", "nested"};
  return kinds;
}

BlockTemplate violation_template(const std::string& kind) {
  const auto& t = valid_templates();
  if (kind == "no-shared-participant") return t[0];
  if (kind == "same-type") return t[4];
  if (kind == "distance") {
    const std::string filler =
        "These/DT/2/det results/NNS/4/nsubj were/VBD/4/cop "
        "reproducible/JJ/0/root ././4/punct";
    return {kind,
            {"{P}/NN/2/nsubj undergoes/VBZ/0/root {T1}/NN/2/dobj ././2/punct",
             filler, filler,
             "{P2}/NN/2/nsubj undergoes/VBZ/0/root {T2}/NN/2/dobj ././2/punct"},
            {{0, 2, {0, 3}, 0, false}, {3, 2, {0, 3}, 0, true}},
            RelationLabel::None};
  }
  // nested: the regulation mention on "promotes" is added by the generator.
  return {kind,
          {np_sentence("5/nsubj",
                       "promotes/VBZ/0/root the/DT/7/det {T2}/NN/5/dobj "
                       "of/IN/9/case {P2}/NN/7/prep_of ././5/punct")},
          {{0, 1, {0, 4}, 3, false}, {0, 6, {5, 9}, 8, true}},
          RelationLabel::E1PrecedesE2};
}

const std::vector<std::string>& trigger_nouns() {
  static const std::vector<std::string> nouns = {
      "phosphorylation", "ubiquitination", "binding",     "acetylation",
      "hydroxylation",   "translocation",  "degradation"};
  return nouns;
}

const std::vector<std::string>& protein_pool() {
  static const std::vector<std::string> pool = {
      "Ras",  "Raf",   "MEK",  "ERK",   "Akt",   "PTEN", "p53",   "Mdm2",
      "STAT3", "JAK2", "Src",  "Abl",   "Myc",   "Cdk2", "EGFR",  "mTOR",
      "Rac1", "RhoA",  "Cdc42", "PKC",  "Smad2", "TAK1", "IKK",   "Bcl2"};
  return pool;
}

const std::map<std::string, std::string>& lemmas() {
  static const std::map<std::string, std::string> table = {
      {"undergoes", "undergo"}, {"underwent", "undergo"},
      {"undergone", "undergo"}, {"follows", "follow"},
      {"followed", "follow"},   {"requires", "require"},
      {"leads", "lead"},        {"coincides", "coincide"},
      {"promotes", "promote"},  {"is", "be"},
      {"were", "be"},           {"had", "have"},
      {"observed", "observe"},  {"results", "result"}};
  return table;
}

std::string capitalize(std::string text) {
  if (!text.empty()) {
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  }
  return text;
}

std::string protein_name(std::size_t i) {
  const auto& pool = protein_pool();
  std::string name = pool[i % pool.size()];
  if (i >= pool.size()) name += std::to_string(i / pool.size());
  return name;
}

struct Slots {
  std::string t1, t2, p, p2;
};

std::string fill(std::string_view form, const Slots& slots) {
  if (form == "{T1}") return slots.t1;
  if (form == "{T2}") return slots.t2;
  if (form == "{P}") return slots.p;
  if (form == "{P2}") return slots.p2;
  return std::string(form);
}

void append_sentence(std::string& out, const std::string& spec,
                     const Slots& slots) {
  int index = 1;
  for (std::string_view token : util::split_whitespace(spec)) {
    const auto parts = util::split(token, '/');
    if (parts.size() != 4) throw Error("bad token spec: " + std::string(token));
    const std::string form = fill(parts[0], slots);
    const auto lemma_it = lemmas().find(util::lowercase(form));
    const std::string lemma =
        lemma_it != lemmas().end() ? lemma_it->second : util::lowercase(form);
    out += std::to_string(index++) + '\t' + form + '\t' + lemma + "\t_\t" +
           std::string(parts[1]) + "\t_\t" + std::string(parts[2]) + '\t' +
           std::string(parts[3]) + "\t_\t_\n";
  }
  out += '\n';
}

Argument theme_argument(int theme, const std::string& protein) {
  Argument a;
  a.role = "theme";
  a.span = {theme, theme + 1};
  a.label = "Protein";
  a.grounding = "uniprot:" + protein;
  return a;
}

void validate(const SyntheticConfig& c) {
  if (c.documents < 0) throw ConfigError("documents must be non-negative");
  if (c.min_blocks < 1 || c.max_blocks < c.min_blocks) {
    throw ConfigError("need 1 <= min_blocks <= max_blocks");
  }
  if (c.violation_rate < 0 || c.violation_rate > 1 || c.label_noise < 0 ||
      c.label_noise > 1) {
    throw ConfigError("rates must lie in [0, 1]");
  }
}

}  // namespace

std::string SyntheticCorpus::conllu() const {
  std::string out;
  for (const Document& d : corpus.documents()) out += write_conllu(d);
  return out;
}

nlohmann::json SyntheticCorpus::mentions_json() const {
  return mentions_to_json(corpus.mentions());
}

nlohmann::json SyntheticCorpus::annotations_json() const {
  return export_annotations(pairs);
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
  validate(config);
  std::string conllu;
  std::vector<EventMention> mentions;
  struct Planned {
    std::string doc_id, e1, e2;
    RelationLabel label;
    std::string violation;
  };
  std::vector<Planned> planned;

  for (int d = 0; d < config.documents; ++d) {
    util::Rng rng = util::stream(config.seed, static_cast<std::uint64_t>(d));
    std::ostringstream id;
    id << "doc" << (d < 10 ? "0" : "") << d;
    const std::string doc_id = id.str();
    conllu += "# doc_id = " + doc_id + "\n";

    std::vector<std::size_t> proteins(protein_pool().size() * 2);
    for (std::size_t i = 0; i < proteins.size(); ++i) proteins[i] = i;
    std::shuffle(proteins.begin(), proteins.end(), rng);
    std::size_t next_protein = 0;

    const int blocks =
        config.min_blocks +
        static_cast<int>(util::uniform_index(
            rng, static_cast<std::size_t>(config.max_blocks - config.min_blocks + 1)));
    int sentence_base = 0;
    int mention_no = 0;
    for (int b = 0; b < blocks; ++b) {
      std::string violation;
      BlockTemplate block;
      if (util::uniform_unit(rng) < config.violation_rate) {
        violation = violation_kinds()[util::uniform_index(rng, violation_kinds().size())];
        block = violation_template(violation);
      } else {
        block = valid_templates()[util::uniform_index(rng, valid_templates().size())];
      }
      const auto& nouns = trigger_nouns();
      Slots slots;
      const std::size_t t1 = util::uniform_index(rng, nouns.size());
      std::size_t t2 = util::uniform_index(rng, nouns.size() - 1);
      if (t2 >= t1) ++t2;
      if (violation == "same-type") t2 = t1;
      slots.t1 = nouns[t1];
      slots.t2 = nouns[t2];
      if (next_protein + 2 > proteins.size()) next_protein = 0;
      slots.p = protein_name(proteins[next_protein++]);
      slots.p2 = violation == "no-shared-participant"
                     ? protein_name(proteins[next_protein++])
                     : slots.p;

      for (const std::string& s : block.sentences) append_sentence(conllu, s, slots);

      std::vector<std::string> ids;
      for (const MentionTemplate& mt : block.mentions) {
        EventMention m;
        m.id = doc_id + ".e" + std::to_string(mention_no++);
        m.doc_id = doc_id;
        m.sentence = sentence_base + mt.sentence;
        m.trigger = {mt.trigger, mt.trigger + 1};
        m.span = mt.span;
        m.labels = {capitalize(mt.second ? slots.t2 : slots.t1)};
        m.arguments.push_back(theme_argument(mt.theme, mt.second ? slots.p2 : slots.p));
        ids.push_back(m.id);
        mentions.push_back(std::move(m));
      }
      if (violation == "nested") {
        const EventMention& e1 = mentions[mentions.size() - 2];
        const EventMention& e2 = mentions.back();
        EventMention reg;
        reg.id = doc_id + ".e" + std::to_string(mention_no++);
        reg.doc_id = doc_id;
        reg.sentence = e1.sentence;
        reg.trigger = {4, 5};
        reg.span = {0, 9};
        reg.labels = {"Positive_regulation", "Regulation"};
        Argument controller{"controller", e1.span, e1.most_specific_label(),
                            false, "", e1.id, ""};
        Argument controlled{"controlled", e2.span, e2.most_specific_label(),
                            false, "", e2.id, ""};
        reg.arguments = {controller, controlled};
        mentions.push_back(std::move(reg));
      }

      RelationLabel label = block.label;
      if (violation.empty() && util::uniform_unit(rng) < config.label_noise) {
        const std::size_t n = std::size(kRelationLabels);
        std::size_t pick = util::uniform_index(rng, n - 1);
        if (kRelationLabels[pick] == label) pick = n - 1;
        label = kRelationLabels[pick];
      }
      planned.push_back({doc_id, ids[0], ids[1], label, violation});
      sentence_base += static_cast<int>(block.sentences.size());
    }
  }

  // Round-trip through the file formats so every generated mention passes
  // the loaders' validation.
  std::vector<Document> documents = parse_documents(conllu);
  std::vector<EventMention> loaded =
      load_event_mentions(mentions_to_json(mentions).dump(), documents);
  SyntheticCorpus out{Corpus(std::move(documents), std::move(loaded)), {}, {}};

  for (const Planned& p : planned) {
    if (!p.violation.empty()) {
      out.violations.push_back({p.doc_id, p.e1, p.e2, p.violation});
      continue;
    }
    AnnotatedPair pair;
    pair.events = {p.doc_id, *out.corpus.find_mention(p.e1),
                   *out.corpus.find_mention(p.e2)};
    pair.pair_id = candidate_pair_id(pair.events);
    pair.label = p.label;
    pair.encompassing =
        encompassing_span(pair.events, out.corpus.document(p.doc_id));
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

}  // namespace precedence
