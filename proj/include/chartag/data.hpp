#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chartag/tensor.hpp"

namespace chartag {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr const char* kPadSym = "<PAD>";
inline constexpr const char* kUnkSym = "<UNK>";

struct Token {
  std::string surface;
  std::string pos;
  std::string chunk;
  std::string gazetteer;
  std::string label;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string doc_id;
  int columns = 0;  // column count of the source lines; serialize_conll replays it

  bool operator==(const Sentence&) const = default;
};

using Corpus = std::vector<Sentence>;

// Column positions within a CoNLL-style line; -1 marks an absent field.
// Lines may carry fewer columns than a position demands as long as the
// count is consistent within each sentence; fields past the line end stay
// empty. The word column is mandatory.
struct ColumnSpec {
  int word = 0;
  int pos = 1;
  int chunk = 2;
  int gazetteer = 3;
  int label = 4;

  // Parses a comma list of field names out of {word,pos,chunk,gazetteer,label},
  // e.g. "word,label". A "-" entry skips that column. Unknown or repeated
  // names are errors.
  static ColumnSpec parse(const std::string& names);
  std::string to_names() const;
};

struct ParseStats {
  int sentences = 0;
  int tokens = 0;
  int documents = 0;
  int repaired_bio = 0;  // stray I-X labels promoted to B-X
};

// Blank line ends a sentence; "-DOCSTART-..." or "#doc <id>" starts a new
// document. Throws DataError with a line number on inconsistent column
// counts, and on label tags that are not O / B-X / I-X.
Corpus parse_conll(const std::string& text, const ColumnSpec& spec, ParseStats* stats = nullptr);

// Inverse of parse_conll for the fields the spec maps: emits "#doc <id>"
// markers and, per token, the mapped fields that fit in the sentence's
// column count. parse(serialize(parse(text))) == parse(text) for a fixed spec.
std::string serialize_conll(const Corpus& corpus, const ColumnSpec& spec);

// Bijective string <-> id map with PAD = 0 and UNK = 1 preseeded.
struct StringIndex {
  std::vector<std::string> names{kPadSym, kUnkSym};
  std::unordered_map<std::string, int> ids{{kPadSym, kPadId}, {kUnkSym, kUnkId}};

  int add(const std::string& s);
  int find(const std::string& s) const;        // -1 when absent
  int get_or_unk(const std::string& s) const;  // kUnkId when absent
  int size() const { return static_cast<int>(names.size()); }
  const std::string& name(int id) const;

  bool operator==(const StringIndex& o) const { return names == o.names; }
};

struct Vocab {
  StringIndex words;
  StringIndex chars;
  StringIndex labels;
  std::map<std::string, StringIndex> features;  // keyed pos / chunk / gazetteer
  std::map<std::string, int> word_freq;         // training-set surface frequency

  bool operator==(const Vocab&) const = default;
};

// A word enters the index iff it appears in the pretrained vocabulary or
// its training frequency reaches the threshold; everything else falls to
// UNK at lookup time. Char, label and feature indices keep every symbol
// seen. Frequencies (and the index, when lowercase is set) use the
// lowercased surface.
Vocab build_vocab(const Corpus& train, const std::unordered_map<std::string, int>* pretrained,
                  int threshold, bool lowercase);

struct PretrainedVectors {
  int dim = 0;
  std::vector<std::string> words;               // rows 2.. of the table
  std::unordered_map<std::string, int> index;   // word -> table row
  Tensor table;                                 // [(2 + |words|) x dim], PAD zeros, UNK mean
  int duplicates = 0;                           // duplicate lines, last occurrence kept
};

// Text format: optional "V D" integer header, then "word v1 .. vD" lines.
// Throws DataError with a line number on a dimension mismatch.
PretrainedVectors load_pretrained_vectors(const std::string& text, int expected_dim);

struct Gazetteer {
  bool case_fold = true;
  std::set<std::vector<std::string>> terms;  // tokenized, case-folded when flagged
  int max_len = 0;

  // One term per line, tokens separated by whitespace; empty lines skipped.
  static Gazetteer from_text(const std::string& text, bool case_fold = true);
};

// Greedy left-to-right longest-match BIO tags over token surfaces.
std::vector<std::string> gazetteer_tag(const Sentence& s, const Gazetteer& g);

// Indices of stray I-X tags (ones not continuing a same-type span). Throws
// DataError on tags that are not O / B-X / I-X.
std::vector<int> validate_bio(const std::vector<std::string>& tags);

// Promotes every stray I-X to B-X in place; returns how many were changed.
int repair_bio(std::vector<std::string>& tags);

// Document-level split: whole documents are shuffled deterministically by
// seed and round(fraction * #docs) of them become dev. Shuffling uses
// Rng(mix_seed(seed, kStreamSplit)) over documents in first-appearance
// order; the first round(f*N) shuffled docs are dev. Sentences keep their
// corpus order inside each part.
std::pair<Corpus, Corpus> split_train_dev(const Corpus& all, double fraction, std::uint64_t seed);

// Synthetic corpus where the entity signal lives in character patterns:
// entity words are unique stems plus a family suffix (Chemical: -ase, -ine,
// -ol; Disease: -itis, -oma), fillers are bare stems, and stems never
// contain suffix letters. Every content word is globally unique within a
// stem namespace, so content words in a corpus generated with a different
// stem_offset are guaranteed unseen.
struct SynthSpec {
  int sentences = 200;
  int min_tokens = 6;
  int max_tokens = 12;
  int min_stem = 4;   // stem length range in characters (>= 4)
  int max_stem = 8;
  double p_function = 0.35;   // slot becomes a closed-class function word
  double p_entity = 0.40;     // content slot becomes an entity
  double p_two_token = 0.20;  // an entity extends to a second token (B,I)
  int sentences_per_doc = 5;
  std::uint64_t seed = 1;
  std::uint64_t stem_offset = 0;  // disjoint namespaces give unseen words
};

Corpus generate_synthetic_corpus(const SynthSpec& spec);

}  // namespace chartag
