#include "chartag/data.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chartag/error.hpp"
#include "chartag/rng.hpp"
#include "chartag/util.hpp"

namespace chartag {

namespace {

struct BioTag {
  char kind;         // 'O', 'B' or 'I'
  std::string type;  // empty for O
};

BioTag parse_bio(const std::string& tag, const std::string& where) {
  if (tag == "O") return {'O', ""};
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
    return {tag[0], tag.substr(2)};
  }
  throw DataError(where + ": unknown BIO tag '" + tag + "'");
}

}  // namespace

ColumnSpec ColumnSpec::parse(const std::string& names) {
  ColumnSpec spec;
  spec.word = spec.pos = spec.chunk = spec.gazetteer = spec.label = -1;
  std::stringstream ss(names);
  std::string field;
  int pos = 0;
  while (std::getline(ss, field, ',')) {
    field = trim(field);
    if (field == "-") {  // ignored column
      ++pos;
      continue;
    }
    int* slot = nullptr;
    if (field == "word") slot = &spec.word;
    else if (field == "pos") slot = &spec.pos;
    else if (field == "chunk") slot = &spec.chunk;
    else if (field == "gazetteer") slot = &spec.gazetteer;
    else if (field == "label") slot = &spec.label;
    else throw DataError("columns: unknown field '" + field + "'");
    if (*slot != -1) throw DataError("columns: field '" + field + "' listed twice");
    *slot = pos++;
  }
  if (spec.word < 0) throw DataError("columns: a word field is required");
  return spec;
}

std::string ColumnSpec::to_names() const {
  std::vector<std::pair<int, std::string>> mapped;
  if (word >= 0) mapped.emplace_back(word, "word");
  if (pos >= 0) mapped.emplace_back(pos, "pos");
  if (chunk >= 0) mapped.emplace_back(chunk, "chunk");
  if (gazetteer >= 0) mapped.emplace_back(gazetteer, "gazetteer");
  if (label >= 0) mapped.emplace_back(label, "label");
  std::sort(mapped.begin(), mapped.end());
  std::string out;
  for (const auto& [p, name] : mapped) {
    if (!out.empty()) out += ",";
    out += name;
  }
  return out;
}

Corpus parse_conll(const std::string& text, const ColumnSpec& spec, ParseStats* stats) {
  if (spec.word < 0) throw DataError("parse_conll: column spec lacks a word position");
  Corpus corpus;
  ParseStats local;
  Sentence cur;
  std::string doc_id = "doc0";
  bool doc_seen = false;
  int expected_cols = -1;

  auto flush = [&]() {
    if (cur.tokens.empty()) return;
    if (spec.label >= 0 && spec.label < cur.columns) {
      std::vector<std::string> labels;
      labels.reserve(cur.tokens.size());
      for (const auto& t : cur.tokens) labels.push_back(t.label);
      local.repaired_bio += repair_bio(labels);
      for (std::size_t i = 0; i < labels.size(); ++i) cur.tokens[i].label = labels[i];
    }
    local.sentences += 1;
    local.tokens += static_cast<int>(cur.tokens.size());
    corpus.push_back(std::move(cur));
    cur = Sentence{};
    expected_cols = -1;
  };

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = trim(line);
    if (stripped.empty()) {
      flush();
      continue;
    }
    bool is_docstart = stripped.rfind("-DOCSTART-", 0) == 0;
    bool is_doc_comment = stripped.rfind("#doc", 0) == 0;
    if (is_docstart || is_doc_comment) {
      flush();
      local.documents += 1;
      if (is_doc_comment) {
        std::string rest = trim(stripped.substr(4));
        doc_id = rest.empty() ? "doc" + std::to_string(local.documents) : rest;
      } else {
        doc_id = "doc" + std::to_string(local.documents);
      }
      doc_seen = true;
      continue;
    }

    std::vector<std::string> cols = split_ws(stripped);
    if (expected_cols == -1) {
      expected_cols = static_cast<int>(cols.size());
      cur.columns = expected_cols;
      cur.doc_id = doc_id;
    } else if (static_cast<int>(cols.size()) != expected_cols) {
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                      std::to_string(expected_cols) + " columns, got " +
                      std::to_string(cols.size()));
    }
    if (spec.word >= expected_cols) {
      throw DataError("line " + std::to_string(lineno) + ": no word column at position " +
                      std::to_string(spec.word));
    }
    Token t;
    auto grab = [&](int p) -> std::string {
      return (p >= 0 && p < expected_cols) ? cols[static_cast<std::size_t>(p)] : std::string();
    };
    t.surface = cols[static_cast<std::size_t>(spec.word)];
    t.pos = grab(spec.pos);
    t.chunk = grab(spec.chunk);
    t.gazetteer = grab(spec.gazetteer);
    t.label = grab(spec.label);
    if (!t.label.empty()) {
      parse_bio(t.label, "line " + std::to_string(lineno) + " token '" + t.surface + "'");
    }
    cur.tokens.push_back(std::move(t));
  }
  flush();
  if (!doc_seen && !corpus.empty()) local.documents = 1;
  if (stats) *stats = local;
  return corpus;
}

std::string serialize_conll(const Corpus& corpus, const ColumnSpec& spec) {
  std::string out;
  std::string doc_id;
  bool first_doc = true;
  for (const auto& s : corpus) {
    if (first_doc || s.doc_id != doc_id) {
      doc_id = s.doc_id;
      first_doc = false;
      out += "#doc " + doc_id + "\n";
    }
    for (const auto& t : s.tokens) {
      std::vector<std::string> cols(static_cast<std::size_t>(std::max(s.columns, 1)), "-");
      auto put = [&](int p, const std::string& v) {
        if (p >= 0 && p < static_cast<int>(cols.size()) && !v.empty()) cols[static_cast<std::size_t>(p)] = v;
      };
      put(spec.word, t.surface);
      put(spec.pos, t.pos);
      put(spec.chunk, t.chunk);
      put(spec.gazetteer, t.gazetteer);
      put(spec.label, t.label);
      std::string line;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) line += " ";
        line += cols[i];
      }
      out += line + "\n";
    }
    out += "\n";
  }
  return out;
}

int StringIndex::add(const std::string& s) {
  auto it = ids.find(s);
  if (it != ids.end()) return it->second;
  int id = static_cast<int>(names.size());
  names.push_back(s);
  ids.emplace(s, id);
  return id;
}

int StringIndex::find(const std::string& s) const {
  auto it = ids.find(s);
  return it == ids.end() ? -1 : it->second;
}

int StringIndex::get_or_unk(const std::string& s) const {
  int id = find(s);
  return id < 0 ? kUnkId : id;
}

const std::string& StringIndex::name(int id) const {
  if (id < 0 || id >= size()) throw DimError("StringIndex: id " + std::to_string(id) + " out of range");
  return names[static_cast<std::size_t>(id)];
}

Vocab build_vocab(const Corpus& train, const std::unordered_map<std::string, int>* pretrained,
                  int threshold, bool lowercase) {
  if (threshold < 1) throw DimError("build_vocab: threshold must be >= 1");
  Vocab v;
  v.features.emplace("pos", StringIndex{});
  v.features.emplace("chunk", StringIndex{});
  v.features.emplace("gazetteer", StringIndex{});

  auto key_of = [&](const std::string& s) { return lowercase ? lower_ascii(s) : s; };

  for (const auto& s : train) {
    for (const auto& t : s.tokens) v.word_freq[key_of(t.surface)] += 1;
  }
  for (const auto& s : train) {
    for (const auto& t : s.tokens) {
      std::string key = key_of(t.surface);
      bool in_pretrained = pretrained != nullptr && pretrained->count(key) > 0;
      if (in_pretrained || v.word_freq[key] >= threshold) v.words.add(key);
      for (const auto& c : utf8_chars(t.surface)) v.chars.add(c);
      if (!t.label.empty()) v.labels.add(t.label);
      if (!t.pos.empty()) v.features["pos"].add(t.pos);
      if (!t.chunk.empty()) v.features["chunk"].add(t.chunk);
      if (!t.gazetteer.empty()) v.features["gazetteer"].add(t.gazetteer);
    }
  }
  return v;
}

PretrainedVectors load_pretrained_vectors(const std::string& text, int expected_dim) {
  if (expected_dim < 1) throw DimError("load_pretrained_vectors: dimension must be positive");
  PretrainedVectors pv;
  pv.dim = expected_dim;

  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  bool first_content = true;
  while (std::getline(ss, line)) {
    ++lineno;
    std::vector<std::string> f = split_ws(line);
    if (f.empty()) continue;
    if (first_content) {
      first_content = false;
      if (f.size() == 2) {
        // "V D" header: two bare integers
        bool ints = f[0].find_first_not_of("0123456789") == std::string::npos &&
                    f[1].find_first_not_of("0123456789") == std::string::npos;
        if (ints) {
          int d = std::stoi(f[1]);
          if (d != expected_dim) {
            throw DataError("line " + std::to_string(lineno) + ": vector file declares dimension " +
                            std::to_string(d) + ", expected " + std::to_string(expected_dim));
          }
          continue;
        }
      }
    }
    if (static_cast<int>(f.size()) != expected_dim + 1) {
      throw DataError("line " + std::to_string(lineno) + ": expected word + " +
                      std::to_string(expected_dim) + " values, got " +
                      std::to_string(f.size()) + " fields");
    }
    std::vector<double> vals(static_cast<std::size_t>(expected_dim));
    for (int i = 0; i < expected_dim; ++i) {
      try {
        vals[static_cast<std::size_t>(i)] = std::stod(f[static_cast<std::size_t>(i + 1)]);
      } catch (const std::exception&) {
        throw DataError("line " + std::to_string(lineno) + ": bad number '" +
                        f[static_cast<std::size_t>(i + 1)] + "'");
      }
    }
    auto it = pv.index.find(f[0]);
    if (it != pv.index.end()) {
      rows[static_cast<std::size_t>(it->second - 2)] = std::move(vals);
      pv.duplicates += 1;
    } else {
      pv.index.emplace(f[0], static_cast<int>(rows.size()) + 2);
      pv.words.push_back(f[0]);
      rows.push_back(std::move(vals));
    }
  }

  int n = static_cast<int>(rows.size());
  pv.table = Tensor::zeros({n + 2, expected_dim});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < expected_dim; ++j) {
      pv.table.at(i + 2, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  if (n > 0) {
    for (int j = 0; j < expected_dim; ++j) {
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      pv.table.at(kUnkId, j) = mean / n;
    }
  }
  pv.table.check_finite("load_pretrained_vectors");
  return pv;
}

Gazetteer Gazetteer::from_text(const std::string& text, bool case_fold) {
  Gazetteer g;
  g.case_fold = case_fold;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    if (case_fold) {
      for (auto& t : toks) t = lower_ascii(t);
    }
    g.max_len = std::max(g.max_len, static_cast<int>(toks.size()));
    g.terms.insert(std::move(toks));
  }
  return g;
}

std::vector<std::string> gazetteer_tag(const Sentence& s, const Gazetteer& g) {
  int n = static_cast<int>(s.tokens.size());
  std::vector<std::string> tags(static_cast<std::size_t>(n), "O");
  if (g.terms.empty()) return tags;

  std::vector<std::string> surf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    surf[static_cast<std::size_t>(i)] =
        g.case_fold ? lower_ascii(s.tokens[static_cast<std::size_t>(i)].surface)
                    : s.tokens[static_cast<std::size_t>(i)].surface;
  }

  int i = 0;
  while (i < n) {
    int best = 0;
    int cap = std::min(g.max_len, n - i);
    std::vector<std::string> window;
    window.reserve(static_cast<std::size_t>(cap));
    for (int len = 1; len <= cap; ++len) {
      window.push_back(surf[static_cast<std::size_t>(i + len - 1)]);
      if (g.terms.count(window)) best = len;
    }
    if (best > 0) {
      tags[static_cast<std::size_t>(i)] = "B";
      for (int k = 1; k < best; ++k) tags[static_cast<std::size_t>(i + k)] = "I";
      i += best;
    } else {
      ++i;
    }
  }
  return tags;
}

std::vector<int> validate_bio(const std::vector<std::string>& tags) {
  std::vector<int> violations;
  char prev_kind = 'O';
  std::string prev_type;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    BioTag t = parse_bio(tags[i], "position " + std::to_string(i));
    if (t.kind == 'I' && !(prev_kind != 'O' && prev_type == t.type)) {
      violations.push_back(static_cast<int>(i));
    }
    prev_kind = t.kind;
    prev_type = t.type;
  }
  return violations;
}

int repair_bio(std::vector<std::string>& tags) {
  std::vector<int> bad = validate_bio(tags);
  for (int i : bad) tags[static_cast<std::size_t>(i)][0] = 'B';
  return static_cast<int>(bad.size());
}

std::pair<Corpus, Corpus> split_train_dev(const Corpus& all, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0) throw DimError("split_train_dev: fraction must be in (0,1)");
  std::vector<std::string> docs;
  std::set<std::string> seen;
  for (const auto& s : all) {
    if (seen.insert(s.doc_id).second) docs.push_back(s.doc_id);
  }
  if (docs.size() < 2) throw DataError("split_train_dev: need at least 2 documents");

  Rng rng(mix_seed(seed, kStreamSplit));
  rng.shuffle(docs);
  auto n_dev = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(docs.size())));
  n_dev = std::min(std::max<std::size_t>(n_dev, 0), docs.size() - 1);
  std::set<std::string> dev_docs(docs.begin(), docs.begin() + static_cast<long>(n_dev));

  Corpus train, dev;
  for (const auto& s : all) {
    (dev_docs.count(s.doc_id) ? dev : train).push_back(s);
  }
  return {std::move(train), std::move(dev)};
}

namespace {

constexpr const char* kStemAlphabet = "bcdfghjkpqrvwxz";  // disjoint from suffix letters
constexpr int kStemBase = 15;
constexpr int kStemWidth = 4;  // 15^4 = 50625 stems per namespace

std::string encode_stem_id(std::uint64_t id) {
  if (id >= 50625) throw DataError("generate_synthetic_corpus: stem namespace exhausted");
  std::string s(kStemWidth, kStemAlphabet[0]);
  for (int i = kStemWidth - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kStemAlphabet[id % kStemBase];
    id /= kStemBase;
  }
  return s;
}

const std::vector<std::string> kFunctionWords = {"the", "of", "and", "in", "with",
                                                 "was", "for", "to", "on", "a"};

struct Family {
  std::string type;
  std::vector<std::string> suffixes;
};

const std::vector<Family> kFamilies = {
    {"Chemical", {"ase", "ine", "ol"}},
    {"Disease", {"itis", "oma"}},
};

}  // namespace

Corpus generate_synthetic_corpus(const SynthSpec& spec) {
  if (spec.sentences < 0) throw DimError("generate_synthetic_corpus: negative sentence count");
  if (spec.min_stem < kStemWidth) throw DimError("generate_synthetic_corpus: min_stem must be >= 4");
  if (spec.max_stem < spec.min_stem) throw DimError("generate_synthetic_corpus: max_stem < min_stem");
  if (spec.min_tokens < 1 || spec.max_tokens < spec.min_tokens) {
    throw DimError("generate_synthetic_corpus: bad token range");
  }
  if (spec.sentences_per_doc < 1) throw DimError("generate_synthetic_corpus: sentences_per_doc must be >= 1");

  Rng rng(mix_seed(spec.seed, kStreamSynth));
  std::uint64_t next_stem = spec.stem_offset;

  auto make_stem = [&]() {
    int len = spec.min_stem + rng.below(spec.max_stem - spec.min_stem + 1);
    std::string s;
    s.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len - kStemWidth; ++i) s += kStemAlphabet[rng.below(kStemBase)];
    s += encode_stem_id(next_stem++);
    return s;
  };

  Corpus corpus;
  for (int si = 0; si < spec.sentences; ++si) {
    Sentence sent;
    sent.doc_id = "synth" + std::to_string(si / spec.sentences_per_doc);
    sent.columns = 5;
    int T = spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);

    bool prev_entity = false;
    int t = 0;
    while (t < T) {
      auto push = [&](std::string surface, std::string pos, std::string label) {
        Token tok;
        tok.surface = std::move(surface);
        tok.pos = std::move(pos);
        tok.chunk = t == 0 ? "B-NP" : "I-NP";
        tok.gazetteer = "O";
        tok.label = std::move(label);
        sent.tokens.push_back(std::move(tok));
        ++t;
      };

      if (rng.uniform() < spec.p_function) {
        push(kFunctionWords[static_cast<std::size_t>(rng.below(static_cast<int>(kFunctionWords.size())))],
             "IN", "O");
        prev_entity = false;
        continue;
      }
      if (!prev_entity && rng.uniform() < spec.p_entity) {
        const Family& fam = kFamilies[static_cast<std::size_t>(rng.below(static_cast<int>(kFamilies.size())))];
        auto suffix = [&]() {
          return fam.suffixes[static_cast<std::size_t>(rng.below(static_cast<int>(fam.suffixes.size())))];
        };
        push(make_stem() + suffix(), "NN", "B-" + fam.type);
        if (t < T && rng.uniform() < spec.p_two_token) {
          push(make_stem() + suffix(), "NN", "I-" + fam.type);
        }
        prev_entity = true;
        continue;
      }
      push(make_stem(), "NN", "O");
      prev_entity = false;
    }

    std::vector<std::string> labels;
    for (const auto& tok : sent.tokens) labels.push_back(tok.label);
    if (!validate_bio(labels).empty()) {
      throw DataError("generate_synthetic_corpus: produced invalid BIO (bug)");
    }
    corpus.push_back(std::move(sent));
  }
  return corpus;
}

}  // namespace chartag
