#include "chartag/model.hpp"

#include <cmath>

#include "chartag/error.hpp"
#include "chartag/util.hpp"

namespace chartag {

namespace {

Tensor uniform_tensor(Rng& rng, std::vector<int> shape, double limit) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& x : t.data) x = rng.uniform(-limit, limit);
  return t;
}

double glorot_limit(int fan_in, int fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// Embedding table: PAD row zero, remaining rows uniform in +-limit.
Tensor embedding_table(Rng& rng, int rows, int dim, double limit) {
  Tensor t = Tensor::zeros({rows, dim});
  for (int r = 1; r < rows; ++r) {
    for (int j = 0; j < dim; ++j) t.at(r, j) = rng.uniform(-limit, limit);
  }
  return t;
}

void init_lstm(Rng& rng, ParamMap& params, const std::string& prefix, int input, int hidden) {
  params[prefix + ".wx"] = uniform_tensor(rng, {4 * hidden, input}, glorot_limit(input, 4 * hidden));
  params[prefix + ".wh"] = uniform_tensor(rng, {4 * hidden, hidden}, glorot_limit(hidden, 4 * hidden));
  Tensor b = Tensor::zeros({4 * hidden});
  for (int i = hidden; i < 2 * hidden; ++i) b.data[static_cast<std::size_t>(i)] = 1.0;  // forget gate
  params[prefix + ".b"] = std::move(b);
}

}  // namespace

Model init_model(const ModelConfig& cfg, const Vocab& vocab,
                 const PretrainedVectors* pretrained, std::uint64_t seed) {
  cfg.validate();
  if (vocab.labels.size() <= 2) {
    throw DataError("init_model: label vocabulary is empty");
  }
  if (pretrained != nullptr && pretrained->dim != cfg.word_dim) {
    throw DimError("init_model: pretrained vectors have dim " + std::to_string(pretrained->dim) +
                   ", config wants " + std::to_string(cfg.word_dim));
  }

  Model m;
  m.cfg = cfg;
  m.vocab = vocab;
  Rng rng(mix_seed(seed, kStreamInit));

  // Word table: PAD zero; pretrained rows copied; others drawn fan-based.
  {
    int v = vocab.words.size();
    Tensor t = Tensor::zeros({v, cfg.word_dim});
    double limit = std::sqrt(3.0 / static_cast<double>(cfg.word_dim));
    for (int r = 1; r < v; ++r) {
      const std::string& w = vocab.words.name(r);
      int src = -1;
      if (pretrained != nullptr) {
        if (r == kUnkId) {
          src = kUnkId;  // mean row of the pretrained table
        } else {
          auto it = pretrained->index.find(w);
          if (it != pretrained->index.end()) src = it->second;
        }
      }
      if (src >= 0) {
        for (int j = 0; j < cfg.word_dim; ++j) t.at(r, j) = pretrained->table.at(src, j);
      } else {
        for (int j = 0; j < cfg.word_dim; ++j) t.at(r, j) = rng.uniform(-limit, limit);
      }
    }
    m.params["word.table"] = std::move(t);
  }

  if (cfg.char_encoder != CharEncoder::kNone) {
    m.params["char.table"] =
        embedding_table(rng, vocab.chars.size(), cfg.char_dim, 0.5 / static_cast<double>(cfg.char_dim));
    if (cfg.char_encoder == CharEncoder::kCnn) {
      m.params["char_cnn.w"] = uniform_tensor(rng, {cfg.cnn_window, cfg.char_dim, cfg.cnn_filters},
                                              glorot_limit(cfg.cnn_window * cfg.char_dim, cfg.cnn_filters));
      m.params["char_cnn.b"] = Tensor::zeros({cfg.cnn_filters});
    } else {
      init_lstm(rng, m.params, "char_lstm.fw", cfg.char_dim, cfg.char_lstm_hidden);
      init_lstm(rng, m.params, "char_lstm.bw", cfg.char_dim, cfg.char_lstm_hidden);
    }
  }

  for (const auto& f : cfg.features) {
    auto it = vocab.features.find(f);
    if (it == vocab.features.end()) throw DataError("init_model: vocabulary lacks feature '" + f + "'");
    m.params["feat." + f + ".table"] = embedding_table(
        rng, it->second.size(), cfg.feat_dim, std::sqrt(3.0 / static_cast<double>(cfg.feat_dim)));
  }

  for (int layer = 0; layer < cfg.layers; ++layer) {
    int in_dim = layer == 0 ? cfg.input_dim() : cfg.output_dim();
    std::string base = "lstm" + std::to_string(layer);
    init_lstm(rng, m.params, base + ".fw", in_dim, cfg.hidden);
    init_lstm(rng, m.params, base + ".bw", in_dim, cfg.hidden);
  }

  int L = vocab.labels.size();
  m.params["proj.w"] = uniform_tensor(rng, {cfg.output_dim(), L}, glorot_limit(cfg.output_dim(), L));
  m.params["proj.b"] = Tensor::zeros({L});
  if (cfg.decoder == DecoderKind::kCrf) {
    m.params["crf.trans"] = Tensor::zeros({L, L});
    m.params["crf.start"] = Tensor::zeros({L});
    m.params["crf.end"] = Tensor::zeros({L});
  }
  return m;
}

EncodedSentence encode_ids(const Model& m, const Sentence& s, bool with_labels) {
  if (s.tokens.empty()) throw DataError("encode_ids: empty sentence");
  EncodedSentence e;
  int T = static_cast<int>(s.tokens.size());
  e.word_ids.reserve(static_cast<std::size_t>(T));
  for (const auto& tok : s.tokens) {
    std::string key = m.cfg.lowercase ? lower_ascii(tok.surface) : tok.surface;
    e.word_ids.push_back(m.vocab.words.get_or_unk(key));
  }
  if (m.cfg.char_encoder != CharEncoder::kNone) {
    e.char_ids.reserve(static_cast<std::size_t>(T));
    for (const auto& tok : s.tokens) {
      std::vector<int> ids;
      for (const auto& c : utf8_chars(tok.surface)) ids.push_back(m.vocab.chars.get_or_unk(c));
      if (ids.empty()) throw DataError("encode_ids: token with empty surface");
      e.char_ids.push_back(std::move(ids));
    }
  }
  for (const auto& f : m.cfg.features) {
    auto it = m.vocab.features.find(f);
    if (it == m.vocab.features.end()) throw DataError("encode_ids: vocabulary lacks feature '" + f + "'");
    std::vector<int> col;
    col.reserve(static_cast<std::size_t>(T));
    for (const auto& tok : s.tokens) {
      const std::string* value = nullptr;
      if (f == "pos") value = &tok.pos;
      else if (f == "chunk") value = &tok.chunk;
      else value = &tok.gazetteer;
      col.push_back(it->second.get_or_unk(*value));
    }
    e.feature_ids.push_back(std::move(col));
  }
  if (with_labels) {
    e.label_ids.reserve(static_cast<std::size_t>(T));
    for (const auto& tok : s.tokens) {
      if (tok.label.empty()) throw DataError("encode_ids: token '" + tok.surface + "' has no gold label");
      e.label_ids.push_back(m.vocab.labels.get_or_unk(tok.label));
    }
  }
  return e;
}

NodeId sentence_loss(Graph& g, const Model& m, const EncodedSentence& s,
                     bool train_mode, Rng* dropout_rng) {
  if (s.label_ids.size() != s.word_ids.size()) {
    throw DimError("sentence_loss: sentence lacks gold label ids");
  }
  NodeId e = emission_scores(g, m.params, m.cfg, s, train_mode, dropout_rng);
  if (m.cfg.decoder == DecoderKind::kCrf) {
    return crf_nll(g, e, bind_param(g, m.params, "crf.trans"), bind_param(g, m.params, "crf.start"),
                   bind_param(g, m.params, "crf.end"), s.label_ids);
  }
  return softmax_nll(g, e, s.label_ids);
}

DecodePenalties bio_penalties(const StringIndex& labels) {
  constexpr double kForbid = -1e9;
  int L = labels.size();
  DecodePenalties p;
  p.trans = Tensor::zeros({L, L});
  p.start = Tensor::zeros({L});

  auto tag_of = [&](int id) { return labels.name(id); };
  for (int j = 0; j < L; ++j) {
    const std::string& tj = tag_of(j);
    bool reserved = j == kPadId || j == kUnkId;
    bool inside = tj.size() > 2 && tj[0] == 'I' && tj[1] == '-';
    if (reserved || inside) p.start.at(j) = kForbid;
    for (int i = 0; i < L; ++i) {
      if (reserved) {
        p.trans.at(i, j) = kForbid;
        continue;
      }
      if (!inside) continue;
      const std::string& ti = tag_of(i);
      bool same_type = ti.size() > 2 && (ti[0] == 'B' || ti[0] == 'I') && ti.substr(2) == tj.substr(2);
      if (!same_type) p.trans.at(i, j) = kForbid;
    }
  }
  return p;
}

std::vector<int> predict_labels(const Model& m, const EncodedSentence& s) {
  Graph g;
  NodeId e = emission_scores(g, m.params, m.cfg, s, false, nullptr);
  const Tensor& emissions = g.value(e);
  if (m.cfg.decoder == DecoderKind::kSoftmax) {
    if (!m.cfg.constrain_decode) return softmax_decode(emissions);
    // Constrained decoding runs Viterbi over zero transitions plus penalties.
    DecodePenalties p = bio_penalties(m.vocab.labels);
    Tensor end = Tensor::zeros({m.num_labels()});
    return viterbi_decode(emissions, p.trans, p.start, end).labels;
  }
  Tensor trans = m.params.at("crf.trans");
  Tensor start = m.params.at("crf.start");
  Tensor end = m.params.at("crf.end");
  if (m.cfg.constrain_decode) {
    DecodePenalties p = bio_penalties(m.vocab.labels);
    for (std::size_t i = 0; i < trans.data.size(); ++i) trans.data[i] += p.trans.data[i];
    for (std::size_t i = 0; i < start.data.size(); ++i) start.data[i] += p.start.data[i];
  }
  return viterbi_decode(emissions, trans, start, end).labels;
}

std::vector<std::string> labels_to_tags(const Model& m, const std::vector<int>& ids) {
  std::vector<std::string> tags;
  tags.reserve(ids.size());
  for (int id : ids) {
    if (id == kPadId || id == kUnkId) {
      tags.push_back("O");
      continue;
    }
    tags.push_back(m.vocab.labels.name(id));
  }
  repair_bio(tags);
  return tags;
}

long count_parameters(const ParamMap& params, const std::string& prefix) {
  long total = 0;
  for (const auto& [name, t] : params) {
    if (name.rfind(prefix, 0) == 0) total += static_cast<long>(t.numel());
  }
  return total;
}

}  // namespace chartag
