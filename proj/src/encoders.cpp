#include "chartag/encoders.hpp"

#include <set>

#include "chartag/error.hpp"

namespace chartag {

std::string to_string(CharEncoder e) {
  switch (e) {
    case CharEncoder::kNone: return "none";
    case CharEncoder::kCnn: return "cnn";
    case CharEncoder::kLstm: return "lstm";
  }
  return "?";
}

std::string to_string(DecoderKind d) { return d == DecoderKind::kCrf ? "crf" : "softmax"; }

std::string to_string(CnnActivation a) { return a == CnnActivation::kTanh ? "tanh" : "relu"; }

CharEncoder parse_char_encoder(const std::string& s) {
  if (s == "none") return CharEncoder::kNone;
  if (s == "cnn") return CharEncoder::kCnn;
  if (s == "lstm") return CharEncoder::kLstm;
  throw DataError("unknown char encoder '" + s + "' (expected none | cnn | lstm)");
}

DecoderKind parse_decoder(const std::string& s) {
  if (s == "softmax") return DecoderKind::kSoftmax;
  if (s == "crf") return DecoderKind::kCrf;
  throw DataError("unknown decoder '" + s + "' (expected softmax | crf)");
}

CnnActivation parse_cnn_activation(const std::string& s) {
  if (s == "tanh") return CnnActivation::kTanh;
  if (s == "relu") return CnnActivation::kRelu;
  throw DataError("unknown cnn activation '" + s + "' (expected tanh | relu)");
}

int ModelConfig::char_feat_dim() const {
  switch (char_encoder) {
    case CharEncoder::kNone: return 0;
    case CharEncoder::kCnn: return cnn_filters;
    case CharEncoder::kLstm: return 2 * char_lstm_hidden;
  }
  return 0;
}

void ModelConfig::validate() const {
  if (layers != 1 && layers != 2) throw DimError("model: layers must be 1 or 2");
  if (hidden < 1) throw DimError("model: hidden size must be positive");
  if (word_dim < 1) throw DimError("model: word dim must be positive");
  if (char_encoder != CharEncoder::kNone) {
    if (char_dim < 1) throw DimError("model: char dim must be positive");
    if (char_encoder == CharEncoder::kCnn) {
      if (cnn_filters < 1) throw DimError("model: cnn filters must be positive");
      if (cnn_window < 1 || cnn_window % 2 == 0) throw DimError("model: cnn window must be odd and positive");
    }
    if (char_encoder == CharEncoder::kLstm && char_lstm_hidden < 1) {
      throw DimError("model: char lstm hidden size must be positive");
    }
  }
  if (!features.empty() && feat_dim < 1) throw DimError("model: feature dim must be positive");
  if (dropout_input < 0.0 || dropout_input >= 1.0 || dropout_output < 0.0 || dropout_output >= 1.0) {
    throw DimError("model: dropout rates must lie in [0,1)");
  }
  std::set<std::string> allowed{"pos", "chunk", "gazetteer"};
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (!allowed.count(f)) throw DimError("model: unknown feature '" + f + "' (expected pos | chunk | gazetteer)");
    if (!seen.insert(f).second) throw DimError("model: duplicate feature '" + f + "'");
  }
}

NodeId bind_param(Graph& g, const ParamMap& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw DataError("missing model parameter '" + name + "'");
  return g.param(name, it->second);
}

LstmStepOut lstm_cell_step(Graph& g, NodeId wx, NodeId wh, NodeId b, NodeId x,
                           NodeId h_prev, NodeId c_prev, int hidden) {
  int H = hidden;
  if (g.value(wx).rank() != 2 || g.value(wx).shape[0] != 4 * H) {
    throw DimError("lstm_cell_step: wx must be [4H x I] with H = " + std::to_string(H) +
                   ", got " + g.value(wx).shape_str());
  }
  NodeId z = g.add(g.add(g.matvec(wx, x), g.matvec(wh, h_prev)), b);
  NodeId i = g.sigmoid(g.slice(z, 0, H));
  NodeId f = g.sigmoid(g.slice(z, H, 2 * H));
  NodeId cell = g.tanh(g.slice(z, 2 * H, 3 * H));
  NodeId o = g.sigmoid(g.slice(z, 3 * H, 4 * H));
  NodeId c = g.add(g.mul(f, c_prev), g.mul(i, cell));
  NodeId h = g.mul(o, g.tanh(c));
  return {h, c};
}

std::vector<NodeId> lstm_run(Graph& g, NodeId wx, NodeId wh, NodeId b,
                             const std::vector<NodeId>& xs, int hidden, bool reverse) {
  if (xs.empty()) throw DimError("lstm_run: empty input sequence");
  std::vector<NodeId> out(xs.size());
  NodeId h = g.input(Tensor::zeros({hidden}));
  NodeId c = g.input(Tensor::zeros({hidden}));
  int n = static_cast<int>(xs.size());
  for (int k = 0; k < n; ++k) {
    int t = reverse ? n - 1 - k : k;
    LstmStepOut s = lstm_cell_step(g, wx, wh, b, xs[static_cast<std::size_t>(t)], h, c, hidden);
    h = s.h;
    c = s.c;
    out[static_cast<std::size_t>(t)] = h;
  }
  return out;
}

NodeId cnn_char_encode(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                       const std::vector<int>& char_ids) {
  if (char_ids.empty()) throw DimError("cnn_char_encode: empty character sequence");
  NodeId chars = g.rows(bind_param(g, params, "char.table"), char_ids);
  NodeId conv = g.conv1d_same(chars, bind_param(g, params, "char_cnn.w"),
                              bind_param(g, params, "char_cnn.b"));
  NodeId act = cfg.cnn_activation == CnnActivation::kTanh ? g.tanh(conv) : g.relu(conv);
  return g.max_over_time(act);
}

NodeId lstm_char_encode(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                        const std::vector<int>& char_ids) {
  if (char_ids.empty()) throw DimError("lstm_char_encode: empty character sequence");
  NodeId chars = g.rows(bind_param(g, params, "char.table"), char_ids);
  std::vector<NodeId> xs(char_ids.size());
  for (std::size_t t = 0; t < char_ids.size(); ++t) xs[t] = g.row(chars, static_cast<int>(t));
  int H = cfg.char_lstm_hidden;
  std::vector<NodeId> fw = lstm_run(g, bind_param(g, params, "char_lstm.fw.wx"),
                                    bind_param(g, params, "char_lstm.fw.wh"),
                                    bind_param(g, params, "char_lstm.fw.b"), xs, H, false);
  std::vector<NodeId> bw = lstm_run(g, bind_param(g, params, "char_lstm.bw.wx"),
                                    bind_param(g, params, "char_lstm.bw.wh"),
                                    bind_param(g, params, "char_lstm.bw.b"), xs, H, true);
  return g.concat({fw.back(), bw.front()});
}

NodeId apply_dropout(Graph& g, NodeId x, double rate, bool train_mode, Rng* rng) {
  if (rate < 0.0 || rate >= 1.0) throw DimError("dropout rate must lie in [0,1)");
  if (!train_mode || rate == 0.0) return x;
  if (rng == nullptr) throw DimError("dropout: train mode needs a random generator");
  Tensor mask = Tensor::zeros(g.value(x).shape);
  double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask.data) m = rng->bernoulli(1.0 - rate) ? keep_scale : 0.0;
  return g.mul(x, g.input(std::move(mask)));
}

namespace {

std::string lstm_name(int layer, const char* dir, const char* part) {
  return "lstm" + std::to_string(layer) + "." + dir + "." + part;
}

}  // namespace

NodeId encode_sentence(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                       const EncodedSentence& s, bool train_mode, Rng* rng) {
  cfg.validate();
  int T = static_cast<int>(s.word_ids.size());
  if (T == 0) throw DimError("encode_sentence: empty sentence");
  if (cfg.char_encoder != CharEncoder::kNone && static_cast<int>(s.char_ids.size()) != T) {
    throw DimError("encode_sentence: expected character ids for all " + std::to_string(T) + " tokens");
  }
  if (s.feature_ids.size() != cfg.features.size()) {
    throw DimError("encode_sentence: expected " + std::to_string(cfg.features.size()) +
                   " feature columns, got " + std::to_string(s.feature_ids.size()));
  }
  for (const auto& col : s.feature_ids) {
    if (static_cast<int>(col.size()) != T) {
      throw DimError("encode_sentence: feature column length mismatch");
    }
  }

  NodeId words = g.rows(bind_param(g, params, "word.table"), s.word_ids);
  std::vector<NodeId> feat_mats;
  feat_mats.reserve(cfg.features.size());
  for (std::size_t f = 0; f < cfg.features.size(); ++f) {
    NodeId table = bind_param(g, params, "feat." + cfg.features[f] + ".table");
    feat_mats.push_back(g.rows(table, s.feature_ids[f]));
  }

  std::vector<NodeId> xs(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    std::vector<NodeId> parts;
    parts.push_back(g.row(words, t));
    if (cfg.char_encoder == CharEncoder::kCnn) {
      parts.push_back(cnn_char_encode(g, params, cfg, s.char_ids[static_cast<std::size_t>(t)]));
    } else if (cfg.char_encoder == CharEncoder::kLstm) {
      parts.push_back(lstm_char_encode(g, params, cfg, s.char_ids[static_cast<std::size_t>(t)]));
    }
    for (NodeId fm : feat_mats) parts.push_back(g.row(fm, t));
    xs[static_cast<std::size_t>(t)] = parts.size() == 1 ? parts[0] : g.concat(parts);
  }
  NodeId x = g.stack_rows(xs);

  for (int layer = 0; layer < cfg.layers; ++layer) {
    x = apply_dropout(g, x, cfg.dropout_input, train_mode, rng);
    std::vector<NodeId> in(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) in[static_cast<std::size_t>(t)] = g.row(x, t);
    std::vector<NodeId> fw = lstm_run(g, bind_param(g, params, lstm_name(layer, "fw", "wx")),
                                      bind_param(g, params, lstm_name(layer, "fw", "wh")),
                                      bind_param(g, params, lstm_name(layer, "fw", "b")),
                                      in, cfg.hidden, false);
    std::vector<NodeId> bw = lstm_run(g, bind_param(g, params, lstm_name(layer, "bw", "wx")),
                                      bind_param(g, params, lstm_name(layer, "bw", "wh")),
                                      bind_param(g, params, lstm_name(layer, "bw", "b")),
                                      in, cfg.hidden, true);
    std::vector<NodeId> hs(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      hs[static_cast<std::size_t>(t)] =
          g.concat({fw[static_cast<std::size_t>(t)], bw[static_cast<std::size_t>(t)]});
    }
    x = g.stack_rows(hs);
    x = apply_dropout(g, x, cfg.dropout_output, train_mode, rng);
  }
  return x;
}

NodeId emission_scores(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                       const EncodedSentence& s, bool train_mode, Rng* rng) {
  NodeId enc = encode_sentence(g, params, cfg, s, train_mode, rng);
  NodeId w = bind_param(g, params, "proj.w");
  NodeId b = bind_param(g, params, "proj.b");
  return g.add_rowvec(g.matmul(enc, w), b);
}

}  // namespace chartag
