#pragma once

#include <map>
#include <string>
#include <vector>

#include "chartag/graph.hpp"
#include "chartag/rng.hpp"
#include "chartag/tensor.hpp"

namespace chartag {

enum class CharEncoder { kNone, kCnn, kLstm };
enum class DecoderKind { kSoftmax, kCrf };
enum class CnnActivation { kTanh, kRelu };

std::string to_string(CharEncoder e);
std::string to_string(DecoderKind d);
std::string to_string(CnnActivation a);
CharEncoder parse_char_encoder(const std::string& s);
DecoderKind parse_decoder(const std::string& s);
CnnActivation parse_cnn_activation(const std::string& s);

struct ModelConfig {
  int word_dim = 50;
  int char_dim = 30;
  CharEncoder char_encoder = CharEncoder::kCnn;
  DecoderKind decoder = DecoderKind::kCrf;
  int cnn_window = 3;
  int cnn_filters = 30;
  CnnActivation cnn_activation = CnnActivation::kTanh;
  int char_lstm_hidden = 25;
  int feat_dim = 10;
  std::vector<std::string> features;  // subset of {pos, chunk, gazetteer}
  int hidden = 250;                   // per direction
  int layers = 1;
  double dropout_input = 0.25;
  double dropout_output = 0.25;
  bool lowercase = false;
  bool constrain_decode = false;  // forbid invalid BIO transitions at decode time

  // Width of the character-level word vector (0 when disabled).
  int char_feat_dim() const;
  // Per-token input width fed to the first BiLSTM layer.
  int input_dim() const { return word_dim + char_feat_dim() + feat_dim * static_cast<int>(features.size()); }
  int output_dim() const { return 2 * hidden; }

  // Throws DimError on out-of-range fields (layers outside {1,2}, rates
  // outside [0,1), non-positive dims, unknown feature names).
  void validate() const;
};

// One sentence mapped to vocabulary ids, ready for the encoder.
struct EncodedSentence {
  std::vector<int> word_ids;                  // [T]
  std::vector<std::vector<int>> char_ids;     // [T], one non-empty list per token
  std::vector<std::vector<int>> feature_ids;  // [F][T], aligned with ModelConfig::features
  std::vector<int> label_ids;                 // [T] gold labels, may be empty
};

using ParamMap = std::map<std::string, Tensor>;

// Binds a stored tensor into the graph as a learnable parameter.
// Throws DataError when the name is missing.
NodeId bind_param(Graph& g, const ParamMap& params, const std::string& name);

struct LstmStepOut {
  NodeId h;
  NodeId c;
};

// One LSTM cell application. wx[4H x I], wh[4H x H], b[4H]; gate blocks in
// order (input, forget, cell, output).
LstmStepOut lstm_cell_step(Graph& g, NodeId wx, NodeId wh, NodeId b, NodeId x,
                           NodeId h_prev, NodeId c_prev, int hidden);

// Runs a unidirectional LSTM over xs (reversed when reverse is set) from a
// zero initial state. Result is aligned with xs: out[t] is the hidden state
// emitted at position t, so the final state sits at out.back() forward and
// out.front() reversed.
std::vector<NodeId> lstm_run(Graph& g, NodeId wx, NodeId wh, NodeId b,
                             const std::vector<NodeId>& xs, int hidden, bool reverse);

// Character CNN word vector: embed -> conv1d_same -> activation ->
// max_over_time. Output [cnn_filters].
NodeId cnn_char_encode(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                       const std::vector<int>& char_ids);

// Character BiLSTM word vector: concat(final forward h, final backward h).
// Output [2 * char_lstm_hidden].
NodeId lstm_char_encode(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                        const std::vector<int>& char_ids);

// Inverted dropout: multiplies by a 0 / (1/(1-rate)) mask generated outside
// the graph. Identity when train_mode is off or rate is 0.
NodeId apply_dropout(Graph& g, NodeId x, double rate, bool train_mode, Rng* rng);

// Full sentence encoder of the architecture: per-token
// concat(word ‖ char ‖ features) followed by `layers` stacked BiLSTMs with
// per-layer input/output dropout. Returns [T x 2*hidden].
NodeId encode_sentence(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                       const EncodedSentence& s, bool train_mode, Rng* rng);

// Linear projection of the encoding to per-label scores [T x L].
NodeId emission_scores(Graph& g, const ParamMap& params, const ModelConfig& cfg,
                       const EncodedSentence& s, bool train_mode, Rng* rng);

}  // namespace chartag
