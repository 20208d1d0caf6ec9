#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chartag/crf.hpp"
#include "chartag/data.hpp"
#include "chartag/encoders.hpp"
#include "chartag/graph.hpp"
#include "chartag/rng.hpp"

namespace chartag {

struct Model {
  ModelConfig cfg;
  Vocab vocab;
  ParamMap params;

  int num_labels() const { return vocab.labels.size(); }
};

// Creates all parameter tensors in a fixed order from
// Rng(mix_seed(seed, kStreamInit)). Word rows copy pretrained vectors when
// available (UNK = pretrained mean); other embeddings draw uniform
// fan-based ranges; character table rows draw from [-0.5/dim, 0.5/dim];
// LSTM forget-gate biases start at 1; CRF scores and remaining biases at 0.
Model init_model(const ModelConfig& cfg, const Vocab& vocab,
                 const PretrainedVectors* pretrained, std::uint64_t seed);

// Maps a parsed sentence onto vocabulary ids for the encoder.
EncodedSentence encode_ids(const Model& m, const Sentence& s, bool with_labels);

// Scalar training loss of one sentence: CRF NLL or summed softmax cross
// entropy per the config. The sentence must carry label ids.
NodeId sentence_loss(Graph& g, const Model& m, const EncodedSentence& s,
                     bool train_mode, Rng* dropout_rng);

// Decodes one sentence (Viterbi or per-position argmax). Applies BIO
// transition penalties when cfg.constrain_decode is set.
std::vector<int> predict_labels(const Model& m, const EncodedSentence& s);

// Label id sequence -> BIO tag strings, mapping the reserved PAD/UNK ids to
// "O" and repairing stray I-X so the output always validates.
std::vector<std::string> labels_to_tags(const Model& m, const std::vector<int>& ids);

// Total scalar count of parameters whose name starts with prefix ("" = all).
long count_parameters(const ParamMap& params, const std::string& prefix);

// Additive decode penalties that forbid starting with I-X, transitioning
// into I-X from anything but B-X / I-X, and emitting the reserved PAD/UNK
// labels.
struct DecodePenalties {
  Tensor trans;  // [L x L]
  Tensor start;  // [L]
};
DecodePenalties bio_penalties(const StringIndex& labels);

}  // namespace chartag
