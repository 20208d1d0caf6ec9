#pragma once

#include <string>

#include "chartag/model.hpp"
#include "chartag/optim.hpp"

namespace chartag {

// Versioned JSON container for everything needed to resume or reuse a
// model: config, vocabulary, named tensors, optimizer state and an RNG
// snapshot. Doubles survive the round-trip bit-exactly (shortest-repr
// serialization), so load(save(m)) predicts identically.
struct Checkpoint {
  int format_version = 1;
  ModelConfig cfg;
  Vocab vocab;
  ParamMap params;
  NadamState opt;
  std::string rng_state;
};

std::string checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

Model checkpoint_model(const Checkpoint& c);
Checkpoint make_checkpoint(const Model& m, const NadamState& opt, const std::string& rng_state);

}  // namespace chartag
