#include "chartag/checkpoint.hpp"

#include <set>

#include <json.hpp>

#include "chartag/error.hpp"
#include "chartag/util.hpp"

namespace chartag {

namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
  return json{{"shape", t.shape}, {"data", t.data}};
}

Tensor tensor_from_json(const json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data")) {
    throw DataError("checkpoint: tensor '" + name + "' is malformed");
  }
  Tensor t(j.at("shape").get<std::vector<int>>(), j.at("data").get<std::vector<double>>());
  t.check_finite("checkpoint tensor");
  return t;
}

json param_map_to_json(const ParamMap& p) {
  json j = json::object();
  for (const auto& [name, t] : p) j[name] = tensor_to_json(t);
  return j;
}

ParamMap param_map_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw DataError("checkpoint: " + where + " must be an object");
  ParamMap p;
  for (const auto& [name, tj] : j.items()) p.emplace(name, tensor_from_json(tj, name));
  return p;
}

json index_to_json(const StringIndex& idx) { return json(idx.names); }

StringIndex index_from_json(const json& j, const std::string& where) {
  StringIndex idx;
  auto names = j.get<std::vector<std::string>>();
  if (names.size() < 2 || names[0] != kPadSym || names[1] != kUnkSym) {
    throw DataError("checkpoint: " + where + " index must start with PAD and UNK");
  }
  for (std::size_t i = 2; i < names.size(); ++i) idx.add(names[i]);
  if (idx.names != names) throw DataError("checkpoint: " + where + " index has duplicates");
  return idx;
}

json config_to_json(const ModelConfig& c) {
  return json{
      {"word_dim", c.word_dim},
      {"char_dim", c.char_dim},
      {"char_encoder", to_string(c.char_encoder)},
      {"decoder", to_string(c.decoder)},
      {"cnn_window", c.cnn_window},
      {"cnn_filters", c.cnn_filters},
      {"cnn_activation", to_string(c.cnn_activation)},
      {"char_lstm_hidden", c.char_lstm_hidden},
      {"feat_dim", c.feat_dim},
      {"features", c.features},
      {"hidden", c.hidden},
      {"layers", c.layers},
      {"dropout_input", c.dropout_input},
      {"dropout_output", c.dropout_output},
      {"lowercase", c.lowercase},
      {"constrain_decode", c.constrain_decode},
  };
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "word_dim") c.word_dim = val.get<int>();
    else if (key == "char_dim") c.char_dim = val.get<int>();
    else if (key == "char_encoder") c.char_encoder = parse_char_encoder(val.get<std::string>());
    else if (key == "decoder") c.decoder = parse_decoder(val.get<std::string>());
    else if (key == "cnn_window") c.cnn_window = val.get<int>();
    else if (key == "cnn_filters") c.cnn_filters = val.get<int>();
    else if (key == "cnn_activation") c.cnn_activation = parse_cnn_activation(val.get<std::string>());
    else if (key == "char_lstm_hidden") c.char_lstm_hidden = val.get<int>();
    else if (key == "feat_dim") c.feat_dim = val.get<int>();
    else if (key == "features") c.features = val.get<std::vector<std::string>>();
    else if (key == "hidden") c.hidden = val.get<int>();
    else if (key == "layers") c.layers = val.get<int>();
    else if (key == "dropout_input") c.dropout_input = val.get<double>();
    else if (key == "dropout_output") c.dropout_output = val.get<double>();
    else if (key == "lowercase") c.lowercase = val.get<bool>();
    else if (key == "constrain_decode") c.constrain_decode = val.get<bool>();
    else throw DataError("checkpoint: unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  json feats = json::object();
  for (const auto& [name, idx] : c.vocab.features) feats[name] = index_to_json(idx);

  json j{
      {"format_version", c.format_version},
      {"config", config_to_json(c.cfg)},
      {"vocab",
       {{"words", index_to_json(c.vocab.words)},
        {"chars", index_to_json(c.vocab.chars)},
        {"labels", index_to_json(c.vocab.labels)},
        {"features", feats},
        {"word_freq", c.vocab.word_freq}}},
      {"params", param_map_to_json(c.params)},
      {"optim",
       {{"step", c.opt.step},
        {"mu_product", c.opt.mu_product},
        {"m", param_map_to_json(c.opt.m)},
        {"v", param_map_to_json(c.opt.v)}}},
      {"rng_state", c.rng_state},
  };
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  try {
    static const std::set<std::string> known{"format_version", "config", "vocab",
                                             "params",         "optim",  "rng_state"};
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) throw DataError("checkpoint: unknown key '" + key + "'");
    }
    Checkpoint c;
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != 1) {
      throw DataError("checkpoint: unsupported format version " + std::to_string(c.format_version));
    }
    c.cfg = config_from_json(j.at("config"));
    const json& v = j.at("vocab");
    c.vocab.words = index_from_json(v.at("words"), "word");
    c.vocab.chars = index_from_json(v.at("chars"), "char");
    c.vocab.labels = index_from_json(v.at("labels"), "label");
    for (const auto& [name, idx] : v.at("features").items()) {
      c.vocab.features[name] = index_from_json(idx, "feature " + name);
    }
    c.vocab.word_freq = v.at("word_freq").get<std::map<std::string, int>>();
    c.params = param_map_from_json(j.at("params"), "params");
    const json& o = j.at("optim");
    c.opt.step = o.at("step").get<std::int64_t>();
    c.opt.mu_product = o.at("mu_product").get<double>();
    c.opt.m = param_map_from_json(o.at("m"), "optim.m");
    c.opt.v = param_map_from_json(o.at("v"), "optim.v");
    c.rng_state = j.value("rng_state", std::string());
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: missing or mistyped field: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  write_file(path, checkpoint_to_json(c));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(read_file(path));
}

Model checkpoint_model(const Checkpoint& c) {
  Model m;
  m.cfg = c.cfg;
  m.vocab = c.vocab;
  m.params = c.params;
  return m;
}

Checkpoint make_checkpoint(const Model& m, const NadamState& opt, const std::string& rng_state) {
  Checkpoint c;
  c.cfg = m.cfg;
  c.vocab = m.vocab;
  c.params = m.params;
  c.opt = opt;
  c.rng_state = rng_state;
  return c;
}

}  // namespace chartag
