#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chartag/checkpoint.hpp"
#include "chartag/error.hpp"
#include "chartag/trainer.hpp"

using namespace chartag;

namespace {

Checkpoint trained_checkpoint() {
  SynthSpec spec;
  spec.sentences = 14;
  Corpus corpus = generate_synthetic_corpus(spec);
  TrainConfig cfg;
  cfg.model.word_dim = 8;
  cfg.model.char_dim = 4;
  cfg.model.cnn_filters = 4;
  cfg.model.hidden = 8;
  cfg.model.features = {"pos", "gazetteer"};
  cfg.batch_size = 8;
  cfg.max_epochs = 2;
  cfg.seed = 13;
  TrainResult r = train(cfg, corpus, corpus, nullptr, nullptr);
  return make_checkpoint(r.model, r.opt, r.rng_state);
}

}  // namespace

TEST_CASE("checkpoint json round-trip is bit-exact") {
  Checkpoint c = trained_checkpoint();
  // plant awkward doubles that expose any formatting loss
  c.params["word.table"].data[0] = 1.0 / 3.0;
  c.params["word.table"].data[1] = 1e-300;
  c.params["word.table"].data[2] = -2.5000000000000004;
  c.opt.mu_product = 0.12345678901234567;

  Checkpoint d = checkpoint_from_json(checkpoint_to_json(c));
  CHECK(d.format_version == c.format_version);
  CHECK(d.vocab == c.vocab);
  CHECK(d.rng_state == c.rng_state);

  REQUIRE(d.params.size() == c.params.size());
  for (const auto& [name, t] : c.params) {
    REQUIRE(d.params.at(name).shape == t.shape);
    REQUIRE(d.params.at(name).data == t.data);  // bitwise
  }
  CHECK(d.opt.step == c.opt.step);
  CHECK(d.opt.mu_product == c.opt.mu_product);
  REQUIRE(d.opt.m.size() == c.opt.m.size());
  for (const auto& [name, t] : c.opt.m) REQUIRE(d.opt.m.at(name).data == t.data);
  for (const auto& [name, t] : c.opt.v) REQUIRE(d.opt.v.at(name).data == t.data);

  CHECK(d.cfg.hidden == c.cfg.hidden);
  CHECK(d.cfg.features == c.cfg.features);
  CHECK(d.cfg.char_encoder == c.cfg.char_encoder);
  CHECK(d.cfg.decoder == c.cfg.decoder);
  CHECK(d.cfg.dropout_input == c.cfg.dropout_input);

  // a second trip produces identical text
  CHECK(checkpoint_to_json(d) == checkpoint_to_json(c));
}

TEST_CASE("a reloaded model predicts identically") {
  Checkpoint c = trained_checkpoint();
  Model original = checkpoint_model(c);
  Model reloaded = checkpoint_model(checkpoint_from_json(checkpoint_to_json(c)));
  SynthSpec spec;
  spec.sentences = 6;
  spec.seed = 3;
  spec.stem_offset = 30000;
  Corpus unseen = generate_synthetic_corpus(spec);
  CHECK(predict_corpus(original, unseen) == predict_corpus(reloaded, unseen));
}

TEST_CASE("save and load hit the filesystem") {
  Checkpoint c = trained_checkpoint();
  std::string path = "/tmp/chartag_test_ckpt.json";
  save_checkpoint(path, c);
  Checkpoint d = load_checkpoint(path);
  CHECK(d.params.at("crf.trans").data == c.params.at("crf.trans").data);
  CHECK_THROWS_AS(load_checkpoint("/tmp/chartag_no_such_ckpt.json"), DataError);
}

TEST_CASE("malformed checkpoints are rejected with DataError") {
  Checkpoint c = trained_checkpoint();
  std::string good = checkpoint_to_json(c);

  CHECK_THROWS_AS(checkpoint_from_json("not json"), DataError);
  CHECK_THROWS_AS(checkpoint_from_json("{}"), DataError);

  // unknown top-level key
  std::string extra = good;
  extra.insert(1, "\"surprise\":1,");
  CHECK_THROWS_WITH_AS(checkpoint_from_json(extra), doctest::Contains("surprise"), DataError);

  // wrong version
  std::string bad_version = good;
  auto pos = bad_version.find("\"format_version\":1");
  REQUIRE(pos != std::string::npos);
  bad_version.replace(pos, 18, "\"format_version\":9");
  CHECK_THROWS_AS(checkpoint_from_json(bad_version), DataError);

  // unknown config key
  auto cfg_pos = good.find("\"hidden\"");
  REQUIRE(cfg_pos != std::string::npos);
  std::string bad_cfg = good;
  bad_cfg.insert(cfg_pos, "\"hiden\":3,");
  CHECK_THROWS_WITH_AS(checkpoint_from_json(bad_cfg), doctest::Contains("hiden"), DataError);
}

TEST_CASE("vocab indices must keep the reserved symbols in front") {
  Checkpoint c = trained_checkpoint();
  std::string good = checkpoint_to_json(c);
  auto pos = good.find("[\"<PAD>\",\"<UNK>\"");
  REQUIRE(pos != std::string::npos);
  std::string bad = good;
  bad.replace(pos, 16, "[\"<UNK>\",\"<PAD>\"");
  CHECK_THROWS_AS(checkpoint_from_json(bad), DataError);
}
