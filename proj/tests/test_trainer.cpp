#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <set>

#include "chartag/error.hpp"
#include "chartag/trainer.hpp"

using namespace chartag;

namespace {

Corpus tiny_corpus(int sentences, std::uint64_t seed = 1, std::uint64_t offset = 0) {
  SynthSpec spec;
  spec.sentences = sentences;
  spec.seed = seed;
  spec.stem_offset = offset;
  return generate_synthetic_corpus(spec);
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.model.word_dim = 8;
  cfg.model.char_dim = 4;
  cfg.model.cnn_filters = 4;
  cfg.model.hidden = 8;
  cfg.model.dropout_input = 0.0;
  cfg.model.dropout_output = 0.0;
  cfg.batch_size = 8;
  cfg.max_epochs = 3;
  cfg.patience = 10;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("make_batches covers every index once with documented sizes") {
  auto batches = make_batches(70, 32, 42, 1);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 32);
  CHECK(batches[1].size() == 32);
  CHECK(batches[2].size() == 6);
  std::set<int> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  CHECK(seen.size() == 70);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 69);

  CHECK(make_batches(70, 32, 42, 1) == batches);            // same epoch: identical
  CHECK(make_batches(70, 32, 42, 2) != batches);            // next epoch reshuffles
  CHECK(make_batches(70, 32, 43, 1) != batches);            // other seed reshuffles
  CHECK(make_batches(5, 32, 42, 1).size() == 1);            // one short batch
  CHECK(make_batches(3, 1, 42, 1).size() == 3);             // singleton batches
  CHECK_THROWS_AS(make_batches(5, 0, 42, 1), DimError);
}

TEST_CASE("training is deterministic for a fixed config") {
  Corpus train_set = tiny_corpus(20);
  Corpus dev_set = tiny_corpus(6, 2, 25000);
  TrainConfig cfg = tiny_config();
  cfg.model.dropout_input = 0.25;  // exercise the dropout stream too
  TrainResult a = train(cfg, train_set, dev_set, nullptr, nullptr);
  TrainResult b = train(cfg, train_set, dev_set, nullptr, nullptr);

  CHECK(reports_equal(a.report, b.report));
  REQUIRE(a.model.params.size() == b.model.params.size());
  for (const auto& [name, t] : a.model.params) {
    REQUIRE(t.data == b.model.params.at(name).data);  // bitwise equal
  }
  CHECK(a.rng_state == b.rng_state);

  TrainConfig other = cfg;
  other.seed = 6;
  TrainResult c = train(other, train_set, dev_set, nullptr, nullptr);
  CHECK(!reports_equal(a.report, c.report));
}

TEST_CASE("per-epoch losses are finite and non-negative") {
  Corpus train_set = tiny_corpus(16);
  Corpus dev_set = tiny_corpus(4, 2, 25000);
  TrainResult r = train(tiny_config(), train_set, dev_set, nullptr, nullptr);
  REQUIRE(r.report.epochs.size() == 3);
  for (const auto& e : r.report.epochs) {
    CHECK(std::isfinite(e.train_loss));
    CHECK(e.train_loss >= 0.0);
    CHECK(e.dev_f1 >= 0.0);
    CHECK(e.dev_f1 <= 1.0);
  }
  CHECK(r.report.best_epoch >= 1);
  CHECK(!r.report.has_test);
}

TEST_CASE("early stopping halts patience epochs after the best epoch") {
  Corpus train_set = tiny_corpus(16);
  TrainConfig cfg = tiny_config();
  cfg.max_epochs = 60;
  cfg.patience = 2;
  // dev == train makes dev F1 plateau once the model overfits
  TrainResult r = train(cfg, train_set, train_set, nullptr, nullptr);
  int ran = static_cast<int>(r.report.epochs.size());
  if (ran < cfg.max_epochs) {
    CHECK(ran == r.report.best_epoch + cfg.patience);
  }
  // best epoch is the first strict maximum of dev F1
  double best = -1.0;
  int best_at = 0;
  for (int i = 0; i < ran; ++i) {
    if (r.report.epochs[static_cast<std::size_t>(i)].dev_f1 > best) {
      best = r.report.epochs[static_cast<std::size_t>(i)].dev_f1;
      best_at = i + 1;
    }
  }
  CHECK(r.report.best_epoch == best_at);
  CHECK(r.report.best_dev_f1 == best);
}

TEST_CASE("test corpus is scored with the best parameters when given") {
  Corpus train_set = tiny_corpus(16);
  Corpus dev_set = tiny_corpus(4, 2, 25000);
  Corpus test_set = tiny_corpus(4, 3, 40000);
  TrainResult r = train(tiny_config(), train_set, dev_set, &test_set, nullptr);
  CHECK(r.report.has_test);
  long gold_spans = 0;
  for (const auto& tags : gold_tags(test_set)) {
    gold_spans += static_cast<long>(extract_spans(tags).size());
  }
  CHECK(r.report.test_eval.overall.tp + r.report.test_eval.overall.fn == gold_spans);
}

TEST_CASE("reports_equal ignores timing but nothing else") {
  TrainReport a;
  a.epochs.push_back({1.5, 0.5, 10.0});
  a.epochs.push_back({1.0, 0.75, 11.0});
  a.best_epoch = 2;
  a.best_dev_f1 = 0.75;
  TrainReport b = a;
  b.epochs[0].seconds = 99.0;
  CHECK(reports_equal(a, b));
  b = a;
  b.epochs[1].train_loss += 1e-15;
  CHECK(!reports_equal(a, b));
  b = a;
  b.epochs[1].dev_f1 = 0.7;
  CHECK(!reports_equal(a, b));
  b = a;
  b.best_epoch = 1;
  CHECK(!reports_equal(a, b));
  b = a;
  b.epochs.pop_back();
  CHECK(!reports_equal(a, b));
  b = a;
  b.has_test = true;
  b.test_eval.overall.tp = 3;
  CHECK(!reports_equal(a, b));
}

TEST_CASE("divergence is reported with epoch and batch position") {
  Corpus train_set = tiny_corpus(10);
  TrainConfig cfg = tiny_config();
  cfg.optim.lr = 1e308;  // first update overflows
  CHECK_THROWS_WITH_AS(train(cfg, train_set, train_set, nullptr, nullptr),
                       doctest::Contains("epoch 1 batch"), NumericError);
}

TEST_CASE("train validates inputs") {
  Corpus train_set = tiny_corpus(4);
  TrainConfig cfg = tiny_config();
  CHECK_THROWS_AS(train(cfg, {}, train_set, nullptr, nullptr), DataError);
  CHECK_THROWS_AS(train(cfg, train_set, {}, nullptr, nullptr), DataError);
  TrainConfig bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(train(bad, train_set, train_set, nullptr, nullptr), DimError);
  bad = cfg;
  bad.max_epochs = 0;
  CHECK_THROWS_AS(train(bad, train_set, train_set, nullptr, nullptr), DimError);
  bad = cfg;
  bad.clip = -1.0;
  CHECK_THROWS_AS(train(bad, train_set, train_set, nullptr, nullptr), DimError);
}

TEST_CASE("predict_corpus emits valid BIO independent of thread count") {
  Corpus train_set = tiny_corpus(16);
  Corpus dev_set = tiny_corpus(8, 2, 25000);
  TrainResult r = train(tiny_config(), train_set, dev_set, nullptr, nullptr);

  setenv("CHARTAG_THREADS", "1", 1);
  TagCorpus one = predict_corpus(r.model, dev_set);
  setenv("CHARTAG_THREADS", "3", 1);
  TagCorpus three = predict_corpus(r.model, dev_set);
  unsetenv("CHARTAG_THREADS");
  CHECK(one == three);

  REQUIRE(one.size() == dev_set.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    REQUIRE(one[i].size() == dev_set[i].tokens.size());
    CHECK(validate_bio(one[i]).empty());
  }
}

TEST_CASE("gold_tags mirrors the label column") {
  Corpus c = tiny_corpus(3);
  TagCorpus tags = gold_tags(c);
  REQUIRE(tags.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t t = 0; t < c[i].tokens.size(); ++t) {
      CHECK(tags[i][t] == c[i].tokens[t].label);
    }
  }
}

TEST_CASE("benchmark_runtime reports overhead relative to the first config") {
  Corpus corpus = tiny_corpus(12);
  TrainConfig small = tiny_config();
  TrainConfig bigger = small;
  bigger.model.hidden = 24;
  std::vector<std::pair<std::string, TrainConfig>> cfgs{{"small", small}, {"bigger", bigger}};
  auto rows = benchmark_runtime(cfgs, corpus, 2, nullptr);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].name == "small");
  CHECK(rows[0].delta_pct == 0.0);
  CHECK(rows[0].mean_seconds > 0.0);
  CHECK(rows[1].mean_seconds > 0.0);
  std::string table = bench_table(rows);
  CHECK(table.find("small") != std::string::npos);
  CHECK(table.find("bigger") != std::string::npos);
  CHECK(table.find('%') != std::string::npos);
}

TEST_CASE("report rendering mentions every epoch") {
  TrainReport rep;
  rep.epochs.push_back({2.0, 0.25, 1.0});
  rep.epochs.push_back({1.5, 0.5, 1.0});
  rep.best_epoch = 2;
  rep.best_dev_f1 = 0.5;
  std::string table = rep.to_table();
  CHECK(table.find("best epoch 2") != std::string::npos);
  std::string json = rep.to_json();
  CHECK(json.find("\"best_epoch\":2") != std::string::npos);
  CHECK(json.find("\"epochs\"") != std::string::npos);
}
