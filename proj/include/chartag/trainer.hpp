#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chartag/data.hpp"
#include "chartag/eval.hpp"
#include "chartag/model.hpp"
#include "chartag/optim.hpp"

namespace chartag {

struct TrainConfig {
  ModelConfig model;
  int batch_size = 32;
  int max_epochs = 50;
  int patience = 10;
  std::uint64_t seed = 42;
  NadamConfig optim;
  double clip = 1.0;
  int oov_threshold = 5;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double dev_f1 = 0.0;
  double seconds = 0.0;  // training wall clock, dev evaluation excluded
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 1-indexed; 0 while untrained
  double best_dev_f1 = 0.0;
  bool has_test = false;
  EvalReport test_eval;

  std::string to_table() const;
  std::string to_json() const;
};

// Exact equality of everything except wall-clock seconds.
bool reports_equal(const TrainReport& a, const TrainReport& b);

// Deterministic epoch shuffle: indices 0..n-1 shuffled by
// Rng(mix_seed(mix_seed(seed, kStreamShuffle), epoch)), then chunked; the
// final batch may be smaller.
std::vector<std::vector<int>> make_batches(int n, int batch_size, std::uint64_t seed, int epoch);

struct TrainResult {
  Model model;     // parameters of the best dev epoch
  NadamState opt;  // optimizer state after the last trained epoch
  TrainReport report;
  std::string rng_state;  // dropout RNG snapshot after the last epoch
};

// Full training loop: batch NLL (mean over the batch's sentences), clip,
// Nadam step; per-epoch dev F1 with strict-improvement early stopping after
// `patience` stale epochs. Throws NumericError tagged with epoch/batch on
// divergence.
TrainResult train(const TrainConfig& cfg, const Corpus& train_set, const Corpus& dev_set,
                  const Corpus* test_set, const PretrainedVectors* pretrained);

// Decodes a corpus with read-only parallelism across sentences; output tags
// always validate as BIO.
TagCorpus predict_corpus(const Model& m, const Corpus& corpus);

// Gold tags as stored in the corpus, aligned with predict_corpus output.
TagCorpus gold_tags(const Corpus& corpus);

struct BenchRow {
  std::string name;
  double mean_seconds = 0.0;
  double delta_pct = 0.0;  // vs the first row
};

// Runs one untimed warm-up epoch plus `epochs` timed training epochs per
// config (no dev evaluation) and reports mean epoch seconds and overhead
// relative to the first config.
std::vector<BenchRow> benchmark_runtime(const std::vector<std::pair<std::string, TrainConfig>>& cfgs,
                                        const Corpus& corpus, int epochs,
                                        const PretrainedVectors* pretrained);

std::string bench_table(const std::vector<BenchRow>& rows);

}  // namespace chartag
