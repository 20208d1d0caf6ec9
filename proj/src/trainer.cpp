#include "chartag/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "chartag/error.hpp"
#include "chartag/util.hpp"

namespace chartag {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  if (batch_size < 1) throw DimError("train: batch size must be >= 1");
  if (patience < 1) throw DimError("train: patience must be >= 1");
  if (max_epochs < 1) throw DimError("train: max epochs must be >= 1");
  if (clip <= 0.0) throw DimError("train: clip threshold must be positive");
  if (oov_threshold < 1) throw DimError("train: oov threshold must be >= 1");
}

std::vector<std::vector<int>> make_batches(int n, int batch_size, std::uint64_t seed, int epoch) {
  if (n < 1) throw DataError("make_batches: empty corpus");
  if (batch_size < 1) throw DimError("make_batches: batch size must be >= 1");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(mix_seed(seed, kStreamShuffle), static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  std::vector<std::vector<int>> batches;
  for (int at = 0; at < n; at += batch_size) {
    int stop = std::min(n, at + batch_size);
    batches.emplace_back(order.begin() + at, order.begin() + stop);
  }
  return batches;
}

TagCorpus gold_tags(const Corpus& corpus) {
  TagCorpus tags;
  tags.reserve(corpus.size());
  for (const auto& s : corpus) {
    std::vector<std::string> row;
    row.reserve(s.tokens.size());
    for (const auto& t : s.tokens) row.push_back(t.label);
    tags.push_back(std::move(row));
  }
  return tags;
}

TagCorpus predict_corpus(const Model& m, const Corpus& corpus) {
  TagCorpus out(corpus.size());
  parallel_for(static_cast<int>(corpus.size()), eval_threads(), [&](int i) {
    const Sentence& s = corpus[static_cast<std::size_t>(i)];
    EncodedSentence enc = encode_ids(m, s, false);
    out[static_cast<std::size_t>(i)] = labels_to_tags(m, predict_labels(m, enc));
  });
  return out;
}

namespace {

// One optimizer update on a batch; returns the summed sentence loss.
double train_batch(Model& model, const std::vector<EncodedSentence>& encoded,
                   const std::vector<int>& batch, Rng& dropout_rng, NadamState& state,
                   const NadamConfig& optim_cfg, double clip) {
  Graph g;
  std::vector<NodeId> losses;
  losses.reserve(batch.size());
  for (int idx : batch) {
    losses.push_back(sentence_loss(g, model, encoded[static_cast<std::size_t>(idx)], true, &dropout_rng));
  }
  NodeId total = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i) total = g.add(total, losses[i]);
  NodeId mean = g.scale(total, 1.0 / static_cast<double>(losses.size()));
  Gradients grads = g.backward(mean);
  clip_by_norm(grads, clip);
  nadam_step(model.params, grads, state, optim_cfg);
  return g.value(total).item();
}

double dev_f1(const Model& model, const Corpus& dev_set, const TagCorpus& dev_gold) {
  return score(dev_gold, predict_corpus(model, dev_set)).overall.f1();
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const Corpus& train_set, const Corpus& dev_set,
                  const Corpus* test_set, const PretrainedVectors* pretrained) {
  cfg.validate();
  if (train_set.empty()) throw DataError("train: empty training corpus");
  if (dev_set.empty()) throw DataError("train: empty development corpus");

  Vocab vocab = build_vocab(train_set, pretrained ? &pretrained->index : nullptr,
                            cfg.oov_threshold, cfg.model.lowercase);
  Model model = init_model(cfg.model, vocab, pretrained, cfg.seed);

  std::vector<EncodedSentence> encoded;
  encoded.reserve(train_set.size());
  for (const auto& s : train_set) encoded.push_back(encode_ids(model, s, true));
  TagCorpus dev_gold = gold_tags(dev_set);

  Rng dropout_rng(mix_seed(cfg.seed, kStreamDropout));
  NadamState state;
  TrainResult result;
  result.report.best_epoch = 0;
  double best_f1 = -1.0;
  ParamMap best_params;
  int stale = 0;
  int n = static_cast<int>(train_set.size());

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double t0 = now_seconds();
    double loss_sum = 0.0;
    auto batches = make_batches(n, cfg.batch_size, cfg.seed, epoch);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      try {
        loss_sum += train_batch(model, encoded, batches[b], dropout_rng, state, cfg.optim, cfg.clip);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + " batch " + std::to_string(b + 1) +
                           ": " + e.what());
      }
    }
    double seconds = now_seconds() - t0;

    EpochStats stats;
    stats.train_loss = loss_sum / n;
    stats.seconds = seconds;
    stats.dev_f1 = dev_f1(model, dev_set, dev_gold);
    result.report.epochs.push_back(stats);

    if (stats.dev_f1 > best_f1) {
      best_f1 = stats.dev_f1;
      best_params = model.params;
      result.report.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= cfg.patience) break;
  }

  result.report.best_dev_f1 = best_f1 < 0.0 ? 0.0 : best_f1;
  model.params = std::move(best_params);
  result.opt = std::move(state);
  result.rng_state = dropout_rng.save_state();

  if (test_set != nullptr && !test_set->empty()) {
    result.report.has_test = true;
    result.report.test_eval = score(gold_tags(*test_set), predict_corpus(model, *test_set));
  }
  result.model = std::move(model);
  return result;
}

std::vector<BenchRow> benchmark_runtime(const std::vector<std::pair<std::string, TrainConfig>>& cfgs,
                                        const Corpus& corpus, int epochs,
                                        const PretrainedVectors* pretrained) {
  if (epochs < 1) throw DimError("benchmark_runtime: need at least 1 timed epoch");
  if (cfgs.empty()) throw DimError("benchmark_runtime: no configs");
  if (corpus.empty()) throw DataError("benchmark_runtime: empty corpus");

  std::vector<BenchRow> rows;
  for (const auto& [name, cfg] : cfgs) {
    cfg.validate();
    Vocab vocab = build_vocab(corpus, pretrained ? &pretrained->index : nullptr,
                              cfg.oov_threshold, cfg.model.lowercase);
    Model model = init_model(cfg.model, vocab, pretrained, cfg.seed);
    std::vector<EncodedSentence> encoded;
    encoded.reserve(corpus.size());
    for (const auto& s : corpus) encoded.push_back(encode_ids(model, s, true));

    Rng dropout_rng(mix_seed(cfg.seed, kStreamDropout));
    NadamState state;
    int n = static_cast<int>(corpus.size());

    double total = 0.0;
    for (int epoch = 0; epoch <= epochs; ++epoch) {  // epoch 0 is the warm-up
      double t0 = now_seconds();
      for (const auto& batch : make_batches(n, cfg.batch_size, cfg.seed, epoch)) {
        train_batch(model, encoded, batch, dropout_rng, state, cfg.optim, cfg.clip);
      }
      if (epoch > 0) total += now_seconds() - t0;
    }
    BenchRow row;
    row.name = name;
    row.mean_seconds = total / epochs;
    rows.push_back(row);
  }
  double base = rows.front().mean_seconds;
  for (auto& r : rows) {
    r.delta_pct = base == 0.0 ? 0.0 : (r.mean_seconds - base) / base * 100.0;
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "model                     sec/epoch   delta\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-24s %10.3f %+6.0f%%\n", r.name.c_str(), r.mean_seconds,
                  std::round(r.delta_pct));
    os << buf;
  }
  return os.str();
}

bool reports_equal(const TrainReport& a, const TrainReport& b) {
  if (a.epochs.size() != b.epochs.size() || a.best_epoch != b.best_epoch ||
      a.best_dev_f1 != b.best_dev_f1 || a.has_test != b.has_test) {
    return false;
  }
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    if (a.epochs[i].train_loss != b.epochs[i].train_loss) return false;
    if (a.epochs[i].dev_f1 != b.epochs[i].dev_f1) return false;
  }
  if (a.has_test) {
    auto counts_eq = [](const PrfCounts& x, const PrfCounts& y) {
      return x.tp == y.tp && x.fp == y.fp && x.fn == y.fn;
    };
    if (!counts_eq(a.test_eval.overall, b.test_eval.overall)) return false;
    if (a.test_eval.per_category.size() != b.test_eval.per_category.size()) return false;
    for (const auto& [k, v] : a.test_eval.per_category) {
      auto it = b.test_eval.per_category.find(k);
      if (it == b.test_eval.per_category.end() || !counts_eq(v, it->second)) return false;
    }
  }
  return true;
}

std::string TrainReport::to_table() const {
  std::ostringstream os;
  os << "epoch   train-loss     dev-F1    seconds\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%5zu   %10.6f   %8.4f   %8.2f\n", i + 1, epochs[i].train_loss,
                  epochs[i].dev_f1, epochs[i].seconds);
    os << buf;
  }
  os << "best epoch " << best_epoch << " (dev F1 " << best_dev_f1 << ")\n";
  return os.str();
}

std::string TrainReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"epochs\":[";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (i) os << ",";
    os << "{\"epoch\":" << i + 1 << ",\"train_loss\":" << epochs[i].train_loss
       << ",\"dev_f1\":" << epochs[i].dev_f1 << ",\"seconds\":" << epochs[i].seconds << "}";
  }
  os << "],\"best_epoch\":" << best_epoch << ",\"best_dev_f1\":" << best_dev_f1;
  if (has_test) os << ",\"test\":" << test_eval.to_json();
  os << "}";
  return os.str();
}

}  // namespace chartag
