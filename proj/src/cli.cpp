#include "chartag/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "chartag/checkpoint.hpp"
#include "chartag/error.hpp"
#include "chartag/util.hpp"

namespace chartag {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DataError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ",";
    out += s;
  }
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
  ModelConfig& m = s.train.model;
  if (key == "char_encoder") m.char_encoder = parse_char_encoder(value);
  else if (key == "decoder") m.decoder = parse_decoder(value);
  else if (key == "layers") m.layers = parse_int(key, value);
  else if (key == "hidden") m.hidden = parse_int(key, value);
  else if (key == "word_dim") m.word_dim = parse_int(key, value);
  else if (key == "char_dim") m.char_dim = parse_int(key, value);
  else if (key == "cnn_window") m.cnn_window = parse_int(key, value);
  else if (key == "cnn_filters") m.cnn_filters = parse_int(key, value);
  else if (key == "cnn_activation") m.cnn_activation = parse_cnn_activation(value);
  else if (key == "char_lstm_hidden") m.char_lstm_hidden = parse_int(key, value);
  else if (key == "feat_dim") m.feat_dim = parse_int(key, value);
  else if (key == "features") m.features = parse_list(value);
  else if (key == "dropout_input") m.dropout_input = parse_double(key, value);
  else if (key == "dropout_output") m.dropout_output = parse_double(key, value);
  else if (key == "lowercase") m.lowercase = parse_bool(key, value);
  else if (key == "constrain_decode") m.constrain_decode = parse_bool(key, value);
  else if (key == "batch_size") s.train.batch_size = parse_int(key, value);
  else if (key == "max_epochs") s.train.max_epochs = parse_int(key, value);
  else if (key == "patience") s.train.patience = parse_int(key, value);
  else if (key == "seed") s.train.seed = parse_u64(key, value);
  else if (key == "lr") s.train.optim.lr = parse_double(key, value);
  else if (key == "beta1") s.train.optim.beta1 = parse_double(key, value);
  else if (key == "beta2") s.train.optim.beta2 = parse_double(key, value);
  else if (key == "eps") s.train.optim.eps = parse_double(key, value);
  else if (key == "schedule_decay") s.train.optim.schedule_decay = parse_double(key, value);
  else if (key == "clip") s.train.clip = parse_double(key, value);
  else if (key == "oov_threshold") s.train.oov_threshold = parse_int(key, value);
  else if (key == "train_path") s.train_path = value;
  else if (key == "dev_path") s.dev_path = value;
  else if (key == "test_path") s.test_path = value;
  else if (key == "vectors_path") s.vectors_path = value;
  else if (key == "gazetteer_path") s.gazetteer_path = value;
  else if (key == "columns") s.columns = value;
  else if (key == "dev_fraction") s.dev_fraction = parse_double(key, value);
  else throw DataError("config: unknown key '" + key + "'");
}

void apply_config_text(Settings& s, const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      apply_setting(s, key, value);
    } catch (const DataError& e) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::map<std::string, std::string> settings_to_map(const Settings& s) {
  const ModelConfig& m = s.train.model;
  return {
      {"char_encoder", to_string(m.char_encoder)},
      {"decoder", to_string(m.decoder)},
      {"layers", std::to_string(m.layers)},
      {"hidden", std::to_string(m.hidden)},
      {"word_dim", std::to_string(m.word_dim)},
      {"char_dim", std::to_string(m.char_dim)},
      {"cnn_window", std::to_string(m.cnn_window)},
      {"cnn_filters", std::to_string(m.cnn_filters)},
      {"cnn_activation", to_string(m.cnn_activation)},
      {"char_lstm_hidden", std::to_string(m.char_lstm_hidden)},
      {"feat_dim", std::to_string(m.feat_dim)},
      {"features", join_list(m.features)},
      {"dropout_input", fmt_double(m.dropout_input)},
      {"dropout_output", fmt_double(m.dropout_output)},
      {"lowercase", m.lowercase ? "true" : "false"},
      {"constrain_decode", m.constrain_decode ? "true" : "false"},
      {"batch_size", std::to_string(s.train.batch_size)},
      {"max_epochs", std::to_string(s.train.max_epochs)},
      {"patience", std::to_string(s.train.patience)},
      {"seed", std::to_string(s.train.seed)},
      {"lr", fmt_double(s.train.optim.lr)},
      {"beta1", fmt_double(s.train.optim.beta1)},
      {"beta2", fmt_double(s.train.optim.beta2)},
      {"eps", fmt_double(s.train.optim.eps)},
      {"schedule_decay", fmt_double(s.train.optim.schedule_decay)},
      {"clip", fmt_double(s.train.clip)},
      {"oov_threshold", std::to_string(s.train.oov_threshold)},
      {"train_path", s.train_path},
      {"dev_path", s.dev_path},
      {"test_path", s.test_path},
      {"vectors_path", s.vectors_path},
      {"gazetteer_path", s.gazetteer_path},
      {"columns", s.columns},
      {"dev_fraction", fmt_double(s.dev_fraction)},
  };
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::map<std::string, std::string>& settings,
                    const std::vector<std::string>& inputs) {
  json digests = json::object();
  for (const auto& p : inputs) {
    if (!p.empty()) digests[p] = hex64(fnv1a64(read_file(p)));
  }
  json j{{"command", command}, {"settings", settings}, {"inputs", digests}};
  write_file(path_join(out_dir, "manifest.json"), j.dump(2) + "\n");
}

Corpus load_corpus(const std::string& path, const ColumnSpec& spec, ParseStats* stats = nullptr) {
  return parse_conll(read_file(path), spec, stats);
}

void retag_gazetteer(Corpus& corpus, const Gazetteer& g) {
  for (auto& s : corpus) {
    std::vector<std::string> tags = gazetteer_tag(s, g);
    for (std::size_t i = 0; i < s.tokens.size(); ++i) s.tokens[i].gazetteer = tags[i];
  }
}

// serialize_conll plus one extra appended column per token.
std::string serialize_with_extra(const Corpus& corpus, const ColumnSpec& spec,
                                 const TagCorpus& extra) {
  if (extra.size() != corpus.size()) throw DataError("serialize: tag corpus size mismatch");
  std::string out;
  std::string doc_id;
  bool first_doc = true;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const Sentence& s = corpus[si];
    if (extra[si].size() != s.tokens.size()) {
      throw DataError("serialize: sentence " + std::to_string(si) + " tag count mismatch");
    }
    if (first_doc || s.doc_id != doc_id) {
      doc_id = s.doc_id;
      first_doc = false;
      out += "#doc " + doc_id + "\n";
    }
    for (std::size_t ti = 0; ti < s.tokens.size(); ++ti) {
      const Token& t = s.tokens[ti];
      std::vector<std::string> cols(static_cast<std::size_t>(std::max(s.columns, 1)), "-");
      auto put = [&](int p, const std::string& v) {
        if (p >= 0 && p < static_cast<int>(cols.size()) && !v.empty()) cols[static_cast<std::size_t>(p)] = v;
      };
      put(spec.word, t.surface);
      put(spec.pos, t.pos);
      put(spec.chunk, t.chunk);
      put(spec.gazetteer, t.gazetteer);
      put(spec.label, t.label);
      std::string line;
      for (const auto& c : cols) {
        line += c;
        line += " ";
      }
      line += extra[si][ti];
      out += line + "\n";
    }
    out += "\n";
  }
  return out;
}

int cmd_train(Settings s, const std::string& out_dir) {
  if (s.train_path.empty()) throw DataError("train: train_path is required");
  ensure_dir(out_dir);
  ColumnSpec spec = ColumnSpec::parse(s.columns);

  Corpus train_set = load_corpus(s.train_path, spec);
  Corpus dev_set;
  if (!s.dev_path.empty()) {
    dev_set = load_corpus(s.dev_path, spec);
  } else {
    auto [tr, dv] = split_train_dev(train_set, s.dev_fraction, s.train.seed);
    train_set = std::move(tr);
    dev_set = std::move(dv);
    std::cout << "split train corpus: " << train_set.size() << " train / " << dev_set.size()
              << " dev sentences\n";
  }
  Corpus test_set;
  if (!s.test_path.empty()) test_set = load_corpus(s.test_path, spec);

  PretrainedVectors vectors;
  bool has_vectors = !s.vectors_path.empty();
  if (has_vectors) vectors = load_pretrained_vectors(read_file(s.vectors_path), s.train.model.word_dim);

  if (!s.gazetteer_path.empty()) {
    Gazetteer g = Gazetteer::from_text(read_file(s.gazetteer_path));
    retag_gazetteer(train_set, g);
    retag_gazetteer(dev_set, g);
    retag_gazetteer(test_set, g);
  }

  TrainResult result = train(s.train, train_set, dev_set, test_set.empty() ? nullptr : &test_set,
                             has_vectors ? &vectors : nullptr);

  Checkpoint ckpt = make_checkpoint(result.model, result.opt, result.rng_state);
  save_checkpoint(path_join(out_dir, "checkpoint.json"), ckpt);
  write_file(path_join(out_dir, "report.json"), result.report.to_json() + "\n");
  write_file(path_join(out_dir, "report.txt"), result.report.to_table());
  write_manifest(out_dir, "train", settings_to_map(s),
                 {s.train_path, s.dev_path, s.test_path, s.vectors_path, s.gazetteer_path});

  std::cout << result.report.to_table();
  if (result.report.has_test) {
    std::cout << "test evaluation (best epoch " << result.report.best_epoch << "):\n"
              << result.report.test_eval.to_table();
  }
  std::cout << "wrote " << path_join(out_dir, "checkpoint.json") << "\n";
  return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& input_path,
                const std::string& output_path, const std::string& columns,
                const std::string& out_dir) {
  ensure_dir(out_dir);
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Model model = checkpoint_model(ckpt);
  ColumnSpec spec = ColumnSpec::parse(columns);
  Corpus corpus = load_corpus(input_path, spec);

  TagCorpus tags = predict_corpus(model, corpus);
  write_file(output_path, serialize_with_extra(corpus, spec, tags));

  Settings s;
  s.train.model = model.cfg;
  s.columns = columns;
  write_manifest(out_dir, "predict", settings_to_map(s), {ckpt_path, input_path});
  std::cout << "wrote " << output_path << " (" << corpus.size() << " sentences)\n";
  return 0;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path,
             const std::string& gold_columns, const std::string& pred_columns,
             const std::string& out_dir) {
  ColumnSpec gspec = ColumnSpec::parse(gold_columns);
  ColumnSpec pspec = ColumnSpec::parse(pred_columns.empty() ? gold_columns : pred_columns);
  if (gspec.label < 0 || pspec.label < 0) throw DataError("eval: both files need a label column");

  Corpus gold = load_corpus(gold_path, gspec);
  Corpus pred = load_corpus(pred_path, pspec);
  EvalReport rep = score(gold_tags(gold), gold_tags(pred));
  std::cout << rep.to_table();
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_file(path_join(out_dir, "eval.json"), rep.to_json() + "\n");
    Settings s;
    write_manifest(out_dir, "eval", settings_to_map(s), {gold_path, pred_path});
  }
  return 0;
}

int cmd_bench(const std::vector<std::string>& config_paths, const std::string& corpus_path,
              int epochs, const std::string& out_dir) {
  if (config_paths.empty()) throw DataError("bench: at least one config is required");
  std::vector<std::pair<std::string, TrainConfig>> cfgs;
  std::string corpus_file = corpus_path;
  std::string columns;
  for (const auto& path : config_paths) {
    Settings s;
    apply_config_text(s, read_file(path), path);
    if (corpus_file.empty()) corpus_file = s.train_path;
    if (columns.empty()) columns = s.columns;
    cfgs.emplace_back(fs::path(path).stem().string(), s.train);
  }
  for (const auto& [name, cfg] : cfgs) {
    if (cfg.batch_size != cfgs.front().second.batch_size) {
      throw DataError("bench: config '" + name + "' changes the batch size; all configs must share it");
    }
  }
  if (corpus_file.empty()) throw DataError("bench: no corpus (give --corpus or train_path in the first config)");

  Corpus corpus = load_corpus(corpus_file, ColumnSpec::parse(columns.empty() ? "word,pos,chunk,gazetteer,label" : columns));
  std::vector<BenchRow> rows = benchmark_runtime(cfgs, corpus, epochs, nullptr);
  std::cout << bench_table(rows);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"name", r.name},
                   {"mean_seconds", r.mean_seconds},
                   {"delta_pct", r.delta_pct},
                   {"delta_pct_rounded", std::llround(r.delta_pct)}});
    }
    write_file(path_join(out_dir, "bench.json"), j.dump(2) + "\n");
    Settings s;
    std::vector<std::string> inputs = config_paths;
    inputs.push_back(corpus_file);
    write_manifest(out_dir, "bench", settings_to_map(s), inputs);
  }
  return 0;
}

int cmd_gazetteer(const std::string& input_path, const std::string& gazetteer_path,
                  const std::string& output_path, const std::string& columns, bool case_fold,
                  const std::string& out_dir) {
  ensure_dir(out_dir);
  ColumnSpec spec = ColumnSpec::parse(columns);
  Corpus corpus = load_corpus(input_path, spec);
  Gazetteer g = Gazetteer::from_text(read_file(gazetteer_path), case_fold);

  TagCorpus tags;
  tags.reserve(corpus.size());
  for (const auto& s : corpus) tags.push_back(gazetteer_tag(s, g));
  write_file(output_path, serialize_with_extra(corpus, spec, tags));

  Settings s;
  s.columns = columns;
  write_manifest(out_dir, "gazetteer-tag", settings_to_map(s), {input_path, gazetteer_path});
  std::cout << "wrote " << output_path << " (" << corpus.size() << " sentences)\n";
  return 0;
}

int cmd_synth(const std::string& out_dir, SynthSpec spec, int dev_sentences) {
  ensure_dir(out_dir);
  ColumnSpec cols;  // default five-column layout
  Corpus train_set = generate_synthetic_corpus(spec);
  write_file(path_join(out_dir, "train.conll"), serialize_conll(train_set, cols));
  std::cout << "wrote " << path_join(out_dir, "train.conll") << " (" << train_set.size()
            << " sentences)\n";
  if (dev_sentences > 0) {
    SynthSpec dev_spec = spec;
    dev_spec.sentences = dev_sentences;
    dev_spec.seed = spec.seed + 1;
    dev_spec.stem_offset = 25000;  // disjoint stem namespace: all content words unseen
    Corpus dev_set = generate_synthetic_corpus(dev_spec);
    write_file(path_join(out_dir, "dev.conll"), serialize_conll(dev_set, cols));
    std::cout << "wrote " << path_join(out_dir, "dev.conll") << " (" << dev_set.size()
              << " sentences)\n";
  }
  Settings s;
  auto m = settings_to_map(s);
  m["synth_sentences"] = std::to_string(spec.sentences);
  m["synth_dev_sentences"] = std::to_string(dev_sentences);
  m["synth_seed"] = std::to_string(spec.seed);
  write_manifest(out_dir, "synth", m, {});
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"chartag: BiLSTM-CRF sequence tagger with character-level word representations"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a tagger from a config file");
  std::string config_path, out_dir = ".";
  std::vector<std::string> overrides;
  train_cmd->add_option("--config", config_path, "key = value config file")->required();
  train_cmd->add_option("--out", out_dir, "output directory (default .)");
  train_cmd->add_option("--set", overrides, "override, e.g. --set seed=7")->take_all();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "tag a corpus with a trained checkpoint");
  std::string ckpt_path, input_path, output_path;
  std::string predict_columns = "word,pos,chunk,gazetteer,label";
  std::string predict_out = ".";
  predict_cmd->add_option("--checkpoint", ckpt_path, "checkpoint.json path")->required();
  predict_cmd->add_option("--input", input_path, "input corpus")->required();
  predict_cmd->add_option("--output", output_path, "output corpus path")->required();
  predict_cmd->add_option("--columns", predict_columns, "input column names");
  predict_cmd->add_option("--out", predict_out, "manifest directory (default .)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  std::string gold_path, pred_path, eval_out;
  std::string gold_columns = "word,pos,chunk,gazetteer,label";
  std::string pred_columns;
  eval_cmd->add_option("--gold", gold_path, "gold corpus")->required();
  eval_cmd->add_option("--pred", pred_path, "predicted corpus")->required();
  eval_cmd->add_option("--columns", gold_columns, "gold column names");
  eval_cmd->add_option("--pred-columns", pred_columns, "pred column names (default: same)");
  eval_cmd->add_option("--out", eval_out, "directory for eval.json");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "compare epoch runtimes across configs");
  std::vector<std::string> bench_configs;
  std::string bench_corpus, bench_out;
  int bench_epochs = 3;
  bench_cmd->add_option("--configs", bench_configs, "config files; first is the baseline")
      ->required()
      ->take_all();
  bench_cmd->add_option("--corpus", bench_corpus, "corpus (default: first config's train_path)");
  bench_cmd->add_option("--epochs", bench_epochs, "timed epochs per config (default 3)");
  bench_cmd->add_option("--out", bench_out, "directory for bench.json");

  // gazetteer-tag
  auto* gaz_cmd = app.add_subcommand("gazetteer-tag", "append dictionary-match BIO tags");
  std::string gaz_input, gaz_file, gaz_output;
  std::string gaz_columns = "word,pos,chunk,gazetteer,label";
  std::string gaz_out = ".";
  bool no_case_fold = false;
  gaz_cmd->add_option("--input", gaz_input, "input corpus")->required();
  gaz_cmd->add_option("--gazetteer", gaz_file, "dictionary, one term per line")->required();
  gaz_cmd->add_option("--output", gaz_output, "output corpus path")->required();
  gaz_cmd->add_option("--columns", gaz_columns, "input column names");
  gaz_cmd->add_flag("--no-case-fold", no_case_fold, "match case-sensitively");
  gaz_cmd->add_option("--out", gaz_out, "manifest directory (default .)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string synth_out;
  SynthSpec synth_spec;
  int dev_sentences = 0;
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--sentences", synth_spec.sentences, "training sentences (default 200)");
  synth_cmd->add_option("--dev-sentences", dev_sentences, "dev sentences with unseen words (default 0)");
  synth_cmd->add_option("--seed", synth_spec.seed, "seed (default 1)");
  synth_cmd->add_option("--min-tokens", synth_spec.min_tokens, "min tokens per sentence");
  synth_cmd->add_option("--max-tokens", synth_spec.max_tokens, "max tokens per sentence");
  synth_cmd->add_option("--min-stem", synth_spec.min_stem, "min stem length (>= 4)");
  synth_cmd->add_option("--max-stem", synth_spec.max_stem, "max stem length");
  synth_cmd->add_option("--p-function", synth_spec.p_function, "function-word slot probability");
  synth_cmd->add_option("--p-entity", synth_spec.p_entity, "entity probability per content slot");
  synth_cmd->add_option("--p-two-token", synth_spec.p_two_token, "two-token entity probability");
  synth_cmd->add_option("--sentences-per-doc", synth_spec.sentences_per_doc, "sentences per document");
  synth_cmd->add_option("--stem-offset", synth_spec.stem_offset, "stem namespace offset");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) {
      Settings s;
      apply_config_text(s, read_file(config_path), config_path);
      for (const auto& kv : overrides) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw DataError("--set expects key=value, got '" + kv + "'");
        apply_setting(s, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
      }
      return cmd_train(std::move(s), out_dir);
    }
    if (predict_cmd->parsed()) {
      return cmd_predict(ckpt_path, input_path, output_path, predict_columns, predict_out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(gold_path, pred_path, gold_columns, pred_columns, eval_out);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(bench_configs, bench_corpus, bench_epochs, bench_out);
    }
    if (gaz_cmd->parsed()) {
      return cmd_gazetteer(gaz_input, gaz_file, gaz_output, gaz_columns, !no_case_fold, gaz_out);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(synth_out, synth_spec, dev_sentences);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace chartag
