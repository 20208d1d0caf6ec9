#pragma once

#include <map>
#include <string>
#include <vector>

#include "chartag/trainer.hpp"

namespace chartag {

// Every trainable/model/path setting reachable from a config file. Flags
// only override what configs set.
struct Settings {
  TrainConfig train;
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string vectors_path;
  std::string gazetteer_path;
  std::string columns = "word,pos,chunk,gazetteer,label";
  double dev_fraction = 0.10;  // used when no dev_path is given
};

// Applies one "key = value" pair. Unknown keys throw DataError.
void apply_setting(Settings& s, const std::string& key, const std::string& value);

// Parses a flat key=value config file ('#' comments, blank lines ignored).
void apply_config_text(Settings& s, const std::string& text, const std::string& origin);

// Snapshot of every setting as key -> value, for manifests.
std::map<std::string, std::string> settings_to_map(const Settings& s);

// Entry point behind main(). Exit codes: 0 success, 1 usage error,
// 2 data/contract error.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace chartag
