#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "codemix/corpus.hpp"
#include "codemix/eval.hpp"
#include "codemix/features.hpp"
#include "codemix/schedule.hpp"
#include "codemix/translate.hpp"
#include "codemix/translit.hpp"

namespace codemix {

struct LanguageInputs {
  Language language = Language::Kannada;
  std::filesystem::path train;
  std::filesystem::path dev;  // optional
  std::filesystem::path test;
  std::filesystem::path rules;  // optional; built-in table otherwise
  std::filesystem::path lm;     // optional; fitted from train text otherwise
};

struct ExperimentConfig {
  std::vector<LanguageInputs> languages;
  bool header = false;

  DecodeParams decode;
  int lm_order = 3;
  double lm_alpha = 0.1;

  TranslatorSpec translator;

  FeatureSpace nb_space;
  double nb_alpha = 1.0;

  FeatureSpace mlp_space;
  TrainConfig mlp = TrainConfig::ulmfit();
  double stlr_ratio = 32.0;
  double cut_frac = 0.1;

  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "codemix-out";

  // JSON file; relative paths resolve against the file's directory.
  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig from_json(const std::string& json,
                                    const std::filesystem::path& base_dir);

  // Throws ConfigError for missing files or unusable settings.
  void validate() const;

  // Canonical JSON form; paths are written as given.
  std::string to_json() const;
};

struct StageRecord {
  std::string name;  // e.g. "kannada/translit"
  std::string key;   // content hash the stage is cached under
  std::vector<std::string> inputs;   // "path@hash"
  std::vector<std::string> outputs;  // paths
  bool reused = false;
  double seconds = 0.0;
};

struct RunManifest {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::vector<StageRecord> stages;
  std::vector<std::string> files;

  const StageRecord* stage(const std::string& name) const;
  std::string to_json() const;
};

struct GridResult {
  Report test;
  Report dev;  // languages with a dev split only
  RunManifest manifest;
};

// Per language: preprocess -> transliterate -> translate -> four variants ->
// train NB and MLP on each -> evaluate on the untouched test split. Writes
// variants, models, report.txt, report.csv and manifest.json under
// output_dir; stages whose key is already on disk are reused. Any failure is
// rethrown as StageError naming the stage.
GridResult run_grid(const ExperimentConfig& config);

std::string file_hash(const std::filesystem::path& path);

}  // namespace codemix
