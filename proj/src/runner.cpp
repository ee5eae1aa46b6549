#include "codemix/runner.hpp"

#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "codemix/error.hpp"
#include "codemix/hash.hpp"
#include "codemix/model.hpp"
#include "codemix/strings.hpp"

#ifndef CODEMIX_VERSION
#define CODEMIX_VERSION "0.0.0"
#endif

namespace codemix {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

FeatureSpace space_from_json(const json& j, FeatureSpace s) {
  s.ngram_lo = j.value("ngram_lo", s.ngram_lo);
  s.ngram_hi = j.value("ngram_hi", s.ngram_hi);
  s.word_unigrams = j.value("word_unigrams", s.word_unigrams);
  s.dim = j.value("dim", s.dim);
  s.max_tokens = j.value("max_tokens", s.max_tokens);
  return s;
}

json space_to_json(const FeatureSpace& s) {
  return {{"ngram_lo", s.ngram_lo},
          {"ngram_hi", s.ngram_hi},
          {"word_unigrams", s.word_unigrams},
          {"dim", s.dim},
          {"max_tokens", s.max_tokens}};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text,
                                             const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ExperimentConfig c;
  try {
    for (const auto& lj : j.at("languages")) {
      LanguageInputs in;
      const auto lang = parse_language(lj.at("language").get<std::string>());
      if (!lang) throw ConfigError("config: unknown language");
      in.language = *lang;
      in.train = resolve(base_dir, lj.at("train").get<std::string>());
      in.test = resolve(base_dir, lj.at("test").get<std::string>());
      in.dev = resolve(base_dir, lj.value("dev", std::string()));
      in.rules = resolve(base_dir, lj.value("rules", std::string()));
      in.lm = resolve(base_dir, lj.value("lm", std::string()));
      c.languages.push_back(std::move(in));
    }
    c.header = j.value("header", false);

    if (j.contains("translit")) {
      const auto& t = j["translit"];
      c.decode.k = t.value("k", c.decode.k);
      c.decode.beam = t.value("beam", c.decode.beam);
      c.lm_order = t.value("lm_order", c.lm_order);
      c.lm_alpha = t.value("lm_alpha", c.lm_alpha);
    }

    if (j.contains("translator")) {
      const auto& t = j["translator"];
      const std::string kind = t.value("kind", std::string("identity"));
      if (kind == "identity") {
        c.translator = TranslatorSpec::identity();
      } else if (kind == "dictionary") {
        c.translator = TranslatorSpec::dictionary(
            resolve(base_dir, t.at("dictionary").get<std::string>()).string());
      } else if (kind == "command") {
        c.translator = TranslatorSpec::external(
            t.at("command").get<std::vector<std::string>>());
      } else {
        throw ConfigError("config: unknown translator kind '" + kind + "'");
      }
      c.translator.chunk_size = t.value("chunk_size", std::size_t{0});
    }

    if (j.contains("nb")) {
      const auto& n = j["nb"];
      c.nb_alpha = n.value("alpha", c.nb_alpha);
      if (n.contains("features")) {
        c.nb_space = space_from_json(n["features"], c.nb_space);
      }
    }

    if (j.contains("mlp")) {
      const auto& m = j["mlp"];
      c.mlp.epochs = m.value("epochs", c.mlp.epochs);
      c.mlp.batch_size = m.value("batch_size", c.mlp.batch_size);
      c.mlp.learning_rate = m.value("lr", c.mlp.learning_rate);
      c.mlp.max_len = m.value("max_len", c.mlp.max_len);
      c.mlp.dropout = m.value("dropout", c.mlp.dropout);
      c.mlp.decay = m.value("decay", c.mlp.decay);
      c.mlp.weight_decay = m.value("weight_decay", c.mlp.weight_decay);
      c.mlp.embed_dim = m.value("embed", c.mlp.embed_dim);
      c.mlp.hidden_dim = m.value("hidden", c.mlp.hidden_dim);
      c.stlr_ratio = m.value("stlr_ratio", c.stlr_ratio);
      c.cut_frac = m.value("cut_frac", c.cut_frac);
      if (m.contains("features")) {
        c.mlp_space = space_from_json(m["features"], c.mlp_space);
      }
    }

    c.seed = j.value("seed", c.seed);
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("codemix-out")));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), path.parent_path());
}

void ExperimentConfig::validate() const {
  if (languages.empty()) throw ConfigError("config: no languages");
  auto require = [](const fs::path& p, const std::string& what) {
    if (p.empty() || !fs::is_regular_file(p)) {
      throw ConfigError("config: " + what + " '" + p.string() +
                        "' does not exist");
    }
  };
  for (const auto& l : languages) {
    const std::string name(to_string(l.language));
    require(l.train, name + " train file");
    require(l.test, name + " test file");
    if (!l.dev.empty()) require(l.dev, name + " dev file");
    if (!l.rules.empty()) require(l.rules, name + " rule table");
    if (!l.lm.empty()) require(l.lm, name + " language model");
  }
  if (decode.k < 1 || decode.beam < decode.k) {
    throw ConfigError("config: need beam >= k >= 1");
  }
  if (lm_order < 1 || !(lm_alpha > 0.0)) {
    throw ConfigError("config: need lm_order >= 1 and lm_alpha > 0");
  }
  translator.validate();
  try {
    nb_space.validate();
    mlp_space.validate();
    mlp.validate();
    STLRParams{mlp.learning_rate, stlr_ratio, cut_frac, 2}.validate();
  } catch (const ContractError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(nb_alpha > 0.0)) throw ConfigError("config: nb alpha must be > 0");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["languages"] = json::array();
  for (const auto& l : languages) {
    j["languages"].push_back({{"language", std::string(to_string(l.language))},
                              {"train", l.train.string()},
                              {"dev", l.dev.string()},
                              {"test", l.test.string()},
                              {"rules", l.rules.string()},
                              {"lm", l.lm.string()}});
  }
  j["header"] = header;
  j["translit"] = {{"k", decode.k},
                   {"beam", decode.beam},
                   {"lm_order", lm_order},
                   {"lm_alpha", lm_alpha}};
  json t;
  switch (translator.kind) {
    case TranslatorKind::Identity: t["kind"] = "identity"; break;
    case TranslatorKind::Dictionary:
      t["kind"] = "dictionary";
      t["dictionary"] = translator.dictionary_path;
      break;
    case TranslatorKind::ExternalCommand:
      t["kind"] = "command";
      t["command"] = translator.command;
      break;
  }
  t["chunk_size"] = translator.chunk_size;
  j["translator"] = t;
  j["nb"] = {{"alpha", nb_alpha}, {"features", space_to_json(nb_space)}};
  j["mlp"] = {{"epochs", mlp.epochs},
              {"batch_size", mlp.batch_size},
              {"lr", mlp.learning_rate},
              {"max_len", mlp.max_len},
              {"dropout", mlp.dropout},
              {"decay", mlp.decay},
              {"weight_decay", mlp.weight_decay},
              {"embed", mlp.embed_dim},
              {"hidden", mlp.hidden_dim},
              {"stlr_ratio", stlr_ratio},
              {"cut_frac", cut_frac},
              {"features", space_to_json(mlp_space)}};
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Manifest

const StageRecord* RunManifest::stage(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["started"] = started;
  j["finished"] = finished;
  j["stages"] = json::array();
  for (const auto& s : stages) {
    j["stages"].push_back({{"name", s.name},
                           {"key", s.key},
                           {"inputs", s.inputs},
                           {"outputs", s.outputs},
                           {"reused", s.reused},
                           {"seconds", s.seconds}});
  }
  j["files"] = files;
  return j.dump(2);
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

// ---------------------------------------------------------------------------
// Grid

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string key_of(std::initializer_list<std::string> parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined += p;
    joined.push_back('\x1f');
  }
  return hex64(fnv1a64(joined));
}

std::string lineage(const fs::path& p) {
  return p.string() + "@" + file_hash(p);
}

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ParseError& e) {
    throw StageError(name, std::string("sample at ") + e.what());
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string rules_text(const RuleTable& t) {
  std::ostringstream ss;
  t.write(ss);
  return ss.str();
}

struct CellResult {
  WeightedMetrics test;
  std::optional<WeightedMetrics> dev;
  StageRecord train_stage;
  StageRecord eval_stage;
};

WeightedMetrics evaluate(const Model& model, const Corpus& corpus) {
  std::vector<std::string> texts;
  std::vector<Label> gold;
  for (const auto& s : corpus.samples) {
    texts.push_back(s.text);
    gold.push_back(s.label);
  }
  const auto pred = predict_batch(model, texts);
  return weighted_average(
      per_class_metrics(confusion_matrix_parallel(gold, pred)));
}

}  // namespace

GridResult run_grid(const ExperimentConfig& config) {
  config.validate();
  const fs::path out = config.output_dir;
  fs::create_directories(out / "cache");

  GridResult result;
  RunManifest& manifest = result.manifest;
  manifest.version = std::string("codemix ") + CODEMIX_VERSION;
  manifest.seed = config.seed;
  manifest.started = utc_now();
  {
    std::string fingerprint = config.to_json();
    for (const auto& l : config.languages) {
      for (const auto* p : {&l.train, &l.dev, &l.test, &l.rules, &l.lm}) {
        if (!p->empty()) fingerprint += file_hash(*p);
      }
    }
    manifest.config_hash = hex64(fnv1a64(fingerprint));
  }

  TranslationCache translation_cache((out / "cache" / "translations.tsv").string());
  const std::string translator_id =
      run_stage("translator", [&] { return config.translator.id(); });

  result.test.languages.clear();
  for (const auto& lang : config.languages) {
    const std::string lname(to_string(lang.language));
    const fs::path lang_dir = out / lname;
    fs::create_directories(lang_dir / "variants");
    fs::create_directories(lang_dir / "models");
    const LoadOptions train_opts{config.header, Split::Train};

    // Ingest
    Stopwatch ingest_clock;
    const Corpus train = run_stage(lname + "/ingest", [&] {
      return load_tsv_file(lang.train.string(), lang.language, train_opts);
    });
    const std::string train_hash = file_hash(lang.train);
    manifest.stages.push_back({lname + "/ingest", train_hash,
                               {lineage(lang.train)}, {}, false,
                               ingest_clock.seconds()});

    // Transliterate
    Stopwatch translit_clock;
    const RuleTable table = run_stage(lname + "/translit", [&] {
      return lang.rules.empty()
                 ? RuleTable::default_for(lang.language)
                 : RuleTable::load(lang.rules.string(), lang.language);
    });
    const std::string lm_key =
        lang.lm.empty() ? "fit:" + std::to_string(config.lm_order) + ":" +
                              std::to_string(config.lm_alpha)
                        : file_hash(lang.lm);
    const std::string translit_key =
        key_of({train_hash, hex64(fnv1a64(rules_text(table))), lm_key,
                std::to_string(config.decode.k),
                std::to_string(config.decode.beam)});
    const fs::path translit_path =
        out / "cache" / ("translit-" + translit_key + ".tsv");
    bool translit_reused = fs::exists(translit_path);
    if (!translit_reused) {
      run_stage(lname + "/translit", [&] {
        const Corpus pre = preprocess_for_translit(train);
        const CharLM lm =
            lang.lm.empty()
                ? CharLM::train(lm_training_lines(train, table),
                                config.lm_order, config.lm_alpha)
                : CharLM::load_file(lang.lm.string());
        const Corpus tr = transliterate_corpus(pre, table, lm, config.decode);
        const fs::path tmp = translit_path.string() + ".tmp";
        write_tsv_file(tmp.string(), tr, true);
        fs::rename(tmp, translit_path);
        return 0;
      });
    }
    // Always continue from the on-disk form so fresh and cached runs agree.
    const Corpus translit = run_stage(lname + "/translit", [&] {
      return load_tsv_file(translit_path.string(), lang.language, train_opts);
    });
    manifest.stages.push_back({lname + "/translit", translit_key,
                               {lineage(lang.train)},
                               {translit_path.string()}, translit_reused,
                               translit_clock.seconds()});

    // Translate
    Stopwatch translate_clock;
    const std::string translate_key = key_of({translit_key, translator_id});
    const fs::path translated_path =
        out / "cache" / ("translated-" + translate_key + ".tsv");
    const bool translate_reused = fs::exists(translated_path);
    if (!translate_reused) {
      run_stage(lname + "/translate", [&] {
        const Corpus tr =
            translate_corpus(translit, config.translator, &translation_cache);
        const fs::path tmp = translated_path.string() + ".tmp";
        write_tsv_file(tmp.string(), tr, true);
        fs::rename(tmp, translated_path);
        return 0;
      });
    }
    const Corpus translated = run_stage(lname + "/translate", [&] {
      return load_tsv_file(translated_path.string(), lang.language, train_opts);
    });
    manifest.stages.push_back({lname + "/translate", translate_key,
                               {translit_path.string() + "@" +
                                file_hash(translit_path)},
                               {translated_path.string()}, translate_reused,
                               translate_clock.seconds()});

    // Variants
    std::array<Corpus, 4> variants;
    std::array<fs::path, 4> variant_paths;
    for (std::size_t vi = 0; vi < kAllVariants.size(); ++vi) {
      const VariantId v = kAllVariants[vi];
      const std::string stage = lname + "/variants/" + std::string(to_string(v));
      Stopwatch clock;
      variants[vi] = run_stage(stage, [&] {
        return build_variant(v, train, translit, translated);
      });
      variant_paths[vi] =
          lang_dir / "variants" / (ascii_lower(to_string(v)) + ".tsv");
      write_tsv_file(variant_paths[vi].string(), variants[vi], true);
      manifest.stages.push_back({stage, file_hash(variant_paths[vi]),
                                 {translit_path.string(),
                                  translated_path.string(),
                                  lineage(lang.train)},
                                 {variant_paths[vi].string()}, false,
                                 clock.seconds()});
    }

    // Held-out splits, touched only by evaluation.
    const Corpus test = run_stage(lname + "/evaluate", [&] {
      return load_tsv_file(lang.test.string(), lang.language,
                           {config.header, Split::Test});
    });
    std::optional<Corpus> dev;
    if (!lang.dev.empty()) {
      dev = run_stage(lname + "/evaluate", [&] {
        return load_tsv_file(lang.dev.string(), lang.language,
                             {config.header, Split::Dev});
      });
    }
    const std::string test_lineage = lineage(lang.test);
    const std::string dev_lineage = dev ? lineage(lang.dev) : std::string();

    // Grid cells: 4 variants x 2 model kinds.
    constexpr std::size_t kCells = 8;
    std::array<CellResult, kCells> cells;
    std::array<std::exception_ptr, kCells> errors;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t ci = 0; ci < kCells; ++ci) {
      try {
        const std::size_t vi = ci / 2;
        const ModelKind kind = kAllModelKinds[ci % 2];
        const VariantId v = kAllVariants[vi];
        const std::string cell_name = std::string(to_string(kind)) + "/" +
                                      std::string(to_string(v));
        CellResult& cell = cells[ci];

        Stopwatch train_clock;
        const std::string variant_hash = file_hash(variant_paths[vi]);
        const std::string params =
            kind == ModelKind::NaiveBayes
                ? json{{"alpha", config.nb_alpha},
                       {"features", space_to_json(config.nb_space)}}
                      .dump()
                : json::parse(config.to_json())["mlp"].dump() +
                      std::to_string(config.seed);
        const std::string model_key = key_of({variant_hash, params});
        const fs::path model_path =
            lang_dir / "models" /
            (std::string(to_string(kind)) + "-" + ascii_lower(to_string(v)) +
             "-" + model_key + ".model");
        const bool reused = fs::exists(model_path);
        const std::string train_stage = lname + "/train/" + cell_name;
        const Model model = run_stage(train_stage, [&]() -> Model {
          if (reused) return load_model_file(model_path.string());
          Model m;
          if (kind == ModelKind::NaiveBayes) {
            m = train_nb(variants[vi], config.nb_space, config.nb_alpha);
          } else {
            const STLRParams stlr{config.mlp.learning_rate, config.stlr_ratio,
                                  config.cut_frac, 0};
            m = train_mlp(variants[vi], config.mlp_space, config.mlp, stlr,
                          UnfreezeSchedule::gradual(config.mlp.epochs),
                          config.seed);
          }
          const fs::path tmp = model_path.string() + ".tmp";
          save_model_file(tmp.string(), m);
          fs::rename(tmp, model_path);
          return m;
        });
        cell.train_stage = {train_stage,
                            model_key,
                            {variant_paths[vi].string() + "@" + variant_hash},
                            {model_path.string()},
                            reused,
                            train_clock.seconds()};

        Stopwatch eval_clock;
        const std::string eval_stage = lname + "/evaluate/" + cell_name;
        cell.test = run_stage(eval_stage, [&] { return evaluate(model, test); });
        std::vector<std::string> eval_inputs = {
            model_path.string() + "@" + file_hash(model_path), test_lineage};
        if (dev) {
          cell.dev = run_stage(eval_stage, [&] { return evaluate(model, *dev); });
          eval_inputs.push_back(dev_lineage);
        }
        cell.eval_stage = {eval_stage, model_key, eval_inputs, {}, false,
                           eval_clock.seconds()};
      } catch (...) {
        errors[ci] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    result.test.languages.push_back(lang.language);
    if (dev) result.dev.languages.push_back(lang.language);
    for (std::size_t ci = 0; ci < kCells; ++ci) {
      const ModelKind kind = kAllModelKinds[ci % 2];
      const VariantId v = kAllVariants[ci / 2];
      result.test.cells.push_back({lang.language, kind, v, cells[ci].test});
      if (cells[ci].dev) {
        result.dev.cells.push_back({lang.language, kind, v, *cells[ci].dev});
      }
      manifest.stages.push_back(cells[ci].train_stage);
      manifest.stages.push_back(cells[ci].eval_stage);
    }
  }

  // Reports and manifest.
  const auto write_text = [&](const fs::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw StageError("report", "cannot write " + p.string());
    f << body;
    manifest.files.push_back(p.string());
  };
  run_stage("report", [&] {
    write_text(out / "report.txt", render_report(result.test));
    write_text(out / "report.csv", render_csv(result.test));
    if (!result.dev.languages.empty()) {
      write_text(out / "report_dev.csv", render_csv(result.dev));
    }
    return 0;
  });
  for (const auto& s : manifest.stages) {
    for (const auto& o : s.outputs) manifest.files.push_back(o);
  }
  manifest.files.push_back((out / "manifest.json").string());
  if (!translation_cache.path().empty() &&
      fs::exists(translation_cache.path())) {
    manifest.files.push_back(translation_cache.path());
  }
  manifest.finished = utc_now();
  std::ofstream mf(out / "manifest.json", std::ios::binary);
  mf << manifest.to_json() << '\n';
  return result;
}

}  // namespace codemix
