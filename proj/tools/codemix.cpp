// codemix command-line interface.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "codemix/corpus.hpp"
#include "codemix/error.hpp"
#include "codemix/eval.hpp"
#include "codemix/model.hpp"
#include "codemix/runner.hpp"
#include "codemix/script.hpp"
#include "codemix/strings.hpp"
#include "codemix/translate.hpp"
#include "codemix/translit.hpp"

namespace fs = std::filesystem;
using namespace codemix;

namespace {

Language language_arg(const std::string& raw) {
  const auto l = parse_language(raw);
  if (!l) throw ConfigError("unknown language '" + raw + "'");
  return *l;
}

void print_stats(const CorpusStats& stats) {
  std::cout << "total\t" << stats.total << '\n';
  for (Label l : kAllLabels) {
    std::cout << to_string(l) << '\t' << stats.count(l) << '\n';
  }
}

void write_corpus(const std::string& path, const Corpus& c, bool provenance) {
  if (path.empty() || path == "-") {
    write_tsv(std::cout, c, provenance);
  } else {
    write_tsv_file(path, c, provenance);
  }
}

Corpus read_corpus(const std::string& path, Language lang, bool header,
                   Split split = Split::Train) {
  if (path.empty() || path == "-") return load_tsv(std::cin, lang, {header, split});
  return load_tsv_file(path, lang, {header, split});
}

TranslatorSpec translator_arg(const std::string& kind, const std::string& dict,
                              const std::string& cmd) {
  if (kind == "identity") return TranslatorSpec::identity();
  if (kind == "dictionary") return TranslatorSpec::dictionary(dict);
  if (kind == "command") {
    std::vector<std::string> argv;
    for (auto t : split_whitespace(cmd)) argv.emplace_back(t);
    return TranslatorSpec::external(std::move(argv));
  }
  throw ConfigError("unknown translator '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code-mixed sentiment pipeline: transliteration, translation "
               "augmentation, training and weighted-F1 evaluation"};
  app.set_version_flag("--version", std::string("codemix ") + CODEMIX_VERSION);
  app.require_subcommand(1);

  std::string lang_name = "kannada";
  bool header = false;

  // ingest
  std::string ingest_in, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a labeled TSV and print class counts");
  ingest->add_option("--lang", lang_name, "kannada|tamil|malayalam");
  ingest->add_option("--in", ingest_in, "Input TSV (default stdin)");
  ingest->add_option("--out", ingest_out, "Write the normalized corpus here");
  ingest->add_flag("--header", header, "Skip the first line");

  // script-tag
  auto* script_tag = app.add_subcommand("script-tag", "Tag stdin tokens by script");

  // rules
  std::string rules_out;
  auto* rules = app.add_subcommand("rules", "Write the built-in rule table");
  rules->add_option("--lang", lang_name);
  rules->add_option("--out", rules_out);

  // translit
  std::string tl_in, tl_out, tl_rules, tl_lm, tl_save_lm;
  std::size_t tl_k = 4, tl_beam = 16;
  int lm_order = 3;
  double lm_alpha = 0.1;
  bool tl_raw = false;
  auto* translit = app.add_subcommand("translit", "Transliterate a corpus to native script");
  translit->add_option("--lang", lang_name);
  translit->add_option("--in", tl_in, "Input TSV (default stdin)");
  translit->add_option("--out", tl_out, "Output TSV (default stdout)");
  translit->add_option("--rules", tl_rules, "Rule table file");
  translit->add_option("--lm", tl_lm, "Character LM file");
  translit->add_option("--save-lm", tl_save_lm, "Write the fitted LM here");
  translit->add_option("--k", tl_k, "Candidates kept after reranking");
  translit->add_option("--beam", tl_beam, "Partial hypotheses kept");
  translit->add_option("--lm-order", lm_order);
  translit->add_option("--lm-alpha", lm_alpha);
  translit->add_flag("--raw", tl_raw, "Skip tag/bracket/not-language cleanup");
  translit->add_flag("--header", header);

  // translate
  std::string tr_in, tr_out, tr_kind = "identity", tr_dict, tr_cmd, tr_cache;
  std::size_t tr_chunk = 0;
  auto* translate = app.add_subcommand("translate", "Translate a corpus through a translator");
  translate->add_option("--lang", lang_name);
  translate->add_option("--in", tr_in);
  translate->add_option("--out", tr_out);
  translate->add_option("--translator", tr_kind, "identity|dictionary|command");
  translate->add_option("--dict", tr_dict, "Dictionary TSV");
  translate->add_option("--cmd", tr_cmd, "External command line");
  translate->add_option("--cache", tr_cache, "Translation cache file");
  translate->add_option("--chunk", tr_chunk, "Lines per child process");
  translate->add_flag("--header", header);

  // build-variants
  std::string bv_base, bv_translit, bv_translated, bv_out = ".";
  auto* build = app.add_subcommand("build-variants", "Write TRA/TRAI/TRAA/MERGED corpora");
  build->add_option("--lang", lang_name);
  build->add_option("--base", bv_base)->required();
  build->add_option("--translit", bv_translit)->required();
  build->add_option("--translated", bv_translated)->required();
  build->add_option("--out", bv_out, "Output directory");
  build->add_flag("--header", header);

  // train
  std::string tn_model = "nb", tn_data, tn_variants, tn_variant = "TRA",
              tn_out = "model.txt", tn_config;
  std::uint64_t seed = 42;
  TrainConfig tc = TrainConfig::ulmfit();
  double stlr_ratio = 32.0, cut_frac = 0.1, nb_alpha = 1.0;
  std::uint32_t dim = FeatureSpace{}.dim;
  auto* train = app.add_subcommand("train", "Train a classifier on one corpus");
  train->add_option("--model", tn_model, "nb|mlp");
  train->add_option("--data", tn_data, "Training TSV");
  train->add_option("--variants", tn_variants, "Directory written by build-variants");
  train->add_option("--variant", tn_variant, "TRA|TRAI|TRAA|MERGED");
  train->add_option("--config", tn_config, "Take model settings from a grid config");
  train->add_option("--seed", seed);
  train->add_option("--epochs", tc.epochs);
  train->add_option("--lr", tc.learning_rate, "Peak learning rate");
  train->add_option("--batch", tc.batch_size);
  train->add_option("--dropout", tc.dropout);
  train->add_option("--stlr-ratio", stlr_ratio);
  train->add_option("--cut-frac", cut_frac);
  train->add_option("--decay", tc.decay, "Discriminative LR decay");
  train->add_option("--weight-decay", tc.weight_decay);
  train->add_option("--alpha", nb_alpha, "NB smoothing");
  train->add_option("--dim", dim, "Hashing dimension");
  train->add_option("--lang", lang_name);
  train->add_option("--out", tn_out, "Model file");
  train->add_flag("--header", header);

  // evaluate
  std::string ev_model, ev_test;
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a labeled TSV");
  evaluate->add_option("--model", ev_model)->required();
  evaluate->add_option("--test", ev_test)->required();
  evaluate->add_option("--lang", lang_name);
  evaluate->add_flag("--header", header);

  // grid
  std::string gr_config, gr_out;
  std::optional<std::uint64_t> gr_seed;
  auto* grid = app.add_subcommand("grid", "Run the language x model x variant grid");
  grid->add_option("--config", gr_config)->required();
  grid->add_option("--seed", gr_seed);
  grid->add_option("--out", gr_out, "Output directory");

  // report
  std::string rp_in;
  auto* report = app.add_subcommand("report", "Render a results CSV as tables");
  report->add_option("--in", rp_in)->required();

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*ingest) {
      const Corpus c = read_corpus(ingest_in, language_arg(lang_name), header);
      print_stats(corpus_stats(c));
      if (!ingest_out.empty()) write_tsv_file(ingest_out, c);
    } else if (*script_tag) {
      std::string line;
      while (std::getline(std::cin, line)) {
        for (const auto& t : tag_tokens(line)) {
          std::cout << t.token << '\t' << to_string(t.tag) << '\n';
        }
      }
    } else if (*rules) {
      const RuleTable t = RuleTable::default_for(language_arg(lang_name));
      if (rules_out.empty()) {
        t.write(std::cout);
      } else {
        std::ofstream f(rules_out, std::ios::binary);
        t.write(f);
      }
    } else if (*translit) {
      const Language lang = language_arg(lang_name);
      const Corpus in = read_corpus(tl_in, lang, header);
      const RuleTable table = tl_rules.empty() ? RuleTable::default_for(lang)
                                               : RuleTable::load(tl_rules, lang);
      const CharLM lm = tl_lm.empty()
                            ? CharLM::train(lm_training_lines(in, table),
                                            lm_order, lm_alpha)
                            : CharLM::load_file(tl_lm);
      if (!tl_save_lm.empty()) lm.save_file(tl_save_lm);
      const Corpus src = tl_raw ? in : preprocess_for_translit(in);
      write_corpus(tl_out, transliterate_corpus(src, table, lm, {tl_beam, tl_k}),
                   true);
    } else if (*translate) {
      const Corpus in = read_corpus(tr_in, language_arg(lang_name), header);
      TranslatorSpec spec = translator_arg(tr_kind, tr_dict, tr_cmd);
      spec.chunk_size = tr_chunk;
      TranslationCache cache(tr_cache);
      TranslateStats stats;
      write_corpus(tr_out, translate_corpus(in, spec, &cache, &stats), true);
      std::cerr << "translated " << stats.translated << ", cache hits "
                << stats.cache_hits << ", processes " << stats.invocations
                << '\n';
    } else if (*build) {
      const Language lang = language_arg(lang_name);
      const Corpus base = read_corpus(bv_base, lang, header);
      const Corpus tl = load_tsv_file(bv_translit, lang);
      const Corpus ta = load_tsv_file(bv_translated, lang);
      fs::create_directories(bv_out);
      for (VariantId v : kAllVariants) {
        const Corpus c = build_variant(v, base, tl, ta);
        const fs::path p =
            fs::path(bv_out) / (ascii_lower(to_string(v)) + ".tsv");
        write_tsv_file(p.string(), c, true);
        std::cout << to_string(v) << '\t' << c.size() << '\t' << p.string()
                  << '\n';
      }
    } else if (*train) {
      const auto kind = parse_model_kind(tn_model);
      if (!kind) throw ConfigError("unknown model kind '" + tn_model + "'");
      FeatureSpace space;
      space.dim = dim;
      if (!tn_config.empty()) {
        const auto cfg = ExperimentConfig::load(tn_config);
        space = *kind == ModelKind::NaiveBayes ? cfg.nb_space : cfg.mlp_space;
        tc = cfg.mlp;
        stlr_ratio = cfg.stlr_ratio;
        cut_frac = cfg.cut_frac;
        nb_alpha = cfg.nb_alpha;
      }
      std::string data = tn_data;
      if (data.empty()) {
        const auto v = parse_variant(tn_variant);
        if (!v || tn_variants.empty()) {
          throw ConfigError("train needs --data or --variants with --variant");
        }
        data = (fs::path(tn_variants) / (ascii_lower(to_string(*v)) + ".tsv"))
                   .string();
      }
      const Corpus corpus = read_corpus(data, language_arg(lang_name), header);
      Model model;
      if (*kind == ModelKind::NaiveBayes) {
        model = train_nb(corpus, space, nb_alpha);
      } else {
        const STLRParams stlr{tc.learning_rate, stlr_ratio, cut_frac, 0};
        TrainHooks hooks;
        hooks.on_epoch_end = [](const EpochLog& log, const MLPModel&) {
          std::cerr << "epoch " << log.epoch << " loss " << log.mean_loss
                    << " train-acc " << log.train_accuracy << '\n';
        };
        model = train_mlp(corpus, space, tc, stlr,
                          UnfreezeSchedule::gradual(tc.epochs), seed, hooks);
      }
      save_model_file(tn_out, model);
      std::cout << "wrote " << tn_out << '\n';
    } else if (*evaluate) {
      const Model model = load_model_file(ev_model);
      const Corpus test =
          read_corpus(ev_test, language_arg(lang_name), header, Split::Test);
      std::vector<std::string> texts;
      std::vector<Label> gold;
      for (const auto& s : test.samples) {
        texts.push_back(s.text);
        gold.push_back(s.label);
      }
      const auto pred = predict_batch(model, texts);
      const auto per_class = per_class_metrics(confusion_matrix(gold, pred));
      std::cout << "class\tprecision\trecall\tf1\tsupport\n";
      for (const auto& m : per_class) {
        std::cout << to_string(m.label) << '\t' << format_metric(m.precision)
                  << '\t' << format_metric(m.recall) << '\t'
                  << format_metric(m.f1) << '\t' << m.support << '\n';
      }
      const auto w = weighted_average(per_class);
      std::cout << "weighted\t" << format_metric(w.precision) << '\t'
                << format_metric(w.recall) << '\t' << format_metric(w.f1)
                << '\t' << w.support << '\n';
    } else if (*grid) {
      auto cfg = ExperimentConfig::load(gr_config);
      if (gr_seed) cfg.seed = *gr_seed;
      if (!gr_out.empty()) cfg.output_dir = gr_out;
      const GridResult r = run_grid(cfg);
      std::cout << render_report(r.test);
      std::cerr << "wrote " << (cfg.output_dir / "report.csv").string()
                << " and " << (cfg.output_dir / "manifest.json").string()
                << '\n';
    } else if (*report) {
      std::ifstream in(rp_in, std::ios::binary);
      if (!in) throw ConfigError("cannot open " + rp_in);
      std::ostringstream ss;
      ss << in.rdbuf();
      std::cout << render_report(parse_csv(ss.str()));
    }
  } catch (const StageError& e) {
    std::cerr << "codemix: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "codemix: " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
