#include <doctest.h>

#include <nlohmann/json.hpp>

#include "codemix/error.hpp"
#include "codemix/runner.hpp"
#include "fixtures.hpp"

using namespace codemix;
using codemix::testing::read_file;
using codemix::testing::TempDir;
using codemix::testing::write_toy_grid;

TEST_SUITE("runner") {

TEST_CASE("one language gives eight cells") {
  TempDir dir;
  const auto cfg = ExperimentConfig::load(write_toy_grid(dir.path(), {Language::Tamil}));
  const GridResult r = run_grid(cfg);
  CHECK(r.test.cells.size() == 8);
  CHECK(r.dev.cells.size() == 8);
  for (VariantId v : kAllVariants) {
    for (ModelKind k : kAllModelKinds) {
      const ReportCell* c = r.test.find(Language::Tamil, k, v);
      REQUIRE(c != nullptr);
      CHECK(c->metrics.support == 60);
      CHECK(c->metrics.f1 >= 0.0);
      CHECK(c->metrics.f1 <= 1.0);
    }
  }
  for (const char* f : {"report.txt", "report.csv", "report_dev.csv", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / "out" / f));
  }
  CHECK(read_file(dir / "out" / "report.txt") == render_report(r.test));
}

TEST_CASE("rerun reuses cached stages and reproduces the report") {
  TempDir dir;
  const auto cfg = ExperimentConfig::load(write_toy_grid(dir.path(), {Language::Kannada}));
  const GridResult first = run_grid(cfg);
  const std::string report = read_file(dir / "out" / "report.txt");
  const std::string csv = read_file(dir / "out" / "report.csv");
  CHECK_FALSE(first.manifest.stage("kannada/translit")->reused);

  const GridResult second = run_grid(cfg);
  CHECK(read_file(dir / "out" / "report.txt") == report);
  CHECK(read_file(dir / "out" / "report.csv") == csv);
  CHECK(second.manifest.config_hash == first.manifest.config_hash);
  CHECK(second.manifest.stage("kannada/translit")->reused);
  CHECK(second.manifest.stage("kannada/translate")->reused);
  CHECK(second.manifest.stage("kannada/train/mlp/MERGED")->reused);

  // A fresh output directory trains from scratch and lands on the same bytes.
  ExperimentConfig fresh = cfg;
  fresh.output_dir = dir / "out2";
  run_grid(fresh);
  CHECK(read_file(dir / "out2" / "report.txt") == report);
}

TEST_CASE("test and dev splits only feed evaluation") {
  TempDir dir;
  const auto cfg = ExperimentConfig::load(write_toy_grid(dir.path(), {Language::Malayalam}));
  const GridResult r = run_grid(cfg);
  const std::string test_path = (dir / "malayalam_test.tsv").string();
  const std::string dev_path = (dir / "malayalam_dev.tsv").string();
  std::size_t eval_stages = 0;
  for (const auto& s : r.manifest.stages) {
    const bool is_eval = s.name.find("/evaluate/") != std::string::npos;
    eval_stages += is_eval;
    for (const auto& in : s.inputs) {
      const bool held_out = in.rfind(test_path + "@", 0) == 0 || in.rfind(dev_path + "@", 0) == 0;
      CHECK_MESSAGE(!(held_out && !is_eval), s.name << " reads " << in);
    }
    if (is_eval) {
      bool saw_test = false;
      for (const auto& in : s.inputs) saw_test |= in.rfind(test_path + "@", 0) == 0;
      CHECK(saw_test);
    }
  }
  CHECK(eval_stages == 8);

  // Every file the manifest lists exists.
  const auto j = nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  for (const auto& f : j.at("files")) CHECK(std::filesystem::exists(f.get<std::string>()));
  CHECK(j.at("seed") == 42);
}

TEST_CASE("the seed only moves the MLP") {
  TempDir dir;
  auto cfg = ExperimentConfig::load(write_toy_grid(dir.path(), {Language::Tamil}));
  const GridResult a = run_grid(cfg);
  cfg.seed = 7;
  cfg.output_dir = dir / "seeded";
  const GridResult b = run_grid(cfg);
  for (VariantId v : kAllVariants) {
    const auto* na = a.test.find(Language::Tamil, ModelKind::NaiveBayes, v);
    const auto* nb = b.test.find(Language::Tamil, ModelKind::NaiveBayes, v);
    CHECK(na->metrics.f1 == nb->metrics.f1);
    CHECK(na->metrics.precision == nb->metrics.precision);
  }
  CHECK(a.manifest.config_hash != b.manifest.config_hash);
}

TEST_CASE("configuration errors") {
  TempDir dir;
  const auto path = write_toy_grid(dir.path(), {Language::Kannada});
  std::filesystem::remove(dir / "kannada_test.tsv");
  CHECK_THROWS_AS(ExperimentConfig::load(path).validate(), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{not json", dir.path()), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"languages": [{"language": "telugu",
      "train": "a", "test": "b"}]})", dir.path()), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "nope.json"), ConfigError);
}

TEST_CASE("config JSON round trip") {
  TempDir dir;
  const auto cfg = ExperimentConfig::load(write_toy_grid(dir.path(), {Language::Kannada, Language::Tamil}));
  const auto back = ExperimentConfig::from_json(cfg.to_json(), "/elsewhere");
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.languages.size() == 2);
  CHECK(back.mlp.epochs == 3);
  CHECK(back.nb_space.dim == 4096);
}

TEST_CASE("failures name their stage") {
  TempDir dir;
  auto cfg = ExperimentConfig::load(write_toy_grid(dir.path(), {Language::Kannada}));
  cfg.translator = TranslatorSpec::external({"sh", "-c", "echo offline >&2; exit 2"});
  try {
    run_grid(cfg);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "kannada/translate");
    CHECK(std::string(e.what()).find("offline") != std::string::npos);
  }
}

}  // TEST_SUITE
