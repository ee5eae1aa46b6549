#include <doctest.h>

#include <string>

#include "codemix/error.hpp"
#include "codemix/translate.hpp"
#include "fixtures.hpp"

using namespace codemix;
using codemix::testing::TempDir;
using codemix::testing::write_file;

namespace {

std::vector<Sample> samples(const std::vector<std::string>& texts) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out.push_back({i, texts[i], kAllLabels[i % kNumLabels], Language::Tamil,
                   Provenance::Original});
  }
  return out;
}

std::string error_text(const std::vector<std::string>& argv) {
  try {
    run_line_filter(argv, {"one", "two"});
  } catch (const TranslationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("translate") {

TEST_CASE("dictionary lookup") {
  const Dictionary d = {{"nalla", "good"}, {"padam", "movie"}};
  CHECK(dictionary_translate("", d) == "");
  CHECK(dictionary_translate("nalla padam", d) == "good movie");
  CHECK(dictionary_translate("nalla xyz", d) == "good xyz");
  CHECK(dictionary_translate("  nalla\tpadam ", d) == "  good\tmovie ");
  CHECK(dictionary_translate("Nalla", d) == "Nalla");
}

TEST_CASE("dictionary files") {
  TempDir dir;
  write_file(dir / "d.tsv", "nalla\tgood\npadam\tfilm\npadam\tmovie\n");
  const Dictionary d = load_dictionary((dir / "d.tsv").string());
  CHECK(d.at("padam") == "movie");
  CHECK_THROWS_AS(load_dictionary((dir / "missing.tsv").string()), ConfigError);
  CHECK_THROWS_AS(TranslatorSpec::dictionary((dir / "missing.tsv").string()).validate(),
                  ConfigError);
  CHECK_THROWS_AS(TranslatorSpec::external({}).validate(), ConfigError);

  const auto out = translate_batch(samples({"nalla padam", "vera"}),
                                   TranslatorSpec::dictionary((dir / "d.tsv").string()),
                                   nullptr);
  CHECK(out[0].text == "good movie");
  CHECK(out[1].text == "vera");

  // Editing the dictionary changes the translator id.
  const std::string before = TranslatorSpec::dictionary((dir / "d.tsv").string()).id();
  write_file(dir / "d.tsv", "nalla\tfine\n");
  CHECK(TranslatorSpec::dictionary((dir / "d.tsv").string()).id() != before);
}

TEST_CASE("identity translator") {
  const auto in = samples({"semma", "mokka padam", "ಕನಸು"});
  const auto out = translate_batch(in, TranslatorSpec::identity(), nullptr);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out[i].text == in[i].text);
    CHECK(out[i].label == in[i].label);
    CHECK(out[i].id == in[i].id);
    CHECK(out[i].provenance == Provenance::Translated);
  }
}

TEST_CASE("echo command keeps order and warm cache skips the child") {
  TempDir dir;
  const auto in = samples({"one", "two", "three", "four", "five"});
  const auto spec = TranslatorSpec::external({"cat"});
  TranslationCache cache((dir / "cache.tsv").string());
  TranslateStats cold;
  const auto out = translate_batch(in, spec, &cache, &cold);
  REQUIRE(out.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(out[i].text == in[i].text);
  CHECK(cold.invocations == 1);
  CHECK(cold.translated == 5);

  TranslateStats warm;
  CHECK(translate_batch(in, spec, &cache, &warm) == out);
  CHECK(warm.invocations == 0);
  CHECK(warm.cache_hits == 5);

  TranslationCache reopened((dir / "cache.tsv").string());
  CHECK(reopened.size() == 5);
  TranslateStats again;
  translate_batch(in, spec, &reopened, &again);
  CHECK(again.invocations == 0);
}

TEST_CASE("chunking spawns one child per chunk") {
  auto spec = TranslatorSpec::external({"cat"});
  spec.chunk_size = 2;
  TranslateStats st;
  const auto out = translate_batch(samples({"a", "b", "c", "d", "e"}), spec, nullptr, &st);
  CHECK(st.invocations == 3);
  CHECK(out[4].text == "e");
}

TEST_CASE("cache entries survive awkward text") {
  TempDir dir;
  const std::string path = (dir / "c.tsv").string();
  {
    TranslationCache c(path);
    c.insert("id", "h1", "tab\there\\back");
    c.insert("id", "h2", "");
  }
  // A torn final line from an interrupted run is ignored.
  write_file(dir / "c2.tsv", codemix::testing::read_file(dir / "c.tsv") + "id\th3");
  TranslationCache c(path);
  CHECK(c.lookup("id", "h1") == "tab\there\\back");
  CHECK(c.lookup("id", "h2") == "");
  CHECK_FALSE(c.lookup("other", "h1").has_value());
  TranslationCache torn((dir / "c2.tsv").string());
  CHECK(torn.size() == 2);
}

TEST_CASE("multi-line text crosses the boundary as one line") {
  CHECK(sanitize_for_protocol("a\nb\r\nc") == "a b  c");
  const auto out = translate_batch(samples({"x\ny", "z"}), TranslatorSpec::external({"cat"}), nullptr);
  CHECK(out[0].text == "x y");
  CHECK(out[1].text == "z");
}

TEST_CASE("blank translations fall back to the source") {
  const auto out = translate_batch(samples({"keep me"}),
                                   TranslatorSpec::external({"sed", "s/.*//"}), nullptr);
  CHECK(out[0].text == "keep me");
}

TEST_CASE("failures") {
  const std::string killed = error_text({"sh", "-c", "kill -9 $$"});
  CHECK(killed.find("signal 9") != std::string::npos);

  const std::string failed = error_text({"sh", "-c", "echo model not found >&2; exit 3"});
  CHECK(failed.find("model not found") != std::string::npos);
  CHECK(failed.find("3") != std::string::npos);

  CHECK_FALSE(error_text({"/nonexistent/translator"}).empty());

  CHECK_THROWS_AS(run_line_filter({"head", "-n", "1"}, {"a", "b", "c"}), ProtocolError);
  CHECK_THROWS_AS(run_line_filter({"sh", "-c", "cat; echo extra"}, {"a"}), ProtocolError);
  CHECK(run_line_filter({"cat"}, {}).empty());
}

}  // TEST_SUITE
