#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "fixtures.hpp"

using codemix::testing::read_file;
using codemix::testing::TempDir;
using codemix::testing::write_file;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args, const std::string& stdin_text = "") {
  write_file(dir / "stdin.txt", stdin_text);
  const std::string cmd = "cd '" + dir.path().string() + "' && '" CODEMIX_CLI "' " + args +
                          " < stdin.txt > stdout.txt 2> stderr.txt";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(dir / "stdout.txt");
  r.err = read_file(dir / "stderr.txt");
  return r;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ingest prints class counts") {
  TempDir dir;
  write_file(dir / "a.tsv", "semma\tPositive\nmokka\tNegative\nokay\tPositive\n");
  const Run r = cli(dir, "ingest --lang tamil --in a.tsv");
  CHECK(r.status == 0);
  CHECK(r.out.find("3") != std::string::npos);
  CHECK(r.out.find("Positive") != std::string::npos);

  write_file(dir / "bad.tsv", "semma\tPositive\nhello\tGreat\n");
  const Run bad = cli(dir, "ingest --lang tamil --in bad.tsv");
  CHECK(bad.status != 0);
  CHECK(bad.err.find("line 2") != std::string::npos);
}

TEST_CASE("script-tag and translit") {
  TempDir dir;
  const Run tags = cli(dir, "script-tag", "super ಕನಸು 123\n");
  CHECK(tags.status == 0);
  CHECK(tags.out.find("Latin") != std::string::npos);
  CHECK(tags.out.find("KannadaScript") != std::string::npos);
  CHECK(tags.out.find("Digit") != std::string::npos);

  const Run tl = cli(dir, "translit --lang kannada --save-lm lm.txt",
                     "super padam (KGF)\tPositive\nhello\tnot-Kannada\n");
  CHECK(tl.status == 0);
  CHECK(tl.out.find("super") == std::string::npos);
  CHECK(tl.out.find("KGF") == std::string::npos);
  CHECK(tl.out.find("Positive") != std::string::npos);
  CHECK(tl.out.find("not-") == std::string::npos);
  CHECK(std::filesystem::exists(dir / "lm.txt"));
}

TEST_CASE("translate through a command with a cache") {
  TempDir dir;
  write_file(dir / "in.tsv", "one\tPositive\ntwo\tNegative\n");
  const Run r = cli(dir, "translate --in in.tsv --translator command --cmd 'tr a-z A-Z' --cache c.tsv");
  CHECK(r.status == 0);
  CHECK(r.out.find("ONE\tPositive") != std::string::npos);
  CHECK(r.out.find("TWO\tNegative") != std::string::npos);

  const Run fail = cli(dir, "translate --in in.tsv --translator command --cmd 'sh -c \"exit 4\"'");
  CHECK(fail.status != 0);
  CHECK(fail.err.find("translate") != std::string::npos);
}

TEST_CASE("variants, train, evaluate") {
  TempDir dir;
  write_file(dir / "train.tsv", codemix::testing::toy_tsv(80, 1, "ಚಿತ್ರ"));
  write_file(dir / "test.tsv", codemix::testing::toy_tsv(30, 2, "ಚಿತ್ರ"));
  REQUIRE(cli(dir, "translit --lang kannada --in train.tsv --out tl.tsv").status == 0);
  REQUIRE(cli(dir, "translate --in tl.tsv --out tr.tsv").status == 0);
  const Run bv = cli(dir, "build-variants --base train.tsv --translit tl.tsv --translated tr.tsv --out variants");
  REQUIRE(bv.status == 0);
  for (const char* v : {"tra", "trai", "traa", "merged"}) {
    CHECK(std::filesystem::exists(dir / "variants" / (std::string(v) + ".tsv")));
  }
  const Run nb = cli(dir, "train --model nb --variants variants --variant MERGED --out nb.model");
  REQUIRE(nb.status == 0);
  const Run mlp = cli(dir, "train --model mlp --data train.tsv --epochs 2 --dim 4096 --out mlp.model");
  REQUIRE(mlp.status == 0);
  for (const char* m : {"nb.model", "mlp.model"}) {
    const Run ev = cli(dir, std::string("evaluate --model ") + m + " --test test.tsv");
    CHECK(ev.status == 0);
    CHECK(ev.out.find("weighted\t") != std::string::npos);
  }
  CHECK(cli(dir, "train --model svm --data train.tsv --out x.model").status != 0);
}

TEST_CASE("grid and report") {
  TempDir dir;
  codemix::testing::write_toy_grid(dir.path(), {codemix::Language::Kannada});
  const Run g = cli(dir, "grid --config grid.json --out run");
  REQUIRE(g.status == 0);
  const std::string report = read_file(dir / "run" / "report.txt");
  CHECK(report.find("Merged (TRA+TRAI+TRAA)") != std::string::npos);
  const Run r = cli(dir, "report --in run/report.csv");
  CHECK(r.status == 0);
  CHECK(r.out == report);
  CHECK(cli(dir, "grid --config missing.json").status != 0);
}

TEST_CASE("usage errors") {
  TempDir dir;
  CHECK(cli(dir, "").status != 0);
  CHECK(cli(dir, "no-such-command").status != 0);
  CHECK(cli(dir, "--version").out.find("codemix") != std::string::npos);
}

}  // TEST_SUITE
