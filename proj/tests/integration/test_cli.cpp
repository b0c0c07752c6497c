#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <sys/wait.h>

#include "bmrisk/csv.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles/temp_dir.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + BMRISK_CLI + " " + args + " 2>&1";
  Run r{0, {}};
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = bmrisk::read_text(e.path());
  return files;
}

std::size_t csv_data_rows(const fs::path& p) {
  const auto rows = bmrisk::parse_csv(bmrisk::read_text(p));
  return rows.empty() ? 0 : rows.size() - 1;
}

/// One small synthetic cohort shared by the tests.
const fs::path& cohort() {
  static testutil::TempDir dir("cli-cohort");
  static bool made = false;
  if (!made) {
    const auto r = cli("synth " + q(dir / "c") + " --seed 4 --lesions 24 --prevalence 0.1");
    REQUIRE(r.code == 0);
    made = true;
  }
  static const fs::path manifest = dir / "c" / "manifest.json";
  return manifest;
}

}  // namespace

TEST_CASE("help and configuration errors map to exit codes") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("run --bogus").code == 2);
  testutil::TempDir tmp("cli-err");
  CHECK(cli("-o " + q(tmp / "o") + " run -m " + q(tmp / "missing.json")).code == 2);
  CHECK(cli("-o " + q(tmp / "o") + " run -m " + q(cohort()) + " --set 9").code == 2);
  CHECK(cli("-o " + q(tmp / "o") + " run -m " + q(cohort()) + " --set 0..3").code == 2);
  CHECK(cli("-o " + q(tmp / "o") + " extract -m " + q(cohort()) + " --wavelet db4").code == 2);
  CHECK(cli("-o " + q(tmp / "o") + " -j 0 extract -m " + q(cohort())).code == 2);

  std::ofstream(tmp / "broken.json") << "{ not json";
  CHECK(cli("-o " + q(tmp / "o") + " extract -m " + q(tmp / "broken.json")).code == 3);
}

TEST_CASE("extract: empty manifest gives a header-only CSV") {
  testutil::TempDir tmp("cli-empty");
  std::ofstream(tmp / "m.json") << R"({"schema":"bmrisk-cohort/1","patients":[]})";
  const auto r = cli("-o " + q(tmp / "o") + " extract -m " + q(tmp / "m.json"));
  CHECK(r.code == 0);
  const auto rows = bmrisk::parse_csv(bmrisk::read_text(tmp / "o" / "features.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == "image_id");
  CHECK(fs::exists(tmp / "o" / "features.csv.json"));
}

TEST_CASE("extract is resumable and byte-stable; failures are reported but do not stop the run") {
  testutil::TempDir tmp("cli-extract");
  const std::string base = "-o " + q(tmp / "o") + " extract -m " + q(cohort());
  const auto first = cli(base);
  REQUIRE(first.code == 0);
  const auto csv = bmrisk::read_text(tmp / "o" / "features.csv");
  const auto again = cli(base);
  CHECK(again.code == 0);
  CHECK(again.out.find("extracted 0") != std::string::npos);
  CHECK(bmrisk::read_text(tmp / "o" / "features.csv") == csv);
  const auto forced = cli(base + " --force");
  CHECK(forced.out.find("reused 0") != std::string::npos);
  CHECK(bmrisk::read_text(tmp / "o" / "features.csv") == csv);

  // corrupt one image of a copied cohort
  fs::copy(cohort().parent_path(), tmp / "c", fs::copy_options::recursive);
  const auto victim = *fs::directory_iterator(tmp / "c" / "images");
  std::ofstream(victim.path(), std::ios::trunc) << "garbage";
  const auto bad = cli("-o " + q(tmp / "o2") + " extract -m " + q(tmp / "c" / "manifest.json"));
  CHECK(bad.code == 3);
  CHECK(bad.out.find(victim.path().stem().string()) != std::string::npos);
  const auto rows = csv_data_rows(tmp / "o2" / "features.csv");
  CHECK(rows + 1 == csv_data_rows(tmp / "o" / "features.csv"));
}

TEST_CASE("select on set 7 sees 12 + 4 x 770 assembled columns") {
  testutil::TempDir tmp("cli-select");
  const auto r = cli("-o " + q(tmp / "o") + " select -m " + q(cohort()) + " --set 7 --wavelet haar");
  REQUIRE(r.code == 0);
  CHECK(csv_data_rows(tmp / "o" / "correlations.csv") == 12 + 4 * 770);
  const auto sel = nlohmann::json::parse(bmrisk::read_text(tmp / "o" / "selection.json"));
  CHECK(sel.at("selected").size() >= 1);
  CHECK(sel.at("selected").size() <= sel.at("cap").get<std::size_t>());
  CHECK(sel.at("trace").size() == sel.at("selected").size());
  CHECK(cli("-o " + q(tmp / "o") + " select -m " + q(cohort()) + " --set 1..2").code == 2);
}

TEST_CASE("train then evaluate") {
  testutil::TempDir tmp("cli-train");
  const std::string common = " -m " + q(cohort()) + " --set 6 --wavelet none";
  const auto t = cli("-o " + q(tmp / "o") + " train" + common + " --seed 3 --model " + q(tmp / "model.json"));
  REQUIRE(t.code == 0);
  const auto model = nlohmann::json::parse(bmrisk::read_text(tmp / "model.json"));
  CHECK(model.at("format") == "bmrisk-model/1");
  const auto e = cli("-o " + q(tmp / "o") + " evaluate" + common + " --model " + q(tmp / "model.json"));
  CHECK(e.code == 0);
  CHECK(e.out.find("Predicted HRM") != std::string::npos);
  for (const char* f : {"risk_split.txt", "risk_split.json", "km.csv", "km.svg", "roc.svg"})
    CHECK_MESSAGE(fs::exists(tmp / "o" / f), f);
  CHECK(cli("-o " + q(tmp / "o") + " evaluate" + common + " --model " + q(tmp / "none.json")).code == 2);
}

TEST_CASE("km subcommand") {
  testutil::TempDir tmp("cli-km");
  std::ofstream(tmp / "s.csv") << "time,event,group\n1,1,a\n1,1,a\n1,1,a\n10,1,b\n10,1,b\n10,1,b\n12,0,b\n";
  const auto r = cli("-o " + q(tmp / "o") + " km " + q(tmp / "s.csv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("log-rank") != std::string::npos);
  const auto rows = bmrisk::parse_csv(bmrisk::read_text(tmp / "o" / "km.csv"));
  CHECK(rows[0] == std::vector<std::string>{"group", "time", "at_risk", "events", "censored", "survival", "lower", "upper"});
  CHECK(fs::exists(tmp / "o" / "km.svg"));
  std::ofstream(tmp / "bad.csv") << "time,event\nx,1\n";
  CHECK(cli("-o " + q(tmp / "o") + " km " + q(tmp / "bad.csv")).code == 3);
  std::ofstream(tmp / "neg.csv") << "time,event\n-1,1\n";
  CHECK(cli("-o " + q(tmp / "o") + " km " + q(tmp / "neg.csv")).code == 3);
}

TEST_CASE("run: seven-set table, env output dir, config file and thread invariance") {
  testutil::TempDir tmp("cli-run");
  const std::string args = "run -m " + q(cohort()) + " --set 1..7 --repeats 3 --seed 5 --bins 16";
  const auto a = cli(args, "BMRISK_OUTPUT_DIR=" + q(tmp / "env"));
  REQUIRE(a.code == 0);
  const auto t1 = bmrisk::parse_csv(bmrisk::read_text(tmp / "env" / "table1.csv"));
  CHECK(t1.size() == 8);
  const auto txt = bmrisk::read_text(tmp / "env" / "table1.txt");
  for (int s = 1; s <= 7; ++s) CHECK(txt.find("Set " + std::to_string(s)) != std::string::npos);
  for (int s = 1; s <= 7; ++s) CHECK(fs::exists(tmp / "env" / ("set-" + std::to_string(s)) / "table2.txt"));

  const auto b = cli("-o " + q(tmp / "b") + " -j 3 " + args);
  REQUIRE(b.code == 0);
  CHECK(tree(tmp / "env") == tree(tmp / "b"));

  std::ofstream(tmp / "cfg.toml") << "output = \"" << (tmp / "c").string() << "\"\nthreads = 2\n[run]\nmanifest = \""
                                  << cohort().string() << "\"\nset = [\"1..7\"]\nrepeats = 3\nseed = 5\nbins = 16\n";
  const auto c = cli("--config " + q(tmp / "cfg.toml") + " run");
  CHECK_MESSAGE(c.code == 0, c.out);
  if (c.code == 0) CHECK(tree(tmp / "env") == tree(tmp / "c"));
}
