#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "covsys/constructions.hpp"

using namespace covsys;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(COVSYS_CLI) + " " + args + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, f)) out.append(buf, n);
  int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("covsys_cli_" + std::to_string(getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::size_t lines(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

}  // namespace

TEST_CASE("verify the example") {
  TempDir d;
  auto example = d.file("example.cov");
  REQUIRE(run("build example -o " + example).code == 0);
  auto r = run("verify --both " + example);
  CHECK(r.code == 0);
  CHECK(r.out == "Covered, lcm=90\n");

  std::string text = read_text_file(example);
  text.erase(text.rfind("24 %"));
  write(d.file("miss.cov"), text);
  r = run("verify --both " + d.file("miss.cov"));
  CHECK(r.code == 1);
  CHECK(r.out.find("witness 24") != std::string::npos);

  write(d.file("bad.cov"), "1 % 2\n1 % 3\n2 % 2*\n");
  r = run("verify " + d.file("bad.cov"));
  CHECK(r.code == 2);
  CHECK(r.out.find("line 3") != std::string::npos);

  CHECK(run("verify " + d.file("missing.cov")).code == 2);
  CHECK(run("verify --limit 10 --brute " + example).code == 3);
}

TEST_CASE("build") {
  TempDir d;
  auto r = run("build six7");
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 143);
  CHECK(r.out == read_text_file(COVSYS_TEST_DATA "/six7.cov"));

  r = run("build four7 --q 23 --tree");
  CHECK(r.code == 0);
  CHECK(parse_tree(r.out) == four_sevens_tree(23));

  r = run("build pminus5 --p 23 --q 23");
  CHECK(r.code == 2);
  CHECK(r.out.find("q must differ from p") != std::string::npos);
  CHECK(run("build four7 --q 19").code == 2);
  CHECK(run("build seven11 --q 23").code == 3);
  CHECK(run("build nothing").code == 2);

  r = run("build fig4 --dot");
  CHECK(r.out.starts_with("digraph tree {"));
}

TEST_CASE("audit") {
  TempDir d;
  auto six = d.file("six7.cov");
  REQUIRE(run("build six7 -o " + six).code == 0);
  auto r = run("audit " + six + " --designated 7");
  CHECK(r.code == 0);
  CHECK(r.out == "7x6; others distinct; odd yes; square-free yes\n");

  auto tree = d.file("four7.tree");
  REQUIRE(run("build four7 --q 23 --tree -o " + tree).code == 0);
  r = run("audit " + tree + " --designated 7 --format structured");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["designated_count"] == 4);
  CHECK(j["all_odd"] == true);
  CHECK(j["distinct_apart_from_designated"] == true);
  CHECK(run("verify " + tree).code == 0);
}

TEST_CASE("transforms") {
  TempDir d;
  write(d.file("s.cov"), "1 % 2\n0 % 2^2\n2 % 2^2\n");
  auto r = run("transform swap --p 2 --r1 1 --r2 0 " + d.file("s.cov") + " -o " + d.file("swapped.cov"));
  CHECK(r.code == 0);
  CHECK(read_text_file(d.file("swapped.cov")) == "0 % 2\n1 % 2^2\n3 % 2^2\n");
  CHECK(run("transform swap --p 3 --r1 0 --r2 1 " + d.file("s.cov")).code == 2);

  write(d.file("c0.cov"), "0 % 3\n1 % 3\n2 % 3*5\n5 % 3*5\n8 % 3*5\n11 % 3*5\n14 % 3*5\n");
  r = run("transform lift --p 3 " + d.file("c0.cov") + " -o " + d.file("lift.cov"));
  CHECK(r.code == 0);
  CHECK(r.out.find("q = 7") != std::string::npos);
  CHECK(r.out.find("43 congruences; Covered, lcm=25515") != std::string::npos);
  CHECK(lines(read_text_file(d.file("lift.cov"))) == 43);
  CHECK(run("transform lift --p 3 --q 5 " + d.file("c0.cov")).code == 2);

  auto six = d.file("six7.tree");
  REQUIRE(run("build six7 --tree -o " + six).code == 0);
  r = run("transform rootswap --q 11 " + six + " -o " + d.file("six11.tree"));
  CHECK(r.code == 0);
  CHECK(run("audit " + d.file("six11.tree") + " --designated 11 --q 29").out ==
        "11x10; others distinct; odd yes; square-free yes\n");
  CHECK(run("transform rootswap --q 7 " + six).code == 2);

  write(d.file("r.cov"), "2 % 3\n0 % 2*3\n3 % 2^2*3\n9 % 2^2*3\n1 % 2*3\n4 % 2^2*3\n10 % 2^2*3\n");
  r = run("transform rootswappow --p 3 --t 2 --q 5 " + d.file("r.cov") + " -o " + d.file("r5.cov"));
  CHECK(r.code == 0);
  CHECK(run("verify --both " + d.file("r5.cov")).out == "Covered, lcm=20\n");
  CHECK(run("transform rootswappow --p 3 --t 2 --q 3 " + d.file("r.cov")).code == 2);
}

TEST_CASE("crosscheck is deterministic") {
  auto a = run("crosscheck --count 200 --seed 9");
  auto b = run("crosscheck --count 200 --seed 9");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("0 mismatches") != std::string::npos);
}

TEST_CASE("verify --both agrees on every shipped file") {
  for (auto& e : fs::directory_iterator(COVSYS_TEST_DATA)) {
    if (e.path().extension() != ".cov") continue;
    CAPTURE(e.path().string());
    auto r = run("verify --both " + e.path().string());
    CHECK((r.code == 0 || r.code == 1));
  }
}

TEST_CASE("reproduce-table1") {
  auto r = run("reproduce-table1");
  CHECK(r.code == 0);
  std::size_t pass = 0;
  for (std::size_t at = r.out.find(" PASS "); at != std::string::npos; at = r.out.find(" PASS ", at + 1)) ++pass;
  CHECK(pass == 6);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
