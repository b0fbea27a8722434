#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "butcher/io.hpp"

namespace {

struct RunResult {
  int code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("cli: tree enumeration and counts") {
  RunResult r = run("trees enumerate --order 3");
  CHECK(r.code == 0);
  CHECK(r.out == "[[[]]]\n[[][]]\n");

  r = run("trees count --max 5");
  CHECK(r.code == 0);
  CHECK(r.out.find("trees:\t1\t1\t2\t4\t9") != std::string::npos);
}

TEST_CASE("cli: aromatic counts") {
  RunResult r = run("aromatic count --max 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("aromatic:\t1\t2\t6\t16") != std::string::npos);
}

TEST_CASE("cli: exit codes distinguish usage from domain errors") {
  CHECK(run("trees enumerate").code == 2);        // missing required option
  CHECK(run("no-such-command").code == 2);
  CHECK(run("trees enumerate --order 99").code == 1);  // over the cap
  CHECK(run("rk check /nonexistent.json --order-cap 2").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("cli: order cap is configurable through the environment") {
  CHECK(run("trees enumerate --order 13").code == 1);
  RunResult r = run("trees count --max 13");
  CHECK(r.code == 1);
  std::string cmd = "BSERIES_ORDER_CAP=13 " + std::string(CLI_BINARY_PATH) +
                    " trees enumerate --order 13 >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
}

TEST_CASE("cli: named series output") {
  RunResult r = run("bseries exact --order 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("[[[]]]\t1/6") != std::string::npos);
  CHECK(r.out.find("[[][]]\t1/6") != std::string::npos);

  r = run("bseries compose euler euler --order 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("[[][]]\t1/2") != std::string::npos);
  CHECK(r.out.find("[[][][]]\t1/6") != std::string::npos);

  r = run("bseries invert euler --order 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("[]\t-1\n") != std::string::npos);
}

TEST_CASE("cli: series JSON round-trips through the library") {
  RunResult r = run("bseries avf --order 3 --json");
  REQUIRE(r.code == 0);
  butcher::BSeries parsed = butcher::series_from_json(butcher::json::parse(r.out));
  CHECK(parsed == butcher::avf_series(3));
}

TEST_CASE("cli: generated Gauss tableau certifies its order") {
  RunResult g = run("rk gauss --stages 3");
  REQUIRE(g.code == 0);
  auto path = temp_file("gauss3_tableau.json");
  std::ofstream(path) << g.out;

  RunResult chk = run("rk check " + path.string() + " --order-cap 7");
  CHECK(chk.code == 0);
  CHECK(chk.out.rfind("order 6;", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("cli: order condition listing") {
  RunResult r = run("rk conditions --order 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("4 conditions through order 3") != std::string::npos);
  CHECK(r.out.find("[[][]]\tPhi = 1/3") != std::string::npos);
}

TEST_CASE("cli: integration with a tableau file") {
  auto path = temp_file("euler_tableau.json");
  std::ofstream(path) << butcher::tableau_to_json(butcher::euler_tableau()).dump();

  RunResult r = run("rk integrate " + path.string() + " --field poly1d --x0 1 --h 0.1 --steps 1");
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 3) == "1.1");
  std::filesystem::remove(path);
}

TEST_CASE("cli: grafting and identity check") {
  RunResult r = run("prelie graft [] [[]]");
  CHECK(r.code == 0);
  CHECK(r.out.find("[[[]]]\t1") != std::string::npos);
  CHECK(r.out.find("[[][]]\t1") != std::string::npos);

  r = run("prelie identity-check --max-order 3 --samples 20");
  CHECK(r.code == 0);
  CHECK(r.out.find("identity holds") != std::string::npos);
}

TEST_CASE("cli: demos") {
  RunResult r = run("demo knockout");
  CHECK(r.code == 0);
  CHECK(r.out.find("knockout witnessed") != std::string::npos);

  r = run("demo aromatic-method --field poly1d --x0 1 --h 0.1");
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 4) == "1.12");  // x + h x^2 (1 + 2hx) at x=1
}

TEST_CASE("cli: output is deterministic") {
  RunResult a = run("bseries exact --order 5 --json");
  RunResult b = run("bseries exact --order 5 --json");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}
