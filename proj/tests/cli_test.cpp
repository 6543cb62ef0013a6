#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult lrp(const std::string& args) {
  static int n = 0;
  std::string out_path = "cli_out_" + std::to_string(++n) + ".txt";
  std::string err_path = "cli_err_" + std::to_string(n) + ".txt";
  std::string cmd = std::string(LRP_BIN) + " " + args + " > " + out_path +
                    " 2> " + err_path;
  int status = std::system(cmd.c_str());
  CmdResult r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out_path),
              slurp(err_path)};
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string write_program(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

std::string data(const std::string& name) {
  return std::string(LRP_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("check command") {
  SECTION("well-typed programs") {
    CmdResult r = lrp("check " + data("example1.lrp"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == "OK: int\n");
  }
  SECTION("type errors exit 1 with a diagnostic") {
    write_program("bad.lrp", "1 2\n");
    CmdResult r = lrp("check bad.lrp");
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.err.find("error[E-NOT-FUNC]") != std::string::npos);
    REQUIRE(r.err.find("at 1:3") != std::string::npos);
  }
  SECTION("parse errors exit 1") {
    write_program("syn.lrp", "let = 1\n");
    CmdResult r = lrp("check syn.lrp");
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.err.find("error[E-PARSE]") != std::string::npos);
  }
  SECTION("missing files exit 2") {
    REQUIRE(lrp("check no_such_file.lrp").exit_code == 2);
  }
}

TEST_CASE("transform command") {
  SECTION("text output prints the program and the function table") {
    CmdResult r = lrp("transform " + data("example1.lrp"));
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    REQUIRE(line == "let y = 5 in f[1] 1");
    std::getline(lines, line);
    REQUIRE(line == "f :: x : int . x + y : int");
    std::getline(lines, line);
    REQUIRE(line == "f[1] ▷ x : int . x + y : int");
  }
  SECTION("second worked example") {
    CmdResult r = lrp("transform " + data("example2.lrp"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("let y = 5 in f[1] y\n") == 0);
    REQUIRE(r.out.find("f[1] ▷ x : int . let c = 5 in c + 1 : int\n") !=
            std::string::npos);
  }
  SECTION("json output for a trivial program") {
    write_program("five.lrp", "5\n");
    CmdResult r = lrp("transform five.lrp --emit json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("\"version\": 1") != std::string::npos);
    REQUIRE(r.out.find("\"monos\": []") != std::string::npos);
  }
  SECTION("propertied program types cannot be emitted as documents") {
    write_program("propd.lrp", "set(5, c, 5)\n");
    CmdResult r = lrp("transform propd.lrp --emit json");
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.err.find("error[IR]") != std::string::npos);
  }
}

TEST_CASE("run command") {
  SECTION("worked examples evaluate to 6") {
    CmdResult r1 = lrp("run " + data("example1.lrp"));
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.out == "6\n");
    CmdResult r2 = lrp("run " + data("example2.lrp"));
    REQUIRE(r2.exit_code == 0);
    REQUIRE(r2.out == "6\n");
  }
  SECTION("propertied program types are refused") {
    write_program("propd2.lrp", "set(5, c, 5)\n");
    CmdResult r = lrp("run propd2.lrp");
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.err.find("error[R-UNREADY]") != std::string::npos);
  }
  SECTION("trace goes to standard error") {
    CmdResult r = lrp("run --trace " + data("example1.lrp"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == "6\n");
    REQUIRE(r.err.find("--Let-1-->") != std::string::npos);
    REQUIRE(r.err.find("--App-1-->") != std::string::npos);
    REQUIRE(r.err.find("y ↪ 5") != std::string::npos);
  }
  SECTION("the step budget is enforced") {
    CmdResult r = lrp("run --max-steps 2 " + data("example1.lrp"));
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.err.find("error[R-MAX-STEPS]") != std::string::npos);
  }
  SECTION("running from a document matches the direct pipeline") {
    CmdResult doc = lrp("transform --emit json " + data("example2.lrp"));
    REQUIRE(doc.exit_code == 0);
    write_program("example2.ir.json", doc.out);
    CmdResult r = lrp("run --from-ir example2.ir.json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == "6\n");
  }
}

TEST_CASE("usage errors exit 2") {
  REQUIRE(lrp("").exit_code == 2);
  REQUIRE(lrp("frobnicate x.lrp").exit_code == 2);
  REQUIRE(lrp("transform --emit yaml five.lrp").exit_code == 2);
}
