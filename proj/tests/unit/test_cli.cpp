#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kantolab/cli.hpp"
#include "kantolab/errors.hpp"

using namespace kantolab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kantolab_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("flags and lists") {
    const std::vector<std::string> args{"rates", "--fn", "sin", "--ns=4:64:x2", "--kernel", "ramp", "--lambda", "0.5"};
    const auto cfg = parse_config(args);
    CHECK(cfg.command == "rates");
    CHECK(cfg.function == "sin");
    CHECK(cfg.ns == std::vector<int>{4, 8, 16, 32, 64});
    CHECK(cfg.kernel == "ramp");
    CHECK(cfg.lambda == 0.5);
    CHECK(cfg.raw.at("ns") == "4:64:x2");
    CHECK(parse_real_list("0.5:0.1:/2") == std::vector<double>{0.5, 0.25, 0.125});
    CHECK(parse_real_list("1:3:+1") == std::vector<double>{1, 2, 3});
    CHECK(parse_int_list("3,5,9") == std::vector<int>{3, 5, 9});
    CHECK(parse_real("1e-3") == 1e-3);
  }

  TEST_CASE("malformed input is a usage error") {
    using V = std::vector<std::string>;
    CHECK_THROWS_AS(parse_config(V{}), UsageError);
    CHECK_THROWS_AS(parse_config(V{"frobnicate"}), UsageError);
    CHECK_THROWS_AS(parse_config(V{"approx", "--colour", "red"}), UsageError);
    CHECK_THROWS_AS(parse_config(V{"approx", "--ns", "8,4"}), UsageError);
    CHECK_THROWS_AS(parse_config(V{"approx", "--ns"}), UsageError);
    CHECK_THROWS_AS(parse_config(V{"approx", "--n", "4", "--ns", "8"}), UsageError);
    CHECK_THROWS_AS(parse_real("1.5x"), UsageError);
    CHECK_THROWS_AS(parse_int_list("2.5"), UsageError);
  }

  TEST_CASE("config files, with flags taking precedence") {
    const auto dir = scratch("config");
    const auto path = dir / "run.cfg";
    std::ofstream(path) << "# sample\nfn = abs_pow:nu=0.25\nkernel = ramp\nns = 8,16\n";
    const std::vector<std::string> args{"approx", "--config", path.string(), "--kernel", "logistic"};
    const auto cfg = parse_config(args);
    CHECK(cfg.function == "abs_pow:nu=0.25");
    CHECK(cfg.kernel == "logistic");
    CHECK(cfg.ns == std::vector<int>{8, 16});
    std::ofstream(dir / "bad.cfg") << "just words\n";
    CHECK_THROWS_AS(parse_config(std::vector<std::string>{"approx", "--config", (dir / "bad.cfg").string()}),
                    UsageError);
  }

  TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    const auto o = [&](const char* name) { return (dir / name).string(); };
    auto m = run_cli({"moments", "--kernel", "ramp", "--output", o("m.csv")});
    CHECK(m.code == kExitPass);
    CHECK(m.out == "1.0\n");
    CHECK(run_cli({"approx", "--fn", "const", "--ns", "4,8", "--output", o("a.csv")}).code == kExitPass);
    CHECK(run_cli({"bounds", "--kind", "compact_direct", "--fn", "sin", "--kernel", "ramp", "--ns", "32", "--output",
                   o("b.csv")})
              .code == kExitPass);
    const auto h = run_cli({"bounds", "--kind", "compact_direct", "--fn", "sin", "--kernel", "logistic", "--ns", "32",
                            "--output", o("h.csv")});
    CHECK(h.code == kExitHypothesis);
    CHECK_FALSE(h.err.empty());
    CHECK(run_cli({"approx", "--ns", "8"}).code == kExitUsage);
    CHECK(run_cli({"transmogrify"}).code == kExitUsage);
    CHECK(run_cli({"norm", "--fn", "sin", "--phi", "power:p=0.1"}).code == kExitUsage);
    CHECK(run_cli({"examples", "--which", "inclusion", "--output", o("e.csv")}).code == kExitPass);
  }

  TEST_CASE("output directory from the environment") {
    const auto dir = scratch("env");
    ::setenv("KANTOLAB_OUTPUT_DIR", dir.string().c_str(), 1);
    const auto r = run_cli({"norm", "--fn", "sin"});
    ::unsetenv("KANTOLAB_OUTPUT_DIR");
    REQUIRE(r.code == kExitPass);
    REQUIRE(fs::exists(dir / "norm.csv"));
    CHECK(slurp(dir / "norm.csv").rfind("fn,phi,quantity,lambda,value\n", 0) == 0);
    CHECK(fs::exists(dir / "norm.summary.txt"));
    CHECK(slurp(dir / "norm.summary.txt").find("# fn = sin") != std::string::npos);
  }
}
