#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pitslab/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pitslab-cli-test";

// Runs the CLI from kRoot; returns its exit code.
int run(const std::string& args, const std::string& env = "") {
  fs::create_directories(kRoot);
  const std::string cmd =
      "cd '" + kRoot.string() + "' && " + env + " '" PITSLAB_CLI "' " + args + " > last.out 2> last.err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(kRoot / p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("verify a Weyl sequence") {
    fs::remove_all(kRoot);
    REQUIRE(run("verify --kind poly-phase --q2 sqrt2 --out run1 --no-cache") == 0);
    const auto report = pitslab::read_json(kRoot / "run1" / "report.json");
    CHECK(report.at("verdicts").at("overall") == "ConsistentWithTheorem1");
    CHECK(fs::exists(kRoot / "run1" / "report.txt"));
    CHECK(slurp("run1/zeros.csv").rfind("modulus,angle_turns,multiplicity,residual\n", 0) == 0);
    const auto config = pitslab::read_json(kRoot / "run1" / "config.json");
    CHECK(config.at("schema") == "pits-config/1");
    CHECK(config.at("command") == "verify");
    CHECK_FALSE(config.contains("out"));
    CHECK_FALSE(config.contains("threads"));

    // rerun from the persisted config, through the cache and without it
    REQUIRE(run("verify --config run1/config.json --out run2 --no-cache") == 0);
    CHECK(slurp("run1/report.json") == slurp("run2/report.json"));
    REQUIRE(run("verify --config run1/config.json --out run3", "PITSLAB_CACHE=cache") == 0);
    REQUIRE(run("verify --config run1/config.json --out run4", "PITSLAB_CACHE=cache") == 0);
    CHECK(fs::exists(kRoot / "cache"));
    CHECK(slurp("run1/report.json") == slurp("run3/report.json"));
    CHECK(slurp("run1/report.json") == slurp("run4/report.json"));
    CHECK(slurp("run1/zeros.csv") == slurp("run4/zeros.csv"));
  }

  TEST_CASE("zeros of the exponential") {
    REQUIRE(run("zeros --kind constant --annulus 1:100 --out z") == 0);
    CHECK(slurp("z/zeros.csv") == "modulus,angle_turns,multiplicity,residual\n");
    const auto m = pitslab::read_json(kRoot / "z" / "zeros.json");
    CHECK(m.at("method") == "aberth-ehrlich+newton");
  }

  TEST_CASE("exit codes") {
    CHECK(run("eval --kind frac-power --beta -1 --out e") == 2);
    CHECK(slurp("last.err").find("beta") != std::string::npos);
    CHECK(run("eval --kind constant --bogus 1") == 2);
    CHECK(run("nosuchcommand") == 2);
    CHECK(run("zeros --kind constant --annulus 1:700 --out big") == 2);
    CHECK(run("eval --kind constant --format xml") == 2);
    CHECK(run("seq --kind moebius --length-hint 100 --len 200") == 2);
    std::ofstream(kRoot / "extra.json") << R"({"command": "seq", "params": {"len": 3, "colour": 1}})";
    CHECK(run("seq --config extra.json --kind constant") == 2);
    std::ofstream(kRoot / "other.json") << R"({"command": "eval", "spec": {"kind": "constant"}})";
    CHECK(run("seq --config other.json") == 2);
    CHECK(run("seq") == 2);  // no sequence
  }

  TEST_CASE("every subcommand writes its outputs") {
    CHECK(run("seq --kind moebius --len 7 --out s") == 0);
    CHECK(slurp("s/sequence.csv") == "index,re,im\n0,0,0\n1,1,0\n2,-1,0\n3,-1,0\n4,0,0\n5,-1,0\n6,1,0\n");
    CHECK(run("acf --kind pure-exp --lambda 1/3 --sizes 1000,2000,4000 --max-lag 5 --out a") == 0);
    CHECK(slurp("a/lags.csv").rfind("n,k,re,im\n", 0) == 0);
    CHECK(pitslab::read_json(kRoot / "a" / "acf.json").at("herglotz").at("positive") == true);
    CHECK(run("spec --kind steinhaus --n 4096 --J 16 --out sp") == 0);
    CHECK(slurp("sp/arcs.csv").rfind("j,left,right,mass\n", 0) == 0);
    CHECK(run("spectrum --kind steinhaus --estimator abel --r 0.99 --J 16 --format json --out sj") == 0);
    CHECK(fs::exists(kRoot / "sj" / "spectrum.json"));
    CHECK(run("nogap --kind constant --out ng") == 0);
    CHECK(pitslab::read_json(kRoot / "ng" / "nogap.json").at("verdict") == "GapSuspected");
    CHECK(run("eval --kind poly-phase --q2 sqrt2 --radii 50,100 --angles 32 --binary true --out ev") == 0);
    CHECK(slurp("ev/field.csv").rfind("r,theta,re,im\n", 0) == 0);
    CHECK(slurp("ev/indicator.csv").rfind("r,theta,h\n", 0) == 0);
    CHECK(slurp("ev/field.bin").rfind("PITSFLD1", 0) == 0);
    CHECK(run("eval --kind constant --radii 100 --angles 16 --method window --out ew") == 0);
    CHECK(run("zeros --kind poly-phase --q2 sqrt2 --annulus 10:60 --sectors 4 --out zs") == 0);
    CHECK(slurp("zs/sectors.csv").rfind("r,theta1,theta2,count,expected\n", 0) == 0);
    CHECK(run("equi --kind poly-phase --q2 sqrt2 --annulus 20:120 --out eq") == 0);
    CHECK(pitslab::read_json(kRoot / "eq" / "equidistribution.json").contains("star_discrepancy"));
    CHECK(run("pits --kind poly-phase --q2 sqrt2 --radii 200:220 --out pt") == 0);
    CHECK(pitslab::read_json(kRoot / "pt" / "pits.json").contains("pits_area"));
  }

  TEST_CASE("runs replay byte for byte from config.json") {
    const char* runs[][2] = {{"seq --kind geometric-phase --base 3 --x 0.1 --seed 2 --len 50", "sequence.csv"},
                             {"spectrum --kind moebius --n 8192 --J 32", "arcs.csv"},
                             {"eval --kind steinhaus --radii 80 --angles 64", "field.csv"},
                             {"zeros --kind moebius --annulus 5:40", "zeros.csv"}};
    int i = 0;
    for (const auto& [args, file] : runs) {
      const std::string a = "r" + std::to_string(i), b = "p" + std::to_string(i);
      ++i;
      const std::string cmd = args;
      REQUIRE(run(cmd + " --out " + a) == 0);
      const std::string name = cmd.substr(0, cmd.find(' '));
      REQUIRE(run(name + " --config " + a + "/config.json --out " + b) == 0);
      CHECK(slurp(a + "/" + file) == slurp(b + "/" + file));
      CHECK(slurp(a + "/config.json") == slurp(b + "/config.json"));
    }
  }

  TEST_CASE("output does not depend on --threads") {
    REQUIRE(run("eval --kind moebius --radii 100,300 --angles 128 --threads 1 --out t1") == 0);
    REQUIRE(run("eval --kind moebius --radii 100,300 --angles 128 --threads 3 --out t3") == 0);
    CHECK(slurp("t1/field.csv") == slurp("t3/field.csv"));
    CHECK(slurp("t1/config.json") == slurp("t3/config.json"));
  }

  TEST_CASE("help lists the flags") {
    run("eval --help");
    const std::string help = slurp("last.out");
    for (const char* flag : {"--config", "--out", "--format", "--threads", "--kind", "--radii", "--angles",
                             "--method", "--cN", "--tol", "--precision", "--binary", "--q2", "--q6"})
      CHECK(help.find(flag) != std::string::npos);
  }
}
