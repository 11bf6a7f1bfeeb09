#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tricorr/cli.hpp"
#include "tricorr/report.hpp"

namespace fs = std::filesystem;
using tricorr::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = tricorr::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tricorr_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write(const std::string& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

}  // namespace

TEST_CASE("gen writes coefficient tables") {
  TempDir dir;
  Run r = cli({"gen", "--weight", "12", "--nmax", "10", "--out", dir.file("delta.csv")});
  CHECK(r.code == 0);
  std::istringstream is(slurp(dir.file("delta.csv")));
  std::string header, row1, row2;
  std::getline(is, header);
  std::getline(is, row1);
  std::getline(is, row2);
  CHECK(row1 == "1,1");
  CHECK(row2 == "2,-24");

  r = cli({"gen", "--weight", "14"});
  CHECK(r.code == 2);
  CHECK(r.err.find("weight 14") != std::string::npos);

  r = cli({"gen", "--weight", "16", "--nmax", "1"});
  CHECK(r.code == 0);
  std::istringstream one(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(one, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  CHECK(rows == std::vector<std::string>{"1,1"});
}

TEST_CASE("config precedence: flag over config over default") {
  TempDir dir;
  write(dir.file("run.ini"), "precision-bits = 300\n[congruent]\nlimit = 49\n");

  Run r = cli({"congruent", "--no-metadata"});
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["config"]["congruent"]["limit"] == "2500");
  CHECK(j["config"]["global"]["precision-bits"] == "256");

  r = cli({"--config", dir.file("run.ini"), "congruent", "--no-metadata"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["config"]["congruent"]["limit"] == "49");
  CHECK(j["config"]["global"]["precision-bits"] == "300");
  CHECK(j["result"]["hits"].size() == 1);

  r = cli({"--config", dir.file("run.ini"), "--precision-bits", "128", "congruent", "--limit", "3", "--no-metadata"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["config"]["congruent"]["limit"] == "3");
  CHECK(j["config"]["global"]["precision-bits"] == "128");
  CHECK(j["result"]["hits"].empty());

  write(dir.file("bad.ini"), "[congruent]\nlimt = 49\n");
  r = cli({"--config", dir.file("bad.ini"), "congruent"});
  CHECK(r.code == 2);
  CHECK(r.err.find("limt") != std::string::npos);
}

TEST_CASE("congruent assertions") {
  CHECK(cli({"congruent", "--limit", "2500", "--assert", "contains=5,6"}).code == 0);
  const Run r = cli({"congruent", "--limit", "2500", "--assert", "contains=7"});
  CHECK(r.code == 3);
  CHECK(r.err.find("7") != std::string::npos);
  CHECK(cli({"congruent", "--limit", "2500", "--assert", "hits>=2"}).code == 0);
  CHECK(cli({"congruent", "--assert", "nonsense=1"}).code == 2);
}

TEST_CASE("scan CSV is identical across thread counts") {
  TempDir dir;
  const std::vector<std::string> base = {"scan", "--grid", "3:7", "--phase", "0.5", "--cross-check"};
  auto with = [&](std::string threads, std::string out) {
    std::vector<std::string> a = {"--threads", threads, "--out", dir.file(out)};
    a.insert(a.end(), base.begin(), base.end());
    return cli(a);
  };
  REQUIRE(with("1", "a.csv").code == 0);
  REQUIRE(with("3", "b.csv").code == 0);
  const std::string a = slurp(dir.file("a.csv")), b = slurp(dir.file("b.csv"));
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(a.rfind("X,Y,value,bound_thm1,bound_thm2,naive,sqrt2", 0) == 0);

  const Run fit = cli({"fit", "--input", dir.file("a.csv"), "--no-metadata"});
  REQUIRE(fit.code == 0);
  const Json j = Json::parse(fit.out);
  CHECK(j["result"]["grid"].size() == 4);
  CHECK(j["result"]["benchmarks"][0]["name"] == "naive");
}

TEST_CASE("scan beyond the table length names the required n_max") {
  const Run r = cli({"scan", "--grid", "3:6", "--nmax", "500"});
  CHECK(r.code == 2);
  CHECK(r.err.find("n_max >= ") != std::string::npos);
}

TEST_CASE("JSON reports are reproducible apart from metadata") {
  const std::vector<std::string> args = {"sum", "--kernel", "sharp", "--X", "40", "--Y", "30"};
  Run a = cli(args), b = cli(args);
  REQUIRE(a.code == 0);
  Json ja = Json::parse(a.out), jb = Json::parse(b.out);
  CHECK(ja.contains("metadata"));
  ja.erase("metadata");
  jb.erase("metadata");
  CHECK(ja.dump() == jb.dump());
  CHECK(ja["artifact"]["version"] == tricorr::artifact_version());
  CHECK(ja["config"]["sum"]["kernel"] == "sharp");

  std::vector<std::string> quiet = args;
  quiet.push_back("--no-metadata");
  a = cli(quiet);
  b = cli(quiet);
  CHECK(a.out == b.out);
  CHECK_FALSE(Json::parse(a.out).contains("metadata"));
}

TEST_CASE("sum chooses the tail factor and reports it") {
  const Run r = cli({"sum", "--forms", "delta,delta,delta", "--kernel", "exp", "--X", "100", "--Y", "100",
                     "--assert", "est_rel_err<=1e-6"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["result"]["tail_factor"].get<double>() >= 40.0);
  CHECK(j["result"]["est_rel_err"].get<double>() < 1e-6);

  const Run fixed = cli({"sum", "--X", "100", "--Y", "100", "--tail-factor", "40", "--assert", "est_rel_err<=1e-6"});
  CHECK(fixed.code == 3);
}

TEST_CASE("cache stores and serves tables") {
  TempDir dir;
  const std::string cache = dir.file("cache");
  REQUIRE(cli({"--cache-dir", cache, "gen", "--weight", "16", "--nmax", "50", "--out", dir.file("k16.csv")}).code == 0);
  CHECK(fs::exists(fs::path(cache) / "k16-w16-N1-n50.csv"));
  const Run small = cli({"--cache-dir", cache, "gen", "--weight", "16", "--nmax", "20"});
  CHECK(small.code == 0);
  CHECK(!fs::exists(fs::path(cache) / "k16-w16-N1-n20.csv"));
  const Run direct = cli({"gen", "--weight", "16", "--nmax", "20"});
  CHECK(small.out == direct.out);
  REQUIRE(cli({"--cache-dir", cache, "gen", "--weight", "16", "--nmax", "60"}).code == 0);
  CHECK(fs::exists(fs::path(cache) / "k16-w16-N1-n60.csv"));
}

TEST_CASE("ingest validates files and maps failures to exit codes") {
  TempDir dir;
  REQUIRE(cli({"gen", "--weight", "12", "--nmax", "60", "--out", dir.file("d.csv")}).code == 0);
  Run r = cli({"ingest", "--file", dir.file("d.csv"), "--assert", "failures=0"});
  CHECK(r.code == 0);

  std::string text = slurp(dir.file("d.csv"));
  const auto at = text.find("\n4,");
  text.replace(at, text.find('\n', at + 1) - at, "\n4,-1471");
  write(dir.file("bad.csv"), text);
  r = cli({"ingest", "--file", dir.file("bad.csv")});
  CHECK(r.code == 2);
  r = cli({"ingest", "--file", dir.file("bad.csv"), "--force", "--no-metadata"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["validation"]["pass"] == false);

  CHECK(cli({"ingest", "--file", dir.file("missing.csv")}).code == 1);
  CHECK(cli({"fit", "--input", dir.file("missing.csv")}).code == 1);
  CHECK(cli({"--out", dir.file("no/such/dir/x.json"), "congruent", "--limit", "10"}).code == 1);
  write(dir.file("junk.csv"), "# weight=12 level=1 label=x\n1,1\n3,5\n");
  CHECK(cli({"ingest", "--file", dir.file("junk.csv")}).code == 2);
  CHECK(cli({"sum", "--precision-bits", "20"}).code == 2);
}

TEST_CASE("other subcommands") {
  Run r = cli({"nonvanish", "--limit", "100", "--assert", "density=1", "--no-metadata"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["total"] == 4950);

  r = cli({"omega", "--grid", "2:5", "--assert", "max_ratio>=0", "--no-metadata"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["rows"].size() == 4);

  r = cli({"dseries", "--forms", "theta", "--s", "3", "--w", "2", "--m-cut", "60", "--h-cut", "60", "--no-metadata"});
  CHECK(r.code == 0);
  r = cli({"dseries", "--s", "1.2", "--w", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("7.5") != std::string::npos);

  r = cli({"mellin", "--X", "2", "--Y", "2", "--m-cut", "30", "--h-cut", "30", "--quad-step", "0.1", "--assert",
           "rel_residual<=1e-6", "--no-metadata"});
  CHECK(r.code == 0);

  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}
