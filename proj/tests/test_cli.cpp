#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bechdel/cli.hpp"

using namespace bechdel;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = BECHDEL_SOURCE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bechdel");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bechdel_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string data(const std::string& rel) { return kRoot + "/data/" + rel; }

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitInvalid);
  CHECK(run({"dance"}).code == kExitInvalid);
  CHECK(run({"score", "--min-aligned", "lots"}).code == kExitInvalid);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("missing inputs exit 2") {
  const auto dir = scratch("missing");
  const auto r = run({"score", "--dialogues", "/nonexistent/d.jsonl", "--out", dir.string()});
  CHECK(r.code == kExitMissingInput);
  CHECK(r.err.find("/nonexistent/d.jsonl") != std::string::npos);
  CHECK(run({"segment", "--out", dir.string()}).code == kExitMissingInput);
}

TEST_CASE("bad thresholds exit 3") {
  const auto dir = scratch("thresholds");
  const auto fixture = data("fixtures/ann_arbor_dialogues.jsonl");
  CHECK(run({"score", "--dialogues", fixture, "--ratio", "1", "--out", dir.string()}).code ==
        kExitInvalid);
  CHECK(run({"score", "--dialogues", fixture, "--mention-rule", "most", "--out", dir.string()}).code ==
        kExitInvalid);
  CHECK(run({"score", "--dialogues", fixture, "--n-samples", "10", "--out", dir.string()}).code ==
        kExitInvalid);
}

TEST_CASE("score a dialogue file") {
  const auto dir = scratch("score");
  const auto r = run({"score", "--dialogues", data("fixtures/ann_arbor_dialogues.jsonl"),
                      "--min-aligned", "1", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "score.json"));
  CHECK(j["corpus"]["B_F"]["value"].get<double>() == doctest::Approx(0.06));
  CHECK(fs::exists(dir / "scores.csv"));
  CHECK(r.out.find("B_F") != std::string::npos);
}

TEST_CASE("parse scripts") {
  const auto dir = scratch("scripts");
  const auto r = run({"parse-scripts", "--scripts", data("synthetic/scripts"), "--cast",
                      data("synthetic/cast.csv"), "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto movies = slurp(dir / "movies.csv");
  CHECK(movies.find("harbor_lights") != std::string::npos);
  CHECK(fs::file_size(dir / "script_dialogues.jsonl") > 0);

  const auto bad = scratch("bad_script");
  std::ofstream(bad / "prose.txt") << "no dialogue here\n";
  CHECK(run({"parse-scripts", "--scripts", bad.string(), "--out", dir.string()}).code == kExitInvalid);
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch("config");
  const auto conf = dir / "run.conf";
  std::ofstream(conf) << "dialogues=" << data("fixtures/ann_arbor_dialogues.jsonl")
                      << "\nmin-aligned=100\n";
  const auto r = run({"score", "--config", conf.string(), "--min-aligned", "1", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "score.json"));
  CHECK(j["corpus"]["I_F"]["value"].is_number());
}

TEST_CASE("segment with a fixed cutoff") {
  const auto dir = scratch("segment");
  const auto r = run({"segment", "--messages", data("synthetic/messages.jsonl"), "--profiles",
                      data("synthetic/profiles.csv"), "--names", data("synthetic/names.csv"),
                      "--tau-seconds", "3600", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
  CHECK(fit["tau"].get<double>() == 3600.0);
  CHECK(fit["tau_source"] == "override");
  CHECK(fs::file_size(dir / "stream_dialogues.jsonl") > 0);
}
