#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <affordkit/cli.hpp>
#include <affordkit/fixtures.hpp>

#include "support.hpp"

using namespace affordkit;

namespace {

struct CliOutcome {
  int code;
  std::string out;
  std::string err;
};

CliOutcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_robot(const std::filesystem::path& dir) {
  ojson r;
  r["robot_type"] = "wheeled";
  r["mass_kg"] = 5.0;
  r["height_cm"] = 25.0;
  const auto path = dir / "robot.json";
  write_file_atomic(path, dump_fixed(r));
  return path;
}

}  // namespace

TEST_CASE("help lists the subcommands and exits cleanly", "[cli]") {
  const auto r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("query") != std::string::npos);
  CHECK(r.out.find("rank-experiment") != std::string::npos);
  CHECK(r.out.find("eval") != std::string::npos);
}

TEST_CASE("usage mistakes exit with code 2", "[cli]") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"no-such-command"}).code == 2);
  CHECK(run_cli({"query", "--bogus-flag"}).code == 2);
  CHECK(run_cli({"query", "--action", "stand on"}).code == 2);  // --robot is required

  support::TempDir tmp("cliusage");
  fixtures::embodiment_manifest().save(tmp.path() / "manifest.json");
  const auto robot = write_robot(tmp.path());
  // no manifest given anywhere
  const auto r = run_cli({"query", "--robot", robot.string(), "--action", "stand on",
                          "--output-dir", (tmp.path() / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("manifest") != std::string::npos);
}

TEST_CASE("query runs a scripted dialogue end to end", "[cli]") {
  support::TempDir tmp("cliquery");
  const auto manifest_path = tmp.path() / "manifest.json";
  fixtures::embodiment_manifest().save(manifest_path);
  const auto robot = write_robot(tmp.path());

  // exercise config loading and relative path resolution while at it
  ojson cfg;
  cfg["paths.manifest"] = "manifest.json";
  cfg["seed"] = 0;
  const auto cfg_path = tmp.path() / "run.json";
  write_file_atomic(cfg_path, dump_fixed(cfg));

  const auto out_a = (tmp.path() / "out_a").string();
  const auto out_b = (tmp.path() / "out_b").string();
  const auto sidecar = (tmp.path() / "timing.json").string();

  const std::vector<std::string> base = {
      "query",      "--config", cfg_path.string(),
      "--robot",    robot.string(),
      "--action",   "stand on",
      "--effect",   "increase the robot's height",
      "--condition", "safe",
      "--condition", "reliable"};

  auto args_a = base;
  args_a.insert(args_a.end(), {"--output-dir", out_a, "--sidecar", sidecar});
  const auto ra = run_cli(args_a);
  INFO(ra.err);
  REQUIRE(ra.code == 0);
  CHECK(ra.out.find("outcome: ok") != std::string::npos);
  CHECK(ra.out.find("approved pairs: 12") != std::string::npos);
  CHECK(ra.out.find("plastic stool") != std::string::npos);

  const ojson report = read_json_file(std::filesystem::path(out_a) / "report.json");
  CHECK(report.at("outcome") == "ok");
  CHECK(report.at("approved_pairs").size() == 12);
  CHECK(report.at("ranked").size() == 12);
  CHECK_FALSE(report.contains("trace"));
  const ojson trace = read_json_file(std::filesystem::path(out_a) / "trace.json");
  CHECK(trace.is_array());
  CHECK(trace.size() > 30);

  const ojson timing = read_json_file(sidecar);
  CHECK(timing.at("elapsed_ms").get<double>() >= 0.0);

  auto args_b = base;
  args_b.insert(args_b.end(), {"--output-dir", out_b});
  REQUIRE(run_cli(args_b).code == 0);

  // replays are byte-identical
  CHECK(read_file(std::filesystem::path(out_a) / "report.json") ==
        read_file(std::filesystem::path(out_b) / "report.json"));
  CHECK(read_file(std::filesystem::path(out_a) / "trace.json") ==
        read_file(std::filesystem::path(out_b) / "trace.json"));
}

TEST_CASE("query reports scripted coverage gaps as backend failures", "[cli]") {
  support::TempDir tmp("cligap");
  const auto manifest_path = tmp.path() / "manifest.json";
  fixtures::embodiment_manifest().save(manifest_path);
  const auto robot = write_robot(tmp.path());

  const auto r = run_cli({"query", "--robot", robot.string(), "--action", "juggle", "--images",
                          manifest_path.string(), "--output-dir", (tmp.path() / "out").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("scripted") != std::string::npos);
}

TEST_CASE("http mode demands endpoints and surfaces dead ones", "[cli]") {
  support::TempDir tmp("clihttp");
  const auto manifest_path = tmp.path() / "manifest.json";
  fixtures::embodiment_manifest().save(manifest_path);
  const auto robot = write_robot(tmp.path());

  ojson incomplete;
  incomplete["backend.mode"] = "http";
  const auto bad_cfg = tmp.path() / "bad.json";
  write_file_atomic(bad_cfg, dump_fixed(incomplete));
  const auto r1 = run_cli({"query", "--config", bad_cfg.string(), "--robot", robot.string(),
                           "--action", "stand on", "--images", manifest_path.string()});
  CHECK(r1.code == 4);

  ojson dead;
  dead["backend.mode"] = "http";
  dead["llm.endpoint"] = "http://127.0.0.1:1/chat";
  dead["detector.endpoint"] = "http://127.0.0.1:1/detect";
  const auto dead_cfg = tmp.path() / "dead.json";
  write_file_atomic(dead_cfg, dump_fixed(dead));
  const auto r2 = run_cli({"query", "--config", dead_cfg.string(), "--robot", robot.string(),
                           "--action", "stand on", "--images", manifest_path.string(),
                           "--output-dir", (tmp.path() / "out").string()});
  CHECK(r2.code == 3);
  CHECK(r2.err.find("backend unavailable") != std::string::npos);
}

TEST_CASE("rank-experiment writes curves and per-trial records", "[cli]") {
  support::TempDir tmp("clirank");
  const auto manifest_path = tmp.path() / "manifest.json";
  fixtures::distractor_manifest().save(manifest_path);
  const auto out_a = (tmp.path() / "out_a").string();
  const auto out_b = (tmp.path() / "out_b").string();

  const std::vector<std::string> base = {"rank-experiment",
                                         "--target", "paper box",
                                         "--target-image", "img013",
                                         "--ns", "1,2",
                                         "--trials", "5",
                                         "--images", manifest_path.string(),
                                         "--seed", "42"};

  auto args_a = base;
  args_a.insert(args_a.end(), {"--output-dir", out_a});
  const auto ra = run_cli(args_a);
  INFO(ra.err);
  REQUIRE(ra.code == 0);
  CHECK(ra.out.find("strategy") != std::string::npos);

  const std::string csv = read_file(std::filesystem::path(out_a) / "curves.csv");
  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n');
  CHECK(rows == 1 + 4);  // header + two strategies times two counts

  const std::string jsonl = read_file(std::filesystem::path(out_a) / "ranks.jsonl");
  std::size_t lines = 0;
  for (char c : jsonl) lines += (c == '\n');
  CHECK(lines == 2 * 2 * 5);

  auto args_b = base;
  args_b.insert(args_b.end(), {"--output-dir", out_b});
  REQUIRE(run_cli(args_b).code == 0);
  CHECK(csv == read_file(std::filesystem::path(out_b) / "curves.csv"));
  CHECK(jsonl == read_file(std::filesystem::path(out_b) / "ranks.jsonl"));

  // a different seed samples different distractor sets
  auto args_c = base;
  args_c.back() = "7";
  args_c.insert(args_c.end(), {"--output-dir", (tmp.path() / "out_c").string()});
  REQUIRE(run_cli(args_c).code == 0);
  CHECK(jsonl != read_file(tmp.path() / "out_c" / "ranks.jsonl"));
}

TEST_CASE("rank-experiment rejects malformed targets and counts", "[cli]") {
  support::TempDir tmp("clirankbad");
  const auto manifest_path = tmp.path() / "manifest.json";
  fixtures::distractor_manifest().save(manifest_path);

  auto r = run_cli({"rank-experiment", "--target", "box", "--target-image", "img013", "--images",
                    manifest_path.string(), "--output-dir", (tmp.path() / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("--target") != std::string::npos);

  r = run_cli({"rank-experiment", "--target", "paper box", "--target-image", "img013", "--ns",
               "1,x", "--images", manifest_path.string(), "--output-dir",
               (tmp.path() / "out").string()});
  CHECK(r.code == 2);

  r = run_cli({"rank-experiment", "--target", "paper box", "--target-image", "img013",
               "--strategies", "object,telepathy", "--images", manifest_path.string(),
               "--output-dir", (tmp.path() / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("telepathy") != std::string::npos);

  // a pool that cannot satisfy the requested count is a data error
  r = run_cli({"rank-experiment", "--target", "paper box", "--target-image", "img013", "--ns",
               "30", "--images", manifest_path.string(), "--output-dir",
               (tmp.path() / "out").string()});
  CHECK(r.code == 4);
}

TEST_CASE("eval scores a predictions file against a manifest", "[cli]") {
  support::TempDir tmp("clieval");
  const auto corpus = support::exact_ap_corpus({50, 25, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const auto gt_path = tmp.path() / "gt.json";
  corpus.manifest.save(gt_path);
  ojson arr = ojson::array();
  for (const auto& d : corpus.preds) arr.push_back(d.to_json());
  const auto preds_path = tmp.path() / "preds.json";
  write_file_atomic(preds_path, dump_fixed(arr));
  const auto out_dir = (tmp.path() / "out").string();

  const auto r = run_cli({"eval", "--predictions", preds_path.string(), "--groundtruth",
                          gt_path.string(), "--output-dir", out_dir});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mAP") != std::string::npos);

  const ojson j = read_json_file(std::filesystem::path(out_dir) / "eval.json");
  CHECK(j.at("classes").at("plastic box").get<double>() == Catch::Approx(0.5).margin(1e-9));
  CHECK(j.at("classes").at("metal box").get<double>() == Catch::Approx(0.25).margin(1e-9));
  const std::string csv = read_file(std::filesystem::path(out_dir) / "eval.csv");
  CHECK(csv.rfind("class,ap\n", 0) == 0);

  const auto missing = run_cli({"eval", "--predictions", (tmp.path() / "nope.json").string(),
                                "--groundtruth", gt_path.string(), "--output-dir", out_dir});
  CHECK(missing.code == 4);
}
