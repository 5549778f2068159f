#pragma once

// Command-line front end with three subcommands:
//
//   query            run one dialogue and rank detections
//   rank-experiment  distractor-scaling curves for both query strategies
//   eval             score a predictions file against ground truth
//
// run() is a plain function over argument vectors and output streams, so
// tests drive it in-process. Exit codes: 0 success, 2 usage, 3 backend
// failure, 4 bad data or config, 1 anything unexpected.

#include <chrono>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affordkit/config.hpp"
#include "affordkit/eval.hpp"
#include "affordkit/fixtures.hpp"
#include "affordkit/http.hpp"
#include "affordkit/orchestrator.hpp"
#include "affordkit/ranking.hpp"

namespace affordkit::cli {

namespace detail {

struct CommonFlags {
  std::string config_path;
  std::string images_path;
  std::string output_dir;
  std::string sidecar_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

inline void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "run configuration JSON");
  cmd->add_option("--images", f.images_path, "image manifest (overrides paths.manifest)");
  cmd->add_option("--output-dir", f.output_dir, "directory for result files");
  cmd->add_option("--sidecar", f.sidecar_path, "write timing metadata to this file");
  cmd->add_option("--seed", f.seed, "override the configured seed")
      ->each([&f](const std::string&) { f.seed_set = true; });
}

inline RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig{} : RunConfig::from_json_file(f.config_path);
  if (!f.images_path.empty()) cfg.manifest_path = f.images_path;
  if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
  if (f.seed_set) cfg.seed = f.seed;
  return cfg;
}

inline PropertyCatalog resolve_catalog(const RunConfig& cfg) {
  if (cfg.catalog_path.empty()) return fixtures::default_catalog();
  return PropertyCatalog::from_json(read_json_file(cfg.catalog_path));
}

inline AffordanceKB select_kb(const std::string& name) {
  if (name == "effects") return fixtures::effect_objects_kb();
  if (name == "embodiment") return fixtures::embodiment_kb();
  return fixtures::default_kb();
}

inline ImageManifest require_manifest(const RunConfig& cfg) {
  if (cfg.manifest_path.empty())
    throw UsageError("an image manifest is required (--images or paths.manifest)");
  return ImageManifest::load(cfg.manifest_path);
}

inline void write_outputs(const std::filesystem::path& dir,
                          const std::vector<std::pair<std::string, std::string>>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
}

inline void write_sidecar(const std::string& path, double elapsed_ms) {
  if (path.empty()) return;
  ojson j;
  j["elapsed_ms"] = elapsed_ms;
  write_file_atomic(path, dump_fixed(j));
}

inline std::vector<std::size_t> parse_counts(const std::string& csv) {
  std::vector<std::size_t> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) throw UsageError("--ns must be a comma-separated list of counts");
    try {
      out.push_back(std::stoul(cur));
    } catch (const std::exception&) {
      throw UsageError("--ns entry is not a number: " + cur);
    }
    cur.clear();
  };
  for (char c : csv) {
    if (c == ',')
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

inline std::vector<QueryStrategy> parse_strategies(const std::string& csv) {
  std::vector<QueryStrategy> out;
  std::string cur;
  auto flush = [&] {
    if (cur == "object")
      out.push_back(QueryStrategy::ObjectOnly);
    else if (cur == "property")
      out.push_back(QueryStrategy::PropertyAware);
    else
      throw UsageError("--strategies entries must be object or property, got: " + cur);
    cur.clear();
  };
  for (char c : csv) {
    if (c == ',')
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------

struct QueryArgs {
  CommonFlags common;
  std::string robot_path;
  std::string action;
  std::string effect;
  std::vector<std::string> conditions;
};

inline int cmd_query(const QueryArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve_config(a.common);
  const ImageManifest manifest = require_manifest(cfg);
  const PropertyCatalog catalog = resolve_catalog(cfg);
  const PromptEngine engine = cfg.templates_path.empty()
                                  ? PromptEngine{}
                                  : PromptEngine{PromptTemplates::from_json_file(cfg.templates_path)};
  const Lexicons lexicons =
      cfg.lexicons_path.empty() ? Lexicons{} : Lexicons::from_json_file(cfg.lexicons_path);

  const RobotSpec robot = RobotSpec::from_json(read_json_file(a.robot_path));
  const Requirements req{a.action, a.effect, a.conditions};

  std::unique_ptr<LlmBackend> llm;
  std::unique_ptr<DetectorBackend> detector;
  if (cfg.backend_mode == "http") {
    llm = std::make_unique<HttpLlm>(
        HttpLlmOptions{cfg.llm_endpoint, cfg.llm_model, cfg.llm_temperature, {}});
    detector = std::make_unique<HttpDetector>(HttpDetectorOptions{cfg.detector_endpoint, {}},
                                              catalog);
  } else {
    llm = std::make_unique<ScriptedLlm>(select_kb(cfg.backend_kb), catalog);
    detector = std::make_unique<ScriptedDetector>(manifest, catalog, cfg.noise_model());
  }

  const AffordanceReport report = run_dialogue(*llm, *detector, robot, req, catalog, manifest,
                                               cfg.dialogue_config(), engine, lexicons);

  ojson report_json = report.to_json();
  ojson trace_json = std::move(report_json.at("trace"));
  report_json.erase("trace");
  write_outputs(cfg.output_dir, {{"report.json", dump_fixed(report_json)},
                                 {"trace.json", dump_fixed(trace_json)}});

  out << "outcome: " << outcome_name(report.outcome) << "\n";
  out << "approved pairs: " << report.approved_pairs.size() << "\n";
  if (!report.ranked.empty()) {
    out << "rank  confidence  image_id  phrase\n";
    for (std::size_t i = 0; i < report.ranked.size(); ++i) {
      const auto& d = report.ranked[i];
      out << (i + 1) << "  " << format_float6(d.confidence) << "  " << d.image_id << "  "
          << d.phrase() << "\n";
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  write_sidecar(a.common.sidecar_path,
                std::chrono::duration<double, std::milli>(t1 - t0).count());
  return 0;
}

struct RankArgs {
  CommonFlags common;
  std::string target;
  std::string target_image;
  std::string ns_csv = "1,2,4,8";
  std::size_t trials = 100;
  std::string strategies_csv = "object,property";
};

inline int cmd_rank_experiment(const RankArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve_config(a.common);
  const ImageManifest manifest = require_manifest(cfg);
  const PropertyCatalog catalog = resolve_catalog(cfg);

  const auto [object, property] = split_phrase(catalog, a.target);
  if (!property)
    throw UsageError("--target must be '<value> <object>' with a known property value, got: " +
                     a.target);

  RankExperimentSpec spec;
  spec.target = QualifiedObject{object, property->first, property->second};
  spec.target_image = a.target_image;
  spec.ns = parse_counts(a.ns_csv);
  spec.trials_per_n = a.trials;
  spec.strategies = parse_strategies(a.strategies_csv);
  spec.noise = cfg.noise_model();
  spec.threshold = cfg.detector_threshold;

  const RankExperimentResult result = run_rank_experiment(manifest, catalog, spec);
  write_outputs(cfg.output_dir, {{"curves.csv", rank_curve_csv(result.points)},
                                 {"ranks.jsonl", trial_records_jsonl(result.records)}});

  out << "strategy  n  mean_rank  stderr  trials\n";
  for (const auto& p : result.points) {
    out << strategy_name(p.strategy) << "  " << p.n << "  " << format_float6(p.mean_rank) << "  "
        << format_float6(p.stderr_rank) << "  " << p.trials << "\n";
  }

  const auto t1 = std::chrono::steady_clock::now();
  write_sidecar(a.common.sidecar_path,
                std::chrono::duration<double, std::milli>(t1 - t0).count());
  return 0;
}

struct EvalArgs {
  std::string predictions_path;
  std::string groundtruth_path;
  double iou_threshold = 0.5;
  std::string class_dim = "material";
  std::string output_dir = "out";
};

inline int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto preds = load_predictions(a.predictions_path);
  const ImageManifest gt = ImageManifest::load(a.groundtruth_path);
  const EvalResult result = evaluate(preds, gt, a.iou_threshold, a.class_dim);

  write_outputs(a.output_dir,
                {{"eval.json", dump_fixed(eval_to_json(result))}, {"eval.csv", eval_to_csv(result)}});

  out << "class  ap\n";
  for (const auto& [name, ap] : result.per_class_ap) {
    out << name << "  " << (ap ? format_float6(*ap) : std::string("undefined")) << "\n";
  }
  out << "mAP  " << format_float6(result.map_overall) << "\n";
  return 0;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Socratic affordance detection toolkit"};
  app.require_subcommand(1);

  detail::QueryArgs qa;
  CLI::App* query = app.add_subcommand("query", "run one dialogue and rank detections");
  detail::add_common(query, qa.common);
  query->add_option("--robot", qa.robot_path, "robot spec JSON")->required();
  query->add_option("--action", qa.action, "what the robot wants to do")->required();
  query->add_option("--effect", qa.effect, "desired effect of the action");
  query->add_option("--condition", qa.conditions, "soft condition, repeatable");

  detail::RankArgs ra;
  CLI::App* rank = app.add_subcommand("rank-experiment", "distractor-scaling rank curves");
  detail::add_common(rank, ra.common);
  rank->add_option("--target", ra.target, "target as '<value> <object>'")->required();
  rank->add_option("--target-image", ra.target_image, "image holding the target")->required();
  rank->add_option("--ns", ra.ns_csv, "comma-separated distractor counts");
  rank->add_option("--trials", ra.trials, "trials per count");
  rank->add_option("--strategies", ra.strategies_csv, "query strategies to run");

  detail::EvalArgs ea;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
  eval_cmd->add_option("--predictions", ea.predictions_path, "detections JSON array")->required();
  eval_cmd->add_option("--groundtruth", ea.groundtruth_path, "ground-truth manifest")->required();
  eval_cmd->add_option("--iou", ea.iou_threshold, "IoU threshold for a match");
  eval_cmd->add_option("--class-dim", ea.class_dim, "property dimension that defines classes");
  eval_cmd->add_option("--output-dir", ea.output_dir, "directory for result files");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  std::string prog = "affordkit";
  argv.push_back(prog.data());
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (query->parsed()) return detail::cmd_query(qa, out);
    if (rank->parsed()) return detail::cmd_rank_experiment(ra, out);
    if (eval_cmd->parsed()) return detail::cmd_eval(ea, out);
    return 2;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const BackendUnavailable& e) {
    err << "backend unavailable: " << e.what() << "\n";
    return 3;
  } catch (const ScriptGap& e) {
    err << "scripted backend gap: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace affordkit::cli
