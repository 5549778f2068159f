#pragma once

// Run configuration: a flat JSON object with dotted keys, every key
// optional. Unknown keys are rejected so typos fail loudly instead of
// silently running with defaults. Relative paths resolve against the
// directory containing the config file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "affordkit/errors.hpp"
#include "affordkit/json_util.hpp"
#include "affordkit/orchestrator.hpp"
#include "affordkit/scripted.hpp"

namespace affordkit {

struct RunConfig {
  std::string backend_mode = "scripted";  // scripted | http
  std::string backend_kb = "merged";      // merged | effects | embodiment

  std::string llm_endpoint;
  std::string llm_model;
  double llm_temperature = 0.0;

  std::string detector_endpoint;
  double detector_threshold = 0.3;

  int n_candidates = 10;
  int chat_budget = 100;
  int max_reprompts = 1;
  bool parallel_detection = false;
  bool confirm_objects = false;

  NoiseModel noise;  // seed folded in below

  std::uint64_t seed = 0;

  std::filesystem::path manifest_path;
  std::filesystem::path templates_path;
  std::filesystem::path lexicons_path;
  std::filesystem::path catalog_path;
  std::filesystem::path output_dir = "out";

  DialogueConfig dialogue_config() const {
    DialogueConfig cfg;
    cfg.n_candidates = n_candidates;
    cfg.detection_threshold = detector_threshold;
    cfg.max_reprompts = max_reprompts;
    cfg.chat_budget = chat_budget;
    cfg.parallel_detection = parallel_detection;
    cfg.confirm_objects = confirm_objects;
    cfg.validate();
    return cfg;
  }

  NoiseModel noise_model() const {
    NoiseModel n = noise;
    n.seed = seed;
    n.validate();
    return n;
  }

  void validate() const {
    if (backend_mode != "scripted" && backend_mode != "http")
      throw ConfigError("backend.mode must be scripted or http, got: " + backend_mode);
    if (backend_kb != "merged" && backend_kb != "effects" && backend_kb != "embodiment")
      throw ConfigError("backend.kb must be merged, effects, or embodiment, got: " + backend_kb);
    if (backend_mode == "http" && (llm_endpoint.empty() || detector_endpoint.empty()))
      throw ConfigError("http backend requires llm.endpoint and detector.endpoint");
    dialogue_config();
    noise_model();
    for (const auto* p : {&manifest_path, &templates_path, &lexicons_path, &catalog_path}) {
      if (!p->empty() && !std::filesystem::exists(*p))
        throw ConfigError("configured path does not exist: " + p->string());
    }
  }

  static RunConfig from_json_file(const std::filesystem::path& path) {
    const ojson j = read_json_file(path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    const auto base = path.parent_path();
    const auto as_path = [&](const ojson& v) {
      std::filesystem::path p = v.get<std::string>();
      return p.is_absolute() || base.empty() ? p : base / p;
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const ojson& v = it.value();
      try {
        if (key == "backend.mode") c.backend_mode = v.get<std::string>();
        else if (key == "backend.kb") c.backend_kb = v.get<std::string>();
        else if (key == "llm.endpoint") c.llm_endpoint = v.get<std::string>();
        else if (key == "llm.model") c.llm_model = v.get<std::string>();
        else if (key == "llm.temperature") c.llm_temperature = v.get<double>();
        else if (key == "detector.endpoint") c.detector_endpoint = v.get<std::string>();
        else if (key == "detector.threshold") c.detector_threshold = v.get<double>();
        else if (key == "dialogue.n_candidates") c.n_candidates = v.get<int>();
        else if (key == "dialogue.chat_budget") c.chat_budget = v.get<int>();
        else if (key == "dialogue.max_reprompts") c.max_reprompts = v.get<int>();
        else if (key == "dialogue.parallel_detection") c.parallel_detection = v.get<bool>();
        else if (key == "dialogue.confirm_objects") c.confirm_objects = v.get<bool>();
        else if (key == "noise.p_miss") c.noise.p_miss = v.get<double>();
        else if (key == "noise.p_conf") c.noise.p_conf = v.get<double>();
        else if (key == "noise.clutter_rate") c.noise.clutter_rate = v.get<double>();
        else if (key == "noise.confidence_jitter") c.noise.confidence_jitter = v.get<double>();
        else if (key == "seed") c.seed = v.get<std::uint64_t>();
        else if (key == "paths.manifest") c.manifest_path = as_path(v);
        else if (key == "paths.templates") c.templates_path = as_path(v);
        else if (key == "paths.lexicons") c.lexicons_path = as_path(v);
        else if (key == "paths.catalog") c.catalog_path = as_path(v);
        else if (key == "paths.output_dir") c.output_dir = as_path(v);
        else throw ConfigError("unknown config key: " + key);
      } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("config key " + key + ": " + ex.what());
      }
    }
    c.validate();
    return c;
  }
};

}  // namespace affordkit
