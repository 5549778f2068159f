#pragma once

// The dialogue loop that turns a robot spec plus task requirements into a
// ranked list of property-qualified detections. Steps, in order:
//
//   1. embodiment        tell the LLM what the robot is
//   2. object elicitation ask for candidate object classes
//   3. confirmation      (optional) double-check each candidate
//   4. detection prescreen  drop candidates the detector cannot find at all
//   5. property relevance   ask which catalog dimensions matter per object
//   6. feasibility       yes/no per (object, value) pair, robot-conditioned
//   7. final detection   query approved pairs over the manifest and rank
//
// Every LLM exchange appends one trace event, so a report can be audited
// step by step afterwards.

#include <algorithm>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "affordkit/backends.hpp"
#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/parsing.hpp"
#include "affordkit/prompts.hpp"

namespace affordkit {

struct DialogueConfig {
  int n_candidates = 10;
  double detection_threshold = 0.3;
  int max_reprompts = 1;       // extra elicitation attempts on an empty parse
  int chat_budget = 100;       // hard cap on LLM exchanges per dialogue
  bool parallel_detection = false;
  bool confirm_objects = false;

  void validate() const {
    if (n_candidates < 1) throw ConfigError("n_candidates must be at least 1");
    if (!(detection_threshold >= 0.0 && detection_threshold <= 1.0))
      throw ConfigError("detection_threshold must be in [0,1]");
    if (max_reprompts < 0) throw ConfigError("max_reprompts must be non-negative");
    if (chat_budget < 1) throw ConfigError("chat_budget must be at least 1");
  }
};

namespace detail {

struct DialogueState {
  LlmBackend& llm;
  const PromptEngine& engine;
  const Lexicons& lexicons;
  const DialogueConfig& cfg;
  ChatSession session;
  std::vector<DialogueEvent> trace;
  int chats_used = 0;
  bool truncated = false;

  bool budget_left() const { return chats_used < cfg.chat_budget; }

  // One exchange plus its trace event. Callers must check budget_left().
  std::string exchange(const PromptText& prompt, const char* step_label, ojson parsed = {}) {
    ++chats_used;
    std::string reply = llm.chat(session, prompt);
    trace.push_back({step_label, prompt.text, reply, std::move(parsed)});
    return reply;
  }

  void note_truncation(const char* phase, std::size_t skipped) {
    truncated = true;
    ojson parsed;
    parsed["phase"] = phase;
    parsed["skipped"] = skipped;
    trace.push_back({"budget_truncation", "", "", std::move(parsed)});
  }

  // Verdict with a single clarification retry; an answer that stays
  // ambiguous is rejected rather than guessed.
  Verdict ask_verdict(const PromptText& prompt, const char* step_label, ojson context) {
    ojson parsed = context;
    std::string reply = exchange(prompt, step_label);
    Verdict v = parse_verdict(reply, lexicons);
    parsed["verdict"] = verdict_name(v.value);
    parsed["evidence"] = v.evidence;
    trace.back().parsed = parsed;
    if (v.value != VerdictValue::Ambiguous || !budget_left()) return v;

    const PromptText clar = engine.render_clarification(prompt);
    ojson clar_parsed = context;
    std::string clar_reply = exchange(clar, "clarification");
    Verdict cv = parse_verdict(clar_reply, lexicons);
    clar_parsed["verdict"] = verdict_name(cv.value);
    clar_parsed["evidence"] = cv.evidence;
    trace.back().parsed = clar_parsed;
    return cv;
  }
};

}  // namespace detail

// Runs detection requests either serially or across a few worker threads.
// Results land in per-request slots, so the output order never depends on
// scheduling.
inline std::vector<std::vector<Detection>> run_detections(const DetectorBackend& detector,
                                                          const std::vector<DetectorRequest>& reqs,
                                                          bool parallel) {
  std::vector<std::vector<Detection>> results(reqs.size());
  if (!parallel || reqs.size() < 2) {
    for (std::size_t i = 0; i < reqs.size(); ++i) results[i] = detector.detect(reqs[i]);
    return results;
  }
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), 8);
  std::vector<std::future<void>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < reqs.size(); i += workers) results[i] = detector.detect(reqs[i]);
    }));
  }
  for (auto& f : futures) f.get();  // rethrows the first worker failure
  return results;
}

inline AffordanceReport run_dialogue(LlmBackend& llm, const DetectorBackend& detector,
                                     const RobotSpec& robot, const Requirements& req,
                                     const PropertyCatalog& catalog, const ImageManifest& manifest,
                                     const DialogueConfig& cfg = {},
                                     const PromptEngine& engine = {},
                                     const Lexicons& lexicons = {}) {
  cfg.validate();
  robot.validate();
  req.validate();
  catalog.validate();
  manifest.validate();

  detail::DialogueState st{llm, engine, lexicons, cfg};
  AffordanceReport report;

  // 1. Embodiment
  st.exchange(engine.render_embodiment(robot), "embodiment");

  // 2. Object elicitation, re-asking once if nothing parses
  std::vector<ObjectClass> candidates;
  const PromptText elicit = engine.render_object_elicitation(req, cfg.n_candidates);
  for (int attempt = 0; attempt <= cfg.max_reprompts; ++attempt) {
    if (!st.budget_left()) {
      st.note_truncation("object_elicitation", 1);
      break;
    }
    std::string reply = st.exchange(elicit, "object_elicitation");
    try {
      candidates = parse_object_list(reply, static_cast<std::size_t>(cfg.n_candidates));
    } catch (const NoObjectsFound&) {
      st.trace.back().parsed = ojson{{"error", "no_objects"}};
      continue;
    }
    ojson names = ojson::array();
    for (const auto& c : candidates) names.push_back(c.name);
    st.trace.back().parsed = ojson{{"objects", std::move(names)}};
    break;
  }
  if (candidates.empty()) {
    report.outcome = DialogueOutcome::NoCandidates;
    report.trace = std::move(st.trace);
    report.validate();
    return report;
  }

  // 3. Optional confirmation; unanswered candidates are dropped
  if (cfg.confirm_objects) {
    std::vector<ObjectClass> confirmed;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!st.budget_left()) {
        st.note_truncation("confirmation", candidates.size() - i);
        break;
      }
      const auto& obj = candidates[i];
      const Verdict v = st.ask_verdict(engine.render_confirmation(req, obj), "confirmation",
                                       ojson{{"object", obj.name}});
      if (v.value == VerdictValue::Affirmative) confirmed.push_back(obj);
    }
    candidates = std::move(confirmed);
  }

  // 4. Detection prescreen: a candidate must appear somewhere in the scene
  if (!manifest.entries.empty()) {
    std::vector<ObjectClass> present;
    for (const auto& obj : candidates) {
      bool found = false;
      for (const auto& entry : manifest.entries) {
        DetectorRequest dreq{entry.image_id, entry.uri, obj.name, cfg.detection_threshold};
        if (!detector.detect(dreq).empty()) {
          found = true;
          break;
        }
      }
      st.trace.push_back({"detection_prescreen", obj.name, "",
                          ojson{{"object", obj.name}, {"present", found}}});
      if (found) present.push_back(obj);
    }
    candidates = std::move(present);
  }
  if (candidates.empty()) {
    report.outcome = DialogueOutcome::NoCandidates;
    report.trace = std::move(st.trace);
    report.validate();
    return report;
  }

  // 5 + 6. Property relevance, then per-value feasibility
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const auto& obj = candidates[ci];
    const auto relevance_prompts = engine.render_property_relevance(req, obj, catalog);
    if (st.chats_used + relevance_prompts.size() > static_cast<std::size_t>(cfg.chat_budget)) {
      st.note_truncation("property_relevance", candidates.size() - ci);
      break;
    }
    std::string combined;
    for (const auto& p : relevance_prompts) {
      if (!combined.empty()) combined += "\n";
      combined += st.exchange(p, "property_relevance");
    }
    std::vector<std::string> dims;
    bool fallback = false;
    try {
      dims = parse_property_subset(combined, catalog);
    } catch (const EmptySelection&) {
      // No usable selection: treat every dimension as potentially relevant
      // rather than silently dropping the object.
      for (const auto& d : catalog.dimensions) dims.push_back(d.name);
      fallback = true;
    }
    ojson dims_json = ojson::array();
    for (const auto& d : dims) dims_json.push_back(d);
    st.trace.back().parsed = ojson{{"object", obj.name},
                                   {"dimensions", std::move(dims_json)},
                                   {"fallback", fallback}};

    bool out_of_budget = false;
    for (const auto& dim_name : dims) {
      const PropertyDimension* dim = catalog.find(dim_name);
      for (const auto& value : dim->values) {
        if (!st.budget_left()) {
          // skipped counts candidate objects whose checks were cut short
          st.note_truncation("feasibility", candidates.size() - ci);
          out_of_budget = true;
          break;
        }
        const QualifiedObject pair{obj, dim_name, value};
        const Verdict v = st.ask_verdict(engine.render_feasibility(req, pair), "feasibility",
                                         ojson{{"object", obj.name},
                                               {"property_dim", dim_name},
                                               {"property_value", value}});
        if (v.value == VerdictValue::Affirmative) report.approved_pairs.push_back(pair);
      }
      if (out_of_budget) break;
    }
    if (out_of_budget) break;
  }

  if (report.approved_pairs.empty()) {
    report.outcome = DialogueOutcome::NoApprovedPairs;
    report.trace = std::move(st.trace);
    report.validate();
    return report;
  }

  // 7. Final detection across the whole manifest, one query per pair/image
  std::vector<DetectorRequest> reqs;
  for (const auto& pair : report.approved_pairs)
    for (const auto& entry : manifest.entries)
      reqs.push_back({entry.image_id, entry.uri, pair.phrase(), cfg.detection_threshold});
  const auto detections = run_detections(detector, reqs, cfg.parallel_detection);

  std::vector<Detection> all;
  std::size_t ri = 0;
  for (const auto& pair : report.approved_pairs) {
    std::size_t count = 0;
    for (std::size_t ei = 0; ei < manifest.entries.size(); ++ei, ++ri) {
      count += detections[ri].size();
      for (const auto& d : detections[ri]) all.push_back(d);
    }
    st.trace.push_back({"detection_final", pair.phrase(), "",
                        ojson{{"phrase", pair.phrase()}, {"detections", count}}});
  }

  std::stable_sort(all.begin(), all.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return a.phrase() < b.phrase();
  });

  report.outcome = DialogueOutcome::Ok;
  report.ranked = std::move(all);
  report.trace = std::move(st.trace);
  report.validate();
  return report;
}

}  // namespace affordkit
