#pragma once

// Deterministic stand-ins for the two model backends. ScriptedLlm answers
// from an explicit knowledge base; ScriptedDetector reads ground truth from
// an image manifest and corrupts it through a parameterized noise model.
// Both are bit-reproducible for a fixed seed, which is what makes replay
// tests and matched-seed sweeps possible.

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "affordkit/backends.hpp"
#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/prompts.hpp"
#include "affordkit/rng.hpp"

namespace affordkit {

enum class RobotSize { Small, Large };

// Mass is the only embodiment feature the scripted tables key on.
inline RobotSize size_from_mass(double mass_kg) {
  return mass_kg <= 10.0 ? RobotSize::Small : RobotSize::Large;
}

struct AffordanceKB {
  // (action, effect) -> candidate objects, in reply order.
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> object_table;
  // (size, action, object, property value) -> feasible?
  std::map<std::tuple<RobotSize, std::string, std::string, std::string>, bool> feasibility_table;
  // action -> relevant property dimensions.
  std::map<std::string, std::vector<std::string>> relevance_table;

  void validate() const {
    for (const auto& [key, objects] : object_table) {
      if (key.first.empty()) throw DataError("object table entry with empty action");
      for (const auto& o : objects)
        if (o != canonicalize_label(o)) throw DataError("object not canonical: " + o);
    }
  }

  // Merges `other` on top of this table set; colliding keys take the other
  // side's entry.
  AffordanceKB merged_with(const AffordanceKB& other) const {
    AffordanceKB out = *this;
    for (const auto& [k, v] : other.object_table) out.object_table[k] = v;
    for (const auto& [k, v] : other.feasibility_table) out.feasibility_table[k] = v;
    for (const auto& [k, v] : other.relevance_table) out.relevance_table[k] = v;
    return out;
  }
};

namespace detail {

inline std::string trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Extracts the substring strictly between two anchors, or fails.
inline bool between(std::string_view text, std::string_view after, std::string_view before,
                    std::string& out) {
  const auto a = text.find(after);
  if (a == std::string_view::npos) return false;
  const auto start = a + after.size();
  const auto b = text.find(before, start);
  if (b == std::string_view::npos) return false;
  out = trimmed(text.substr(start, b - start));
  return true;
}

}  // namespace detail

// Answers every dialogue step from the knowledge base. Stateless across
// calls; the robot's size is re-read from the session's embodiment message
// so the same instance can serve dialogues for different robots.
class ScriptedLlm : public LlmBackend {
 public:
  ScriptedLlm(AffordanceKB kb, PropertyCatalog catalog)
      : kb_(std::move(kb)), catalog_(std::move(catalog)) {
    kb_.validate();
    catalog_.validate();
  }

 protected:
  std::string complete(const ChatSession& session, const PromptText& prompt) override {
    switch (prompt.step) {
      case PromptStep::Embodiment:
        return "Understood.";
      case PromptStep::ObjectElicitation:
        return answer_elicitation(prompt.text);
      case PromptStep::Confirmation:
        return answer_confirmation(prompt.text);
      case PromptStep::PropertyRelevance:
        return answer_relevance(prompt.text);
      case PromptStep::Feasibility:
        return answer_feasibility(session, prompt.text);
    }
    throw ScriptGap("unhandled prompt step");
  }

 private:
  RobotSize robot_size(const ChatSession& session) const {
    for (const auto& m : session.messages()) {
      if (m.role != Role::User) continue;
      const auto pos = m.content.find("weight ");
      if (pos == std::string::npos) continue;
      try {
        return size_from_mass(std::stod(m.content.substr(pos + 7)));
      } catch (const std::exception&) {
        continue;
      }
    }
    throw ScriptGap("no embodiment message with a weight found in session");
  }

  std::string answer_elicitation(const std::string& text) const {
    std::string n_str;
    if (!detail::between(text, "Which ", " ", n_str))
      throw ScriptGap("elicitation prompt: could not find candidate count");
    std::size_t n = 0;
    try {
      n = static_cast<std::size_t>(std::stoul(n_str));
    } catch (const std::exception&) {
      throw ScriptGap("elicitation prompt: candidate count is not a number");
    }
    std::string action, effect;
    if (detail::between(text, "use to ", " in order to ", action)) {
      if (!detail::between(text, " in order to ", "?", effect))
        throw ScriptGap("elicitation prompt: malformed effect clause");
    } else if (!detail::between(text, "use to ", "?", action)) {
      throw ScriptGap("elicitation prompt: could not find the action");
    }
    const auto it = kb_.object_table.find({action, effect});
    if (it == kb_.object_table.end())
      throw ScriptGap("no scripted objects for action '" + action + "' and effect '" + effect +
                      "'");
    std::string reply;
    std::size_t count = 0;
    for (const auto& obj : it->second) {
      if (count == n) break;
      ++count;
      reply += std::to_string(count) + ". " + obj + "\n";
    }
    if (reply.empty()) reply = "I cannot think of any suitable object.";
    return reply;
  }

  std::string answer_confirmation(const std::string& text) const {
    std::string object, action;
    if (!detail::between(text, "Is a ", " something", object) ||
        !detail::between(text, "use to ", "?", action))
      throw ScriptGap("confirmation prompt does not follow the expected form");
    for (const auto& [key, objects] : kb_.object_table) {
      if (key.first != action) continue;
      for (const auto& o : objects)
        if (o == object) return "Yes.";
    }
    return "No.";
  }

  std::string answer_relevance(const std::string& text) const {
    const auto pos = text.find("robot can ");
    if (pos == std::string::npos)
      throw ScriptGap("relevance prompt does not follow the expected form");
    const auto tail = std::string_view(text).substr(pos + 10);
    // actions may themselves contain " a " ("place a small object on"), so
    // match table keys longest-first instead of cutting at the first article
    std::string action;
    for (const auto& [key, dims] : kb_.relevance_table) {
      if (key.size() > action.size() && tail.substr(0, key.size() + 3) == key + " a ")
        action = key;
    }
    const auto it = kb_.relevance_table.find(action);
    if (it == kb_.relevance_table.end())
      throw ScriptGap("no scripted relevance entry for action in '" +
                      std::string(tail.substr(0, 60)) + "'");
    std::string reply;
    for (const auto& dim : it->second) reply += "The " + dim + " is relevant. ";
    for (const auto& d : catalog_.dimensions) {
      if (std::find(it->second.begin(), it->second.end(), d.name) == it->second.end())
        reply += "The " + d.name + " is irrelevant. ";
    }
    if (it->second.empty()) reply = "None of the listed properties matter. " + reply;
    return detail::trimmed(reply);
  }

  // Positional parse of the feasibility question: the property value and
  // object follow the first " a <value> " group; a trailing "in a ... manner"
  // clause is stripped first. Falls back to a whole-word scan of the
  // feasibility table when the positional form is not recognized.
  std::string answer_feasibility(const ChatSession& session, const std::string& text) const {
    const RobotSize size = robot_size(session);
    std::string body = text;
    if (const auto q = body.rfind('?'); q != std::string::npos) body = body.substr(0, q);
    if (body.size() >= 7 && body.compare(body.size() - 7, 7, " manner") == 0) {
      const auto in_a = body.rfind(" in a ");
      if (in_a != std::string::npos) body = body.substr(0, in_a);
    }

    std::string action, value, object;
    bool parsed = false;
    std::size_t best_pos = std::string::npos;
    for (const auto& dim : catalog_.dimensions) {
      for (const auto& v : dim.values) {
        const std::string pattern = " a " + v + " ";
        const auto pos = body.find(pattern);
        if (pos != std::string::npos && pos < best_pos) {
          best_pos = pos;
          value = v;
          object = detail::trimmed(body.substr(pos + pattern.size()));
        }
      }
    }
    if (best_pos != std::string::npos && !object.empty()) {
      const auto verb_at = body.find("can the robot ");
      if (verb_at != std::string::npos && verb_at + 14 <= best_pos) {
        action = detail::trimmed(body.substr(verb_at + 14, best_pos - verb_at - 14));
        parsed = !action.empty();
      }
    }

    if (parsed) {
      const auto it = kb_.feasibility_table.find({size, action, object, value});
      if (it != kb_.feasibility_table.end()) return feasibility_reply(it->second, body);
      throw ScriptGap("no scripted feasibility entry for '" + action + "' / '" + value + " " +
                      object + "'");
    }

    // Fallback: the prompt came from a custom template. Accept it only when
    // exactly one feasibility key matches on whole words.
    const std::string padded = " " + body + " ";
    const std::tuple<RobotSize, std::string, std::string, std::string>* match = nullptr;
    bool matched_value = false;
    for (const auto& [key, yes] : kb_.feasibility_table) {
      if (std::get<0>(key) != size) continue;
      const auto has = [&](const std::string& word) {
        return padded.find(" " + word + " ") != std::string::npos;
      };
      if (has(std::get<1>(key)) && has(std::get<2>(key)) && has(std::get<3>(key))) {
        if (match && *match != key) throw ScriptGap("ambiguous feasibility prompt: " + text);
        match = &key;
        matched_value = yes;
      }
    }
    if (!match) throw ScriptGap("unrecognized feasibility prompt: " + text);
    return feasibility_reply(matched_value, body);
  }

  static std::string feasibility_reply(bool yes, const std::string& body) {
    std::string tail = detail::trimmed(body);
    const auto verb_at = tail.find("can the robot ");
    if (verb_at != std::string::npos) tail = tail.substr(verb_at + 14);
    if (yes) return "Yes, the robot can " + tail + ".";
    return "No, the robot cannot " + tail + ".";
  }

  AffordanceKB kb_;
  PropertyCatalog catalog_;
};

// ---------------------------------------------------------------------------
// Scripted detector

// Corruption applied on top of manifest ground truth. All rates are
// probabilities except clutter_rate, which is a Poisson mean per query.
struct NoiseModel {
  double p_miss = 0.0;            // drop a matching annotation
  double p_conf = 0.0;            // confuse a property mismatch into a hit
  double clutter_rate = 0.0;      // expected spurious boxes per query
  double confidence_jitter = 0.0; // stddev added to the base confidence
  std::uint64_t seed = 0;

  void validate() const {
    for (double p : {p_miss, p_conf}) {
      if (!(p >= 0.0 && p <= 1.0)) throw DataError("noise probabilities must be in [0,1]");
    }
    if (!(clutter_rate >= 0.0)) throw DataError("clutter_rate must be non-negative");
    if (!(confidence_jitter >= 0.0)) throw DataError("confidence_jitter must be non-negative");
  }

  bool operator==(const NoiseModel&) const = default;
};

// Emits ground-truth boxes for the queried class, corrupted by the noise
// model. The RNG stream is keyed by (seed, image_id, phrase) and the stream
// positions consumed per annotation are constant, so:
//   - results do not depend on query order or threading;
//   - raising p_conf only adds confusions, it never removes or reshuffles
//     existing ones (coupled sweeps stay comparable under a shared seed).
class ScriptedDetector : public DetectorBackend {
 public:
  static constexpr double kBaseConfidence = 0.9;

  ScriptedDetector(ImageManifest manifest, PropertyCatalog catalog, NoiseModel noise)
      : manifest_(std::move(manifest)), catalog_(std::move(catalog)), noise_(noise) {
    manifest_.validate();
    catalog_.validate();
    noise_.validate();
  }

  const NoiseModel& noise() const { return noise_; }

 protected:
  std::vector<Detection> run(const DetectorRequest& req) const override {
    const ImageEntry* entry = manifest_.find(req.image_id);
    if (!entry) throw UnknownImage("image not in manifest: " + req.image_id);

    const auto [object, property] = split_phrase(catalog_, req.phrase);

    Rng rng(derive_seed(noise_.seed, std::string_view(req.image_id), std::string_view(req.phrase)));
    std::vector<Detection> out;
    for (const auto& ann : entry->annotations) {
      // Fixed draw schedule per annotation, consumed before any branching.
      const double u_miss = rng.uniform();
      const double u_conf = rng.uniform();
      const double z = rng.gaussian();
      if (ann.object != object) continue;
      if (u_miss < noise_.p_miss) continue;
      if (property) {
        const auto actual = ann.property(property->first);
        const bool exact = actual && *actual == property->second;
        if (!exact && !(u_conf < noise_.p_conf)) continue;
      }
      Detection d;
      d.image_id = req.image_id;
      d.box = ann.box;
      d.confidence = std::clamp(kBaseConfidence + noise_.confidence_jitter * z, 0.0, 1.0);
      d.object = object;
      d.property = property;
      out.push_back(std::move(d));
    }

    const double w = static_cast<double>(entry->width_px);
    const double h = static_cast<double>(entry->height_px);
    const int clutter = rng.poisson(noise_.clutter_rate);
    for (int i = 0; i < clutter; ++i) {
      const double x1 = rng.uniform(0.0, 0.8 * w);
      const double y1 = rng.uniform(0.0, 0.8 * h);
      const double bw = rng.uniform(0.1 * w, 0.2 * w);
      const double bh = rng.uniform(0.1 * h, 0.2 * h);
      Detection d;
      d.image_id = req.image_id;
      d.box = BBox::make(x1, y1, std::min(x1 + bw, w), std::min(y1 + bh, h));
      d.confidence = rng.uniform(0.2, 0.6);
      d.object = object;
      d.property = property;
      out.push_back(std::move(d));
    }
    return out;
  }

 private:
  ImageManifest manifest_;
  PropertyCatalog catalog_;
  NoiseModel noise_;
};

}  // namespace affordkit
