#pragma once

// Prompt construction for the five dialogue steps. Templates are plain
// strings with {placeholder} slots; rendering is pure (same inputs, same
// text) and never invents content beyond the template and its inputs.

#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"

namespace affordkit {

enum class PromptStep {
  Embodiment,
  ObjectElicitation,
  Confirmation,
  PropertyRelevance,
  Feasibility,
};

inline const char* step_name(PromptStep s) {
  switch (s) {
    case PromptStep::Embodiment: return "embodiment";
    case PromptStep::ObjectElicitation: return "object_elicitation";
    case PromptStep::Confirmation: return "confirmation";
    case PromptStep::PropertyRelevance: return "property_relevance";
    case PromptStep::Feasibility: return "feasibility";
  }
  return "embodiment";
}

struct PromptText {
  std::string text;
  PromptStep step;

  bool operator==(const PromptText&) const = default;
};

// Formats a double the way a person would write it in a sentence: no
// trailing zeros, so 50.0 renders as "50" and 2.5 as "2.5".
inline std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

struct PromptTemplates {
  std::string embodiment =
      "I am a {type} robot with weight {weight} kg, height {height} cm{extras}.";
  std::string object_elicitation =
      "Which {n} {object_word} in the room can the robot use to {action}"
      "{effect_clause}? Reply with a numbered list of object names only.";
  std::string confirmation =
      "Is a {object} something the robot could use to {action}? Answer yes or no.";
  std::string property_relevance =
      "When deciding whether the robot can {action} a {object}, which of these "
      "properties matter?{dimensions} Name the relevant properties.";
  std::string feasibility =
      "can the robot {action} a {property} {object}{manner}?";
  std::string clarification = "Answer yes or no: {question}";

  static PromptTemplates from_json_file(const std::filesystem::path& path) {
    PromptTemplates t;
    const ojson j = read_json_file(path);
    if (!j.is_object()) throw ConfigError("templates file must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const std::string value = it.value().get<std::string>();
      if (key == "embodiment") t.embodiment = value;
      else if (key == "object_elicitation") t.object_elicitation = value;
      else if (key == "confirmation") t.confirmation = value;
      else if (key == "property_relevance") t.property_relevance = value;
      else if (key == "feasibility") t.feasibility = value;
      else if (key == "clarification") t.clarification = value;
      else throw ConfigError("unknown template key: " + key);
    }
    return t;
  }
};

class PromptEngine {
 public:
  static constexpr std::size_t kMaxPromptChars = 4000;

  PromptEngine() = default;
  explicit PromptEngine(PromptTemplates templates) : templates_(std::move(templates)) {}

  const PromptTemplates& templates() const { return templates_; }

  // The self-description sent as the first message of every dialogue.
  // Optional fields and extra entries append in declaration order.
  PromptText render_embodiment(const RobotSpec& robot) const {
    robot.validate();
    std::string extras;
    if (robot.width_cm) extras += ", width " + format_number(*robot.width_cm) + " cm";
    if (robot.manipulator) extras += ", manipulator " + *robot.manipulator;
    for (const auto& [k, v] : robot.extra) extras += ", " + k + " " + v;
    return finish(substitute(templates_.embodiment,
                             {{"type", robot.robot_type},
                              {"weight", format_number(robot.mass_kg)},
                              {"height", format_number(robot.height_cm)},
                              {"extras", extras}}),
                  PromptStep::Embodiment);
  }

  PromptText render_object_elicitation(const Requirements& req, int n_candidates) const {
    req.validate();
    if (n_candidates < 1) throw DataError("n_candidates must be at least 1");
    std::string effect_clause;
    if (!req.effect.empty()) effect_clause = " in order to " + req.effect;
    return finish(substitute(templates_.object_elicitation,
                             {{"n", std::to_string(n_candidates)},
                              {"object_word", n_candidates == 1 ? "object" : "objects"},
                              {"action", req.action},
                              {"effect_clause", effect_clause}}),
                  PromptStep::ObjectElicitation);
  }

  PromptText render_confirmation(const Requirements& req, const ObjectClass& object) const {
    req.validate();
    return finish(substitute(templates_.confirmation,
                             {{"object", object.name}, {"action", req.action}}),
                  PromptStep::Confirmation);
  }

  // One prompt per property dimension chunk; chunks are split so that no
  // prompt exceeds the length cap even with a large catalog.
  std::vector<PromptText> render_property_relevance(const Requirements& req,
                                                    const ObjectClass& object,
                                                    const PropertyCatalog& catalog) const {
    req.validate();
    if (catalog.empty()) throw DataError("property catalog is empty");
    std::vector<PromptText> out;
    std::string block;
    auto flush = [&] {
      if (block.empty()) return;
      out.push_back(finish(substitute(templates_.property_relevance,
                                      {{"action", req.action},
                                       {"object", object.name},
                                       {"dimensions", block}}),
                           PromptStep::PropertyRelevance));
      block.clear();
    };
    const std::size_t overhead = templates_.property_relevance.size() +
                                 req.action.size() + object.name.size();
    for (const auto& d : catalog.dimensions) {
      std::string line = " " + d.name + " (";
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (i) line += ", ";
        line += d.values[i];
      }
      line += ");";
      if (!block.empty() && overhead + block.size() + line.size() > kMaxPromptChars) flush();
      block += line;
    }
    flush();
    return out;
  }

  // Lowercase question form, one property-qualified object per prompt.
  // Soft conditions fold into a trailing "in a ... manner" clause.
  PromptText render_feasibility(const Requirements& req, const QualifiedObject& pair) const {
    req.validate();
    std::string manner;
    if (!req.conditions.empty()) {
      manner = " in a ";
      for (std::size_t i = 0; i < req.conditions.size(); ++i) {
        if (i) manner += " and ";
        manner += req.conditions[i];
      }
      manner += " manner";
    }
    return finish(substitute(templates_.feasibility,
                             {{"action", req.action},
                              {"property", pair.property_value},
                              {"object", pair.object.name},
                              {"manner", manner}}),
                  PromptStep::Feasibility);
  }

  // Re-ask an ambiguous yes/no answer with the original question embedded.
  PromptText render_clarification(const PromptText& original) const {
    return finish(substitute(templates_.clarification, {{"question", original.text}}),
                  original.step);
  }

 private:
  static std::string substitute(std::string_view tmpl,
                                const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
      if (tmpl[i] == '{') {
        const auto close = tmpl.find('}', i + 1);
        if (close != std::string_view::npos) {
          const std::string key(tmpl.substr(i + 1, close - i - 1));
          const auto it = slots.find(key);
          if (it == slots.end())
            throw TemplateError("unknown placeholder {" + key + "} in template");
          out += it->second;
          i = close + 1;
          continue;
        }
        throw TemplateError("unbalanced '{' in template");
      }
      out.push_back(tmpl[i]);
      ++i;
    }
    return out;
  }

  PromptText finish(std::string text, PromptStep step) const {
    if (text.size() > kMaxPromptChars)
      throw TemplateError("rendered prompt exceeds " + std::to_string(kMaxPromptChars) +
                          " characters");
    return PromptText{std::move(text), step};
  }

  PromptTemplates templates_;
};

}  // namespace affordkit
