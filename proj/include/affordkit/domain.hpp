#pragma once

// Core value types shared by every module: robot embodiment, task
// requirements, the detectable-property catalog, object labels, boxes,
// detections, the image manifest, and the dialogue report. All types are
// immutable value objects once constructed; safe to share across threads.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affordkit/errors.hpp"
#include "affordkit/json_util.hpp"

namespace affordkit {

// ---------------------------------------------------------------------------
// Labels

// Irregular plurals that the trailing-s rule would mangle ("boxes" -> "boxe").
inline const std::map<std::string, std::string>& plural_exceptions() {
  static const std::map<std::string, std::string> table = {
      {"boxes", "box"},   {"benches", "bench"}, {"glasses", "glass"},
      {"dishes", "dish"}, {"brushes", "brush"}, {"couches", "couch"},
  };
  return table;
}

// Lowercases, trims, collapses inner whitespace, and strips a trailing
// plural "s" from the final word when the de-pluralized form keeps at least
// three characters. Words ending in "ss" are left alone. Idempotent.
inline std::string canonicalize_label(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  bool in_space = true;  // swallows leading whitespace
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      if (!in_space) {
        s.push_back(' ');
        in_space = true;
      }
    } else {
      s.push_back(static_cast<char>(std::tolower(u)));
      in_space = false;
    }
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) throw EmptyLabel("label is empty after trimming");

  const auto space = s.rfind(' ');
  const std::size_t word_start = (space == std::string::npos) ? 0 : space + 1;
  std::string last = s.substr(word_start);

  const auto& exceptions = plural_exceptions();
  if (auto it = exceptions.find(last); it != exceptions.end()) {
    last = it->second;
  } else if (last.size() >= 4 && last.back() == 's' && last[last.size() - 2] != 's') {
    last.pop_back();
  }
  s.replace(word_start, std::string::npos, last);
  return s;
}

// ---------------------------------------------------------------------------
// Robot embodiment and task requirements

struct RobotSpec {
  std::string robot_type;  // e.g. "quadruped", "wheeled"
  double mass_kg = 0.0;
  double height_cm = 0.0;
  std::optional<double> width_cm;
  std::optional<std::string> manipulator;
  std::vector<std::pair<std::string, std::string>> extra;  // insertion order kept

  void validate() const {
    if (robot_type.empty()) throw DataError("robot_type must be non-empty");
    if (!(mass_kg > 0.0)) throw DataError("mass_kg must be positive");
    if (!(height_cm > 0.0)) throw DataError("height_cm must be positive");
    if (width_cm && !(*width_cm > 0.0)) throw DataError("width_cm must be positive");
  }

  static RobotSpec from_json(const ojson& j) {
    RobotSpec r;
    if (!j.is_object()) throw DataError("robot spec must be a JSON object");
    r.robot_type = j.value("robot_type", "");
    r.mass_kg = j.value("mass_kg", 0.0);
    r.height_cm = j.value("height_cm", 0.0);
    if (j.contains("width_cm")) r.width_cm = j.at("width_cm").get<double>();
    if (j.contains("manipulator")) r.manipulator = j.at("manipulator").get<std::string>();
    if (j.contains("extra")) {
      for (auto it = j.at("extra").begin(); it != j.at("extra").end(); ++it)
        r.extra.emplace_back(it.key(), it.value().get<std::string>());
    }
    r.validate();
    return r;
  }

  bool operator==(const RobotSpec&) const = default;
};

struct Requirements {
  std::string action;                   // open-vocabulary, e.g. "stand on"
  std::string effect;                   // e.g. "increase robot's height"
  std::vector<std::string> conditions;  // soft conditions, may be empty

  void validate() const {
    if (action.empty()) throw DataError("action must be non-empty");
  }

  bool operator==(const Requirements&) const = default;
};

// ---------------------------------------------------------------------------
// Property catalog

struct PropertyDimension {
  std::string name;                 // e.g. "material"
  std::vector<std::string> values;  // e.g. {"plastic", "metal", ...}

  bool operator==(const PropertyDimension&) const = default;
};

struct PropertyCatalog {
  std::vector<PropertyDimension> dimensions;  // ordered

  void validate() const {
    for (const auto& d : dimensions) {
      if (d.name != canonicalize_label(d.name))
        throw DataError("dimension name not canonical: " + d.name);
      if (d.values.empty())
        throw DataError("dimension has no values: " + d.name);
      std::vector<std::string> seen;
      for (const auto& v : d.values) {
        if (v != canonicalize_label(v))
          throw DataError("value not canonical: " + v + " in " + d.name);
        if (std::find(seen.begin(), seen.end(), v) != seen.end())
          throw DataError("duplicate value: " + v + " in " + d.name);
        seen.push_back(v);
      }
    }
  }

  const PropertyDimension* find(std::string_view name) const {
    for (const auto& d : dimensions)
      if (d.name == name) return &d;
    return nullptr;
  }

  bool has_value(std::string_view dim, std::string_view value) const {
    const auto* d = find(dim);
    if (!d) return false;
    return std::find(d->values.begin(), d->values.end(), value) != d->values.end();
  }

  // Looks a value up across all dimensions; returns the owning dimension.
  std::optional<std::string> dimension_of(std::string_view value) const {
    for (const auto& d : dimensions)
      for (const auto& v : d.values)
        if (v == value) return d.name;
    return std::nullopt;
  }

  bool empty() const { return dimensions.empty(); }

  static PropertyCatalog from_json(const ojson& j) {
    PropertyCatalog c;
    if (!j.is_object()) throw DataError("catalog must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      PropertyDimension d;
      d.name = it.key();
      for (const auto& v : it.value()) d.values.push_back(v.get<std::string>());
      c.dimensions.push_back(std::move(d));
    }
    c.validate();
    return c;
  }

  ojson to_json() const {
    ojson j = ojson::object();
    for (const auto& d : dimensions) j[d.name] = d.values;
    return j;
  }

  bool operator==(const PropertyCatalog&) const = default;
};

// ---------------------------------------------------------------------------
// Objects and qualified objects

struct ObjectClass {
  std::string name;  // lowercase singular label, e.g. "box"

  // Builds a class from raw text: punctuation becomes whitespace, then the
  // label is canonicalized. Throws EmptyLabel when nothing is left.
  static ObjectClass from_text(std::string_view raw) {
    std::string cleaned;
    cleaned.reserve(raw.size());
    for (char c : raw) {
      const auto u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || std::isspace(u) || c == '-')
        cleaned.push_back(c);
      else
        cleaned.push_back(' ');
    }
    return ObjectClass{canonicalize_label(cleaned)};
  }

  auto operator<=>(const ObjectClass&) const = default;
};

struct QualifiedObject {
  ObjectClass object;
  std::string property_dim;    // e.g. "material"
  std::string property_value;  // e.g. "paper"

  std::string phrase() const { return property_value + " " + object.name; }

  auto operator<=>(const QualifiedObject&) const = default;
};

// Splits a detector query phrase into object class and optional property:
// a leading token that is a known catalog value qualifies the remainder, so
// "paper box" becomes (box, material=paper) while "box" stays bare.
inline std::pair<ObjectClass, std::optional<std::pair<std::string, std::string>>> split_phrase(
    const PropertyCatalog& catalog, std::string_view phrase) {
  const auto space = phrase.find(' ');
  if (space != std::string_view::npos) {
    const std::string head(phrase.substr(0, space));
    if (const auto dim = catalog.dimension_of(head))
      return {ObjectClass::from_text(phrase.substr(space + 1)), {{*dim, head}}};
  }
  return {ObjectClass::from_text(phrase), std::nullopt};
}

// ---------------------------------------------------------------------------
// Boxes and detections

struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  // Rejects degenerate or non-finite boxes. Zero-area boxes are invalid.
  static BBox make(double x1, double y1, double x2, double y2) {
    if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2))
      throw DataError("box coordinates must be finite");
    if (!(x1 < x2) || !(y1 < y2)) throw DataError("degenerate box: x1 < x2 and y1 < y2 required");
    return BBox{x1, y1, x2, y2};
  }

  // Clamps to [0,w]x[0,h]; a box that collapses to zero area is rejected
  // rather than clamped to equality.
  BBox clamped(double width, double height) const {
    const double cx1 = std::clamp(x1, 0.0, width);
    const double cy1 = std::clamp(y1, 0.0, height);
    const double cx2 = std::clamp(x2, 0.0, width);
    const double cy2 = std::clamp(y2, 0.0, height);
    if (!(cx1 < cx2) || !(cy1 < cy2))
      throw DataError("box collapses to zero area when clamped to image bounds");
    return BBox{cx1, cy1, cx2, cy2};
  }

  double area() const { return (x2 - x1) * (y2 - y1); }

  ojson to_json() const { return ojson::array({x1, y1, x2, y2}); }

  static BBox from_json(const ojson& j) {
    if (!j.is_array() || j.size() != 4) throw DataError("box must be [x1,y1,x2,y2]");
    return make(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  }

  auto operator<=>(const BBox&) const = default;
};

// Intersection over union of two boxes; 0 when they do not overlap.
inline double iou(const BBox& a, const BBox& b) {
  const double ix1 = std::max(a.x1, b.x1);
  const double iy1 = std::max(a.y1, b.y1);
  const double ix2 = std::min(a.x2, b.x2);
  const double iy2 = std::min(a.y2, b.y2);
  const double iw = ix2 - ix1;
  const double ih = iy2 - iy1;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

struct Detection {
  std::string image_id;
  BBox box;
  double confidence = 0.0;  // normalized to [0,1]
  ObjectClass object;
  // Present when the query was property-qualified ("paper box").
  std::optional<std::pair<std::string, std::string>> property;  // (dim, value)

  std::string phrase() const {
    return property ? property->second + " " + object.name : object.name;
  }

  std::optional<QualifiedObject> qualified() const {
    if (!property) return std::nullopt;
    return QualifiedObject{object, property->first, property->second};
  }

  void validate() const {
    if (!(confidence >= 0.0 && confidence <= 1.0))
      throw DataError("confidence must be in [0,1]");
  }

  ojson to_json() const {
    ojson j;
    j["image_id"] = image_id;
    j["phrase"] = phrase();
    j["object"] = object.name;
    if (property) {
      j["property_dim"] = property->first;
      j["property_value"] = property->second;
    }
    j["box"] = box.to_json();
    j["confidence"] = confidence;
    return j;
  }

  static Detection from_json(const ojson& j) {
    Detection d;
    d.image_id = j.at("image_id").get<std::string>();
    d.object = ObjectClass{j.at("object").get<std::string>()};
    if (j.contains("property_dim") != j.contains("property_value"))
      throw DataError("property_dim and property_value must appear together");
    if (j.contains("property_dim"))
      d.property = {j.at("property_dim").get<std::string>(),
                    j.at("property_value").get<std::string>()};
    d.box = BBox::from_json(j.at("box"));
    d.confidence = j.at("confidence").get<double>();
    d.validate();
    return d;
  }

  bool operator==(const Detection&) const = default;
};

// ---------------------------------------------------------------------------
// Image manifest (ground truth for the scripted detector and the eval kit)

struct Annotation {
  ObjectClass object;
  std::vector<std::pair<std::string, std::string>> properties;  // dim -> value
  BBox box;

  std::optional<std::string> property(std::string_view dim) const {
    for (const auto& [d, v] : properties)
      if (d == dim) return v;
    return std::nullopt;
  }

  bool operator==(const Annotation&) const = default;
};

struct ImageEntry {
  std::string image_id;
  std::string uri;
  int width_px = 0;
  int height_px = 0;
  std::vector<Annotation> annotations;

  bool operator==(const ImageEntry&) const = default;
};

struct ImageManifest {
  std::vector<ImageEntry> entries;

  const ImageEntry* find(std::string_view image_id) const {
    for (const auto& e : entries)
      if (e.image_id == image_id) return &e;
    return nullptr;
  }

  void validate() const {
    std::vector<std::string> ids;
    for (const auto& e : entries) {
      if (std::find(ids.begin(), ids.end(), e.image_id) != ids.end())
        throw DataError("duplicate image_id: " + e.image_id);
      ids.push_back(e.image_id);
      if (e.width_px <= 0 || e.height_px <= 0)
        throw DataError("image dimensions must be positive: " + e.image_id);
    }
  }

  // Schema: top-level array of entries; boxes as [x1,y1,x2,y2] pixel arrays;
  // properties as a flat string map. Boxes are clamped to image bounds.
  static ImageManifest from_json(const ojson& j) {
    if (!j.is_array()) throw DataError("manifest must be a JSON array of entries");
    ImageManifest m;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& ej = j[i];
      ImageEntry e;
      try {
        e.image_id = ej.at("image_id").get<std::string>();
        e.uri = ej.at("uri").get<std::string>();
        e.width_px = ej.at("width_px").get<int>();
        e.height_px = ej.at("height_px").get<int>();
        if (ej.contains("annotations")) {
          for (const auto& aj : ej.at("annotations")) {
            Annotation a;
            a.object = ObjectClass{aj.at("object").get<std::string>()};
            if (aj.contains("properties")) {
              for (auto it = aj.at("properties").begin(); it != aj.at("properties").end(); ++it)
                a.properties.emplace_back(it.key(), it.value().get<std::string>());
            }
            a.box = BBox::from_json(aj.at("box"))
                        .clamped(static_cast<double>(e.width_px), static_cast<double>(e.height_px));
            e.annotations.push_back(std::move(a));
          }
        }
      } catch (const nlohmann::json::exception& ex) {
        throw DataError("manifest entry " + std::to_string(i) + ": " + ex.what());
      } catch (const DataError& ex) {
        throw DataError("manifest entry " + std::to_string(i) + ": " + ex.what());
      }
      m.entries.push_back(std::move(e));
    }
    m.validate();
    return m;
  }

  ojson to_json() const {
    ojson j = ojson::array();
    for (const auto& e : entries) {
      ojson ej;
      ej["image_id"] = e.image_id;
      ej["uri"] = e.uri;
      ej["width_px"] = e.width_px;
      ej["height_px"] = e.height_px;
      ojson anns = ojson::array();
      for (const auto& a : e.annotations) {
        ojson aj;
        aj["object"] = a.object.name;
        ojson props = ojson::object();
        for (const auto& [d, v] : a.properties) props[d] = v;
        aj["properties"] = props;
        aj["box"] = a.box.to_json();
        anns.push_back(std::move(aj));
      }
      ej["annotations"] = std::move(anns);
      j.push_back(std::move(ej));
    }
    return j;
  }

  static ImageManifest load(const std::filesystem::path& path) {
    return from_json(read_json_file(path));
  }

  void save(const std::filesystem::path& path) const {
    write_file_atomic(path, dump_fixed(to_json()));
  }

  bool operator==(const ImageManifest&) const = default;
};

// ---------------------------------------------------------------------------
// Dialogue report

enum class DialogueOutcome { Ok, NoCandidates, NoApprovedPairs };

inline const char* outcome_name(DialogueOutcome o) {
  switch (o) {
    case DialogueOutcome::Ok: return "ok";
    case DialogueOutcome::NoCandidates: return "no_candidates";
    case DialogueOutcome::NoApprovedPairs: return "no_approved_pairs";
  }
  return "ok";
}

inline DialogueOutcome outcome_from_name(std::string_view s) {
  if (s == "ok") return DialogueOutcome::Ok;
  if (s == "no_candidates") return DialogueOutcome::NoCandidates;
  if (s == "no_approved_pairs") return DialogueOutcome::NoApprovedPairs;
  throw DataError("unknown outcome: " + std::string(s));
}

struct DialogueEvent {
  std::string step;    // e.g. "embodiment", "feasibility", "detection_final"
  std::string prompt;  // text sent (or detector query phrase)
  std::string reply;   // raw reply text; empty for detector events
  ojson parsed;        // typed parse result for auditing

  bool operator==(const DialogueEvent&) const = default;
};

struct AffordanceReport {
  DialogueOutcome outcome = DialogueOutcome::Ok;
  std::vector<QualifiedObject> approved_pairs;
  std::vector<Detection> ranked;  // sorted by confidence descending
  std::vector<DialogueEvent> trace;

  // Every ranked detection must be property-qualified with an approved pair,
  // and confidences must be non-increasing.
  void validate() const {
    for (std::size_t i = 1; i < ranked.size(); ++i)
      if (ranked[i].confidence > ranked[i - 1].confidence)
        throw DataError("ranked confidences must be non-increasing");
    for (const auto& d : ranked) {
      const auto q = d.qualified();
      if (!q || std::find(approved_pairs.begin(), approved_pairs.end(), *q) == approved_pairs.end())
        throw DataError("ranked detection not covered by an approved pair: " + d.phrase());
    }
  }

  ojson to_json() const {
    ojson j;
    j["outcome"] = outcome_name(outcome);
    ojson pairs = ojson::array();
    for (const auto& q : approved_pairs) {
      ojson pj;
      pj["object"] = q.object.name;
      pj["property_dim"] = q.property_dim;
      pj["property_value"] = q.property_value;
      pj["phrase"] = q.phrase();
      pairs.push_back(std::move(pj));
    }
    j["approved_pairs"] = std::move(pairs);
    ojson dets = ojson::array();
    for (const auto& d : ranked) dets.push_back(d.to_json());
    j["ranked"] = std::move(dets);
    ojson ev = ojson::array();
    for (const auto& e : trace) {
      ojson ejson;
      ejson["step"] = e.step;
      ejson["prompt"] = e.prompt;
      ejson["reply"] = e.reply;
      ejson["parsed"] = e.parsed;
      ev.push_back(std::move(ejson));
    }
    j["trace"] = std::move(ev);
    return j;
  }

  static AffordanceReport from_json(const ojson& j) {
    AffordanceReport r;
    r.outcome = outcome_from_name(j.at("outcome").get<std::string>());
    for (const auto& pj : j.at("approved_pairs")) {
      r.approved_pairs.push_back(QualifiedObject{
          ObjectClass{pj.at("object").get<std::string>()},
          pj.at("property_dim").get<std::string>(),
          pj.at("property_value").get<std::string>()});
    }
    for (const auto& dj : j.at("ranked")) r.ranked.push_back(Detection::from_json(dj));
    for (const auto& ejson : j.at("trace")) {
      DialogueEvent e;
      e.step = ejson.at("step").get<std::string>();
      e.prompt = ejson.at("prompt").get<std::string>();
      e.reply = ejson.at("reply").get<std::string>();
      e.parsed = ejson.at("parsed");
      r.trace.push_back(std::move(e));
    }
    r.validate();
    return r;
  }

  bool operator==(const AffordanceReport&) const = default;
};

}  // namespace affordkit
