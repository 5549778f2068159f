#pragma once

// Detection quality scoring: per-class average precision with greedy
// confidence-ordered matching and all-points interpolation, plus the mean
// over classes. A prediction's class is its query phrase; a ground-truth
// annotation's class is its qualifying property value plus object name.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/json_util.hpp"

namespace affordkit {

// Ground truth for one class: boxes grouped by image.
using GroundTruthBoxes = std::map<std::string, std::vector<BBox>>;

// Average precision for one class. Predictions are matched greedily in
// confidence order (ties: image id, then box coordinates) against the
// not-yet-matched ground-truth box with the highest IoU in the same image;
// a match needs IoU >= iou_threshold. The PR curve is integrated with
// all-points interpolation.
inline double average_precision(std::vector<Detection> preds, const GroundTruthBoxes& gt,
                                double iou_threshold) {
  std::size_t total_gt = 0;
  for (const auto& [id, boxes] : gt) total_gt += boxes.size();
  if (total_gt == 0) throw NoGroundTruth("class has no ground-truth boxes");

  std::stable_sort(preds.begin(), preds.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return std::tie(a.box.x1, a.box.y1, a.box.x2, a.box.y2) <
           std::tie(b.box.x1, b.box.y1, b.box.x2, b.box.y2);
  });

  std::map<std::string, std::vector<bool>> matched;
  for (const auto& [id, boxes] : gt) matched[id].assign(boxes.size(), false);

  std::vector<double> precision, recall;
  std::size_t tp = 0, fp = 0;
  for (const auto& d : preds) {
    const auto it = gt.find(d.image_id);
    double best_iou = 0.0;
    std::size_t best_idx = 0;
    bool has_best = false;
    if (it != gt.end()) {
      auto& flags = matched[d.image_id];
      for (std::size_t g = 0; g < it->second.size(); ++g) {
        if (flags[g]) continue;
        const double v = iou(d.box, it->second[g]);
        if (!has_best || v > best_iou) {
          best_iou = v;
          best_idx = g;
          has_best = true;
        }
      }
    }
    if (has_best && best_iou >= iou_threshold) {
      matched[d.image_id][best_idx] = true;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
  }

  // Interpolate: precision at each recall level is the maximum precision
  // achieved at that recall or beyond.
  double ap = 0.0;
  double max_prec = 0.0;
  for (std::size_t i = precision.size(); i-- > 0;) {
    max_prec = std::max(max_prec, precision[i]);
    const double r_lo = i == 0 ? 0.0 : recall[i - 1];
    ap += (recall[i] - r_lo) * max_prec;
  }
  return ap;
}

struct EvalResult {
  double iou_threshold = 0.5;
  // Alphabetical by class; classes with no ground truth have no AP.
  std::vector<std::pair<std::string, std::optional<double>>> per_class_ap;
  double map_overall = 0.0;

  std::vector<std::string> undefined_classes() const {
    std::vector<std::string> out;
    for (const auto& [name, ap] : per_class_ap)
      if (!ap) out.push_back(name);
    return out;
  }
};

// Mean over defined classes only.
inline double mean_ap(const std::vector<std::pair<std::string, std::optional<double>>>& per_class) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [name, ap] : per_class) {
    if (!ap) continue;
    sum += *ap;
    ++n;
  }
  if (n == 0) throw AllUndefined("no class has ground truth; mean AP is undefined");
  return sum / static_cast<double>(n);
}

// A ground-truth annotation scores under "{value} {object}" when it carries
// the class dimension, else under its bare object name, mirroring how query
// phrases name detections.
inline std::string annotation_class(const Annotation& ann, const std::string& class_dim) {
  const auto v = ann.property(class_dim);
  return v ? *v + " " + ann.object.name : ann.object.name;
}

inline EvalResult evaluate(const std::vector<Detection>& preds, const ImageManifest& gt_manifest,
                           double iou_threshold = 0.5, const std::string& class_dim = "material") {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw ConfigError("iou threshold must be in (0,1]");

  std::map<std::string, GroundTruthBoxes> gt_by_class;
  for (const auto& entry : gt_manifest.entries)
    for (const auto& ann : entry.annotations)
      gt_by_class[annotation_class(ann, class_dim)][entry.image_id].push_back(ann.box);

  std::map<std::string, std::vector<Detection>> preds_by_class;
  for (const auto& d : preds) preds_by_class[d.phrase()].push_back(d);

  std::vector<std::string> classes;
  for (const auto& [name, g] : gt_by_class) classes.push_back(name);
  for (const auto& [name, p] : preds_by_class)
    if (!gt_by_class.count(name)) classes.push_back(name);
  std::sort(classes.begin(), classes.end());

  EvalResult result;
  result.iou_threshold = iou_threshold;
  for (const auto& name : classes) {
    const auto git = gt_by_class.find(name);
    if (git == gt_by_class.end()) {
      result.per_class_ap.emplace_back(name, std::nullopt);
      continue;
    }
    const auto pit = preds_by_class.find(name);
    const std::vector<Detection> empty;
    result.per_class_ap.emplace_back(
        name, average_precision(pit == preds_by_class.end() ? empty : pit->second, git->second,
                                iou_threshold));
  }
  result.map_overall = mean_ap(result.per_class_ap);
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

inline ojson eval_to_json(const EvalResult& r) {
  ojson j;
  j["iou_threshold"] = r.iou_threshold;
  j["map"] = r.map_overall;
  ojson classes = ojson::object();
  for (const auto& [name, ap] : r.per_class_ap) {
    if (ap)
      classes[name] = *ap;
    else
      classes[name] = nullptr;
  }
  j["classes"] = std::move(classes);
  ojson undef = ojson::array();
  for (const auto& name : r.undefined_classes()) undef.push_back(name);
  j["undefined"] = std::move(undef);
  return j;
}

inline std::string eval_to_csv(const EvalResult& r) {
  std::string out = "class,ap\n";
  for (const auto& [name, ap] : r.per_class_ap) {
    if (!ap) continue;
    out += name;
    out += ',';
    out += format_float6(*ap);
    out += '\n';
  }
  out += "mean,";
  out += format_float6(r.map_overall);
  out += '\n';
  return out;
}

// Predictions file: a JSON array of detection objects.
inline std::vector<Detection> load_predictions(const std::filesystem::path& path) {
  const ojson j = read_json_file(path);
  if (!j.is_array()) throw DataError("predictions file must be a JSON array");
  std::vector<Detection> out;
  for (const auto& dj : j) out.push_back(Detection::from_json(dj));
  return out;
}

}  // namespace affordkit
