#pragma once

// Helpers shared between the unit tests and the acceptance harness: a
// scratch-directory guard, an independent average-precision reference, and
// the synthetic detection corpus with exactly known per-class AP values.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#include <affordkit/domain.hpp>
#include <affordkit/eval.hpp>
#include <affordkit/rng.hpp>

namespace support {

// Creates a unique directory under the system temp root; removes it on
// destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("affordkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Reference AP, written independently of the library implementation: same
// canonical ordering and greedy best-overlap matching rule, but matching is
// recomputed with plain loops and the interpolated precision at each recall
// step is found by an O(n^2) scan instead of a running maximum.
inline double reference_average_precision(std::vector<affordkit::Detection> preds,
                                          const affordkit::GroundTruthBoxes& gt,
                                          double iou_threshold) {
  std::size_t total_gt = 0;
  for (const auto& [id, boxes] : gt) total_gt += boxes.size();
  if (total_gt == 0) throw affordkit::NoGroundTruth("reference: no ground truth");

  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = i + 1; j < preds.size(); ++j) {
      const auto& a = preds[i];
      const auto& b = preds[j];
      const bool swap =
          (b.confidence > a.confidence) ||
          (b.confidence == a.confidence && b.image_id < a.image_id) ||
          (b.confidence == a.confidence && b.image_id == a.image_id &&
           std::tie(b.box.x1, b.box.y1, b.box.x2, b.box.y2) <
               std::tie(a.box.x1, a.box.y1, a.box.x2, a.box.y2));
      if (swap) std::swap(preds[i], preds[j]);
    }
  }

  std::map<std::string, std::vector<int>> used;
  for (const auto& [id, boxes] : gt) used[id] = std::vector<int>(boxes.size(), 0);

  std::vector<int> is_tp(preds.size(), 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto it = gt.find(preds[i].image_id);
    if (it == gt.end()) continue;
    long best = -1;
    double best_v = -1.0;
    for (std::size_t g = 0; g < it->second.size(); ++g) {
      if (used[preds[i].image_id][g]) continue;
      const double v = affordkit::iou(preds[i].box, it->second[g]);
      if (v > best_v) {
        best_v = v;
        best = static_cast<long>(g);
      }
    }
    if (best >= 0 && best_v >= iou_threshold) {
      used[preds[i].image_id][static_cast<std::size_t>(best)] = 1;
      is_tp[i] = 1;
    }
  }

  std::vector<double> prec(preds.size()), rec(preds.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    tp += static_cast<std::size_t>(is_tp[i]);
    prec[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    rec[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }

  double ap = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double r_lo = i == 0 ? 0.0 : rec[i - 1];
    if (rec[i] <= r_lo) continue;
    double p_max = 0.0;
    for (std::size_t j = i; j < preds.size(); ++j) p_max = std::max(p_max, prec[j]);
    ap += (rec[i] - r_lo) * p_max;
  }
  return ap;
}

// Random AP problem instance: a handful of ground-truth boxes across up to
// three images and up to eight predictions with arbitrary overlap, including
// deliberate confidence ties.
struct ApInstance {
  std::vector<affordkit::Detection> preds;
  affordkit::GroundTruthBoxes gt;
};

inline ApInstance random_ap_instance(std::uint64_t seed) {
  affordkit::Rng rng(seed);
  const char* images[] = {"a", "b", "c"};
  ApInstance inst;

  const int n_gt = 1 + static_cast<int>(rng.next_u64() % 5);
  for (int i = 0; i < n_gt; ++i) {
    const std::string img = images[rng.next_u64() % 3];
    const double x = rng.uniform(0.0, 80.0);
    const double y = rng.uniform(0.0, 80.0);
    inst.gt[img].push_back(
        affordkit::BBox::make(x, y, x + rng.uniform(5.0, 20.0), y + rng.uniform(5.0, 20.0)));
  }

  const int n_det = static_cast<int>(rng.next_u64() % 9);
  for (int i = 0; i < n_det; ++i) {
    affordkit::Detection d;
    d.image_id = images[rng.next_u64() % 3];
    const double x = rng.uniform(0.0, 80.0);
    const double y = rng.uniform(0.0, 80.0);
    d.box = affordkit::BBox::make(x, y, x + rng.uniform(5.0, 20.0), y + rng.uniform(5.0, 20.0));
    // quantized so exact ties happen often
    d.confidence = static_cast<double>(rng.next_u64() % 5) / 4.0;
    d.object = affordkit::ObjectClass{"box"};
    inst.preds.push_back(std::move(d));
  }
  return inst;
}

// 100 images, one ground-truth box per class in each; class k receives
// true_positives[k] perfect detections and nothing else, so its AP is
// exactly true_positives[k] / 100.
struct ApCorpus {
  affordkit::ImageManifest manifest;
  std::vector<affordkit::Detection> preds;
};

inline ApCorpus exact_ap_corpus(const std::vector<int>& true_positives) {
  using namespace affordkit;
  const std::vector<std::pair<std::string, std::string>> classes = {
      {"plastic", "box"},  {"metal", "box"},  {"wood", "box"},  {"glass", "box"},
      {"paper", "box"},    {"plastic", "bowl"}, {"metal", "bowl"}, {"wood", "bowl"},
      {"glass", "bowl"},   {"paper", "bowl"}, {"plastic", "cup"}};
  if (true_positives.size() != classes.size())
    throw DataError("exact_ap_corpus needs one count per class");

  ApCorpus corpus;
  for (int i = 0; i < 100; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "im%03d", i);
    ImageEntry e;
    e.image_id = id;
    e.uri = std::string("images/") + id + ".png";
    e.width_px = 640;
    e.height_px = 480;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      Annotation a;
      a.object = ObjectClass{classes[c].second};
      a.properties = {{"material", classes[c].first}};
      a.box = BBox::make(10.0 + 30.0 * static_cast<double>(c), 10.0,
                         30.0 + 30.0 * static_cast<double>(c), 40.0);
      e.annotations.push_back(std::move(a));
    }
    corpus.manifest.entries.push_back(std::move(e));
  }

  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int i = 0; i < true_positives[c]; ++i) {
      Detection d;
      d.image_id = corpus.manifest.entries[static_cast<std::size_t>(i)].image_id;
      d.box = BBox::make(10.0 + 30.0 * static_cast<double>(c), 10.0,
                         30.0 + 30.0 * static_cast<double>(c), 40.0);
      d.confidence = 0.9;
      d.object = ObjectClass{classes[c].second};
      d.property = std::pair<std::string, std::string>{"material", classes[c].first};
      corpus.preds.push_back(std::move(d));
    }
  }
  return corpus;
}

}  // namespace support
