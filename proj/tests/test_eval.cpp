#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <affordkit/eval.hpp>
#include <affordkit/fixtures.hpp>

#include "support.hpp"

using namespace affordkit;

namespace {

Detection det(const std::string& image, double conf, const BBox& box,
              const std::string& object = "box") {
  Detection d;
  d.image_id = image;
  d.confidence = conf;
  d.box = box;
  d.object = ObjectClass{object};
  return d;
}

const BBox kUnit = BBox::make(0, 0, 10, 10);
const BBox kFar = BBox::make(200, 200, 210, 210);

}  // namespace

TEST_CASE("a false positive above the hit halves the precision", "[eval]") {
  GroundTruthBoxes gt{{"a", {kUnit}}};
  const std::vector<Detection> preds = {det("a", 0.9, kFar), det("a", 0.8, kUnit)};
  CHECK(average_precision(preds, gt, 0.5) == Catch::Approx(0.5).margin(1e-12));

  // with the order reversed the curve reaches full precision first
  const std::vector<Detection> swapped = {det("a", 0.8, kFar), det("a", 0.9, kUnit)};
  CHECK(average_precision(swapped, gt, 0.5) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("duplicate hits on one box count as false positives", "[eval]") {
  GroundTruthBoxes gt{{"a", {kUnit, BBox::make(50, 50, 60, 60)}}};
  const std::vector<Detection> preds = {det("a", 0.9, kUnit), det("a", 0.8, kUnit)};
  CHECK(average_precision(preds, gt, 0.5) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("degenerate inputs score as expected", "[eval]") {
  GroundTruthBoxes gt{{"a", {kUnit}}};
  CHECK(average_precision({}, gt, 0.5) == 0.0);
  CHECK(average_precision({det("a", 0.9, kUnit)}, gt, 0.5) == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(average_precision({det("a", 0.9, kUnit)}, {}, 0.5), NoGroundTruth);
  // predictions in images without ground truth are plain false positives
  CHECK(average_precision({det("zz", 0.95, kUnit), det("a", 0.9, kUnit)}, gt, 0.5) ==
        Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("the overlap threshold separates hits from near misses", "[eval]") {
  // boxes overlap with IoU exactly 1/7
  const BBox gt_box = BBox::make(0, 0, 10, 10);
  const BBox shifted = BBox::make(5, 0, 15, 10);
  GroundTruthBoxes gt{{"a", {gt_box}}};
  const std::vector<Detection> preds = {det("a", 0.9, shifted)};
  CHECK(average_precision(preds, gt, 0.5) == 0.0);
  CHECK(average_precision(preds, gt, 0.1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("confidence ties break by image id", "[eval]") {
  GroundTruthBoxes gt{{"b", {kUnit}}};
  // same confidence: the image-a miss is ranked first, capping precision at
  // one half
  const std::vector<Detection> preds = {det("b", 0.9, kUnit), det("a", 0.9, kFar)};
  const double ap = average_precision(preds, gt, 0.5);
  CHECK(ap == Catch::Approx(0.5).margin(1e-12));
  CHECK(ap == Catch::Approx(support::reference_average_precision(preds, gt, 0.5)).margin(1e-12));
}

TEST_CASE("matching agrees with an independent reference across random instances", "[eval]") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto inst = support::random_ap_instance(seed);
    const double lib = average_precision(inst.preds, inst.gt, 0.5);
    const double ref = support::reference_average_precision(inst.preds, inst.gt, 0.5);
    if (std::abs(lib - ref) > 1e-9) {
      CAPTURE(seed);
      REQUIRE(lib == Catch::Approx(ref).margin(1e-9));
    }
  }
  SUCCEED();
}

TEST_CASE("evaluate partitions predictions and ground truth into classes", "[eval]") {
  ImageManifest manifest;
  {
    ImageEntry e;
    e.image_id = "img1";
    e.uri = "u1";
    e.width_px = 640;
    e.height_px = 480;
    Annotation plastic;
    plastic.object = ObjectClass{"box"};
    plastic.properties = {{"material", "plastic"}};
    plastic.box = BBox::make(0, 0, 10, 10);
    Annotation metal = plastic;
    metal.properties = {{"material", "metal"}};
    metal.box = BBox::make(50, 50, 60, 60);
    e.annotations = {plastic, metal};
    manifest.entries.push_back(e);
  }
  manifest.validate();

  std::vector<Detection> preds;
  Detection hit = det("img1", 0.9, BBox::make(0, 0, 10, 10));
  hit.property = std::pair<std::string, std::string>{"material", "plastic"};
  preds.push_back(hit);
  Detection stray = det("img1", 0.8, BBox::make(50, 50, 60, 60));
  stray.property = std::pair<std::string, std::string>{"material", "glass"};
  preds.push_back(stray);

  const EvalResult r = evaluate(preds, manifest, 0.5);
  REQUIRE(r.per_class_ap.size() == 3);
  CHECK(r.per_class_ap[0].first == "glass box");
  CHECK_FALSE(r.per_class_ap[0].second.has_value());  // no ground truth for it
  CHECK(r.per_class_ap[1].first == "metal box");
  CHECK(r.per_class_ap[1].second == 0.0);  // ground truth but no predictions
  CHECK(r.per_class_ap[2].first == "plastic box");
  CHECK(r.per_class_ap[2].second == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.undefined_classes() == std::vector<std::string>{"glass box"});
  // the mean skips undefined classes
  CHECK(r.map_overall == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("annotations without the class dimension score under the bare name", "[eval]") {
  ImageManifest manifest;
  ImageEntry e;
  e.image_id = "img1";
  e.uri = "u";
  e.width_px = 640;
  e.height_px = 480;
  Annotation a;
  a.object = ObjectClass{"box"};
  a.properties = {{"color", "red"}};  // no material
  a.box = BBox::make(0, 0, 10, 10);
  e.annotations = {a};
  manifest.entries.push_back(e);
  manifest.validate();

  const EvalResult r = evaluate({det("img1", 0.9, BBox::make(0, 0, 10, 10))}, manifest, 0.5);
  REQUIRE(r.per_class_ap.size() == 1);
  CHECK(r.per_class_ap[0].first == "box");
  CHECK(r.per_class_ap[0].second == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("evaluate validates thresholds and rejects all-undefined sets", "[eval]") {
  const auto manifest = fixtures::effect_objects_manifest();
  CHECK_THROWS_AS(evaluate({}, manifest, 0.0), ConfigError);
  CHECK_THROWS_AS(evaluate({}, manifest, 1.5), ConfigError);

  ImageManifest empty;
  CHECK_THROWS_AS(evaluate({det("img1", 0.9, kUnit)}, empty, 0.5), AllUndefined);
}

TEST_CASE("the synthetic corpus reproduces its designed per-class AP", "[eval]") {
  const std::vector<int> counts = {12, 44, 32, 56, 7, 10, 13, 21, 28, 43, 28};
  const auto corpus = support::exact_ap_corpus(counts);
  const EvalResult r = evaluate(corpus.preds, corpus.manifest, 0.5);
  REQUIRE(r.per_class_ap.size() == 11);

  double sum = 0.0;
  for (const auto& [name, ap] : r.per_class_ap) {
    REQUIRE(ap.has_value());
    sum += *ap;
  }
  // every class's AP is exactly its hit count over 100
  for (int c : counts) {
    const double expected = static_cast<double>(c) / 100.0;
    bool found = false;
    for (const auto& [name, ap] : r.per_class_ap)
      if (std::abs(*ap - expected) < 1e-12) found = true;
    CHECK(found);
  }
  CHECK(r.map_overall == Catch::Approx(sum / 11.0).margin(1e-12));
  CHECK(r.map_overall == Catch::Approx(294.0 / 1100.0).margin(1e-9));
}

TEST_CASE("result serializations carry classes, nulls, and the mean", "[eval]") {
  const auto corpus = support::exact_ap_corpus({50, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  auto preds = corpus.preds;
  Detection stray = det("im000", 0.7, BBox::make(400, 400, 410, 410), "lamp");
  preds.push_back(stray);

  const EvalResult r = evaluate(preds, corpus.manifest, 0.5);
  const ojson j = eval_to_json(r);
  CHECK(j.at("iou_threshold") == 0.5);
  CHECK(j.at("classes").at("plastic box").get<double>() == Catch::Approx(0.5).margin(1e-12));
  CHECK(j.at("classes").at("lamp").is_null());
  CHECK(j.at("undefined") == ojson::array({"lamp"}));

  const std::string csv = eval_to_csv(r);
  CHECK(csv.rfind("class,ap\n", 0) == 0);
  CHECK(csv.find("plastic box,0.500000\n") != std::string::npos);
  CHECK(csv.find("lamp") == std::string::npos);  // undefined classes are omitted
  CHECK(csv.find("mean,") != std::string::npos);
}

TEST_CASE("prediction files round-trip through load_predictions", "[eval]") {
  support::TempDir tmp("eval");
  const auto corpus = support::exact_ap_corpus({3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  ojson arr = ojson::array();
  for (const auto& d : corpus.preds) arr.push_back(d.to_json());
  const auto path = tmp.path() / "preds.json";
  write_file_atomic(path, dump_fixed(arr));

  const auto loaded = load_predictions(path);
  REQUIRE(loaded.size() == corpus.preds.size());
  CHECK(loaded == corpus.preds);

  write_file_atomic(path, "{}");
  CHECK_THROWS_AS(load_predictions(path), DataError);
  CHECK_THROWS_AS(load_predictions(tmp.path() / "missing.json"), DataError);
}
