#pragma once

// Distractor-scaling experiment: how far down the ranked detection list the
// intended object falls as look-alike objects are added to the scene, and
// how much a property-qualified query ("paper box" instead of "box") helps.
//
// Trials are matched: the sampled distractor set for trial (n, t) depends
// only on the base seed, never on the query strategy or the confusion rate,
// so curves for different strategies and noise levels are directly
// comparable point by point.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/rng.hpp"
#include "affordkit/scripted.hpp"

namespace affordkit {

enum class QueryStrategy { ObjectOnly, PropertyAware };

inline const char* strategy_name(QueryStrategy s) {
  return s == QueryStrategy::ObjectOnly ? "object" : "property";
}

inline QueryStrategy strategy_from_name(std::string_view s) {
  if (s == "object") return QueryStrategy::ObjectOnly;
  if (s == "property") return QueryStrategy::PropertyAware;
  throw ConfigError("unknown strategy: " + std::string(s) + " (expected object|property)");
}

struct TrialSpec {
  QualifiedObject target;
  std::string target_image;
  std::vector<std::string> distractor_images;
  QueryStrategy strategy = QueryStrategy::PropertyAware;
  double threshold = 0.3;
};

struct TrialResult {
  std::size_t rank = 0;  // 1-based; detections.size()+1 when not found
  bool found = false;
};

// Queries the target image plus the sampled distractors, ranks everything
// by confidence (ties: image id, then phrase), and reports the position of
// the first detection overlapping the target's ground-truth box.
inline TrialResult run_trial(const DetectorBackend& detector, const ImageManifest& manifest,
                             const TrialSpec& spec) {
  const ImageEntry* target_entry = manifest.find(spec.target_image);
  if (!target_entry) throw UnknownImage("target image not in manifest: " + spec.target_image);

  const BBox* gt = nullptr;
  for (const auto& ann : target_entry->annotations) {
    if (ann.object != spec.target.object) continue;
    const auto v = ann.property(spec.target.property_dim);
    if (v && *v == spec.target.property_value) {
      gt = &ann.box;
      break;
    }
  }
  if (!gt)
    throw NoGroundTruth("target image has no annotation matching " + spec.target.phrase());

  const std::string phrase = spec.strategy == QueryStrategy::PropertyAware
                                 ? spec.target.phrase()
                                 : spec.target.object.name;

  std::vector<std::string> images = spec.distractor_images;
  images.push_back(spec.target_image);

  std::vector<Detection> all;
  for (const auto& id : images) {
    const ImageEntry* entry = manifest.find(id);
    if (!entry) throw UnknownImage("distractor image not in manifest: " + id);
    for (auto& d : detector.detect({id, entry->uri, phrase, spec.threshold}))
      all.push_back(std::move(d));
  }
  std::stable_sort(all.begin(), all.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return a.phrase() < b.phrase();
  });

  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].image_id == spec.target_image && iou(all[i].box, *gt) >= 0.5)
      return {i + 1, true};
  }
  return {all.size() + 1, false};
}

struct RankCurvePoint {
  QueryStrategy strategy;
  std::size_t n = 0;       // distractor count
  double mean_rank = 0.0;
  double stderr_rank = 0.0;
  std::size_t trials = 0;
};

struct TrialRecord {
  QueryStrategy strategy;
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t rank = 0;
  bool found = false;
};

struct RankExperimentResult {
  std::vector<RankCurvePoint> points;    // strategy-major, then n
  std::vector<TrialRecord> records;
};

struct RankExperimentSpec {
  QualifiedObject target;
  std::string target_image;
  std::vector<std::size_t> ns = {1, 2, 4, 8};
  std::size_t trials_per_n = 100;
  std::vector<QueryStrategy> strategies = {QueryStrategy::ObjectOnly,
                                           QueryStrategy::PropertyAware};
  NoiseModel noise;
  double threshold = 0.3;
};

// Images eligible as distractors: everything that shows the same object
// class with a different property value and never the exact target pair.
inline std::vector<std::string> distractor_pool(const ImageManifest& manifest,
                                                const QualifiedObject& target,
                                                const std::string& target_image) {
  std::vector<std::string> pool;
  for (const auto& entry : manifest.entries) {
    if (entry.image_id == target_image) continue;
    bool has_other = false, has_exact = false;
    for (const auto& ann : entry.annotations) {
      if (ann.object != target.object) continue;
      const auto v = ann.property(target.property_dim);
      if (v && *v == target.property_value)
        has_exact = true;
      else
        has_other = true;
    }
    if (has_other && !has_exact) pool.push_back(entry.image_id);
  }
  return pool;
}

inline RankExperimentResult run_rank_experiment(const ImageManifest& manifest,
                                                const PropertyCatalog& catalog,
                                                const RankExperimentSpec& spec) {
  if (spec.trials_per_n == 0) throw ConfigError("trials_per_n must be positive");
  if (spec.ns.empty()) throw ConfigError("at least one distractor count is required");
  if (spec.strategies.empty()) throw ConfigError("at least one strategy is required");
  spec.noise.validate();

  const ScriptedDetector detector(manifest, catalog, spec.noise);
  const auto pool = distractor_pool(manifest, spec.target, spec.target_image);
  for (std::size_t n : spec.ns) {
    if (n > pool.size())
      throw InsufficientDistractors("need " + std::to_string(n) + " distractors, pool has " +
                                    std::to_string(pool.size()));
  }

  RankExperimentResult result;
  for (QueryStrategy strategy : spec.strategies) {
    for (std::size_t n : spec.ns) {
      std::vector<double> ranks;
      ranks.reserve(spec.trials_per_n);
      for (std::size_t t = 0; t < spec.trials_per_n; ++t) {
        // The sample stream is keyed only by (seed, n, trial), so both
        // strategies and any noise sweep sharing the seed see the same
        // distractor subsets.
        Rng sample_rng(derive_seed(spec.noise.seed, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(t), std::string_view("sample")));
        std::vector<std::string> chosen = pool;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t j =
              i + static_cast<std::size_t>(sample_rng.next_u64() % (chosen.size() - i));
          std::swap(chosen[i], chosen[j]);
        }
        chosen.resize(n);

        TrialSpec trial{spec.target, spec.target_image, std::move(chosen), strategy,
                        spec.threshold};
        const TrialResult r = run_trial(detector, manifest, trial);
        ranks.push_back(static_cast<double>(r.rank));
        result.records.push_back({strategy, n, t, r.rank, r.found});
      }

      double mean = 0.0;
      for (double r : ranks) mean += r;
      mean /= static_cast<double>(ranks.size());
      double var = 0.0;
      for (double r : ranks) var += (r - mean) * (r - mean);
      const double stderr_rank =
          ranks.size() > 1
              ? std::sqrt(var / static_cast<double>(ranks.size() - 1)) /
                    std::sqrt(static_cast<double>(ranks.size()))
              : 0.0;
      result.points.push_back({strategy, n, mean, stderr_rank, ranks.size()});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string rank_curve_csv(const std::vector<RankCurvePoint>& points) {
  std::string out = "strategy,n,mean_rank,stderr,trials\n";
  for (const auto& p : points) {
    out += strategy_name(p.strategy);
    out += ',';
    out += std::to_string(p.n);
    out += ',';
    out += format_float6(p.mean_rank);
    out += ',';
    out += format_float6(p.stderr_rank);
    out += ',';
    out += std::to_string(p.trials);
    out += '\n';
  }
  return out;
}

inline std::string trial_records_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    ojson j;
    j["strategy"] = strategy_name(r.strategy);
    j["n"] = r.n;
    j["trial"] = r.trial;
    j["rank"] = r.rank;
    j["found"] = r.found;
    out += dump_fixed_compact(j);
    out += '\n';
  }
  return out;
}

}  // namespace affordkit
