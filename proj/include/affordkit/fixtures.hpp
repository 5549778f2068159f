#pragma once

// Canned knowledge bases, manifests, and robot specs used by the scripted
// backends, the test suite, and the bundled data files. Everything here is
// a plain value; nothing reads the filesystem.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "affordkit/domain.hpp"
#include "affordkit/scripted.hpp"

namespace affordkit::fixtures {

inline PropertyCatalog default_catalog() {
  PropertyCatalog c;
  c.dimensions.push_back({"material", {"plastic", "metal", "wood", "glass", "paper"}});
  c.dimensions.push_back({"color", {"red", "green", "blue", "black", "white", "brown", "gray"}});
  c.validate();
  return c;
}

inline RobotSpec large_quadruped() {
  RobotSpec r;
  r.robot_type = "quadruped";
  r.mass_kg = 50.0;
  r.height_cm = 50.0;
  return r;
}

inline RobotSpec small_wheeled() {
  RobotSpec r;
  r.robot_type = "wheeled";
  r.mass_kg = 5.0;
  r.height_cm = 25.0;
  return r;
}

inline Requirements contain_liquids() {
  return {"carry liquids in", "contain liquids", {}};
}

inline Requirements contain_groceries() {
  return {"carry groceries in", "contain groceries", {}};
}

inline Requirements stand_on_height() {
  return {"stand on", "increase the robot's height", {"safe", "reliable"}};
}

inline Requirements stand_on_float() {
  return {"stand on", "float on water", {}};
}

inline Requirements place_small_object() {
  return {"place a small object on", "support a small object", {}};
}

namespace detail {

inline void add_feasibility_matrix(AffordanceKB& kb, const std::string& action,
                                   const std::vector<std::string>& objects,
                                   const PropertyCatalog& catalog,
                                   const std::map<std::pair<RobotSize, std::string>,
                                                  std::vector<std::string>>& yes_values) {
  for (RobotSize size : {RobotSize::Small, RobotSize::Large}) {
    for (const auto& obj : objects) {
      const auto it = yes_values.find({size, obj});
      for (const auto& dim : catalog.dimensions) {
        for (const auto& value : dim.values) {
          bool yes = false;
          if (it != yes_values.end())
            yes = std::find(it->second.begin(), it->second.end(), value) != it->second.end();
          kb.feasibility_table[{size, action, obj, value}] = yes;
        }
      }
    }
  }
}

}  // namespace detail

// Object knowledge keyed purely on the desired effect: what can serve as a
// container, what can be stood on. Feasibility in this table depends only
// on the object's material being plastic, for either robot, which gives
// replay tests a flat, easily auditable rule.
inline AffordanceKB effect_objects_kb() {
  const auto catalog = default_catalog();
  AffordanceKB kb;
  kb.object_table[{"carry liquids in", "contain liquids"}] = {
      "bowl", "box", "bucket", "blender", "can", "carton",
      "cup",  "jar", "kettle", "mug",     "tray", "vase"};
  kb.object_table[{"carry groceries in", "contain groceries"}] = {
      "bowl", "box", "bucket", "bag", "belt", "bench", "basket"};
  kb.object_table[{"stand on", "increase the robot's height"}] = {
      "box", "bucket", "bench", "bottle", "ladder", "stool", "book", "basket"};
  kb.object_table[{"stand on", "float on water"}] = {"basket"};

  for (const auto& [key, objects] : kb.object_table) {
    std::vector<std::string> uniq;
    for (const auto& o : objects)
      if (std::find(uniq.begin(), uniq.end(), o) == uniq.end()) uniq.push_back(o);
    std::map<std::pair<RobotSize, std::string>, std::vector<std::string>> yes;
    for (RobotSize size : {RobotSize::Small, RobotSize::Large})
      for (const auto& o : uniq) yes[{size, o}] = {"plastic"};
    detail::add_feasibility_matrix(kb, key.first, uniq, catalog, yes);
    kb.relevance_table[key.first] = {"material"};
  }
  return kb;
}

// Embodiment-dependent knowledge: per-robot-size material sets for standing
// on an object, plus a size-independent column for placing a small object.
inline AffordanceKB embodiment_kb() {
  const auto catalog = default_catalog();
  const std::vector<std::string> objects = {"basket", "bench", "box", "book", "ladder", "stool"};
  AffordanceKB kb;
  kb.object_table[{"stand on", "increase the robot's height"}] = objects;
  kb.object_table[{"place a small object on", "support a small object"}] = objects;
  kb.relevance_table["stand on"] = {"material"};
  kb.relevance_table["place a small object on"] = {"material"};

  std::map<std::pair<RobotSize, std::string>, std::vector<std::string>> stand_yes;
  stand_yes[{RobotSize::Small, "basket"}] = {"plastic", "metal"};
  stand_yes[{RobotSize::Small, "bench"}] = {"plastic", "metal"};
  stand_yes[{RobotSize::Small, "box"}] = {"plastic"};
  stand_yes[{RobotSize::Small, "book"}] = {"plastic", "paper"};
  stand_yes[{RobotSize::Small, "ladder"}] = {"plastic", "metal"};
  stand_yes[{RobotSize::Small, "stool"}] = {"plastic", "metal", "wood"};
  stand_yes[{RobotSize::Large, "basket"}] = {"plastic", "metal"};
  stand_yes[{RobotSize::Large, "bench"}] = {"plastic", "metal"};
  stand_yes[{RobotSize::Large, "box"}] = {"plastic"};
  stand_yes[{RobotSize::Large, "book"}] = {};
  stand_yes[{RobotSize::Large, "ladder"}] = {"plastic", "metal"};
  stand_yes[{RobotSize::Large, "stool"}] = {"plastic", "metal"};
  detail::add_feasibility_matrix(kb, "stand on", objects, catalog, stand_yes);

  std::map<std::pair<RobotSize, std::string>, std::vector<std::string>> place_yes;
  for (RobotSize size : {RobotSize::Small, RobotSize::Large}) {
    place_yes[{size, "basket"}] = {"plastic", "metal"};
    place_yes[{size, "bench"}] = {"plastic", "metal", "wood", "glass"};
    place_yes[{size, "box"}] = {"plastic", "metal", "wood", "paper"};
    place_yes[{size, "book"}] = {};
    place_yes[{size, "ladder"}] = {};
    place_yes[{size, "stool"}] = {"plastic", "metal", "wood", "paper"};
  }
  detail::add_feasibility_matrix(kb, "place a small object on", objects, catalog, place_yes);
  return kb;
}

// Effect knowledge with embodiment-specific entries layered on top; the
// default for interactive runs.
inline AffordanceKB default_kb() {
  return effect_objects_kb().merged_with(embodiment_kb());
}

namespace detail {

inline ImageEntry one_object_image(const std::string& image_id, const std::string& object,
                                   const std::string& material) {
  ImageEntry e;
  e.image_id = image_id;
  e.uri = "images/" + image_id + ".png";
  e.width_px = 640;
  e.height_px = 480;
  Annotation a;
  a.object = ObjectClass{object};
  a.properties = {{"material", material}, {"color", "gray"}};
  a.box = BBox::make(100, 100, 300, 300);
  e.annotations.push_back(std::move(a));
  return e;
}

}  // namespace detail

// One plastic instance of every object the effect tables mention.
inline ImageManifest effect_objects_manifest() {
  const std::vector<std::string> objects = {
      "bowl", "box",  "bucket", "blender", "can",  "carton", "cup",
      "jar",  "kettle", "mug",  "tray",    "vase", "bag",    "belt",
      "bench", "basket", "bottle", "ladder", "stool", "book"};
  ImageManifest m;
  for (const auto& obj : objects)
    m.entries.push_back(detail::one_object_image("img_" + obj, obj, "plastic"));
  m.validate();
  return m;
}

// Every (object, material) combination from the embodiment tables.
inline ImageManifest embodiment_manifest() {
  const std::vector<std::string> objects = {"basket", "bench", "box", "book", "ladder", "stool"};
  const std::vector<std::string> materials = {"plastic", "metal", "wood", "glass", "paper"};
  ImageManifest m;
  for (const auto& obj : objects)
    for (const auto& mat : materials)
      m.entries.push_back(detail::one_object_image("img_" + obj + "_" + mat, obj, mat));
  m.validate();
  return m;
}

// A paper box in img013 surrounded by 24 single-box images of other
// materials, half with ids ordering below the target and half above, so an
// unqualified query's tie-broken rank centers on the middle of the pool.
inline ImageManifest distractor_manifest() {
  const std::vector<std::string> other = {"plastic", "metal", "wood", "glass"};
  ImageManifest m;
  int k = 0;
  for (int i = 1; i <= 25; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "img%03d", i);
    const std::string material = (i == 13) ? "paper" : other[k++ % other.size()];
    m.entries.push_back(detail::one_object_image(id, "box", material));
  }
  m.validate();
  return m;
}

inline QualifiedObject distractor_target() {
  return {ObjectClass{"box"}, "material", "paper"};
}

inline std::string distractor_target_image() { return "img013"; }

}  // namespace affordkit::fixtures
