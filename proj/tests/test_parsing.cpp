#include <catch2/catch_amalgamated.hpp>

#include <affordkit/fixtures.hpp>
#include <affordkit/parsing.hpp>
#include <affordkit/rng.hpp>

#include "support.hpp"

using namespace affordkit;

TEST_CASE("clear yes and no replies parse with evidence", "[parsing]") {
  CHECK(parse_verdict("Yes, the robot can stand on it.") ==
        Verdict{VerdictValue::Affirmative, "yes"});
  CHECK(parse_verdict("No, the robot cannot stand on it.") ==
        Verdict{VerdictValue::Negative, "no"});
  CHECK(parse_verdict("Certainly. It will hold.") ==
        Verdict{VerdictValue::Affirmative, "certainly"});
  CHECK(parse_verdict("The object is unable to support the robot.").value ==
        VerdictValue::Negative);
  CHECK(parse_verdict("Can't do it.").value == VerdictValue::Negative);
  CHECK(parse_verdict("It’s unsafe.").value == VerdictValue::Negative);
}

TEST_CASE("negation in the first sentence beats agreement", "[parsing]") {
  CHECK(parse_verdict("Yes, but it is not safe.").value == VerdictValue::Negative);
  CHECK(parse_verdict("It can hold you, though it cannot do so safely.").value ==
        VerdictValue::Negative);
  // negation in a later sentence does not retroactively flip a clear yes
  CHECK(parse_verdict("Yes. Though a wet one would not work.").value ==
        VerdictValue::Affirmative);
}

TEST_CASE("later sentences can carry the verdict", "[parsing]") {
  CHECK(parse_verdict("Hmm. Yes, definitely.").value == VerdictValue::Affirmative);
  CHECK(parse_verdict("Let me think. No.").value == VerdictValue::Negative);
}

TEST_CASE("hedged replies are ambiguous with empty evidence", "[parsing]") {
  const Verdict v = parse_verdict("I think it might work, depending on the surface.");
  CHECK(v.value == VerdictValue::Ambiguous);
  CHECK(v.evidence.empty());
  CHECK(parse_verdict("").value == VerdictValue::Ambiguous);
  // "can" mid-sentence is not treated as a verdict cue
  CHECK(parse_verdict("Whether it can hold depends on the build.").value ==
        VerdictValue::Ambiguous);
}

TEST_CASE("custom lexicons replace the defaults", "[parsing]") {
  Lexicons lx;
  lx.affirmative = {"affirmative"};
  lx.negative = {"negative"};
  CHECK(parse_verdict("Affirmative.", lx).value == VerdictValue::Affirmative);
  CHECK(parse_verdict("Yes.", lx).value == VerdictValue::Ambiguous);

  support::TempDir tmp("lexicons");
  const auto path = tmp.path() / "lexicons.json";
  write_file_atomic(path, dump_fixed(ojson{{"affirmative", {"roger"}}}));
  const Lexicons loaded = Lexicons::from_json_file(path);
  CHECK(parse_verdict("Roger.", loaded).value == VerdictValue::Affirmative);
  CHECK(parse_verdict("No.", loaded).value == VerdictValue::Negative);

  write_file_atomic(path, dump_fixed(ojson{{"maybe", {"x"}}}));
  CHECK_THROWS_AS(Lexicons::from_json_file(path), ConfigError);
}

TEST_CASE("numbered and bulleted lists parse in order", "[parsing]") {
  const auto objs = parse_object_list("1. Box - sturdy and flat\n2) buckets (plastic)\n"
                                      "- stool: wooden\n* bench, near the wall\n• ladders",
                                      10);
  REQUIRE(objs.size() == 5);
  CHECK(objs[0].name == "box");
  CHECK(objs[1].name == "bucket");
  CHECK(objs[2].name == "stool");
  CHECK(objs[3].name == "bench");
  CHECK(objs[4].name == "ladder");
}

TEST_CASE("prose replies fall back to the text after the last colon", "[parsing]") {
  const auto objs = parse_object_list("You could use: bowls, boxes, buckets", 10);
  REQUIRE(objs.size() == 3);
  CHECK(objs[0].name == "bowl");
  CHECK(objs[1].name == "box");
  CHECK(objs[2].name == "bucket");

  const auto pair = parse_object_list("Try a ladder and the stool.", 10);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].name == "ladder");
  CHECK(pair[1].name == "stool");
}

TEST_CASE("object lists de-duplicate and truncate", "[parsing]") {
  const auto objs = parse_object_list("1. box\n2. boxes\n3. crate\n4. bench", 2);
  REQUIRE(objs.size() == 2);
  CHECK(objs[0].name == "box");
  CHECK(objs[1].name == "crate");
}

TEST_CASE("replies naming no object raise NoObjectsFound", "[parsing]") {
  CHECK_THROWS_AS(parse_object_list("I cannot think of any suitable object.", 10),
                  NoObjectsFound);
  CHECK_THROWS_AS(parse_object_list("None.", 10), NoObjectsFound);
  CHECK_THROWS_AS(parse_object_list("", 10), NoObjectsFound);
}

TEST_CASE("relevant property subsets respect negation windows", "[parsing]") {
  const auto catalog = fixtures::default_catalog();
  CHECK(parse_property_subset("Material matters most; color is irrelevant.", catalog) ==
        std::vector<std::string>{"material"});
  CHECK(parse_property_subset("The material is relevant. The color is irrelevant.", catalog) ==
        std::vector<std::string>{"material"});
  CHECK(parse_property_subset("Both material and color matter here.", catalog) ==
        (std::vector<std::string>{"material", "color"}));
  // catalog order, not mention order
  CHECK(parse_property_subset("Color first, then material.", catalog) ==
        (std::vector<std::string>{"material", "color"}));
  // a second, non-negated mention keeps the dimension
  CHECK(parse_property_subset("Color is irrelevant. Still, color catches the eye.", catalog) ==
        std::vector<std::string>{"color"});
  // sentence boundary shields a mention from a nearby negation
  CHECK(parse_property_subset("It is not heavy. Material matters.", catalog) ==
        std::vector<std::string>{"material"});
}

TEST_CASE("subsets with nothing relevant raise EmptySelection", "[parsing]") {
  const auto catalog = fixtures::default_catalog();
  CHECK_THROWS_AS(parse_property_subset("None of the listed properties matter.", catalog),
                  EmptySelection);
  CHECK_THROWS_AS(parse_property_subset("The material is irrelevant and the color is "
                                        "unimportant.",
                                        catalog),
                  EmptySelection);
  CHECK_THROWS_AS(parse_property_subset("", catalog), EmptySelection);
}

TEST_CASE("fuzzed input never crashes the parsers", "[parsing]") {
  const auto catalog = fixtures::default_catalog();
  Rng rng(20240811);
  const std::string pieces[] = {"yes",  "no",    "not",   "1.",  "-",   ":",  ",",
                                "box",  "boxes", "maybe", "\n",  "\t",  "!",  "?",
                                "’", "•", "material", "color", "irrelevant", " "};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng.next_u64() % 14);
    for (int k = 0; k < len; ++k) {
      s += pieces[rng.next_u64() % std::size(pieces)];
      s += ' ';
    }
    const Verdict v = parse_verdict(s);
    CHECK((v.value == VerdictValue::Ambiguous) == v.evidence.empty());
    try {
      const auto objs = parse_object_list(s, 5);
      CHECK(!objs.empty());
      CHECK(objs.size() <= 5);
      for (const auto& o : objs) CHECK(o.name == canonicalize_label(o.name));
    } catch (const NoObjectsFound&) {
    }
    try {
      const auto dims = parse_property_subset(s, catalog);
      CHECK(!dims.empty());
      for (const auto& d : dims) CHECK(catalog.find(d) != nullptr);
    } catch (const EmptySelection&) {
    }
  }
}
