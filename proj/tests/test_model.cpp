#include <gtest/gtest.h>

#include "kgsmith/text.hpp"
#include "test_util.hpp"

using namespace kgsmith;

namespace {

OntologyDef minimal() {
  OntologyDef d;
  d.name = "mini";
  d.topic_type = "disease";
  d.other_types = {"symptom"};
  d.relations = {{"has_symptom", "disease", "symptom", {}}};
  return d;
}

} // namespace

TEST(ValidateOntology, MinimalIsWellFormed) {
  EXPECT_TRUE(validate_ontology(minimal()).ok());
}

TEST(ValidateOntology, RelationMustStartAtTopic) {
  auto d = minimal();
  d.other_types.push_back("drug");
  d.relations.push_back({"treated_by", "symptom", "drug", {}});
  const auto r = validate_ontology(d);
  ASSERT_TRUE(r.has("relation_source_not_topic"));
  EXPECT_NE(r.summary().find("relation source must be topic type"), std::string::npos);
}

TEST(ValidateOntology, DuplicateRelationName) {
  auto d = minimal();
  d.relations.push_back(d.relations.front());
  const auto r = validate_ontology(d);
  ASSERT_TRUE(r.has("duplicate_relation"));
  EXPECT_NE(r.summary().find("duplicate relation name"), std::string::npos);
}

TEST(ValidateOntology, ReportsEveryViolation) {
  OntologyDef d;
  d.topic_type = "disease";
  d.other_types = {"disease", "symptom", "symptom"};
  d.relations = {{"r", "disease", "nowhere", {}}, {"", "disease", "symptom", {}}};
  d.attributes = {{"desc", "ghost"}, {"has", "disease"}, {"has", "disease"}};
  const auto r = validate_ontology(d);
  for (const char* code : {"empty_name", "topic_in_other_types", "duplicate_type", "unknown_endpoint",
                           "empty_relation_name", "unknown_attribute_owner", "duplicate_attribute"}) {
    EXPECT_TRUE(r.has(code)) << code;
  }
}

TEST(ValidateOntology, DeterministicAndPure) {
  auto d = minimal();
  d.relations.push_back(d.relations.front());
  EXPECT_EQ(validate_ontology(d), validate_ontology(d));
}

TEST(ValidateOntology, FixtureOntologiesAreWellFormed) {
  EXPECT_TRUE(validate_ontology(testutil::medical_ontology()).ok());
  EXPECT_TRUE(validate_ontology(testutil::dialogue_ontology()).ok());
}

TEST(ValidateEntry, KnownKeysOnly) {
  auto d = minimal();
  d.attributes = {{"desc", "disease"}};
  DataEntry e{"insomnia", {{"has_symptom", {"headache"}}}, {{"desc", "sleep disorder"}}};
  EXPECT_TRUE(validate_entry(d, e).ok());
}

TEST(ValidateEntry, UnknownAttributeIsNamed) {
  DataEntry e{"insomnia", {}, {{"weight", "70"}}};
  const auto r = validate_entry(minimal(), e);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.summary().find("weight"), std::string::npos);
}

TEST(ValidateEntry, EmptyMemberListIsAllowed) {
  DataEntry e{"insomnia", {{"has_symptom", {}}}, {}};
  EXPECT_TRUE(validate_entry(minimal(), e).ok());
}

TEST(ValidateEntry, EmptyTopicAndUnknownRelation) {
  DataEntry e{"  ", {{"causes", {"x"}}}, {}};
  const auto r = validate_entry(minimal(), e);
  EXPECT_TRUE(r.has("empty_topic_value"));
  EXPECT_TRUE(r.has("unknown_relation_key"));
}

TEST(OntologyJson, RoundTrip) {
  const auto def = testutil::medical_ontology();
  EXPECT_EQ(ontology_from_json(to_json(def)), def);
  EXPECT_EQ(def.topic_type, "disease");
  EXPECT_EQ(def.all_types().size(), 8u);
}

TEST(OntologyJson, MissingTopicTypeIsInvalid) {
  auto j = nlohmann::json::parse(testutil::medical_ontology_text());
  j.erase("topicType");
  EXPECT_EQ(testutil::error_code_of([&] { ontology_from_json(j); }), ErrorCode::InvalidOntology);
}

TEST(Text, NormalizeTrimsAndComposes) {
  EXPECT_EQ(text::normalize_name("  hypertension \t"), "hypertension");
  // "e" + combining acute composes to U+00E9.
  EXPECT_EQ(text::normalize_name("caf\x65\xcc\x81"), "caf\xc3\xa9");
}

TEST(Text, CapitalizeFirst) {
  EXPECT_EQ(text::capitalize_first("hypertension can"), "Hypertension can");
  EXPECT_EQ(text::capitalize_first(""), "");
  EXPECT_EQ(text::capitalize_first("\xc3\xa9t\xc3\xa9"), "\xc3\x89t\xc3\xa9");
}

TEST(Text, TimestampShape) {
  const auto t = text::utc_timestamp_now();
  ASSERT_EQ(t.size(), 20u);
  EXPECT_EQ(t[4], '-');
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}
