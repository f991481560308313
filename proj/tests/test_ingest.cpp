#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "kgsmith/cypher.hpp"
#include "test_util.hpp"

using namespace kgsmith;
using testutil::error_code_of;

namespace {

// Fig. 3 shape: topic e with R_1 -> {e11, e12}, R_2 -> {e21}, attributes A_1, A_2.
OntologyDef two_relation_ontology() {
  OntologyDef d;
  d.name = "tworel";
  d.topic_type = "topic";
  d.other_types = {"type1", "type2"};
  d.relations = {{"R_1", "topic", "type1", {}}, {"R_2", "topic", "type2", {}}};
  d.attributes = {{"A_1", "topic"}, {"A_2", "topic"}};
  return d;
}

const char* two_relation_data = R"([{"topic":"e","R_1":["e11","e12"],"R_2":["e21"],"A_1":"a1","A_2":"a2"}])";

} // namespace

TEST(ParseDataFile, SingleRecord) {
  const auto entries =
      parse_data_file(R"([{"disease":"insomnia","has_symptom":["headache"],"desc":"sleep disorder"}])", "disease");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].topic_value, "insomnia");
  EXPECT_EQ(entries[0].relation_values.size(), 1u);
  EXPECT_EQ(entries[0].attribute_values.size(), 1u);
  EXPECT_EQ(entries[0].attribute_values.at("desc"), "sleep disorder");
}

TEST(ParseDataFile, EmptyAndMalformed) {
  EXPECT_EQ(error_code_of([] { parse_data_file("[]", "d"); }), ErrorCode::EmptyFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("  \n", "d"); }), ErrorCode::EmptyFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("{\"d\":\"x\"}", "d"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("[1]", "d"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("[{\"d\":\"x\",\"r\":[1]}]", "d"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("[{\"d\":\"x\",\"a\":{}}]", "d"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("[{\"d\":", "d"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(error_code_of([] { parse_data_file("[{\"d\":\"\xff\"}]", "d"); }), ErrorCode::MalformedFile);
}

TEST(ParseDataFile, ScalarsKeepJsonSpelling) {
  const auto e = parse_data_file(R"([{"d":"x","n":12,"b":true,"z":null}])", "d");
  EXPECT_EQ(e[0].attribute_values.at("n"), "12");
  EXPECT_EQ(e[0].attribute_values.at("b"), "true");
  EXPECT_FALSE(e[0].attribute_values.contains("z"));
}

TEST(ParseDataFile, FixtureCountAndOrder) {
  const std::string bytes = testutil::medical_records();
  const auto entries = parse_data_file(bytes, "disease");
  EXPECT_EQ(entries.size(), oracle::count_record_lines(bytes));
  EXPECT_EQ(entries.size(), 50u);
  const auto raw = nlohmann::json::parse(bytes);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(entries[i].topic_value, raw[i]["disease"].get<std::string>());
  }
}

TEST(Bind, TwoRelationMapping) {
  const auto def = two_relation_ontology();
  const auto plan = bind_entries(def, parse_data_file(two_relation_data, "topic"));
  EXPECT_EQ(plan.entity_list.at("topic").size(), 1u);
  EXPECT_EQ(plan.entity_list.at("type1").size(), 2u);
  EXPECT_EQ(plan.entity_list.at("type2").size(), 1u);
  EXPECT_EQ(plan.relation_list.at("R_1").size(), 2u);
  EXPECT_EQ(plan.relation_list.at("R_2").size(), 1u);
  EXPECT_EQ(plan.topic_attributes.at("e").size(), 2u);
  EXPECT_EQ(plan.node_list.at("topic").attr_keys, (std::vector<std::string>{"A_1", "A_2"}));
  EXPECT_EQ(plan.line_list.at("R_1").to, "type1");
}

TEST(Bind, DeduplicatesAcrossEntries) {
  const auto def = two_relation_ontology();
  const auto plan = bind_entries(def, parse_data_file(
                                  R"([{"topic":"e","R_1":["x"]},{"topic":"f","R_1":["x"," x "]},{"topic":"e","R_1":["x"]}])",
                                  "topic"));
  EXPECT_EQ(plan.entity_list.at("type1"), std::vector<std::string>{"x"});
  EXPECT_EQ(plan.entity_list.at("topic"), (std::vector<std::string>{"e", "f"}));
  EXPECT_EQ(plan.relation_list.at("R_1").size(), 2u);
}

TEST(Bind, UnknownKey) {
  EXPECT_EQ(error_code_of([] { bind_entries(two_relation_ontology(), parse_data_file(R"([{"topic":"e","R_9":["x"]}])", "topic")); }),
            ErrorCode::UnknownKey);
  EXPECT_EQ(error_code_of([] { bind_entries(two_relation_ontology(), parse_data_file(R"([{"topic":"e","w":"1"}])", "topic")); }),
            ErrorCode::UnknownKey);
}

TEST(Bind, EmptyMemberNamesWarn) {
  const auto plan = bind_entries(two_relation_ontology(), parse_data_file(R"([{"topic":"e","R_1":["", "  "]}])", "topic"));
  EXPECT_TRUE(plan.entity_list.at("type1").empty());
  EXPECT_EQ(plan.warnings.size(), 2u);
}

TEST(Bind, FixtureMatchesEnumerationOracle) {
  const auto oracle_counts = oracle::enumerate_ingest(testutil::medical_ontology_text(), testutil::medical_records());
  const auto plan = bind_entries(testutil::medical_ontology(), parse_data_file(testutil::medical_records(), "disease"));
  for (const auto& [type, names] : oracle_counts.names_by_type) {
    const auto& got = plan.entity_list.at(type);
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), names) << type;
    EXPECT_EQ(got.size(), names.size()) << type;
  }
  EXPECT_EQ(plan.pair_count(), oracle_counts.triples.size());
  for (const auto& [rel, pairs] : plan.relation_list) {
    for (const auto& [a, b] : pairs) {
      EXPECT_TRUE(oracle_counts.triples.contains(std::make_tuple(a, rel, b)));
    }
  }
}

TEST(Bind, EntryKeysSurviveMapping) {
  // Every key of an accepted entry reappears in the plan's definition lists.
  const auto def = testutil::medical_ontology();
  for (const auto& entry : parse_data_file(testutil::medical_records(), "disease")) {
    ASSERT_TRUE(validate_entry(def, entry).ok());
    const auto plan = bind_entries(def, {entry});
    std::set<std::string> entry_keys;
    for (const auto& [k, v] : entry.relation_values) entry_keys.insert(k);
    for (const auto& [k, v] : entry.attribute_values) entry_keys.insert(k);
    std::set<std::string> plan_keys;
    for (const auto& [rel, pairs] : plan.relation_list) {
      if (!pairs.empty() || entry.relation_values.contains(rel)) plan_keys.insert(rel);
    }
    for (const auto& [k, v] : plan.topic_attributes.at(entry.topic_value)) plan_keys.insert(k);
    EXPECT_EQ(entry_keys, plan_keys);
  }
}

TEST(BuildNodes, TwoRelationCountsAndIdempotence) {
  GraphStore store;
  auto h = store.create_kg("tworel", two_relation_ontology());
  const auto plan = bind_entries(two_relation_ontology(), parse_data_file(two_relation_data, "topic"));
  const auto first = build_nodes(plan, h);
  EXPECT_EQ(first.created, 4u);
  EXPECT_EQ(build_nodes(plan, h).created, 0u);
  const Node* e = h.snapshot()->find_node("topic", "e");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->props.at("A_1"), "a1");
  // Topic nodes come first.
  EXPECT_EQ(e->id, 1u);

  MappedPlan empty;
  EXPECT_EQ(build_nodes(empty, h).created, 0u);
}

TEST(BuildEdges, TwoRelationCountsIdempotenceAndDangling) {
  GraphStore store;
  auto h = store.create_kg("tworel", two_relation_ontology());
  const auto plan = bind_entries(two_relation_ontology(), parse_data_file(two_relation_data, "topic"));
  build_nodes(plan, h);
  EXPECT_EQ(build_edges(plan, h).created, 3u);
  EXPECT_EQ(build_edges(plan, h).created, 0u);

  const NodeId e21 = h.snapshot()->find_node("type2", "e21")->id;
  h.delete_node(e21);
  EXPECT_EQ(error_code_of([&] { build_edges(plan, h); }), ErrorCode::DanglingEndpoint);
}

TEST(BuildNodes, AttributeConflictKeepsFirst) {
  GraphStore store;
  auto h = store.create_kg("tworel", two_relation_ontology());
  const auto s = ingest_file(h, R"([{"topic":"e","A_1":"first"},{"topic":"e","A_1":"second","A_2":"x"}])");
  EXPECT_EQ(s.nodes_created, 1u);
  EXPECT_EQ(s.warnings.size(), 1u);
  const Node* e = h.snapshot()->find_node("topic", "e");
  EXPECT_EQ(e->props.at("A_1"), "first");
  EXPECT_EQ(e->props.at("A_2"), "x");

  const auto again = ingest_file(h, R"([{"topic":"e","A_1":"third"}])");
  EXPECT_EQ(again.nodes_created, 0u);
  EXPECT_EQ(again.warnings.size(), 1u);
  EXPECT_EQ(h.snapshot()->find_node("topic", "e")->props.at("A_1"), "first");
}

TEST(IngestFile, FixtureCountsEqualOracle) {
  const auto expected = oracle::enumerate_ingest(testutil::medical_ontology_text(), testutil::medical_records());
  GraphStore store;
  auto h = store.create_kg("medical", testutil::medical_ontology());
  const auto s = ingest_file(h, testutil::medical_records());
  EXPECT_EQ(s.records, expected.records);
  EXPECT_EQ(s.nodes_created, expected.node_count());
  EXPECT_EQ(s.edges_created, expected.triples.size());
  EXPECT_EQ(h.snapshot()->node_count(), expected.node_count());
  EXPECT_EQ(h.snapshot()->edge_count(), expected.triples.size());

  const auto again = ingest_file(h, testutil::medical_records());
  EXPECT_EQ(again.nodes_created, 0u);
  EXPECT_EQ(again.edges_created, 0u);
  EXPECT_EQ(again.nodes_skipped, expected.node_count());
  EXPECT_EQ(again.edges_skipped, expected.triples.size());
}

TEST(IngestFile, OntologyOverloadChecksRegistration) {
  GraphStore store;
  store.create_kg("medical", testutil::medical_ontology());
  const auto s = ingest_file(testutil::medical_ontology(), testutil::medical_records(), "medical", store);
  EXPECT_GT(s.nodes_created, 0u);
  EXPECT_EQ(error_code_of([&] { ingest_file(two_relation_ontology(), two_relation_data, "medical", store); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([&] { ingest_file(two_relation_ontology(), two_relation_data, "nope", store); }), ErrorCode::UnknownKg);
}

TEST(IngestFile, SchemaViolationLeavesStoreUntouched) {
  GraphStore store;
  auto h = testutil::load_medical(store);
  const std::string before = h.export_cypher();
  const auto snapshot_before = h.snapshot();
  const std::string bad = R"([{"disease":"newdisease","has_symptom":["newsymptom"]},{"disease":"x","weight":"70"}])";
  EXPECT_EQ(error_code_of([&] { ingest_file(h, bad); }), ErrorCode::SchemaViolation);
  EXPECT_EQ(error_code_of([&] { ingest_file(h, R"([{"disease":""}])"); }), ErrorCode::SchemaViolation);
  EXPECT_EQ(error_code_of([&] { ingest_file(h, "[oops"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(h.export_cypher(), before);
  EXPECT_EQ(h.snapshot(), snapshot_before);
}

TEST(IngestFile, OrderIndependence) {
  auto records = nlohmann::json::parse(testutil::medical_records());
  GraphStore store;
  auto a = store.create_kg("a", testutil::medical_ontology());
  ingest_file(a, records.dump());
  std::mt19937 rng(42);
  for (int round = 0; round < 3; ++round) {
    std::shuffle(records.begin(), records.end(), rng);
    auto b = store.create_kg("b" + std::to_string(round), testutil::medical_ontology());
    ingest_file(b, records.dump());
    EXPECT_EQ(a.export_cypher(), b.export_cypher());
  }
}

TEST(IngestFile, SummaryJson) {
  IngestSummary s;
  s.nodes_created = 3;
  s.warnings = {"w"};
  const auto j = to_json(s);
  EXPECT_EQ(j["nodesCreated"], 3);
  EXPECT_EQ(j["edgesCreated"], 0);
  EXPECT_EQ(j["warnings"].size(), 1u);
}
