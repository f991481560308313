#include <gtest/gtest.h>

#include "kgsmith/cypher.hpp"
#include "test_util.hpp"

using namespace kgsmith;

namespace {

// Compares a replayed script with the source graph by (type, name) identity.
void expect_isomorphic(const Graph& g, const oracle::ReplayGraph& r) {
  ASSERT_EQ(r.nodes.size(), g.node_count());
  ASSERT_EQ(r.edges.size(), g.edge_count());
  for (const auto& [id, n] : g.nodes()) {
    auto it = r.nodes.find({n.entity_type, n.name});
    ASSERT_NE(it, r.nodes.end()) << n.name;
    EXPECT_EQ(it->second, n.props);
  }
  for (const auto& [id, e] : g.edges()) {
    const Node* a = g.node(e.from_id);
    const Node* b = g.node(e.to_id);
    auto it = r.edges.find({a->entity_type, a->name, e.rel_type, b->entity_type, b->name});
    ASSERT_NE(it, r.edges.end());
    EXPECT_EQ(it->second, e.props);
  }
}

} // namespace

TEST(Cypher, SingleNodeFormat) {
  Graph g;
  g.add_node("disease", "insomnia", {{"desc", "sleep disorder"}});
  EXPECT_EQ(export_cypher(g), "MERGE (:disease {name: \"insomnia\", desc: \"sleep disorder\"});\n");
}

TEST(Cypher, EmptyGraph) {
  EXPECT_EQ(export_cypher(Graph{}), "");
}

TEST(Cypher, EdgeFormatAndOrder) {
  Graph g;
  const auto d = g.add_node("disease", "b").first;
  const auto a = g.add_node("disease", "a").first;
  const auto s = g.add_node("symptom", "cough").first;
  g.add_edge(d, s, "has_symptom");
  g.add_edge(a, s, "has_symptom");
  g.add_edge(a, d, "accompany_with");
  EXPECT_EQ(export_cypher(g),
            "MERGE (:disease {name: \"a\"});\n"
            "MERGE (:disease {name: \"b\"});\n"
            "MERGE (:symptom {name: \"cough\"});\n"
            "MATCH (a:disease {name: \"a\"}), (b:disease {name: \"b\"}) MERGE (a)-[:accompany_with]->(b);\n"
            "MATCH (a:disease {name: \"a\"}), (b:symptom {name: \"cough\"}) MERGE (a)-[:has_symptom]->(b);\n"
            "MATCH (a:disease {name: \"b\"}), (b:symptom {name: \"cough\"}) MERGE (a)-[:has_symptom]->(b);\n");
}

TEST(Cypher, Escaping) {
  EXPECT_EQ(cypher_string_literal(R"(say "hi" \ bye)"), R"("say \"hi\" \\ bye")");
  EXPECT_EQ(cypher_identifier("has_symptom"), "has_symptom");
  EXPECT_EQ(cypher_identifier("blood test"), "`blood test`");
  EXPECT_EQ(cypher_identifier("2x"), "`2x`");
  EXPECT_EQ(cypher_identifier("a`b"), "`a``b`");
}

TEST(Cypher, FixtureDeterministicAndReplayable) {
  GraphStore store;
  auto h = testutil::load_medical(store);
  const std::string first = h.export_cypher();
  EXPECT_EQ(first, h.export_cypher());
  expect_isomorphic(*h.snapshot(), oracle::replay_cypher(first));

  // A second store built from the same file exports the same bytes.
  GraphStore other;
  EXPECT_EQ(testutil::load_medical(other).export_cypher(), first);
}

TEST(Cypher, AwkwardNamesReplay) {
  Graph g;
  const auto a = g.add_node("odd type", "quote \" and \\ slash", {{"weird key", "v\"1"}, {"k", "line\nbreak"}}).first;
  const auto b = g.add_node("t`ick", "caf\xc3\xa9").first;
  g.add_edge(a, b, "rel-with-dash", {{"w", "x"}});
  const auto script = export_cypher(g);
  expect_isomorphic(g, oracle::replay_cypher(script));
}
