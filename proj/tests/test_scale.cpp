#include <gtest/gtest.h>

#include <chrono>

#include "kgsmith/graph_store.hpp"
#include "kgsmith/ingest.hpp"
#include "test_util.hpp"

using namespace kgsmith;

TEST(Scale, SyntheticCorpusRoundTripsThroughDisk) {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = oracle::synthetic_corpus();
  ASSERT_EQ(corpus.nodes, 33000u);
  ASSERT_EQ(corpus.edges, 230000u);

  testutil::TempDir dir;
  Graph built;
  {
    GraphStore store(dir.path());
    auto h = store.create_kg("synthetic", parse_ontology(corpus.ontology));
    const auto summary = ingest_file(h, corpus.records);
    EXPECT_EQ(summary.records, 3000u);
    EXPECT_EQ(summary.nodes_created, corpus.nodes);
    EXPECT_EQ(summary.edges_created, corpus.edges);
    store.persist(h);
    built = *h.snapshot();
  }
  GraphStore reopened(dir.path());
  const Graph loaded = *reopened.handle("synthetic").snapshot();
  EXPECT_EQ(loaded.node_count(), 33000u);
  EXPECT_EQ(loaded.edge_count(), 230000u);
  EXPECT_TRUE(loaded == built);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 120.0);
}
