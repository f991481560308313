#pragma once

// Structured-data ingest: parse uploaded records, bind them to an ontology,
// then create nodes (topic entities first) and edges from the deduplicated
// entity and relation lists.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgsmith/graph.hpp"
#include "kgsmith/graph_store.hpp"
#include "kgsmith/model.hpp"

namespace kgsmith {

// Throws MalformedFile (not JSON, not an array of flat objects) or EmptyFile.
// Arrays become relation values, scalars become attribute values (numbers and
// booleans keep their JSON spelling), nulls are dropped. A record without the
// topic key yields an empty topic_value for validate_entry to report.
std::vector<DataEntry> parse_data_file(std::string_view bytes, std::string_view topic_key);

struct NodeTypeInfo {
  std::string type;
  std::vector<std::string> attr_keys;
};

struct LineInfo {
  std::string from;
  std::string to;
  std::vector<std::string> attr_keys;
};

using NamePair = std::pair<std::string, std::string>;

struct MappedPlan {
  std::string topic_type;
  std::map<std::string, NodeTypeInfo> node_list;
  std::map<std::string, LineInfo> line_list;
  // Unique names per entity type, in first-seen record order.
  std::map<std::string, std::vector<std::string>> entity_list;
  // Unique (topic name, other name) pairs per relation, in first-seen order.
  std::map<std::string, std::vector<NamePair>> relation_list;
  // Attributes attached to topic entities.
  std::map<std::string, Props> topic_attributes;
  std::vector<std::string> warnings;

  std::size_t entity_count() const;
  std::size_t pair_count() const;
};

// Throws UnknownKey if an entry carries a key the ontology does not declare.
MappedPlan bind_entries(const OntologyDef& def, const std::vector<DataEntry>& entries);

struct NodeBuildReport {
  std::size_t created = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

struct EdgeBuildReport {
  std::size_t created = 0;
  std::size_t skipped = 0;
};

// Idempotent: elements that already exist are counted as skipped. On attribute
// conflicts the stored value wins and a warning is recorded.
NodeBuildReport build_nodes(const MappedPlan& plan, Graph& graph);
// Throws DanglingEndpoint if a pair names a node that is not in the graph.
EdgeBuildReport build_edges(const MappedPlan& plan, Graph& graph);

NodeBuildReport build_nodes(const MappedPlan& plan, const GraphStoreHandle& handle);
EdgeBuildReport build_edges(const MappedPlan& plan, const GraphStoreHandle& handle);

struct IngestSummary {
  std::size_t records = 0;
  std::size_t nodes_created = 0;
  std::size_t nodes_skipped = 0;
  std::size_t edges_created = 0;
  std::size_t edges_skipped = 0;
  std::vector<std::string> warnings;
};

// parse -> validate -> bind_entries -> build_nodes -> build_edges as one transaction.
// Any failure leaves the KG untouched; validation failures throw
// SchemaViolation.
IngestSummary ingest_file(const GraphStoreHandle& handle, std::string_view bytes);
IngestSummary ingest_file(const OntologyDef& def, std::string_view bytes, std::string_view kg_name,
                          GraphStore& store);

nlohmann::json to_json(const IngestSummary& summary);

} // namespace kgsmith
