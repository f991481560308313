#pragma once

// Shared domain vocabulary: ontologies, data entries, graph elements and
// catalog metadata. Everything here is a plain value type.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kgsmith {

using Props = std::map<std::string, std::string>;
using NodeId = std::uint64_t;
using EdgeId = std::uint64_t;

enum class DataType { structured, dialogue };

std::string_view to_string(DataType t) noexcept;
DataType data_type_from_string(std::string_view s);

struct RelationDef {
  std::string name;
  std::string from;
  std::string to;
  std::vector<std::string> attr_keys;

  bool operator==(const RelationDef&) const = default;
};

// An attribute is owned either by the topic type or by a relation.
struct AttributeDef {
  std::string key;
  std::string owner;

  bool operator==(const AttributeDef&) const = default;
};

struct OntologyDef {
  std::string name;
  std::string topic_type;
  std::vector<std::string> other_types;
  std::vector<RelationDef> relations;
  std::vector<AttributeDef> attributes;
  std::map<std::string, std::string> nicknames;
  DataType data_type = DataType::structured;

  // Topic type first, then the other types in declaration order.
  std::vector<std::string> all_types() const;
  bool has_type(std::string_view type) const;
  const RelationDef* find_relation(std::string_view name) const;
  const AttributeDef* find_attribute(std::string_view key) const;

  bool operator==(const OntologyDef&) const = default;
};

struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view code) const;
  std::string summary() const;

  bool operator==(const ValidationReport&) const = default;
};

// One uploaded record: {O_0: e, R_i: E_i, A_j: Attr_j}.
struct DataEntry {
  std::string topic_value;
  std::map<std::string, std::vector<std::string>> relation_values;
  std::map<std::string, std::string> attribute_values;

  bool operator==(const DataEntry&) const = default;
};

struct Node {
  NodeId id = 0;
  std::string entity_type;
  std::string name;
  Props props;

  bool operator==(const Node&) const = default;
};

struct Edge {
  EdgeId id = 0;
  NodeId from_id = 0;
  NodeId to_id = 0;
  std::string rel_type;
  Props props;

  bool operator==(const Edge&) const = default;
};

struct KgMeta {
  std::string name;
  std::string created_at;
  DataType data_type = DataType::structured;
  std::vector<std::string> labels;
  std::vector<std::string> relations;

  bool operator==(const KgMeta&) const = default;
};

ValidationReport validate_ontology(const OntologyDef& def);
ValidationReport validate_entry(const OntologyDef& def, const DataEntry& entry);

// Ontology file format: {name, topicType, entityTypes[], relations[{name, from,
// to, attrs[]}], attributes[{key, owner}], nicknames?, dataType?}.
// entityTypes may or may not repeat topicType. Throws Error(InvalidOntology)
// on structural problems; semantic checks are left to validate_ontology.
OntologyDef ontology_from_json(const nlohmann::json& j);
OntologyDef parse_ontology(std::string_view text);
nlohmann::json to_json(const OntologyDef& def);
nlohmann::json to_json(const KgMeta& meta);

} // namespace kgsmith
