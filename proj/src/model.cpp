#include "kgsmith/model.hpp"

#include <algorithm>
#include <set>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

using nlohmann::json;

std::string_view to_string(DataType t) noexcept {
  return t == DataType::dialogue ? "dialogue" : "structured";
}

DataType data_type_from_string(std::string_view s) {
  if (s == "structured") {
    return DataType::structured;
  }
  if (s == "dialogue") {
    return DataType::dialogue;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown data type '" + std::string(s) + "'");
}

std::vector<std::string> OntologyDef::all_types() const {
  std::vector<std::string> out;
  out.reserve(other_types.size() + 1);
  out.push_back(topic_type);
  out.insert(out.end(), other_types.begin(), other_types.end());
  return out;
}

bool OntologyDef::has_type(std::string_view type) const {
  return type == topic_type ||
         std::find(other_types.begin(), other_types.end(), type) != other_types.end();
}

const RelationDef* OntologyDef::find_relation(std::string_view rel) const {
  for (const auto& r : relations) {
    if (r.name == rel) {
      return &r;
    }
  }
  return nullptr;
}

const AttributeDef* OntologyDef::find_attribute(std::string_view key) const {
  for (const auto& a : attributes) {
    if (a.key == key) {
      return &a;
    }
  }
  return nullptr;
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) {
      out += "; ";
    }
    out += v.message;
  }
  return out;
}

ValidationReport validate_ontology(const OntologyDef& def) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  if (def.name.empty()) {
    add("empty_name", "ontology name is empty");
  }
  if (def.topic_type.empty()) {
    add("missing_topic_type", "topic type is missing");
  }

  std::set<std::string> types;
  for (const auto& t : def.other_types) {
    if (t.empty()) {
      add("empty_type", "entity type name is empty");
    } else if (t == def.topic_type) {
      add("topic_in_other_types", "topic type '" + t + "' listed among other types");
    } else if (!types.insert(t).second) {
      add("duplicate_type", "duplicate entity type '" + t + "'");
    }
  }

  std::set<std::string> relation_names;
  for (const auto& r : def.relations) {
    if (r.name.empty()) {
      add("empty_relation_name", "relation name is empty");
    } else if (!relation_names.insert(r.name).second) {
      add("duplicate_relation", "duplicate relation name '" + r.name + "'");
    }
    if (r.from.empty() || r.to.empty()) {
      add("empty_endpoint", "relation '" + r.name + "' has an empty endpoint");
      continue;
    }
    if (!def.has_type(r.from)) {
      add("unknown_endpoint", "relation '" + r.name + "' source '" + r.from + "' is not a declared type");
    } else if (r.from != def.topic_type) {
      add("relation_source_not_topic", "relation source must be topic type ('" + r.name + "')");
    }
    if (!def.has_type(r.to)) {
      add("unknown_endpoint", "relation '" + r.name + "' target '" + r.to + "' is not a declared type");
    }
    std::set<std::string> keys;
    for (const auto& k : r.attr_keys) {
      if (!keys.insert(k).second) {
        add("duplicate_attribute", "duplicate attribute key '" + k + "' on relation '" + r.name + "'");
      }
    }
  }

  std::set<std::pair<std::string, std::string>> owned;
  for (const auto& a : def.attributes) {
    if (a.key.empty()) {
      add("empty_attribute_key", "attribute key is empty");
      continue;
    }
    if (a.owner != def.topic_type && def.find_relation(a.owner) == nullptr) {
      add("unknown_attribute_owner",
          "attribute '" + a.key + "' owner '" + a.owner + "' is neither the topic type nor a relation");
    }
    if (!owned.emplace(a.owner, a.key).second) {
      add("duplicate_attribute", "duplicate attribute key '" + a.key + "' on '" + a.owner + "'");
    }
    if (a.key == "name" || a.key == def.topic_type || def.find_relation(a.key) != nullptr) {
      add("attribute_key_clash", "attribute key '" + a.key + "' clashes with the name field, the topic key or a relation key");
    }
  }
  return report;
}

ValidationReport validate_entry(const OntologyDef& def, const DataEntry& entry) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  if (text::trim(entry.topic_value).empty()) {
    add("empty_topic_value", "record has no value for topic type '" + def.topic_type + "'");
  }
  for (const auto& [key, values] : entry.relation_values) {
    if (def.find_relation(key) != nullptr) {
      continue;
    }
    if (def.find_attribute(key) != nullptr) {
      add("attribute_not_scalar", "attribute '" + key + "' must be a scalar");
    } else {
      add("unknown_relation_key", "unknown relation key '" + key + "'");
    }
  }
  for (const auto& [key, value] : entry.attribute_values) {
    if (const auto* attr = def.find_attribute(key)) {
      if (attr->owner != def.topic_type) {
        add("relation_attribute_at_ingest",
            "attribute '" + key + "' belongs to relation '" + attr->owner + "' and cannot be uploaded per record");
      }
      continue;
    }
    if (def.find_relation(key) != nullptr) {
      add("relation_not_list", "relation '" + key + "' must be a list of names");
    } else {
      add("unknown_attribute_key", "unknown attribute key '" + key + "'");
    }
  }
  return report;
}

namespace {

std::string require_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::InvalidOntology, std::string("missing field '") + key + "'");
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::InvalidOntology, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return out;
  }
  if (!it->is_array()) {
    throw Error(ErrorCode::InvalidOntology, std::string("field '") + key + "' must be an array");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw Error(ErrorCode::InvalidOntology, std::string("field '") + key + "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

} // namespace

OntologyDef ontology_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidOntology, "ontology must be a JSON object");
  }
  OntologyDef def;
  def.name = require_string(j, "name");
  def.topic_type = require_string(j, "topicType");
  for (auto& t : string_list(j, "entityTypes")) {
    if (t != def.topic_type) {
      def.other_types.push_back(std::move(t));
    }
  }
  if (auto it = j.find("relations"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw Error(ErrorCode::InvalidOntology, "field 'relations' must be an array");
    }
    for (const auto& r : *it) {
      if (!r.is_object()) {
        throw Error(ErrorCode::InvalidOntology, "relation entries must be objects");
      }
      def.relations.push_back(
          {require_string(r, "name"), require_string(r, "from"), require_string(r, "to"), string_list(r, "attrs")});
    }
  }
  if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw Error(ErrorCode::InvalidOntology, "field 'attributes' must be an array");
    }
    for (const auto& a : *it) {
      if (!a.is_object()) {
        throw Error(ErrorCode::InvalidOntology, "attribute entries must be objects");
      }
      def.attributes.push_back({require_string(a, "key"), require_string(a, "owner")});
    }
  }
  if (auto it = j.find("nicknames"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error(ErrorCode::InvalidOntology, "field 'nicknames' must be an object");
    }
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) {
        throw Error(ErrorCode::InvalidOntology, "nicknames must map to strings");
      }
      def.nicknames[k] = v.get<std::string>();
    }
  }
  if (auto it = j.find("dataType"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw Error(ErrorCode::InvalidOntology, "field 'dataType' must be a string");
    }
    try {
      def.data_type = data_type_from_string(it->get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidOntology, e.what());
    }
  }
  return def;
}

OntologyDef parse_ontology(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::InvalidOntology, "ontology is not valid JSON");
  }
  return ontology_from_json(j);
}

json to_json(const OntologyDef& def) {
  json relations = json::array();
  for (const auto& r : def.relations) {
    relations.push_back({{"name", r.name}, {"from", r.from}, {"to", r.to}, {"attrs", r.attr_keys}});
  }
  json attributes = json::array();
  for (const auto& a : def.attributes) {
    attributes.push_back({{"key", a.key}, {"owner", a.owner}});
  }
  json j = {{"name", def.name},
            {"topicType", def.topic_type},
            {"entityTypes", def.all_types()},
            {"relations", relations},
            {"attributes", attributes},
            {"dataType", to_string(def.data_type)}};
  if (!def.nicknames.empty()) {
    j["nicknames"] = def.nicknames;
  }
  return j;
}

json to_json(const KgMeta& meta) {
  return {{"name", meta.name},
          {"createdAt", meta.created_at},
          {"dataType", to_string(meta.data_type)},
          {"labels", meta.labels},
          {"relations", meta.relations}};
}

} // namespace kgsmith
