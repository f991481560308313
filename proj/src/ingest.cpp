#include "kgsmith/ingest.hpp"

#include <set>
#include <unordered_set>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

using nlohmann::json;

namespace {

bool blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
      return false;
    }
  }
  return true;
}

std::string scalar_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

struct PairHash {
  std::size_t operator()(const NamePair& p) const noexcept {
    const std::size_t h = std::hash<std::string>{}(p.first);
    return h ^ (std::hash<std::string>{}(p.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

} // namespace

std::vector<DataEntry> parse_data_file(std::string_view bytes, std::string_view topic_key) {
  if (blank(bytes)) {
    throw Error(ErrorCode::EmptyFile, "data file is empty");
  }
  const json doc = json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::MalformedFile, "data file is not valid UTF-8 JSON");
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::MalformedFile, "data file must be a JSON array of records");
  }
  if (doc.empty()) {
    throw Error(ErrorCode::EmptyFile, "data file contains no records");
  }

  std::vector<DataEntry> entries;
  entries.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    const std::string where = "record " + std::to_string(i);
    if (!rec.is_object()) {
      throw Error(ErrorCode::MalformedFile, where + " is not an object");
    }
    DataEntry entry;
    for (const auto& [key, value] : rec.items()) {
      if (value.is_null()) {
        continue;
      }
      if (key == topic_key) {
        if (!value.is_primitive()) {
          throw Error(ErrorCode::MalformedFile, where + ": topic value must be a scalar");
        }
        entry.topic_value = scalar_text(value);
      } else if (value.is_array()) {
        auto& names = entry.relation_values[key];
        for (const auto& member : value) {
          if (!member.is_string()) {
            throw Error(ErrorCode::MalformedFile, where + ": relation '" + key + "' must list strings");
          }
          names.push_back(member.get<std::string>());
        }
      } else if (value.is_object()) {
        throw Error(ErrorCode::MalformedFile, where + ": nested object under '" + key + "'");
      } else {
        entry.attribute_values[key] = scalar_text(value);
      }
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::size_t MappedPlan::entity_count() const {
  std::size_t n = 0;
  for (const auto& [type, names] : entity_list) {
    n += names.size();
  }
  return n;
}

std::size_t MappedPlan::pair_count() const {
  std::size_t n = 0;
  for (const auto& [rel, pairs] : relation_list) {
    n += pairs.size();
  }
  return n;
}

MappedPlan bind_entries(const OntologyDef& def, const std::vector<DataEntry>& entries) {
  MappedPlan plan;
  plan.topic_type = def.topic_type;
  for (const auto& type : def.all_types()) {
    NodeTypeInfo info{type, {}};
    for (const auto& a : def.attributes) {
      if (a.owner == type) {
        info.attr_keys.push_back(a.key);
      }
    }
    plan.node_list.emplace(type, std::move(info));
    plan.entity_list[type];
  }
  for (const auto& r : def.relations) {
    plan.line_list.emplace(r.name, LineInfo{r.from, r.to, r.attr_keys});
    plan.relation_list[r.name];
  }

  std::map<std::string, std::unordered_set<std::string>> seen_names;
  std::map<std::string, std::unordered_set<NamePair, PairHash>> seen_pairs;
  auto add_entity = [&](const std::string& type, const std::string& name) {
    if (seen_names[type].insert(name).second) {
      plan.entity_list[type].push_back(name);
    }
  };

  for (const auto& entry : entries) {
    const std::string topic = text::normalize_name(entry.topic_value);
    if (topic.empty()) {
      throw Error(ErrorCode::SchemaViolation, "record has an empty topic value");
    }
    add_entity(def.topic_type, topic);

    for (const auto& [rel_name, members] : entry.relation_values) {
      const RelationDef* rel = def.find_relation(rel_name);
      if (rel == nullptr) {
        throw Error(ErrorCode::UnknownKey, "unknown relation key '" + rel_name + "'");
      }
      for (const auto& raw : members) {
        std::string other = text::normalize_name(raw);
        if (other.empty()) {
          plan.warnings.push_back("skipped empty '" + rel_name + "' member of '" + topic + "'");
          continue;
        }
        add_entity(rel->to, other);
        NamePair pair{topic, std::move(other)};
        if (seen_pairs[rel_name].insert(pair).second) {
          plan.relation_list[rel_name].push_back(std::move(pair));
        }
      }
    }

    for (const auto& [key, value] : entry.attribute_values) {
      if (def.find_attribute(key) == nullptr) {
        throw Error(ErrorCode::UnknownKey, "unknown attribute key '" + key + "'");
      }
      auto& props = plan.topic_attributes[topic];
      auto [it, inserted] = props.emplace(key, value);
      if (!inserted && it->second != value) {
        plan.warnings.push_back("conflicting '" + key + "' for '" + topic + "': kept first value");
      }
    }
  }
  return plan;
}

NodeBuildReport build_nodes(const MappedPlan& plan, Graph& graph) {
  NodeBuildReport report;
  auto create = [&](const std::string& type, const std::string& name, const Props* attrs) {
    auto [id, created] = graph.add_node(type, name, attrs ? *attrs : Props{});
    if (created) {
      ++report.created;
      return;
    }
    ++report.skipped;
    if (attrs == nullptr) {
      return;
    }
    const Node* existing = graph.node(id);
    for (const auto& [key, value] : *attrs) {
      auto it = existing->props.find(key);
      if (it == existing->props.end()) {
        graph.set_node_prop(id, key, value);
      } else if (it->second != value) {
        report.warnings.push_back("conflicting '" + key + "' for '" + name + "': kept stored value");
      }
    }
  };

  // Topic entities first, with their attributes.
  if (auto it = plan.entity_list.find(plan.topic_type); it != plan.entity_list.end()) {
    for (const auto& name : it->second) {
      auto attrs = plan.topic_attributes.find(name);
      create(plan.topic_type, name, attrs == plan.topic_attributes.end() ? nullptr : &attrs->second);
    }
  }
  for (const auto& [type, names] : plan.entity_list) {
    if (type == plan.topic_type) {
      continue;
    }
    for (const auto& name : names) {
      create(type, name, nullptr);
    }
  }
  return report;
}

EdgeBuildReport build_edges(const MappedPlan& plan, Graph& graph) {
  EdgeBuildReport report;
  for (const auto& [rel_name, pairs] : plan.relation_list) {
    const auto line = plan.line_list.find(rel_name);
    if (line == plan.line_list.end()) {
      throw Error(ErrorCode::UnknownRelation, "relation '" + rel_name + "' missing from plan definition");
    }
    for (const auto& [start_name, end_name] : pairs) {
      const Node* start = graph.find_node(line->second.from, start_name);
      const Node* end = graph.find_node(line->second.to, end_name);
      if (start == nullptr || end == nullptr) {
        throw Error(ErrorCode::DanglingEndpoint, "relation '" + rel_name + "' pair (" + start_name + ", " +
                                                     end_name + ") references a node absent from the store");
      }
      auto [id, created] = graph.add_edge(start->id, end->id, rel_name);
      ++(created ? report.created : report.skipped);
    }
  }
  return report;
}

NodeBuildReport build_nodes(const MappedPlan& plan, const GraphStoreHandle& handle) {
  return handle.write([&](Graph& g) { return build_nodes(plan, g); });
}

EdgeBuildReport build_edges(const MappedPlan& plan, const GraphStoreHandle& handle) {
  return handle.write([&](Graph& g) { return build_edges(plan, g); });
}

IngestSummary ingest_file(const GraphStoreHandle& handle, std::string_view bytes) {
  const OntologyDef& def = handle.ontology();
  const auto entries = parse_data_file(bytes, def.topic_type);

  ValidationReport combined;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (auto& v : validate_entry(def, entries[i]).violations) {
      v.message = "record " + std::to_string(i) + ": " + v.message;
      combined.violations.push_back(std::move(v));
    }
  }
  if (!combined.ok()) {
    throw Error(ErrorCode::SchemaViolation, combined.summary());
  }

  const MappedPlan plan = bind_entries(def, entries);
  IngestSummary summary;
  summary.records = entries.size();
  summary.warnings = plan.warnings;
  handle.write([&](Graph& g) {
    auto nodes = build_nodes(plan, g);
    auto edges = build_edges(plan, g);
    summary.nodes_created = nodes.created;
    summary.nodes_skipped = nodes.skipped;
    summary.edges_created = edges.created;
    summary.edges_skipped = edges.skipped;
    summary.warnings.insert(summary.warnings.end(), nodes.warnings.begin(), nodes.warnings.end());
  });
  return summary;
}

IngestSummary ingest_file(const OntologyDef& def, std::string_view bytes, std::string_view kg_name,
                          GraphStore& store) {
  auto handle = store.handle(kg_name);
  if (!(handle.ontology() == def)) {
    throw Error(ErrorCode::InvalidArgument, "ontology does not match the one registered for '" +
                                                std::string(kg_name) + "'");
  }
  return ingest_file(handle, bytes);
}

json to_json(const IngestSummary& s) {
  return {{"records", s.records},
          {"nodesCreated", s.nodes_created},
          {"nodesSkipped", s.nodes_skipped},
          {"edgesCreated", s.edges_created},
          {"edgesSkipped", s.edges_skipped},
          {"warnings", s.warnings}};
}

} // namespace kgsmith
