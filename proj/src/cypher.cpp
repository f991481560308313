#include "kgsmith/cypher.hpp"

#include <algorithm>
#include <tuple>
#include <vector>

namespace kgsmith {

std::string cypher_string_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string cypher_identifier(std::string_view s) {
  auto plain = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  const bool simple = !s.empty() && !(s[0] >= '0' && s[0] <= '9') && std::all_of(s.begin(), s.end(), plain);
  if (simple) {
    return std::string(s);
  }
  std::string out = "`";
  for (char c : s) {
    if (c == '`') {
      out.push_back('`');
    }
    out.push_back(c);
  }
  out.push_back('`');
  return out;
}

namespace {

void append_props(std::string& out, const Props& props) {
  for (const auto& [k, v] : props) {
    out += ", ";
    out += cypher_identifier(k);
    out += ": ";
    out += cypher_string_literal(v);
  }
}

} // namespace

std::string export_cypher(const Graph& graph) {
  std::vector<const Node*> nodes;
  nodes.reserve(graph.node_count());
  for (const auto& [id, n] : graph.nodes()) {
    nodes.push_back(&n);
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) {
    return std::tie(a->entity_type, a->name) < std::tie(b->entity_type, b->name);
  });

  struct EdgeRow {
    const Edge* edge;
    const Node* from;
    const Node* to;
  };
  std::vector<EdgeRow> edges;
  edges.reserve(graph.edge_count());
  for (const auto& [id, e] : graph.edges()) {
    edges.push_back({&e, graph.node(e.from_id), graph.node(e.to_id)});
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeRow& a, const EdgeRow& b) {
    return std::tie(a.edge->rel_type, a.from->entity_type, a.from->name, a.to->entity_type, a.to->name) <
           std::tie(b.edge->rel_type, b.from->entity_type, b.from->name, b.to->entity_type, b.to->name);
  });

  std::string out;
  for (const Node* n : nodes) {
    out += "MERGE (:";
    out += cypher_identifier(n->entity_type);
    out += " {name: ";
    out += cypher_string_literal(n->name);
    append_props(out, n->props);
    out += "});\n";
  }
  for (const auto& row : edges) {
    out += "MATCH (a:";
    out += cypher_identifier(row.from->entity_type);
    out += " {name: ";
    out += cypher_string_literal(row.from->name);
    out += "}), (b:";
    out += cypher_identifier(row.to->entity_type);
    out += " {name: ";
    out += cypher_string_literal(row.to->name);
    out += "}) MERGE (a)-[:";
    out += cypher_identifier(row.edge->rel_type);
    if (!row.edge->props.empty()) {
      out += " {";
      bool first = true;
      for (const auto& [k, v] : row.edge->props) {
        if (!first) {
          out += ", ";
        }
        first = false;
        out += cypher_identifier(k);
        out += ": ";
        out += cypher_string_literal(v);
      }
      out += "}";
    }
    out += "]->(b);\n";
  }
  return out;
}

} // namespace kgsmith
