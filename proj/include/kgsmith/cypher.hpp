#pragma once

#include <string>
#include <string_view>

#include "kgsmith/graph.hpp"

namespace kgsmith {

// Deterministic Cypher statement list for a graph:
//   MERGE (:<type> {name: "<name>", k: "v", ...});
// one per node sorted by (type, name), followed by
//   MATCH (a:<type> {name: "<from>"}), (b:<type> {name: "<to>"}) MERGE (a)-[:<rel>]->(b);
// one per edge sorted by (rel, from, to). Property keys follow name in key
// order. Strings escape '"' and '\' with a backslash; labels and keys that are
// not plain identifiers are backtick-quoted.
std::string export_cypher(const Graph& graph);

std::string cypher_string_literal(std::string_view s);
std::string cypher_identifier(std::string_view s);

} // namespace kgsmith
