#include "kgsmith/graph.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

namespace {

const std::vector<EdgeId> kNoEdges;

void erase_id(std::vector<EdgeId>& ids, EdgeId id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it != ids.end() && *it == id) {
    ids.erase(it);
  }
}

void insert_sorted(std::vector<EdgeId>& ids, EdgeId id) {
  if (ids.empty() || ids.back() < id) {
    ids.push_back(id);
  } else {
    ids.insert(std::lower_bound(ids.begin(), ids.end(), id), id);
  }
}

} // namespace

std::size_t Graph::EdgeKeyHash::operator()(const EdgeKey& k) const noexcept {
  std::size_t h = std::hash<NodeId>{}(k.from);
  h ^= std::hash<NodeId>{}(k.to) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<std::string>{}(k.rel) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string Graph::node_key(std::string_view type, std::string_view name) {
  std::string key;
  key.reserve(type.size() + name.size() + 1);
  key.append(type);
  key.push_back('\x1f');
  key.append(name);
  return key;
}

const Node* Graph::node(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* Graph::edge(EdgeId id) const {
  auto it = edges_.find(id);
  return it == edges_.end() ? nullptr : &it->second;
}

const Node* Graph::find_node(std::string_view entity_type, std::string_view name) const {
  auto it = by_key_.find(node_key(entity_type, text::normalize_name(name)));
  return it == by_key_.end() ? nullptr : node(it->second);
}

const Edge* Graph::find_edge(NodeId from, NodeId to, std::string_view rel_type) const {
  auto it = edge_index_.find(EdgeKey{from, to, std::string(rel_type)});
  return it == edge_index_.end() ? nullptr : edge(it->second);
}

std::vector<NodeId> Graph::nodes_named(std::string_view name) const {
  auto it = by_name_.find(text::normalize_name(name));
  return it == by_name_.end() ? std::vector<NodeId>{} : it->second;
}

std::pair<NodeId, bool> Graph::add_node(std::string_view entity_type, std::string_view name, Props props) {
  std::string canonical = text::normalize_name(name);
  if (canonical.empty() || entity_type.empty()) {
    throw Error(ErrorCode::InvalidArgument, "node type and name must be nonempty");
  }
  std::string key = node_key(entity_type, canonical);
  if (auto it = by_key_.find(key); it != by_key_.end()) {
    return {it->second, false};
  }
  const NodeId id = next_node_id_++;
  by_key_.emplace(std::move(key), id);
  by_name_[canonical].push_back(id);
  nodes_.emplace(id, Node{id, std::string(entity_type), std::move(canonical), std::move(props)});
  return {id, true};
}

std::pair<EdgeId, bool> Graph::add_edge(NodeId from, NodeId to, std::string_view rel_type, Props props) {
  if (node(from) == nullptr || node(to) == nullptr) {
    throw Error(ErrorCode::DanglingEndpoint,
                "edge '" + std::string(rel_type) + "' references a missing node");
  }
  EdgeKey key{from, to, std::string(rel_type)};
  if (auto it = edge_index_.find(key); it != edge_index_.end()) {
    return {it->second, false};
  }
  const EdgeId id = next_edge_id_++;
  Edge e{id, from, to, std::string(rel_type), std::move(props)};
  index_edge(e);
  edges_.emplace(id, std::move(e));
  return {id, true};
}

void Graph::index_edge(const Edge& e) {
  edge_index_.emplace(EdgeKey{e.from_id, e.to_id, e.rel_type}, e.id);
  insert_sorted(out_[e.from_id], e.id);
  insert_sorted(in_[e.to_id], e.id);
}

void Graph::set_node_prop(NodeId id, const std::string& key, std::string value) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::UnknownRef, "unknown node " + std::to_string(id));
  }
  it->second.props[key] = std::move(value);
}

void Graph::set_edge_prop(EdgeId id, const std::string& key, std::string value) {
  auto it = edges_.find(id);
  if (it == edges_.end()) {
    throw Error(ErrorCode::UnknownRef, "unknown edge " + std::to_string(id));
  }
  it->second.props[key] = std::move(value);
}

void Graph::remove_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) {
    throw Error(ErrorCode::UnknownRef, "unknown edge " + std::to_string(id));
  }
  const Edge& e = it->second;
  edge_index_.erase(EdgeKey{e.from_id, e.to_id, e.rel_type});
  erase_id(out_[e.from_id], id);
  erase_id(in_[e.to_id], id);
  edges_.erase(it);
}

std::size_t Graph::remove_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::UnknownRef, "unknown node " + std::to_string(id));
  }
  std::set<EdgeId> incident;
  if (auto o = out_.find(id); o != out_.end()) {
    incident.insert(o->second.begin(), o->second.end());
  }
  if (auto i = in_.find(id); i != in_.end()) {
    incident.insert(i->second.begin(), i->second.end());
  }
  for (EdgeId e : incident) {
    remove_edge(e);
  }
  out_.erase(id);
  in_.erase(id);

  const Node& n = it->second;
  by_key_.erase(node_key(n.entity_type, n.name));
  if (auto named = by_name_.find(n.name); named != by_name_.end()) {
    auto& ids = named->second;
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
    if (ids.empty()) {
      by_name_.erase(named);
    }
  }
  nodes_.erase(it);
  return incident.size();
}

const std::vector<EdgeId>& Graph::out_edges(NodeId id) const {
  auto it = out_.find(id);
  return it == out_.end() ? kNoEdges : it->second;
}

const std::vector<EdgeId>& Graph::in_edges(NodeId id) const {
  auto it = in_.find(id);
  return it == in_.end() ? kNoEdges : it->second;
}

void Graph::restore_node(Node n) {
  n.name = text::normalize_name(n.name);
  if (n.name.empty() || n.entity_type.empty()) {
    throw Error(ErrorCode::CorruptSnapshot, "node with empty type or name");
  }
  auto key = node_key(n.entity_type, n.name);
  if (nodes_.count(n.id) != 0 || by_key_.count(key) != 0) {
    throw Error(ErrorCode::CorruptSnapshot, "duplicate node " + std::to_string(n.id));
  }
  by_key_.emplace(std::move(key), n.id);
  by_name_[n.name].push_back(n.id);
  next_node_id_ = std::max(next_node_id_, n.id + 1);
  nodes_.emplace(n.id, std::move(n));
}

void Graph::restore_edge(Edge e) {
  if (node(e.from_id) == nullptr || node(e.to_id) == nullptr) {
    throw Error(ErrorCode::CorruptSnapshot, "edge " + std::to_string(e.id) + " has a dangling endpoint");
  }
  if (edges_.count(e.id) != 0 || find_edge(e.from_id, e.to_id, e.rel_type) != nullptr) {
    throw Error(ErrorCode::CorruptSnapshot, "duplicate edge " + std::to_string(e.id));
  }
  next_edge_id_ = std::max(next_edge_id_, e.id + 1);
  index_edge(e);
  edges_.emplace(e.id, std::move(e));
}

void Graph::restore_counters(NodeId next_node, EdgeId next_edge) {
  next_node_id_ = std::max(next_node_id_, next_node);
  next_edge_id_ = std::max(next_edge_id_, next_edge);
}

Subgraph Graph::neighborhood(const std::vector<NodeId>& centers) const {
  std::set<NodeId> node_ids;
  std::set<EdgeId> edge_ids;
  for (NodeId c : centers) {
    if (node(c) == nullptr) {
      continue;
    }
    node_ids.insert(c);
    for (EdgeId e : out_edges(c)) {
      edge_ids.insert(e);
      node_ids.insert(edges_.at(e).to_id);
    }
    for (EdgeId e : in_edges(c)) {
      edge_ids.insert(e);
      node_ids.insert(edges_.at(e).from_id);
    }
  }
  Subgraph sg;
  for (NodeId id : node_ids) {
    sg.nodes.push_back(nodes_.at(id));
  }
  for (EdgeId id : edge_ids) {
    sg.edges.push_back(edges_.at(id));
  }
  return sg;
}

} // namespace kgsmith
