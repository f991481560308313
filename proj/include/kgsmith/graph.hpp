#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgsmith/model.hpp"

namespace kgsmith {

struct Subgraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  bool empty() const noexcept { return nodes.empty() && edges.empty(); }
};

// In-memory property graph for one KG. Node identity is (entity_type, name)
// with names compared in normalized form (text::normalize_name). Edge identity
// is (from_id, to_id, rel_type). Ids are never reused after deletion.
class Graph {
public:
  const Node* node(NodeId id) const;
  const Edge* edge(EdgeId id) const;
  const Node* find_node(std::string_view entity_type, std::string_view name) const;
  const Edge* find_edge(NodeId from, NodeId to, std::string_view rel_type) const;
  std::vector<NodeId> nodes_named(std::string_view name) const;

  // Returns the id and whether a new node was created. Props are only applied
  // to a newly created node.
  std::pair<NodeId, bool> add_node(std::string_view entity_type, std::string_view name, Props props = {});
  // Throws Error(DanglingEndpoint) if either endpoint is missing.
  std::pair<EdgeId, bool> add_edge(NodeId from, NodeId to, std::string_view rel_type, Props props = {});

  void set_node_prop(NodeId id, const std::string& key, std::string value);
  void set_edge_prop(EdgeId id, const std::string& key, std::string value);

  // Removes the node and its incident edges; returns the number of edges
  // removed. Throws Error(UnknownRef).
  std::size_t remove_node(NodeId id);
  void remove_edge(EdgeId id);

  // Edge ids in creation order.
  const std::vector<EdgeId>& out_edges(NodeId id) const;
  const std::vector<EdgeId>& in_edges(NodeId id) const;

  const std::map<NodeId, Node>& nodes() const noexcept { return nodes_; }
  const std::map<EdgeId, Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  NodeId next_node_id() const noexcept { return next_node_id_; }
  EdgeId next_edge_id() const noexcept { return next_edge_id_; }

  // Snapshot loading: insert elements with their stored ids.
  void restore_node(Node node);
  void restore_edge(Edge edge);
  void restore_counters(NodeId next_node, EdgeId next_edge);

  Subgraph neighborhood(const std::vector<NodeId>& centers) const;

  bool operator==(const Graph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

private:
  struct EdgeKey {
    NodeId from;
    NodeId to;
    std::string rel;
    bool operator==(const EdgeKey&) const = default;
  };
  struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const noexcept;
  };

  static std::string node_key(std::string_view type, std::string_view name);
  void index_edge(const Edge& e);

  std::map<NodeId, Node> nodes_;
  std::map<EdgeId, Edge> edges_;
  std::unordered_map<std::string, NodeId> by_key_;
  std::unordered_map<std::string, std::vector<NodeId>> by_name_;
  std::unordered_map<EdgeKey, EdgeId, EdgeKeyHash> edge_index_;
  std::unordered_map<NodeId, std::vector<EdgeId>> out_;
  std::unordered_map<NodeId, std::vector<EdgeId>> in_;
  NodeId next_node_id_ = 1;
  EdgeId next_edge_id_ = 1;
};

} // namespace kgsmith
