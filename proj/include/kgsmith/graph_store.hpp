#pragma once

// Embedded, versioned property-graph store.
//
// The catalog mirrors a three-table relational schema: one kg row per KG
// (primary key: name) owning many label rows (entity types) and relation
// rows. Graph content lives in one copy-on-write Graph per KG: readers take a
// snapshot pointer and never block, writers serialize on a per-KG lease and
// publish a new snapshot on commit.
//
// Snapshot layout on disk:
//   <dir>/catalog.meta        catalog rows, one JSON object per line
//   <dir>/<kg>/nodes.rec      [id, type, name, props] per line
//   <dir>/<kg>/edges.rec      [id, from, to, rel, props] per line
// Every file starts with a header line and ends with "checksum <crc32>".

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "kgsmith/error.hpp"
#include "kgsmith/graph.hpp"
#include "kgsmith/model.hpp"

namespace kgsmith {

struct LabelRow {
  std::string kg_name;
  std::string label;
  bool operator==(const LabelRow&) const = default;
};

struct RelationRow {
  std::string kg_name;
  std::string relation;
  bool operator==(const RelationRow&) const = default;
};

struct Catalog {
  std::vector<KgMeta> kg_table;
  std::vector<LabelRow> label_table;
  std::vector<RelationRow> relation_table;
  bool operator==(const Catalog&) const = default;
};

struct DeleteReport {
  std::string name;
  std::size_t nodes_removed = 0;
  std::size_t edges_removed = 0;
  std::size_t label_rows_removed = 0;
  std::size_t relation_rows_removed = 0;
};

struct EdgeView {
  Edge edge;
  Node from;
  Node to;
};

namespace detail {

struct KgState {
  KgMeta meta;
  OntologyDef ontology;
  std::mutex writer;
  std::atomic<bool> deleted{false};
  std::atomic<bool> dirty{true};
  std::atomic<bool> on_disk{false};

  std::shared_ptr<const Graph> load() const {
    std::lock_guard lock(graph_mutex);
    return graph;
  }
  void publish(std::shared_ptr<const Graph> g) {
    std::lock_guard lock(graph_mutex);
    graph = std::move(g);
  }

  mutable std::mutex graph_mutex;
  std::shared_ptr<const Graph> graph = std::make_shared<const Graph>();
};

} // namespace detail

// Scopes reads and writes to one KG. Cheap to copy and safe to hand to other
// threads. Operations on a handle whose KG was deleted throw Error(UnknownKg).
class GraphStoreHandle {
public:
  GraphStoreHandle() = default;
  explicit GraphStoreHandle(std::shared_ptr<detail::KgState> state) : state_(std::move(state)) {}

  const std::string& name() const { return state_->meta.name; }
  const OntologyDef& ontology() const { return state_->ontology; }
  const KgMeta& meta() const { return state_->meta; }
  bool valid() const noexcept { return state_ && !state_->deleted; }

  std::shared_ptr<const Graph> snapshot() const {
    check_live();
    return state_->load();
  }

  // Runs fn against a staged copy of the graph under the KG's writer lease and
  // publishes it only if fn returns normally.
  template <class Fn>
  auto write(Fn&& fn) const {
    std::lock_guard lease(state_->writer);
    check_live();
    auto staged = std::make_shared<Graph>(*state_->load());
    if constexpr (std::is_void_v<std::invoke_result_t<Fn&, Graph&>>) {
      fn(*staged);
      commit(std::move(staged));
    } else {
      auto result = fn(*staged);
      commit(std::move(staged));
      return result;
    }
  }

  // Fig. 9 style retrieval modes.
  Subgraph get_entity(std::string_view name) const;
  std::vector<Node> get_by_type(std::string_view entity_type) const;
  std::vector<EdgeView> get_by_relation(std::string_view rel_type) const;

  // Returns the number of incident edges removed with the node.
  std::size_t delete_node(NodeId id) const;
  void delete_edge(EdgeId id) const;

  std::string export_cypher() const;

private:
  void check_live() const {
    if (!valid()) {
      throw Error(ErrorCode::UnknownKg, "knowledge graph no longer exists");
    }
  }
  void commit(std::shared_ptr<Graph> staged) const {
    state_->publish(std::move(staged));
    state_->dirty = true;
  }

  std::shared_ptr<detail::KgState> state_;
};

class GraphStore {
public:
  // In-memory store; persist() is a no-op.
  GraphStore();
  // Opens (or initializes) a snapshot directory and takes an exclusive
  // process lock on it. Throws StoreBusy, IoFailure or CorruptSnapshot.
  explicit GraphStore(const std::filesystem::path& directory);
  ~GraphStore();

  GraphStore(const GraphStore&) = delete;
  GraphStore& operator=(const GraphStore&) = delete;

  // Throws InvalidName, InvalidOntology or DuplicateName. The data type comes
  // from def.data_type.
  GraphStoreHandle create_kg(std::string_view name, const OntologyDef& def,
                             std::optional<std::string> created_at = std::nullopt);
  std::vector<KgMeta> list_kgs() const;
  DeleteReport delete_kg(std::string_view name);
  GraphStoreHandle handle(std::string_view name) const;
  bool contains(std::string_view name) const;
  Catalog catalog() const;

  void persist();
  void persist(const GraphStoreHandle& handle);

  const std::optional<std::filesystem::path>& directory() const noexcept { return directory_; }

  static bool is_valid_name(std::string_view name) noexcept;

private:
  void load();
  void write_kg_files(detail::KgState& state);
  void write_catalog();
  void remove_deleted_dirs();

  mutable std::shared_mutex catalog_mutex_;
  std::mutex persist_mutex_;
  std::map<std::string, std::shared_ptr<detail::KgState>, std::less<>> kgs_;
  std::vector<std::string> pending_removals_;
  std::optional<std::filesystem::path> directory_;
  int lock_fd_ = -1;
};

// Loads a snapshot directory into a new store.
std::unique_ptr<GraphStore> open_catalog(const std::filesystem::path& directory);

} // namespace kgsmith
