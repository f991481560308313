#include "kgsmith/graph_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <json.hpp>

#include "kgsmith/cypher.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kCatalogFile = "catalog.meta";
constexpr std::string_view kLockFile = "catalog.lock";
constexpr std::string_view kNodesFile = "nodes.rec";
constexpr std::string_view kEdgesFile = "edges.rec";
constexpr std::string_view kChecksumPrefix = "checksum ";

std::string checksum_hex(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), chunk);
    pos += chunk;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

// Writes body plus a trailing checksum line via a temp file and rename.
void write_checked(const fs::path& path, std::string body) {
  body += kChecksumPrefix;
  body += checksum_hex(std::string_view(body).substr(0, body.size() - kChecksumPrefix.size()));
  body += '\n';
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) {
      throw Error(ErrorCode::IoFailure, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::IoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

// Returns the body lines (header first) after verifying the checksum line.
std::vector<std::string> read_checked(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::CorruptSnapshot, "missing snapshot file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (data.empty() || data.back() != '\n') {
    throw Error(ErrorCode::CorruptSnapshot, "truncated snapshot file " + path.string());
  }
  const auto last_start = data.rfind('\n', data.size() - 2);
  const std::size_t body_end = last_start == std::string::npos ? 0 : last_start + 1;
  const std::string_view last_line = std::string_view(data).substr(body_end, data.size() - body_end - 1);
  if (last_line.substr(0, kChecksumPrefix.size()) != kChecksumPrefix) {
    throw Error(ErrorCode::CorruptSnapshot, "missing checksum in " + path.string());
  }
  const std::string_view body = std::string_view(data).substr(0, body_end);
  if (last_line.substr(kChecksumPrefix.size()) != checksum_hex(body)) {
    throw Error(ErrorCode::CorruptSnapshot, "checksum mismatch in " + path.string());
  }
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto nl = body.find('\n', pos);
    lines.emplace_back(body.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

json parse_line(const std::string& line, const fs::path& path) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::CorruptSnapshot, "unparseable record in " + path.string());
  }
  return j;
}

// Header: "<magic> 1 next=<id>".
std::uint64_t parse_header(const std::vector<std::string>& lines, std::string_view magic, const fs::path& path) {
  const std::string expected = std::string(magic) + " 1 next=";
  if (lines.empty() || lines[0].rfind(expected, 0) != 0) {
    throw Error(ErrorCode::CorruptSnapshot, "bad header in " + path.string());
  }
  try {
    return std::stoull(lines[0].substr(expected.size()));
  } catch (const std::exception&) {
    throw Error(ErrorCode::CorruptSnapshot, "bad header in " + path.string());
  }
}

Props props_from_json(const json& j) {
  Props props;
  for (const auto& [k, v] : j.items()) {
    props.emplace(k, v.get<std::string>());
  }
  return props;
}

KgMeta make_meta(std::string_view name, const OntologyDef& def, std::string created_at) {
  KgMeta meta;
  meta.name = std::string(name);
  meta.created_at = std::move(created_at);
  meta.data_type = def.data_type;
  meta.labels = def.all_types();
  for (const auto& r : def.relations) {
    meta.relations.push_back(r.name);
  }
  return meta;
}

} // namespace

// --- handle -----------------------------------------------------------------

Subgraph GraphStoreHandle::get_entity(std::string_view name) const {
  auto g = snapshot();
  return g->neighborhood(g->nodes_named(name));
}

std::vector<Node> GraphStoreHandle::get_by_type(std::string_view entity_type) const {
  auto g = snapshot();
  const auto& labels = meta().labels;
  if (std::find(labels.begin(), labels.end(), entity_type) == labels.end()) {
    throw Error(ErrorCode::UnknownType, "entity type '" + std::string(entity_type) + "' is not declared");
  }
  std::vector<Node> out;
  for (const auto& [id, n] : g->nodes()) {
    if (n.entity_type == entity_type) {
      out.push_back(n);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Node& a, const Node& b) { return std::tie(a.name, a.id) < std::tie(b.name, b.id); });
  return out;
}

std::vector<EdgeView> GraphStoreHandle::get_by_relation(std::string_view rel_type) const {
  auto g = snapshot();
  const auto& rels = meta().relations;
  if (std::find(rels.begin(), rels.end(), rel_type) == rels.end()) {
    throw Error(ErrorCode::UnknownRelation, "relation '" + std::string(rel_type) + "' is not declared");
  }
  std::vector<EdgeView> out;
  for (const auto& [id, e] : g->edges()) {
    if (e.rel_type == rel_type) {
      out.push_back({e, *g->node(e.from_id), *g->node(e.to_id)});
    }
  }
  std::sort(out.begin(), out.end(), [](const EdgeView& a, const EdgeView& b) {
    return std::tie(a.from.name, a.to.name, a.edge.id) < std::tie(b.from.name, b.to.name, b.edge.id);
  });
  return out;
}

std::size_t GraphStoreHandle::delete_node(NodeId id) const {
  return write([&](Graph& g) { return g.remove_node(id); });
}

void GraphStoreHandle::delete_edge(EdgeId id) const {
  write([&](Graph& g) { g.remove_edge(id); });
}

std::string GraphStoreHandle::export_cypher() const {
  return kgsmith::export_cypher(*snapshot());
}

// --- store ------------------------------------------------------------------

GraphStore::GraphStore() = default;

GraphStore::GraphStore(const fs::path& directory) : directory_(directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw Error(ErrorCode::IoFailure, "cannot create " + directory.string() + ": " + ec.message());
  }
  const fs::path lock_path = directory / kLockFile;
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) {
    throw Error(ErrorCode::IoFailure, "cannot open " + lock_path.string());
  }
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error(ErrorCode::StoreBusy, "store " + directory.string() + " is locked by another process");
  }
  try {
    load();
  } catch (...) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw;
  }
}

GraphStore::~GraphStore() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

bool GraphStore::is_valid_name(std::string_view name) noexcept {
  if (name.empty() || name.size() > 128) {
    return false;
  }
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

GraphStoreHandle GraphStore::create_kg(std::string_view name, const OntologyDef& def,
                                       std::optional<std::string> created_at) {
  if (!is_valid_name(name)) {
    throw Error(ErrorCode::InvalidName, "invalid knowledge graph name '" + std::string(name) + "'");
  }
  if (auto report = validate_ontology(def); !report.ok()) {
    throw Error(ErrorCode::InvalidOntology, report.summary());
  }
  auto state = std::make_shared<detail::KgState>();
  state->ontology = def;
  state->meta = make_meta(name, def, created_at ? *created_at : text::utc_timestamp_now());

  std::unique_lock lock(catalog_mutex_);
  if (kgs_.count(name) != 0) {
    throw Error(ErrorCode::DuplicateName, "knowledge graph '" + std::string(name) + "' already exists");
  }
  kgs_.emplace(std::string(name), state);
  pending_removals_.erase(std::remove(pending_removals_.begin(), pending_removals_.end(), name),
                          pending_removals_.end());
  return GraphStoreHandle(std::move(state));
}

std::vector<KgMeta> GraphStore::list_kgs() const {
  std::shared_lock lock(catalog_mutex_);
  std::vector<KgMeta> out;
  out.reserve(kgs_.size());
  for (const auto& [name, state] : kgs_) {
    out.push_back(state->meta);
  }
  return out;
}

DeleteReport GraphStore::delete_kg(std::string_view name) {
  std::unique_lock lock(catalog_mutex_);
  auto it = kgs_.find(name);
  if (it == kgs_.end()) {
    throw Error(ErrorCode::UnknownKg, "unknown knowledge graph '" + std::string(name) + "'");
  }
  auto state = it->second;
  std::lock_guard lease(state->writer);
  auto graph = state->load();

  DeleteReport report;
  report.name = std::string(name);
  report.nodes_removed = graph->node_count();
  report.edges_removed = graph->edge_count();
  report.label_rows_removed = state->meta.labels.size();
  report.relation_rows_removed = state->meta.relations.size();

  state->deleted = true;
  state->publish(std::make_shared<const Graph>());
  kgs_.erase(it);
  pending_removals_.push_back(std::string(name));
  return report;
}

GraphStoreHandle GraphStore::handle(std::string_view name) const {
  std::shared_lock lock(catalog_mutex_);
  auto it = kgs_.find(name);
  if (it == kgs_.end()) {
    throw Error(ErrorCode::UnknownKg, "unknown knowledge graph '" + std::string(name) + "'");
  }
  return GraphStoreHandle(it->second);
}

bool GraphStore::contains(std::string_view name) const {
  std::shared_lock lock(catalog_mutex_);
  return kgs_.count(name) != 0;
}

Catalog GraphStore::catalog() const {
  std::shared_lock lock(catalog_mutex_);
  Catalog c;
  for (const auto& [name, state] : kgs_) {
    c.kg_table.push_back(state->meta);
    for (const auto& l : state->meta.labels) {
      c.label_table.push_back({name, l});
    }
    for (const auto& r : state->meta.relations) {
      c.relation_table.push_back({name, r});
    }
  }
  return c;
}

void GraphStore::write_kg_files(detail::KgState& state) {
  const fs::path dir = *directory_ / state.meta.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  }
  auto graph = state.load();

  std::string nodes = "kgsmith-nodes 1 next=" + std::to_string(graph->next_node_id()) + "\n";
  for (const auto& [id, n] : graph->nodes()) {
    nodes += json::array({n.id, n.entity_type, n.name, n.props}).dump();
    nodes += '\n';
  }
  std::string edges = "kgsmith-edges 1 next=" + std::to_string(graph->next_edge_id()) + "\n";
  for (const auto& [id, e] : graph->edges()) {
    edges += json::array({e.id, e.from_id, e.to_id, e.rel_type, e.props}).dump();
    edges += '\n';
  }
  write_checked(dir / kNodesFile, std::move(nodes));
  write_checked(dir / kEdgesFile, std::move(edges));
  state.on_disk = true;
}

void GraphStore::write_catalog() {
  std::string body = "kgsmith-catalog 1\n";
  for (const auto& [name, state] : kgs_) {
    json row = {{"table", "kg"},
                {"name", name},
                {"createdAt", state->meta.created_at},
                {"dataType", to_string(state->meta.data_type)},
                {"ontology", to_json(state->ontology)}};
    body += row.dump() + "\n";
    for (const auto& l : state->meta.labels) {
      body += json({{"table", "label"}, {"kg", name}, {"label", l}}).dump() + "\n";
    }
    for (const auto& r : state->meta.relations) {
      body += json({{"table", "relation"}, {"kg", name}, {"relation", r}}).dump() + "\n";
    }
  }
  write_checked(*directory_ / kCatalogFile, std::move(body));
}

void GraphStore::remove_deleted_dirs() {
  for (const auto& name : pending_removals_) {
    std::error_code ec;
    fs::remove_all(*directory_ / name, ec);
  }
  pending_removals_.clear();
}

void GraphStore::persist() {
  if (!directory_) {
    return;
  }
  std::lock_guard plock(persist_mutex_);
  std::shared_lock lock(catalog_mutex_);
  for (const auto& [name, state] : kgs_) {
    if (state->dirty.exchange(false)) {
      write_kg_files(*state);
    }
  }
  write_catalog();
  remove_deleted_dirs();
}

void GraphStore::persist(const GraphStoreHandle& handle) {
  if (!directory_) {
    return;
  }
  std::lock_guard plock(persist_mutex_);
  std::shared_lock lock(catalog_mutex_);
  for (const auto& [name, state] : kgs_) {
    if (name == handle.name() || !state->on_disk) {
      state->dirty = false;
      write_kg_files(*state);
    }
  }
  write_catalog();
  remove_deleted_dirs();
}

void GraphStore::load() {
  const fs::path catalog_path = *directory_ / kCatalogFile;
  if (!fs::exists(catalog_path)) {
    return;
  }
  const auto lines = read_checked(catalog_path);
  if (lines.empty() || lines[0] != "kgsmith-catalog 1") {
    throw Error(ErrorCode::CorruptSnapshot, "bad catalog header");
  }

  std::map<std::string, std::shared_ptr<detail::KgState>, std::less<>> loaded;
  std::map<std::string, std::vector<std::string>> labels;
  std::map<std::string, std::vector<std::string>> relations;
  try {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const json row = parse_line(lines[i], catalog_path);
      const std::string table = row.at("table").get<std::string>();
      if (table == "kg") {
        auto state = std::make_shared<detail::KgState>();
        state->ontology = ontology_from_json(row.at("ontology"));
        const std::string name = row.at("name").get<std::string>();
        state->meta = make_meta(name, state->ontology, row.at("createdAt").get<std::string>());
        state->meta.data_type = data_type_from_string(row.at("dataType").get<std::string>());
        state->dirty = false;
        state->on_disk = true;
        if (!loaded.emplace(name, std::move(state)).second) {
          throw Error(ErrorCode::CorruptSnapshot, "duplicate kg row '" + name + "'");
        }
      } else if (table == "label" || table == "relation") {
        const std::string kg = row.at("kg").get<std::string>();
        if (loaded.count(kg) == 0) {
          throw Error(ErrorCode::CorruptSnapshot, table + " row references unknown kg '" + kg + "'");
        }
        if (table == "label") {
          labels[kg].push_back(row.at("label").get<std::string>());
        } else {
          relations[kg].push_back(row.at("relation").get<std::string>());
        }
      } else {
        throw Error(ErrorCode::CorruptSnapshot, "unknown catalog table '" + table + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("malformed catalog row: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptSnapshot) {
      throw;
    }
    throw Error(ErrorCode::CorruptSnapshot, std::string("malformed catalog row: ") + e.what());
  }

  for (auto& [name, state] : loaded) {
    if (labels[name] != state->meta.labels || relations[name] != state->meta.relations) {
      throw Error(ErrorCode::CorruptSnapshot, "catalog rows for '" + name + "' do not match its ontology");
    }
    const fs::path dir = *directory_ / name;
    auto graph = std::make_shared<Graph>();
    try {
      const auto node_lines = read_checked(dir / kNodesFile);
      const auto next_node = parse_header(node_lines, "kgsmith-nodes", dir / kNodesFile);
      for (std::size_t i = 1; i < node_lines.size(); ++i) {
        const json r = parse_line(node_lines[i], dir / kNodesFile);
        graph->restore_node(Node{r.at(0).get<NodeId>(), r.at(1).get<std::string>(), r.at(2).get<std::string>(),
                                 props_from_json(r.at(3))});
      }
      const auto edge_lines = read_checked(dir / kEdgesFile);
      const auto next_edge = parse_header(edge_lines, "kgsmith-edges", dir / kEdgesFile);
      for (std::size_t i = 1; i < edge_lines.size(); ++i) {
        const json r = parse_line(edge_lines[i], dir / kEdgesFile);
        graph->restore_edge(Edge{r.at(0).get<EdgeId>(), r.at(1).get<NodeId>(), r.at(2).get<NodeId>(),
                                 r.at(3).get<std::string>(), props_from_json(r.at(4))});
      }
      graph->restore_counters(next_node, next_edge);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorruptSnapshot, "malformed record for '" + name + "': " + e.what());
    }
    state->publish(std::move(graph));
  }
  kgs_ = std::move(loaded);
}

std::unique_ptr<GraphStore> open_catalog(const fs::path& directory) {
  return std::make_unique<GraphStore>(directory);
}

} // namespace kgsmith
