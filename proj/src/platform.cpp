#include "kgsmith/platform.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "kgsmith/dialogue.hpp"
#include "kgsmith/ingest.hpp"

namespace kgsmith {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const json& require_field(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) {
    throw Error(ErrorCode::InvalidArgument, std::string("request body needs '") + key + "'");
  }
  return body[key];
}

std::string require_string(const json& body, const char* key) {
  const json& v = require_field(body, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a string");
  }
  return v.get<std::string>();
}

} // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::UnknownKg:
  case ErrorCode::UnknownRef:
  case ErrorCode::UnknownType:
  case ErrorCode::UnknownRelation:
    return 404;
  case ErrorCode::DuplicateName:
  case ErrorCode::StoreBusy:
    return 409;
  case ErrorCode::PayloadTooLarge:
    return 413;
  case ErrorCode::MalformedFile:
  case ErrorCode::EmptyFile:
  case ErrorCode::SchemaViolation:
  case ErrorCode::UnknownKey:
  case ErrorCode::DanglingEndpoint:
  case ErrorCode::WrongDataType:
    return 422;
  case ErrorCode::StoreUnavailable:
  case ErrorCode::IoFailure:
  case ErrorCode::CorruptSnapshot:
    return 500;
  default:
    return 400;
  }
}

json error_body(ErrorCode code, std::string_view message) {
  return {{"code", to_string(code)}, {"message", message}};
}

json to_json(const Node& n) {
  return {{"id", n.id}, {"type", n.entity_type}, {"name", n.name}, {"props", n.props}};
}

json to_json(const Edge& e) {
  return {{"id", e.id}, {"from", e.from_id}, {"to", e.to_id}, {"type", e.rel_type}, {"props", e.props}};
}

json to_json(const Subgraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back(to_json(n));
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back(to_json(e));
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

json to_json(const Answer& a) {
  return {{"answer", a.text},
          {"intent", a.intent ? json(to_string(*a.intent)) : json(nullptr)},
          {"entities", a.entities}};
}

Platform::Platform(PlatformConfig config) : config_(std::move(config)) {
  if (config_.max_upload_bytes == 0) {
    throw Error(ErrorCode::InvalidArgument, "max upload size must be positive");
  }
  store_ = config_.data_dir.empty() ? std::make_unique<GraphStore>() : std::make_unique<GraphStore>(config_.data_dir);
  lexicons_ = Lexicons::load_dir(config_.resource_dir);
}

void Platform::persist(const GraphStoreHandle& handle) {
  store_->persist(handle);
}

json Platform::create_kg(const json& ontology) {
  const OntologyDef def = ontology_from_json(ontology);
  auto handle = store_->create_kg(def.name, def);
  persist(handle);
  const KgMeta& meta = handle.meta();
  return {{"name", meta.name},
          {"dataType", to_string(meta.data_type)},
          {"labels", meta.labels},
          {"relations", meta.relations}};
}

json Platform::list_kgs() const {
  json out = json::array();
  for (const auto& meta : store_->list_kgs()) {
    out.push_back(to_json(meta));
  }
  return out;
}

json Platform::get_kg(std::string_view name) const {
  auto handle = store_->handle(name);
  auto g = handle.snapshot();
  json out = to_json(handle.meta());
  out["ontology"] = to_json(handle.ontology());
  out["nodeCount"] = g->node_count();
  out["edgeCount"] = g->edge_count();
  return out;
}

json Platform::delete_kg(std::string_view name) {
  const DeleteReport r = store_->delete_kg(name);
  store_->persist();
  return {{"name", r.name},
          {"nodesRemoved", r.nodes_removed},
          {"edgesRemoved", r.edges_removed},
          {"labelRowsRemoved", r.label_rows_removed},
          {"relationRowsRemoved", r.relation_rows_removed}};
}

json Platform::ingest(std::string_view name, std::string_view bytes) {
  if (bytes.size() > config_.max_upload_bytes) {
    throw Error(ErrorCode::PayloadTooLarge, "upload of " + std::to_string(bytes.size()) + " bytes exceeds the " +
                                                std::to_string(config_.max_upload_bytes) + " byte limit");
  }
  auto handle = store_->handle(name);
  const IngestSummary summary = ingest_file(handle, bytes);
  persist(handle);
  return to_json(summary);
}

json Platform::graph(std::string_view name, const GraphQuery& q) const {
  const int selectors = int(q.entity.has_value()) + int(q.type.has_value()) + int(q.relation.has_value());
  if (selectors > 1) {
    throw Error(ErrorCode::InvalidArgument, "use at most one of entity, type and relation");
  }
  auto handle = store_->handle(name);
  if (q.entity) {
    return to_json(handle.get_entity(*q.entity));
  }
  if (q.type) {
    Subgraph sg;
    sg.nodes = handle.get_by_type(*q.type);
    return to_json(sg);
  }
  if (q.relation) {
    Subgraph sg;
    std::set<NodeId> seen;
    for (auto& view : handle.get_by_relation(*q.relation)) {
      for (Node* n : {&view.from, &view.to}) {
        if (seen.insert(n->id).second) {
          sg.nodes.push_back(*n);
        }
      }
      sg.edges.push_back(std::move(view.edge));
    }
    return to_json(sg);
  }
  auto g = handle.snapshot();
  Subgraph all;
  for (const auto& [id, n] : g->nodes()) {
    all.nodes.push_back(n);
  }
  for (const auto& [id, e] : g->edges()) {
    all.edges.push_back(e);
  }
  return to_json(all);
}

json Platform::delete_node(std::string_view name, NodeId id) {
  auto handle = store_->handle(name);
  const std::size_t edges = handle.delete_node(id);
  persist(handle);
  return {{"deleted", "node"}, {"id", id}, {"edgesRemoved", edges}};
}

json Platform::delete_edge(std::string_view name, EdgeId id) {
  auto handle = store_->handle(name);
  handle.delete_edge(id);
  persist(handle);
  return {{"deleted", "edge"}, {"id", id}, {"edgesRemoved", 1}};
}

std::string Platform::export_cypher(std::string_view name) const {
  return store_->handle(name).export_cypher();
}

json Platform::qa(const json& body) const {
  const std::string kg = require_string(body, "kg");
  const std::string question = require_string(body, "question");
  auto handle = store_->handle(kg);
  return to_json(answer(question, handle, lexicons_));
}

const Platform::Extractor& Platform::extractor() {
  std::call_once(extractor_once_, [&] {
    auto ex = std::make_unique<Extractor>();
    ex->vocab = mie::Vocabulary::load(config_.resource_dir / "mie.vocab");
    ex->catalog = mie::parse_label_catalog(read_file(config_.resource_dir / "mie.labels"));
    if (config_.weights) {
      ex->params = mie::load_weights(*config_.weights);
    } else {
      ex->params = mie::seeded_params({ex->vocab.size(), config_.emb_dim, config_.hidden_dim, config_.fc_dim},
                                      config_.seed);
    }
    if (ex->params.dims.vocab < ex->vocab.size()) {
      throw Error(ErrorCode::DimensionMismatch, "weights cover fewer tokens than the vocabulary");
    }
    extractor_ = std::move(ex);
  });
  return *extractor_;
}

json Platform::analyze(const json& body) {
  const std::string kg = require_string(body, "kg");
  auto handle = store_->handle(kg);
  if (handle.meta().data_type != DataType::dialogue) {
    throw Error(ErrorCode::WrongDataType, "knowledge graph '" + kg + "' does not hold dialogue data");
  }
  const Transcript transcript = transcript_from_json(body);
  const Extractor& ex = extractor();
  const auto window = to_window(transcript, ex.vocab);
  const auto selected = mie::predict_labels(window, ex.catalog, ex.params, ex.vocab, config_.threshold, config_.window);

  std::vector<mie::CandidateLabel> labels;
  json labels_json = json::array();
  for (const auto& s : selected) {
    labels.push_back(s.label);
    labels_json.push_back({{"label", s.label.render()},
                           {"category", s.label.category},
                           {"item", s.label.item},
                           {"status", s.label.status},
                           {"score", s.y},
                           {"utterance", s.utterance}});
  }
  const Subgraph sg = labels_to_graph(transcript.patient, labels, handle);
  persist(handle);

  json cohort = json::array();
  auto snapshot = handle.snapshot();
  for (const auto& l : labels) {
    if (l.category == "Symptom" && l.status == "positive") {
      cohort.push_back(to_json(cohort_stats(*snapshot, l.item)));
    }
  }
  return {{"patient", transcript.patient.name}, {"labels", labels_json}, {"subgraph", to_json(sg)}, {"cohort", cohort}};
}

} // namespace kgsmith
