#pragma once

// Application layer shared by the REST service and the CLI: every operation
// takes and returns JSON so both front ends emit identical payloads.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgsmith/error.hpp"
#include "kgsmith/graph_store.hpp"
#include "kgsmith/mie.hpp"
#include "kgsmith/qa.hpp"

namespace kgsmith {

struct PlatformConfig {
  // Empty path keeps the store in memory.
  std::filesystem::path data_dir;
  // Holds region.dict, interrogative.dict, replies.tmpl, mie.vocab, mie.labels.
  std::filesystem::path resource_dir = KGSMITH_DATA_DIR;
  std::optional<std::filesystem::path> weights;
  std::uint64_t seed = 7;
  std::size_t emb_dim = 8;
  std::size_t hidden_dim = 8;
  std::size_t fc_dim = 8;
  double threshold = mie::default_threshold;
  std::optional<std::size_t> window;
  std::size_t max_upload_bytes = std::size_t{16} << 20;
};

struct GraphQuery {
  std::optional<std::string> entity;
  std::optional<std::string> type;
  std::optional<std::string> relation;
};

class Platform {
public:
  explicit Platform(PlatformConfig config);

  const PlatformConfig& config() const noexcept { return config_; }
  GraphStore& store() noexcept { return *store_; }

  nlohmann::json create_kg(const nlohmann::json& ontology);
  nlohmann::json list_kgs() const;
  nlohmann::json get_kg(std::string_view name) const;
  nlohmann::json delete_kg(std::string_view name);
  // Throws PayloadTooLarge above max_upload_bytes.
  nlohmann::json ingest(std::string_view name, std::string_view bytes);
  // At most one selector; none returns the whole graph. Throws InvalidArgument.
  nlohmann::json graph(std::string_view name, const GraphQuery& query) const;
  nlohmann::json delete_node(std::string_view name, NodeId id);
  nlohmann::json delete_edge(std::string_view name, EdgeId id);
  std::string export_cypher(std::string_view name) const;
  // Body {kg, question}.
  nlohmann::json qa(const nlohmann::json& body) const;
  // Body {kg, patient, utterances[]}.
  nlohmann::json analyze(const nlohmann::json& body);

private:
  struct Extractor {
    mie::Vocabulary vocab;
    std::vector<mie::CandidateLabel> catalog;
    mie::MieParams params;
  };

  const Extractor& extractor();
  void persist(const GraphStoreHandle& handle);

  PlatformConfig config_;
  std::unique_ptr<GraphStore> store_;
  Lexicons lexicons_;
  std::once_flag extractor_once_;
  std::unique_ptr<Extractor> extractor_;
};

// HTTP status for an error code (400, 404, 409, 413, 422 or 500).
int http_status(ErrorCode code) noexcept;
nlohmann::json error_body(ErrorCode code, std::string_view message);

nlohmann::json to_json(const Node& node);
nlohmann::json to_json(const Edge& edge);
nlohmann::json to_json(const Subgraph& graph);
nlohmann::json to_json(const Answer& answer);

} // namespace kgsmith
