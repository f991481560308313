#pragma once

// Speaker-tagged transcripts: parsing, conversion to an MIE window, writing
// extracted labels into a dialogue KG, and per-symptom cohort statistics.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgsmith/graph.hpp"
#include "kgsmith/graph_store.hpp"
#include "kgsmith/mie.hpp"

namespace kgsmith {

struct PatientInfo {
  std::string name;
  Props attrs;
};

struct Turn {
  mie::Speaker speaker = mie::Speaker::patient;
  std::string text;
};

struct Transcript {
  PatientInfo patient;
  std::vector<Turn> utterances;
};

// {"patient": {"name": ..., <attr>: ...}, "utterances": [{"speaker", "text"}]}.
// Throws MalformedFile on structure, EmptyFile when there are no utterances.
Transcript transcript_from_json(const nlohmann::json& j);
Transcript parse_transcript(std::string_view bytes);

// Utterances that tokenize to nothing become a single <unk> token.
mie::DialogueWindow to_window(const Transcript& transcript, const mie::Vocabulary& vocab);

// Label category -> (relation, target entity type) in a dialogue KG.
struct CategoryMapping {
  std::string_view category;
  std::string_view relation;
  std::string_view entity_type;
};

const std::vector<CategoryMapping>& category_mappings();

// Upserts the patient node and adds one edge per positive label whose category
// is mapped. Returns the patient's neighborhood. Throws WrongDataType for a
// structured KG and UnknownRelation if a mapped relation is not declared.
Subgraph labels_to_graph(const PatientInfo& patient, const std::vector<mie::CandidateLabel>& labels,
                         const GraphStoreHandle& handle);

struct CohortStats {
  std::string symptom;
  std::size_t patient_count = 0;
  // Other symptoms of those patients, by count descending then name.
  std::vector<std::pair<std::string, std::size_t>> co_occurring;
};

CohortStats cohort_stats(const Graph& graph, std::string_view symptom);
CohortStats cohort_stats(const GraphStoreHandle& handle, std::string_view symptom);

nlohmann::json to_json(const CohortStats& stats);

} // namespace kgsmith
