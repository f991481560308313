#include "kgsmith/dialogue.hpp"

#include <algorithm>
#include <map>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

using nlohmann::json;

namespace {

constexpr std::string_view symptom_relation = "has_symptom";
constexpr std::string_view symptom_type = "symptom";

std::string scalar_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

} // namespace

Transcript transcript_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::MalformedFile, "transcript must be a JSON object");
  }
  Transcript t;
  const auto patient = j.find("patient");
  if (patient == j.end() || !patient->is_object()) {
    throw Error(ErrorCode::MalformedFile, "transcript needs a 'patient' object");
  }
  for (const auto& [key, value] : patient->items()) {
    if (value.is_null()) {
      continue;
    }
    if (!value.is_primitive()) {
      throw Error(ErrorCode::MalformedFile, "patient field '" + key + "' must be a scalar");
    }
    if (key == "name") {
      t.patient.name = text::normalize_name(scalar_text(value));
    } else {
      t.patient.attrs[key] = scalar_text(value);
    }
  }
  if (t.patient.name.empty()) {
    throw Error(ErrorCode::MalformedFile, "patient name is missing");
  }

  const auto utterances = j.find("utterances");
  if (utterances == j.end() || !utterances->is_array()) {
    throw Error(ErrorCode::MalformedFile, "transcript needs an 'utterances' array");
  }
  for (const auto& u : *utterances) {
    if (!u.is_object() || !u.contains("speaker") || !u.contains("text") || !u["speaker"].is_string() ||
        !u["text"].is_string()) {
      throw Error(ErrorCode::MalformedFile, "each utterance needs string 'speaker' and 'text'");
    }
    try {
      t.utterances.push_back({mie::speaker_from_string(u["speaker"].get<std::string>()), u["text"].get<std::string>()});
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFile, e.what());
    }
  }
  if (t.utterances.empty()) {
    throw Error(ErrorCode::EmptyFile, "transcript has no utterances");
  }
  return t;
}

Transcript parse_transcript(std::string_view bytes) {
  const json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::MalformedFile, "transcript is not valid JSON");
  }
  return transcript_from_json(j);
}

mie::DialogueWindow to_window(const Transcript& transcript, const mie::Vocabulary& vocab) {
  mie::DialogueWindow w;
  for (const auto& turn : transcript.utterances) {
    mie::Utterance u{turn.speaker, vocab.encode(turn.text), turn.text};
    if (u.tokens.empty()) {
      u.tokens.push_back(mie::Vocabulary::unk_id);
    }
    w.utterances.push_back(std::move(u));
  }
  return w;
}

const std::vector<CategoryMapping>& category_mappings() {
  static const std::vector<CategoryMapping> table = {
      {"Symptom", "has_symptom", "symptom"},
      {"Surgery", "underwent", "surgery"},
      {"Test", "had_check", "check"},
      {"Medicine", "takes_drug", "drug"},
  };
  return table;
}

Subgraph labels_to_graph(const PatientInfo& patient, const std::vector<mie::CandidateLabel>& labels,
                         const GraphStoreHandle& handle) {
  const OntologyDef& def = handle.ontology();
  if (def.data_type != DataType::dialogue) {
    throw Error(ErrorCode::WrongDataType, "knowledge graph '" + handle.name() + "' does not hold dialogue data");
  }
  const std::string name = text::normalize_name(patient.name);
  if (name.empty()) {
    throw Error(ErrorCode::InvalidArgument, "patient name is empty");
  }

  std::vector<std::pair<const CategoryMapping*, std::string>> wanted;
  for (const auto& label : labels) {
    if (text::fold_case(label.status) != "positive") {
      continue;
    }
    const auto& table = category_mappings();
    auto it = std::find_if(table.begin(), table.end(), [&](const CategoryMapping& m) {
      return text::fold_case(m.category) == text::fold_case(label.category);
    });
    if (it == table.end()) {
      continue;
    }
    if (def.find_relation(it->relation) == nullptr) {
      throw Error(ErrorCode::UnknownRelation, "dialogue ontology lacks relation '" + std::string(it->relation) + "'");
    }
    wanted.emplace_back(&*it, label.item);
  }

  const NodeId patient_id = handle.write([&](Graph& g) {
    const NodeId id = g.add_node(def.topic_type, name).first;
    for (const auto& [key, value] : patient.attrs) {
      g.set_node_prop(id, key, value);
    }
    for (const auto& [mapping, item] : wanted) {
      const NodeId target = g.add_node(mapping->entity_type, item).first;
      g.add_edge(id, target, mapping->relation);
    }
    return id;
  });
  return handle.snapshot()->neighborhood({patient_id});
}

CohortStats cohort_stats(const Graph& graph, std::string_view symptom) {
  CohortStats stats;
  stats.symptom = text::normalize_name(symptom);
  const Node* target = graph.find_node(symptom_type, stats.symptom);
  if (target == nullptr) {
    return stats;
  }
  std::map<std::string, std::size_t> counts;
  std::vector<NodeId> patients;
  for (EdgeId e : graph.in_edges(target->id)) {
    const Edge* edge = graph.edge(e);
    if (edge->rel_type == symptom_relation &&
        std::find(patients.begin(), patients.end(), edge->from_id) == patients.end()) {
      patients.push_back(edge->from_id);
    }
  }
  for (NodeId p : patients) {
    for (EdgeId e : graph.out_edges(p)) {
      const Edge* edge = graph.edge(e);
      if (edge->rel_type == symptom_relation && edge->to_id != target->id) {
        ++counts[graph.node(edge->to_id)->name];
      }
    }
  }
  stats.patient_count = patients.size();
  stats.co_occurring.assign(counts.begin(), counts.end());
  std::stable_sort(stats.co_occurring.begin(), stats.co_occurring.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return stats;
}

CohortStats cohort_stats(const GraphStoreHandle& handle, std::string_view symptom) {
  return cohort_stats(*handle.snapshot(), symptom);
}

json to_json(const CohortStats& stats) {
  json co = json::array();
  for (const auto& [name, count] : stats.co_occurring) {
    co.push_back({{"symptom", name}, {"count", count}});
  }
  return {{"symptom", stats.symptom}, {"patients", stats.patient_count}, {"coOccurring", co}};
}

} // namespace kgsmith
