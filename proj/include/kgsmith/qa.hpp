#pragma once

// Question answering over one KG: classify -> resolve intents -> plan ->
// execute -> beautify.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgsmith/graph.hpp"
#include "kgsmith/graph_store.hpp"
#include "kgsmith/lexicon.hpp"

namespace kgsmith {

enum class Intent {
  disease_symptom,
  symptom_disease,
  disease_cause,
  disease_complication,
  disease_not_food,
  disease_do_food,
  food_avoid_disease,
  food_benefit_disease,
  disease_drug,
  disease_prevent,
  disease_duration,
  disease_cureway,
  disease_cureprob,
  disease_susceptible,
  disease_check,
  check_for_disease,
  disease_department,
  disease_describe,
};

inline constexpr std::size_t intent_count = 18;

const std::array<Intent, intent_count>& all_intents() noexcept;
std::string_view to_string(Intent intent) noexcept;
std::optional<Intent> intent_from_string(std::string_view s) noexcept;

enum class Lookup { neighbors_out, neighbors_in, attribute };

// Query template: which entity type an intent consumes and how it reads the graph.
struct QueryTemplate {
  Intent intent;
  std::string_view entity_type;
  Lookup lookup;
  std::string_view key; // relation name or attribute key
};

const QueryTemplate& query_template(Intent intent) noexcept;

struct Lexicons {
  Automaton region;
  Automaton interrogative;
  std::map<Intent, std::string> replies;

  // Throws InvalidArgument if a reply template is missing or unknown.
  static Lexicons load(const std::filesystem::path& region_dict, const std::filesystem::path& interrogative_dict,
                       const std::filesystem::path& replies_file);
  // region.dict, interrogative.dict and replies.tmpl from one directory.
  static Lexicons load_dir(const std::filesystem::path& dir);
};

// "intent<TAB>template" lines; '#' comments. Throws MalformedFile.
std::map<Intent, std::string> parse_replies(std::string_view text);

struct QuestionFrame {
  std::string raw;
  std::vector<std::string> qtypes; // first-occurrence order
  std::map<std::string, std::vector<std::string>> entities;
};

QuestionFrame classify(std::string_view question, const Automaton& region, const Automaton& interrogative);
std::vector<Intent> resolve_intents(const QuestionFrame& frame);

struct QueryStep {
  Intent intent;
  std::string entity;
  std::string entity_type;
  Lookup lookup;
  std::string key;
};

struct QueryPlan {
  std::vector<QueryStep> steps;
};

// Throws NoIntent when intents is empty.
QueryPlan plan(const std::vector<Intent>& intents, const QuestionFrame& frame);

struct StepResult {
  Intent intent;
  std::string entity;
  std::vector<std::string> values;
};

std::vector<StepResult> execute(const QueryPlan& plan, const Graph& graph);
std::vector<StepResult> execute(const QueryPlan& plan, const GraphStoreHandle& handle);

inline constexpr std::size_t max_rendered_results = 8;

struct Answer {
  std::string text;
  std::optional<Intent> intent;
  std::vector<StepResult> raw;
  std::map<std::string, std::vector<std::string>> entities;
};

std::string fallback_text(std::string_view entity);
inline constexpr std::string_view not_understood_text =
    "Sorry, I could not understand the question. Try asking about a disease, symptom, food, drug or check.";

Answer beautify(Intent intent, std::string_view entity, const std::vector<std::string>& raw,
                const std::map<Intent, std::string>& replies);

Answer answer(std::string_view question, const GraphStoreHandle& handle, const Lexicons& lexicons);
Answer answer(std::string_view question, const Graph& graph, const Lexicons& lexicons);

} // namespace kgsmith
