#include "kgsmith/qa.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

namespace {

constexpr std::array<std::string_view, intent_count> intent_names = {
    "disease_symptom",     "symptom_disease",  "disease_cause",        "disease_complication",
    "disease_not_food",    "disease_do_food",  "food_avoid_disease",   "food_benefit_disease",
    "disease_drug",        "disease_prevent",  "disease_duration",     "disease_cureway",
    "disease_cureprob",    "disease_susceptible", "disease_check",     "check_for_disease",
    "disease_department",  "disease_describe",
};

using enum Intent;
using enum Lookup;

constexpr std::array<QueryTemplate, intent_count> templates = {{
    {disease_symptom, "disease", neighbors_out, "has_symptom"},
    {symptom_disease, "symptom", neighbors_in, "has_symptom"},
    {disease_cause, "disease", attribute, "cause"},
    {disease_complication, "disease", neighbors_out, "accompany_with"},
    {disease_not_food, "disease", neighbors_out, "no_eat"},
    {disease_do_food, "disease", neighbors_out, "do_eat"},
    {food_avoid_disease, "food", neighbors_in, "no_eat"},
    {food_benefit_disease, "food", neighbors_in, "do_eat"},
    {disease_drug, "disease", neighbors_out, "common_drug"},
    {disease_prevent, "disease", attribute, "prevent"},
    {disease_duration, "disease", attribute, "cure_lasttime"},
    {disease_cureway, "disease", neighbors_out, "cure_way"},
    {disease_cureprob, "disease", attribute, "cured_prob"},
    {disease_susceptible, "disease", neighbors_out, "susceptible"},
    {disease_check, "disease", neighbors_out, "need_check"},
    {check_for_disease, "check", neighbors_in, "need_check"},
    {disease_department, "disease", neighbors_out, "belongs_to"},
    {disease_describe, "disease", attribute, "desc"},
}};

constexpr std::string_view deny_tag = "deny_q";

// (question type, entity type) -> intent. Food questions are split by the
// presence of a negation cue.
struct Rule {
  std::string_view qtype;
  std::string_view entity_type;
  Intent plain;
  Intent denied;
};

constexpr std::array<Rule, 18> rules = {{
    {"symptom_q", "disease", disease_symptom, disease_symptom},
    {"symptom_q", "symptom", symptom_disease, symptom_disease},
    {"cause_q", "disease", disease_cause, disease_cause},
    {"complication_q", "disease", disease_complication, disease_complication},
    {"food_q", "disease", disease_do_food, disease_not_food},
    {"food_q", "food", food_benefit_disease, food_avoid_disease},
    {"drug_q", "disease", disease_drug, disease_drug},
    {"prevent_q", "disease", disease_prevent, disease_prevent},
    {"lasttime_q", "disease", disease_duration, disease_duration},
    {"cureway_q", "disease", disease_cureway, disease_cureway},
    {"cure_q", "disease", disease_cureway, disease_cureway},
    {"cure_q", "check", check_for_disease, check_for_disease},
    {"cureprob_q", "disease", disease_cureprob, disease_cureprob},
    {"susceptible_q", "disease", disease_susceptible, disease_susceptible},
    {"check_q", "disease", disease_check, disease_check},
    {"check_q", "check", check_for_disease, check_for_disease},
    {"belong_q", "disease", disease_department, disease_department},
    {"describe_q", "disease", disease_describe, disease_describe},
}};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const Node* lookup_node(const Graph& graph, std::string_view type, std::string_view name) {
  if (const Node* n = graph.find_node(type, name)) {
    return n;
  }
  return graph.find_node(type, text::fold_case(name));
}

std::string render(std::string_view tmpl, std::string_view entity, std::string_view list) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.substr(i).starts_with("{entity}")) {
      out += entity;
      i += 8;
    } else if (tmpl.substr(i).starts_with("{list}")) {
      out += list;
      i += 6;
    } else {
      out += tmpl[i++];
    }
  }
  return text::capitalize_first(out);
}

} // namespace

const std::array<Intent, intent_count>& all_intents() noexcept {
  static const auto all = [] {
    std::array<Intent, intent_count> a{};
    for (std::size_t i = 0; i < intent_count; ++i) {
      a[i] = static_cast<Intent>(i);
    }
    return a;
  }();
  return all;
}

std::string_view to_string(Intent intent) noexcept {
  return intent_names[static_cast<std::size_t>(intent)];
}

std::optional<Intent> intent_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < intent_count; ++i) {
    if (intent_names[i] == s) {
      return static_cast<Intent>(i);
    }
  }
  return std::nullopt;
}

const QueryTemplate& query_template(Intent intent) noexcept {
  return templates[static_cast<std::size_t>(intent)];
}

std::map<Intent, std::string> parse_replies(std::string_view input) {
  std::map<Intent, std::string> replies;
  std::istringstream lines{std::string(input)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::MalformedFile, "reply template line " + std::to_string(line_no) + ": missing tab");
    }
    const auto intent = intent_from_string(line.substr(0, tab));
    if (!intent) {
      throw Error(ErrorCode::MalformedFile, "reply template line " + std::to_string(line_no) + ": unknown intent '" +
                                                line.substr(0, tab) + "'");
    }
    if (!replies.emplace(*intent, line.substr(tab + 1)).second) {
      throw Error(ErrorCode::MalformedFile, "duplicate reply template for " + std::string(to_string(*intent)));
    }
  }
  return replies;
}

Lexicons Lexicons::load(const std::filesystem::path& region_dict, const std::filesystem::path& interrogative_dict,
                        const std::filesystem::path& replies_file) {
  Lexicons lex;
  lex.region = Automaton::build(PatternDict::load(region_dict));
  lex.interrogative = Automaton::build(PatternDict::load(interrogative_dict));
  lex.replies = parse_replies(read_file(replies_file));
  for (Intent intent : all_intents()) {
    if (!lex.replies.contains(intent)) {
      throw Error(ErrorCode::InvalidArgument, "no reply template for " + std::string(to_string(intent)));
    }
    if (query_template(intent).intent != intent) {
      throw Error(ErrorCode::InvalidArgument, "query template table out of order");
    }
  }
  return lex;
}

Lexicons Lexicons::load_dir(const std::filesystem::path& dir) {
  return load(dir / "region.dict", dir / "interrogative.dict", dir / "replies.tmpl");
}

QuestionFrame classify(std::string_view question, const Automaton& region, const Automaton& interrogative) {
  QuestionFrame frame;
  frame.raw = std::string(question);
  frame.entities = extract_entities(region, question);

  // Cue words contained in a longer cue ("treat" in "how to treat") are dropped.
  auto cues = interrogative.find_all(question);
  std::erase_if(cues, [&](const Match& m) {
    return std::any_of(cues.begin(), cues.end(), [&](const Match& o) {
      return o.start <= m.start && o.end >= m.end && (o.end - o.start) > (m.end - m.start);
    });
  });
  std::stable_sort(cues.begin(), cues.end(), [](const Match& a, const Match& b) {
    if (a.start != b.start) {
      return a.start < b.start;
    }
    return a.end > b.end;
  });
  for (const auto& cue : cues) {
    for (const auto& tag : cue.tags) {
      if (std::find(frame.qtypes.begin(), frame.qtypes.end(), tag) == frame.qtypes.end()) {
        frame.qtypes.push_back(tag);
      }
    }
  }
  return frame;
}

std::vector<Intent> resolve_intents(const QuestionFrame& frame) {
  const bool denied = std::find(frame.qtypes.begin(), frame.qtypes.end(), deny_tag) != frame.qtypes.end();
  auto has = [&](std::string_view type) {
    auto it = frame.entities.find(std::string(type));
    return it != frame.entities.end() && !it->second.empty();
  };

  std::vector<Intent> intents;
  for (const auto& qtype : frame.qtypes) {
    for (const auto& rule : rules) {
      if (rule.qtype != qtype || !has(rule.entity_type)) {
        continue;
      }
      // A symptom question naming a disease asks about the disease.
      if (rule.plain == symptom_disease && has("disease")) {
        continue;
      }
      const Intent intent = denied ? rule.denied : rule.plain;
      if (std::find(intents.begin(), intents.end(), intent) == intents.end()) {
        intents.push_back(intent);
      }
    }
  }
  return intents;
}

QueryPlan plan(const std::vector<Intent>& intents, const QuestionFrame& frame) {
  if (intents.empty()) {
    throw Error(ErrorCode::NoIntent, "question did not resolve to any intent");
  }
  QueryPlan qp;
  for (Intent intent : intents) {
    const QueryTemplate& t = query_template(intent);
    auto it = frame.entities.find(std::string(t.entity_type));
    if (it == frame.entities.end()) {
      continue;
    }
    for (const auto& entity : it->second) {
      qp.steps.push_back({intent, entity, std::string(t.entity_type), t.lookup, std::string(t.key)});
    }
  }
  return qp;
}

std::vector<StepResult> execute(const QueryPlan& qp, const Graph& graph) {
  std::vector<StepResult> results;
  for (const auto& step : qp.steps) {
    StepResult r{step.intent, step.entity, {}};
    if (const Node* node = lookup_node(graph, step.entity_type, step.entity)) {
      switch (step.lookup) {
      case neighbors_out:
        for (EdgeId id : graph.out_edges(node->id)) {
          const Edge* e = graph.edge(id);
          if (e->rel_type == step.key) {
            r.values.push_back(graph.node(e->to_id)->name);
          }
        }
        break;
      case neighbors_in:
        for (EdgeId id : graph.in_edges(node->id)) {
          const Edge* e = graph.edge(id);
          if (e->rel_type == step.key) {
            r.values.push_back(graph.node(e->from_id)->name);
          }
        }
        break;
      case attribute:
        if (auto it = node->props.find(step.key); it != node->props.end() && !it->second.empty()) {
          r.values.push_back(it->second);
        }
        break;
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<StepResult> execute(const QueryPlan& qp, const GraphStoreHandle& handle) {
  return execute(qp, *handle.snapshot());
}

std::string fallback_text(std::string_view entity) {
  return "Sorry, no information found about " + std::string(entity) + ".";
}

Answer beautify(Intent intent, std::string_view entity, const std::vector<std::string>& raw,
                const std::map<Intent, std::string>& replies) {
  Answer a;
  a.intent = intent;
  a.raw.push_back({intent, std::string(entity), raw});
  if (raw.empty()) {
    a.text = fallback_text(entity);
    return a;
  }
  std::string list;
  const std::size_t shown = std::min(raw.size(), max_rendered_results);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) {
      list += "; ";
    }
    list += raw[i];
  }
  if (raw.size() > shown) {
    list += "; …";
  }
  auto it = replies.find(intent);
  const std::string_view tmpl = it != replies.end() ? std::string_view(it->second) : "{entity}: {list}";
  a.text = render(tmpl, entity, list);
  return a;
}

Answer answer(std::string_view question, const Graph& graph, const Lexicons& lexicons) {
  const QuestionFrame frame = classify(question, lexicons.region, lexicons.interrogative);
  const auto intents = resolve_intents(frame);
  Answer out;
  out.entities = frame.entities;
  if (intents.empty()) {
    out.text = std::string(not_understood_text);
    return out;
  }
  const auto results = execute(plan(intents, frame), graph);
  for (const auto& r : results) {
    Answer part = beautify(r.intent, r.entity, r.values, lexicons.replies);
    if (!out.intent) {
      out.intent = r.intent;
      out.text = part.text;
    } else {
      out.text += "\n" + part.text;
    }
    out.raw.push_back(r);
  }
  return out;
}

Answer answer(std::string_view question, const GraphStoreHandle& handle, const Lexicons& lexicons) {
  return answer(question, *handle.snapshot(), lexicons);
}

} // namespace kgsmith
