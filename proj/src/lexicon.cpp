#include "kgsmith/lexicon.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "kgsmith/error.hpp"
#include "kgsmith/text.hpp"

namespace kgsmith {

void PatternDict::add(std::string_view pattern, const std::vector<std::string>& tags) {
  if (pattern.empty()) {
    throw Error(ErrorCode::EmptyPattern, "dictionary pattern is empty");
  }
  auto& slot = entries[text::fold_case(pattern)];
  slot.insert(tags.begin(), tags.end());
}

PatternDict PatternDict::parse(std::string_view input) {
  PatternDict dict;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= input.size()) {
    std::size_t eol = input.find('\n', pos);
    if (eol == std::string_view::npos) {
      eol = input.size();
    }
    std::string_view line = input.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::MalformedFile, "dictionary line " + std::to_string(line_no) + ": missing tab");
    }
    std::vector<std::string> tags;
    std::string_view rest = line.substr(tab + 1);
    while (true) {
      const auto comma = rest.find(',');
      std::string tag = text::trim(rest.substr(0, comma));
      if (!tag.empty()) {
        tags.push_back(std::move(tag));
      }
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    if (tags.empty()) {
      throw Error(ErrorCode::MalformedFile, "dictionary line " + std::to_string(line_no) + ": no tags");
    }
    dict.add(line.substr(0, tab), tags);
  }
  return dict;
}

PatternDict PatternDict::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot read dictionary " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Automaton::Automaton() : states_(1) {}

Automaton Automaton::build(const PatternDict& dict) {
  Automaton a;
  for (const auto& [pattern, tags] : dict.entries) {
    if (pattern.empty()) {
      throw Error(ErrorCode::EmptyPattern, "dictionary pattern is empty");
    }
    const auto id = static_cast<std::uint32_t>(a.patterns_.size());
    StateId s = 0;
    std::size_t length = 0;
    for (const auto& cp : text::decode_utf8(pattern)) {
      ++length;
      auto it = a.states_[s].next.find(cp.value);
      if (it == a.states_[s].next.end()) {
        const auto fresh = static_cast<StateId>(a.states_.size());
        const auto depth = a.states_[s].depth + 1;
        a.states_[s].next.emplace(cp.value, fresh);
        a.states_.emplace_back();
        a.states_.back().depth = depth;
        s = fresh;
      } else {
        s = it->second;
      }
    }
    a.states_[s].outputs.push_back(id);
    a.patterns_.push_back({pattern, {tags.begin(), tags.end()}, length});
  }

  // Breadth-first failure links; a state's outputs absorb those of its target.
  std::deque<StateId> queue;
  for (const auto& [symbol, child] : a.states_[0].next) {
    a.states_[child].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (const auto& [symbol, child] : a.states_[s].next) {
      StateId f = a.states_[s].fail;
      while (f != 0 && !a.states_[f].next.contains(symbol)) {
        f = a.states_[f].fail;
      }
      auto it = a.states_[f].next.find(symbol);
      a.states_[child].fail = (it != a.states_[f].next.end() && it->second != child) ? it->second : 0;
      const auto& inherited = a.states_[a.states_[child].fail].outputs;
      auto& own = a.states_[child].outputs;
      own.insert(own.end(), inherited.begin(), inherited.end());
      queue.push_back(child);
    }
  }
  return a;
}

std::vector<Match> Automaton::find_all(std::string_view input, MatchStats* stats) const {
  std::vector<Match> out;
  std::size_t steps = 0;
  const auto cps = text::decode_utf8(input);
  StateId s = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = text::fold_case(cps[i].value);
    while (true) {
      auto it = states_[s].next.find(c);
      ++steps;
      if (it != states_[s].next.end()) {
        s = it->second;
        break;
      }
      if (s == 0) {
        break;
      }
      s = states_[s].fail;
    }
    for (auto id : states_[s].outputs) {
      ++steps;
      const Pattern& p = patterns_[id];
      const auto& first = cps[i + 1 - p.length];
      out.push_back({p.text, p.tags, first.offset, cps[i].offset + cps[i].length});
    }
  }
  std::sort(out.begin(), out.end(), [](const Match& x, const Match& y) {
    return std::tie(x.start, x.end, x.pattern) < std::tie(y.start, y.end, y.pattern);
  });
  if (stats != nullptr) {
    stats->steps = steps;
  }
  return out;
}

std::vector<std::tuple<Automaton::StateId, char32_t, Automaton::StateId>> Automaton::transition_table() const {
  std::vector<std::tuple<StateId, char32_t, StateId>> table;
  for (StateId s = 0; s < states_.size(); ++s) {
    for (const auto& [symbol, child] : states_[s].next) {
      table.emplace_back(s, symbol, child);
    }
  }
  return table;
}

std::map<std::string, std::vector<std::string>> extract_entities(const std::vector<Match>& matches,
                                                                 std::string_view input) {
  std::map<std::string, std::vector<std::string>> grouped;
  for (const auto& m : matches) {
    const bool covered = std::any_of(matches.begin(), matches.end(), [&](const Match& o) {
      return o.start <= m.start && o.end >= m.end && (o.end - o.start) > (m.end - m.start);
    });
    if (covered) {
      continue;
    }
    std::string surface(input.substr(m.start, m.end - m.start));
    for (const auto& tag : m.tags) {
      auto& names = grouped[tag];
      if (std::find(names.begin(), names.end(), surface) == names.end()) {
        names.push_back(surface);
      }
    }
  }
  return grouped;
}

std::map<std::string, std::vector<std::string>> extract_entities(const Automaton& automaton,
                                                                 std::string_view input) {
  return extract_entities(automaton.find_all(input), input);
}

} // namespace kgsmith
