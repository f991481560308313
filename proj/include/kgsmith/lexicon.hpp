#pragma once

// Tagged multi-pattern matching: a trie with failure links built over
// case-folded patterns, reporting every occurrence in one pass over the text.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace kgsmith {

struct PatternDict {
  // Case-folded pattern -> tags.
  std::map<std::string, std::set<std::string>> entries;

  // Throws EmptyPattern. Adding an existing pattern merges its tags.
  void add(std::string_view pattern, const std::vector<std::string>& tags);
  std::size_t size() const noexcept { return entries.size(); }

  // Format: one "pattern<TAB>tag[,tag...]" per line; blank lines and lines
  // starting with '#' are skipped. Leading spaces in a pattern are kept.
  // Throws MalformedFile or EmptyPattern.
  static PatternDict parse(std::string_view text);
  static PatternDict load(const std::filesystem::path& path);
};

struct Match {
  std::string pattern;
  std::vector<std::string> tags;
  std::size_t start = 0; // byte offsets into the original text
  std::size_t end = 0;

  bool operator==(const Match&) const = default;
};

struct MatchStats {
  std::size_t steps = 0; // goto transitions + failure hops + reported outputs
};

class Automaton {
public:
  using StateId = std::uint32_t;

  struct State {
    std::map<char32_t, StateId> next;
    StateId fail = 0;
    std::uint32_t depth = 0;
    std::vector<std::uint32_t> outputs; // pattern ids, own and inherited
  };

  Automaton();
  static Automaton build(const PatternDict& dict);

  // All occurrences sorted by (start, end). Thread-safe.
  std::vector<Match> find_all(std::string_view text, MatchStats* stats = nullptr) const;

  std::size_t state_count() const noexcept { return states_.size(); }
  const std::vector<State>& states() const noexcept { return states_; }
  // (from, symbol, to) for every trie edge, in state order.
  std::vector<std::tuple<StateId, char32_t, StateId>> transition_table() const;

private:
  struct Pattern {
    std::string text;
    std::vector<std::string> tags;
    std::size_t length = 0; // code points
  };

  std::vector<State> states_;
  std::vector<Pattern> patterns_;
};

// Keeps only maximal spans, groups surfaces (as written in the text) by tag,
// de-duplicated in order of first occurrence.
std::map<std::string, std::vector<std::string>> extract_entities(const Automaton& automaton,
                                                                 std::string_view text);
// Same, over an existing find_all result.
std::map<std::string, std::vector<std::string>> extract_entities(const std::vector<Match>& matches,
                                                                 std::string_view text);

} // namespace kgsmith
