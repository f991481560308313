#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "kgsmith/lexicon.hpp"
#include "kgsmith/text.hpp"
#include "test_util.hpp"

using namespace kgsmith;
using testutil::error_code_of;

namespace {

PatternDict dict_of(const std::vector<std::string>& patterns, const std::string& tag = "t") {
  PatternDict d;
  for (const auto& p : patterns) d.add(p, {tag});
  return d;
}

std::vector<oracle::NaiveMatch> as_naive(const std::vector<Match>& ms) {
  std::vector<oracle::NaiveMatch> out;
  for (const auto& m : ms) out.push_back({m.pattern, m.start, m.end});
  return out;
}

// String spelled by the trie path to each state.
std::vector<std::u32string> state_strings(const Automaton& a) {
  std::vector<std::u32string> s(a.state_count());
  for (const auto& [from, sym, to] : a.transition_table()) {
    s[to] = s[from] + sym;
  }
  return s;
}

} // namespace

TEST(Automaton, UshersCanonicalCase) {
  const auto a = Automaton::build(dict_of({"he", "she", "his", "hers"}));
  EXPECT_EQ(a.state_count(), 10u);
  const auto ms = a.find_all("ushers");
  ASSERT_EQ(ms.size(), 3u);
  EXPECT_EQ(ms[0].pattern, "she");
  EXPECT_EQ(ms[0].start, 1u);
  EXPECT_EQ(ms[0].end, 4u);
  EXPECT_EQ(ms[1].pattern, "he");
  EXPECT_EQ(ms[1].start, 2u);
  EXPECT_EQ(ms[1].end, 4u);
  EXPECT_EQ(ms[2].pattern, "hers");
  EXPECT_EQ(ms[2].start, 2u);
  EXPECT_EQ(ms[2].end, 6u);
}

TEST(Automaton, EmptyDictAndEmptyText) {
  const auto a = Automaton::build(PatternDict{});
  EXPECT_EQ(a.state_count(), 1u);
  EXPECT_TRUE(a.find_all("anything").empty());
  EXPECT_TRUE(Automaton::build(dict_of({"x"})).find_all("").empty());
}

TEST(Automaton, EmptyPatternRejected) {
  PatternDict d;
  EXPECT_EQ(error_code_of([&] { d.add("", {"t"}); }), ErrorCode::EmptyPattern);
  d.entries[""] = {"t"};
  EXPECT_EQ(error_code_of([&] { Automaton::build(d); }), ErrorCode::EmptyPattern);
}

TEST(Automaton, DuplicatePatternMergesTags) {
  PatternDict d;
  d.add("Cold", {"disease"});
  d.add("cold", {"symptom"});
  const auto a = Automaton::build(d);
  EXPECT_EQ(a.state_count(), 5u);
  const auto ms = a.find_all("a cold day");
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].tags, (std::vector<std::string>{"disease", "symptom"}));
}

TEST(Automaton, CaseInsensitiveWithOriginalOffsets) {
  PatternDict d;
  d.add("Low blood pressure", {"symptom"});
  const auto a = Automaton::build(d);
  const std::string text = "i think i have low blood pressure";
  const auto ms = a.find_all(text);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].tags, std::vector<std::string>{"symptom"});
  EXPECT_EQ(text.substr(ms[0].start, ms[0].end - ms[0].start), "low blood pressure");

  const std::string upper = "CAF\xc3\x89 LOW BLOOD PRESSURE";
  const auto mu = a.find_all(upper);
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_EQ(mu[0].start, 6u);
  EXPECT_EQ(text::fold_case(upper.substr(mu[0].start, mu[0].end - mu[0].start)), mu[0].pattern);
}

TEST(Automaton, RandomizedAgainstNaiveScanner) {
  const std::vector<std::string> alphabet = {"a", "b", "c", "A", "B", "\xc3\xa9", "\xc3\x89"};
  std::mt19937_64 rng(20240601);
  auto word = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  for (int c = 0; c < 1000; ++c) {
    std::vector<std::string> patterns(1 + rng() % 50);
    for (auto& p : patterns) p = word(1 + rng() % 5);
    const std::string text = word(rng() % 501);
    const auto a = Automaton::build(dict_of(patterns));
    MatchStats stats;
    const auto got = a.find_all(text, &stats);
    ASSERT_EQ(as_naive(got), oracle::naive_find_all(patterns, text)) << "case " << c;
    const std::size_t n = text::decode_utf8(text).size();
    EXPECT_LE(stats.steps, 4 * n + got.size()) << "case " << c;
    for (const auto& m : got) {
      EXPECT_EQ(text::fold_case(text.substr(m.start, m.end - m.start)), m.pattern);
    }
  }
}

TEST(Automaton, FailureLinkInvariants) {
  std::mt19937_64 rng(7);
  std::vector<std::string> patterns;
  for (int i = 0; i < 200; ++i) {
    std::string p;
    for (std::size_t k = 0, n = 1 + rng() % 6; k < n; ++k) p += "abc"[rng() % 3];
    patterns.push_back(p);
  }
  const auto a = Automaton::build(dict_of(patterns));
  const auto strings = state_strings(a);
  std::map<std::u32string, Automaton::StateId> by_string;
  for (Automaton::StateId s = 0; s < strings.size(); ++s) by_string[strings[s]] = s;
  for (Automaton::StateId s = 1; s < a.state_count(); ++s) {
    const auto& st = a.states()[s];
    EXPECT_LT(a.states()[st.fail].depth, st.depth);
    // Longest proper suffix that is also a state.
    const auto& str = strings[s];
    Automaton::StateId expected = 0;
    for (std::size_t cut = 1; cut < str.size(); ++cut) {
      auto it = by_string.find(str.substr(cut));
      if (it != by_string.end()) {
        expected = it->second;
        break;
      }
    }
    EXPECT_EQ(st.fail, expected);
    // Outputs include the failure target's outputs.
    for (auto o : a.states()[st.fail].outputs) {
      EXPECT_NE(std::find(st.outputs.begin(), st.outputs.end(), o), st.outputs.end());
    }
  }
}

TEST(Automaton, BuildIsDeterministic) {
  const auto d = PatternDict::load(oracle::data_dir() / "region.dict");
  const auto a = Automaton::build(d);
  const auto b = Automaton::build(d);
  EXPECT_EQ(a.transition_table(), b.transition_table());
  ASSERT_EQ(a.state_count(), b.state_count());
  for (std::size_t s = 0; s < a.state_count(); ++s) {
    EXPECT_EQ(a.states()[s].fail, b.states()[s].fail);
    EXPECT_EQ(a.states()[s].outputs, b.states()[s].outputs);
  }
}

TEST(Automaton, ConcurrentQueriesMatchSerial) {
  const auto a = Automaton::build(PatternDict::load(oracle::data_dir() / "region.dict"));
  const std::vector<std::string> texts = {"What are the symptoms of breast cancer?",
                                          "I have a runny nose and low blood pressure",
                                          "hypertension, diabetes and insomnia"};
  std::vector<std::vector<Match>> serial;
  for (const auto& t : texts) serial.push_back(a.find_all(t));
  std::atomic<int> mismatches{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        for (std::size_t k = 0; k < texts.size(); ++k) {
          if (a.find_all(texts[k]) != serial[k]) ++mismatches;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(ExtractEntities, TableQuestion) {
  const auto a = Automaton::build(PatternDict::load(oracle::data_dir() / "region.dict"));
  const auto e = extract_entities(a, "What are the symptoms of breast cancer?");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e.at("disease"), std::vector<std::string>{"breast cancer"});
}

TEST(ExtractEntities, MaximalSpansAndSurfaceForms) {
  PatternDict d;
  d.add("blood pressure", {"check"});
  d.add("low blood pressure", {"symptom"});
  d.add("cold", {"disease"});
  const auto a = Automaton::build(d);
  const auto e = extract_entities(a, "Low Blood Pressure after a COLD, then low blood pressure and a cold");
  EXPECT_FALSE(e.contains("check"));
  EXPECT_EQ(e.at("symptom"), (std::vector<std::string>{"Low Blood Pressure", "low blood pressure"}));
  EXPECT_EQ(e.at("disease"), (std::vector<std::string>{"COLD", "cold"}));
  EXPECT_TRUE(extract_entities(a, "nothing here").empty());
}

TEST(PatternDict, ParseFormat) {
  const auto d = PatternDict::parse("# comment\n\nFoo\tdisease\r\n eat\tfood_q\nboth\ta, b\n");
  EXPECT_EQ(d.size(), 3u);
  EXPECT_TRUE(d.entries.contains(" eat"));
  EXPECT_EQ(d.entries.at("foo"), std::set<std::string>{"disease"});
  EXPECT_EQ(d.entries.at("both"), (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(error_code_of([] { PatternDict::parse("no tab here\n"); }), ErrorCode::MalformedFile);
  EXPECT_EQ(error_code_of([] { PatternDict::parse("\tdisease\n"); }), ErrorCode::EmptyPattern);
  EXPECT_EQ(error_code_of([] { PatternDict::parse("x\t \n"); }), ErrorCode::MalformedFile);
}

TEST(PatternDict, ShippedDictionariesLoad) {
  EXPECT_GT(PatternDict::load(oracle::data_dir() / "region.dict").size(), 200u);
  const auto q = PatternDict::load(oracle::data_dir() / "interrogative.dict");
  EXPECT_EQ(q.entries.at("avoid"), (std::set<std::string>{"deny_q", "prevent_q"}));
}
