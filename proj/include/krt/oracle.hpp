#pragma once

/**
 * @file oracle.hpp
 * @brief Budgeted provability oracles.
 *
 * An oracle answers "is this sentence provable within budget x?".  Answers
 * are total, deterministic, and monotone in x: once an oracle affirms a
 * sentence at budget x0 it affirms it at every larger budget.  Program runs
 * consult the oracle through an extension instruction and are charged x steps
 * per query, so a run can only ever see a finite prefix of the oracle's
 * behaviour.
 *
 * Two implementations:
 *   SilentOracle    never affirms anything (a sound theory that stays quiet).
 *   ScriptedOracle  affirms the sentences matching a finite list of patterns,
 *                   each from its own threshold budget onward.
 *
 * Script files hold one `pattern<TAB>threshold` pair per line; the pattern
 * syntax is the sentence serialization with `*` wildcards, the threshold is a
 * decimal numeral.  Blank lines and lines starting with `#` are skipped.
 */

#include "krt/nat.hpp"
#include "krt/sentence.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace krt {

class Oracle {
 public:
  virtual ~Oracle() = default;

  /// True iff `s` is affirmed within budget `x`.
  virtual bool query(const Sentence& s, const Nat& x) const = 0;

  /// Least budget at which `s` is affirmed, if any.
  virtual std::optional<Nat> threshold(const Sentence& s) const = 0;
};

class SilentOracle final : public Oracle {
 public:
  bool query(const Sentence&, const Nat&) const override { return false; }
  std::optional<Nat> threshold(const Sentence&) const override { return std::nullopt; }
};

class ScriptedOracle final : public Oracle {
 public:
  struct Entry {
    SentencePattern pattern;
    Nat from_budget;
  };

  ScriptedOracle() = default;
  explicit ScriptedOracle(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  void add(SentencePattern pattern, Nat from_budget) {
    entries_.push_back({std::move(pattern), std::move(from_budget)});
  }

  /// Least threshold over all matching patterns, so overlapping entries
  /// behave like a union of affirmations.
  std::optional<Nat> threshold(const Sentence& s) const override {
    std::optional<Nat> best;
    for (const auto& e : entries_)
      if (e.pattern.matches(s) && (!best || e.from_budget < *best)) best = e.from_budget;
    return best;
  }

  bool query(const Sentence& s, const Nat& x) const override {
    const auto t = threshold(s);
    return t && *t <= x;
  }

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Parse script text (see file comment for the line format).
inline ScriptedOracle parse_oracle_script(const std::string& text) {
  ScriptedOracle oracle;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tab = line.find('\t', first);
    if (tab == std::string::npos)
      throw std::runtime_error("oracle script line " + std::to_string(lineno) +
                               ": expected pattern<TAB>threshold");
    const std::string pattern_text = line.substr(first, tab - first);
    std::string threshold_text = line.substr(tab + 1);
    const auto t0 = threshold_text.find_first_not_of(" \t");
    if (t0 == std::string::npos)
      throw std::runtime_error("oracle script line " + std::to_string(lineno) +
                               ": missing threshold");
    const auto t1 = threshold_text.find_last_not_of(" \t");
    threshold_text = threshold_text.substr(t0, t1 - t0 + 1);
    oracle.add(parse_sentence_pattern(pattern_text), nat_from_dec(threshold_text));
  }
  return oracle;
}

inline ScriptedOracle load_oracle_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle script '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_oracle_script(buf.str());
}

}  // namespace krt
