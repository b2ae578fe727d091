#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace evsg::pipeline {

// Rule tables for the deterministic constraint passes. Text format, one
// rule per line, kind-prefixed:
//
//   exclude <relation_a> <relation_b>     mutually exclusive within an event
//   state <relation>                      static state that persists
//   terminates <state> <relation>         relation that ends the state
//   causes <prerequisite> <consequent>    required temporal order
//
// '#' starts a comment; labels are lowercase-normalized.
struct ConstraintLexicon {
  std::set<std::pair<std::string, std::string>> exclusion_pairs;  // stored (min, max)
  std::set<std::string> state_relations;
  std::map<std::string, std::set<std::string>> termination_relations;
  std::vector<std::pair<std::string, std::string>> causal_pairs;  // (prerequisite, consequent)

  bool excludes(const std::string& a, const std::string& b) const;

  // Invariants: terminators only for declared states, and a state never
  // terminates itself. Throws DataError.
  void check() const;

  static ConstraintLexicon parse(const std::string& text);
  static ConstraintLexicon load(const std::filesystem::path& path);
};

}  // namespace evsg::pipeline
