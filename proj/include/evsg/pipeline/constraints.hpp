#pragma once

#include <string>
#include <utility>
#include <vector>

#include "evsg/core/graph.hpp"
#include "evsg/pipeline/lexicon.hpp"

namespace evsg::pipeline {

struct ConstraintViolation {
  std::string rule;  // "mutual-exclusion" or "causal-order"
  int event_index = 0;
  std::string detail;
};

struct ConstraintEdit {
  int event_index = 0;
  Triplet triplet;
  std::string note;  // removal reason or addition source
};

struct ConstraintReport {
  std::vector<ConstraintViolation> violations;
  std::vector<ConstraintEdit> removed;
  std::vector<ConstraintEdit> added;
};

// Rule-based post-pass over a graph, three deterministic stages:
//  (a) within an event, two triplets with the same subject and object whose
//      relations form an exclusion pair keep only the earlier-listed one;
//  (b) a prerequisite relation appearing in a later event than its
//      consequent (same subject) is reported, never mutated;
//  (c) a state relation propagates into the next event unless that event
//      terminates it, already holds it, or holds a relation excluding it.
// Spans and edges are never touched. Idempotent: a second run returns the
// same graph.
std::pair<EventGraph, ConstraintReport> apply_constraints(const EventGraph& graph,
                                                          const ConstraintLexicon& lexicon,
                                                          bool propagate_states = true);

}  // namespace evsg::pipeline
