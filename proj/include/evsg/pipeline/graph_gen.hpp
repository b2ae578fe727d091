#pragma once

#include <string>
#include <utility>
#include <vector>

#include "evsg/core/graph.hpp"
#include "evsg/mllm/client.hpp"
#include "evsg/pipeline/captions.hpp"
#include "evsg/pipeline/constraints.hpp"
#include "evsg/pipeline/lexicon.hpp"

namespace evsg::pipeline {

// Audit trail for one refinement: every triplet that left or entered the
// graph, tagged with why, plus the constraint diagnostics.
struct RefinementLog {
  struct Removal {
    int event_index = 0;
    Triplet triplet;
    std::string reason;  // "mllm-removed" or "mutual-exclusion"
  };
  struct Addition {
    int event_index = 0;
    Triplet triplet;
    std::string source;  // "coarse+fine" (endpoint edit) or "propagation"
  };

  std::vector<Removal> removed;
  std::vector<Addition> added;
  std::vector<ConstraintViolation> violations;
  std::vector<std::string> warnings;

  bool empty() const {
    return removed.empty() && added.empty() && violations.empty() && warnings.empty();
  }

  std::string to_json() const;  // single line, sorted keys, newline-terminated
};

// Parses "Event n: start - end" blocks with one <subject, relation, object>
// line per relation. Malformed triplet lines are skipped with a warning
// unless `strict` (then DataError); an event header without parseable
// timestamps is always an error naming the event.
std::pair<std::vector<EventSubgraph>, std::vector<std::string>> parse_event_blocks(
    const std::string& text, bool strict);

mllm::ChatRequest extract_request(const VideoRef& video, const GrainedCaptionSet& middle,
                                  const PipelineConfig& cfg);
mllm::ChatRequest refine_request(const VideoRef& video, const EventGraph& g_init,
                                 const GrainedCaptionSet& coarse, const GrainedCaptionSet& fine,
                                 const PipelineConfig& cfg);

// One extraction call over the middle captions, assembled into a validated
// graph. Returns the graph plus any triplet-parse warnings.
std::pair<EventGraph, std::vector<std::string>> generate_initial_graph(
    mllm::CompletionClient& client, const VideoRef& video, const GrainedCaptionSet& middle,
    const PipelineConfig& cfg);

// One refinement call feeding the rendered graph plus coarse/fine captions,
// followed by the mandatory rule-based constraint pass. The refined graph
// keeps the event count and may move each timestamp at most
// cfg.refine_timestamp_tolerance seconds; violations are errors. The result
// always passes validation with zero errors.
std::pair<EventGraph, RefinementLog> refine_graph(mllm::CompletionClient& client,
                                                  const VideoRef& video, const EventGraph& g_init,
                                                  const GrainedCaptionSet& coarse,
                                                  const GrainedCaptionSet& fine,
                                                  const ConstraintLexicon& lexicon,
                                                  const PipelineConfig& cfg);

}  // namespace evsg::pipeline
