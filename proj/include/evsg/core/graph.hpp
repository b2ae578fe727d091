#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evsg/core/time_span.hpp"
#include "evsg/core/triplet.hpp"

namespace evsg {

// One event node: timestamps plus the relations observed inside the event.
// The triplet list is ordered data, not a set; an empty list is legal
// (the validator warns).
struct EventSubgraph {
  int index = 0;  // 1-based ordinal within the graph
  TimeSpan span;
  std::vector<Triplet> triplets;

  bool operator==(const EventSubgraph&) const = default;
};

using EdgeSet = std::set<std::pair<int, int>>;

// Event-level video scene graph: events ordered by start time, indices 1..n,
// and the full precedence edge set {(i,j) : end_i <= start_j}.
// Plain value type; build_graph/parse produce canonical instances, validate()
// checks every hard invariant on arbitrary instances.
struct EventGraph {
  std::string video_id;
  std::int64_t duration_tenths = 0;
  std::vector<EventSubgraph> events;
  EdgeSet edges;

  double duration_seconds() const {
    return static_cast<double>(duration_tenths) / 10.0;
  }

  bool operator==(const EventGraph&) const = default;
};

struct ValidationIssue {
  std::string code;
  std::string message;
  int event_index = 0;  // 0 when not tied to one event
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

// Precedence edges over events sorted by start: (i, j) present iff
// end_i <= start_j. Indices are the events' 1-based positions.
// Throws DataError when the input is not sorted by span start.
EdgeSet temporal_edges(const std::vector<EventSubgraph>& events);

// Sorts and re-indexes the events, computes the edge set, and checks spans
// against [0, duration]. Input event indices are ignored. Throws DataError
// on non-positive duration or a span outside the video.
EventGraph build_graph(const std::string& video_id, double duration_seconds,
                       std::vector<EventSubgraph> events);

struct ValidateOptions {
  double min_event_seconds = 0.5;  // shorter events draw a warning
};

// Report-returning check of every hard invariant plus the documented
// warnings (empty triplet lists, short events, overlapping events).
ValidationReport validate(const EventGraph& graph, const ValidateOptions& opts = {});

}  // namespace evsg
