#include "evsg/core/graph.hpp"

#include <algorithm>
#include <sstream>

#include "evsg/core/errors.hpp"

namespace evsg {

namespace {

// Total order used for canonical event placement: (start, end, triplets).
// Ties on the full key are genuinely identical events as far as the canonical
// form is concerned, so any stable sort yields the same bytes.
bool canonical_less(const EventSubgraph& a, const EventSubgraph& b) {
  if (a.span != b.span) return a.span < b.span;
  return a.triplets < b.triplets;
}

}  // namespace

EdgeSet temporal_edges(const std::vector<EventSubgraph>& events) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].span.start_tenths() < events[i - 1].span.start_tenths()) {
      std::ostringstream os;
      os << "events must be sorted by start time; position " << i + 1
         << " starts at " << events[i].span.start_text() << " before "
         << events[i - 1].span.start_text();
      throw DataError(os.str());
    }
  }
  EdgeSet edges;
  int n = static_cast<int>(events.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (events[i].span.end_tenths() <= events[j].span.start_tenths()) {
        edges.emplace(i + 1, j + 1);
      }
    }
  }
  return edges;
}

EventGraph build_graph(const std::string& video_id, double duration_seconds,
                       std::vector<EventSubgraph> events) {
  if (!(duration_seconds > 0.0)) {
    throw DataError("video duration must be positive");
  }
  std::int64_t duration_tenths = TimeSpan::seconds_to_tenths(duration_seconds);
  if (duration_tenths <= 0) {
    throw DataError("video duration rounds to zero at 0.1 s resolution");
  }
  for (const auto& ev : events) {
    if (ev.span.end_tenths() > duration_tenths) {
      std::ostringstream os;
      os << "event span [" << ev.span.start_text() << ", " << ev.span.end_text()
         << "] exceeds video duration " << format_tenths(duration_tenths);
      throw DataError(os.str());
    }
  }
  std::sort(events.begin(), events.end(), canonical_less);
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].index = static_cast<int>(i) + 1;
  }
  EventGraph g;
  g.video_id = video_id;
  g.duration_tenths = duration_tenths;
  g.edges = temporal_edges(events);
  g.events = std::move(events);
  return g;
}

ValidationReport validate(const EventGraph& graph, const ValidateOptions& opts) {
  ValidationReport report;
  auto error = [&](std::string code, std::string message, int index = 0) {
    report.errors.push_back({std::move(code), std::move(message), index});
  };
  auto warning = [&](std::string code, std::string message, int index = 0) {
    report.warnings.push_back({std::move(code), std::move(message), index});
  };

  if (graph.duration_tenths <= 0) {
    error("duration-invalid", "duration must be positive");
  }

  int n = static_cast<int>(graph.events.size());
  bool order_ok = true;
  for (int i = 0; i < n; ++i) {
    const auto& ev = graph.events[i];
    if (ev.index != i + 1) {
      error("index-order", "event indices must be 1..n in storage order", ev.index);
      order_ok = false;
    }
    if (i > 0 && ev.span.start_tenths() < graph.events[i - 1].span.start_tenths()) {
      error("index-order", "events must be sorted ascending by start time", i + 1);
      order_ok = false;
    }
    if (graph.duration_tenths > 0 && ev.span.end_tenths() > graph.duration_tenths) {
      error("span-range",
            "event span ends at " + ev.span.end_text() + " beyond duration " +
                format_tenths(graph.duration_tenths),
            i + 1);
    }
    if (ev.triplets.empty()) {
      warning("empty-triplets", "event has no triplets", i + 1);
    }
    if (ev.span.length_seconds() < opts.min_event_seconds) {
      std::ostringstream os;
      os << "event shorter than " << opts.min_event_seconds << " s";
      warning("short-event", os.str(), i + 1);
    }
  }

  EdgeSet in_range;
  for (const auto& e : graph.edges) {
    if (e.first < 1 || e.first > n || e.second < 1 || e.second > n) {
      std::ostringstream os;
      os << "edge (" << e.first << ", " << e.second << ") references a missing event";
      error("edge-range", os.str());
    } else {
      in_range.insert(e);
    }
  }

  if (order_ok) {
    EdgeSet expected = temporal_edges(graph.events);
    for (const auto& e : in_range) {
      if (!expected.count(e)) {
        std::ostringstream os;
        os << "edge (" << e.first << ", " << e.second
           << ") present but events do not satisfy end_i <= start_j";
        error("edge-inconsistent", os.str(), e.first);
      }
    }
    for (const auto& e : expected) {
      if (!graph.edges.count(e)) {
        std::ostringstream os;
        os << "edge (" << e.first << ", " << e.second << ") required but missing";
        error("edge-missing", os.str(), e.first);
      }
    }
    for (int i = 0; i + 1 < n; ++i) {
      if (graph.events[i].span.overlap_tenths(graph.events[i + 1].span) > 0) {
        warning("event-overlap", "event overlaps its successor in time", i + 1);
      }
    }
  }

  return report;
}

}  // namespace evsg
