#pragma once

#include <string>

#include "evsg/core/graph.hpp"

namespace evsg {

// Canonical EVSG text format: UTF-8 JSON on a single line, alphabetically
// sorted keys, timestamps rendered with exactly one decimal, newline
// terminated. Two equal graphs always serialize to identical bytes.
//
// Top level: {"duration", "edges": [[i,j],...], "events": [...], "video_id"}
// Event:     {"end", "index", "start", "triplets": [...]}
// Triplet:   {"object", "relation", "subject"}
//
// serialize() requires a graph whose validate() report has zero errors and
// throws DataError otherwise. parse() rejects malformed JSON (with byte
// position), unknown fields at any level, edges referencing missing events,
// and structurally invalid graphs (validation errors attached to the
// message).
std::string serialize(const EventGraph& graph);
EventGraph parse_graph(const std::string& text);

// Deterministic human-readable block injected into model context:
//   Event 1 [0.0-5.0 s]:
//     <man, sits_on, bench>
// Events without triplets render a "(no relations)" marker line.
std::string render_prompt(const EventGraph& graph);

// JSON string literal (with quotes) for canonical emission.
std::string json_quote(const std::string& s);

}  // namespace evsg
