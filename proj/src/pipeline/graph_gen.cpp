#include "evsg/pipeline/graph_gen.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "evsg/core/errors.hpp"
#include "evsg/core/serialize.hpp"
#include "evsg/pipeline/templates.hpp"

namespace evsg::pipeline {

namespace {

std::string one_decimal(double seconds) {
  return format_tenths(TimeSpan::seconds_to_tenths(seconds));
}

mllm::ChatRequest text_request(std::string prompt, const PipelineConfig& cfg) {
  mllm::ChatRequest req;
  req.messages.push_back({mllm::Role::System,
                          "You are a careful video annotator. Follow the requested output "
                          "format exactly."});
  req.messages.push_back({mllm::Role::User, std::move(prompt)});
  req.temperature = cfg.graph_temperature;
  req.max_tokens = cfg.max_tokens;
  req.model_id = cfg.model_id;
  return req;
}

}  // namespace

std::pair<std::vector<EventSubgraph>, std::vector<std::string>> parse_event_blocks(
    const std::string& text, bool strict) {
  static const std::regex header_re(
      R"(^\s*Event\s+([0-9]+)\s*:\s*([0-9]+(?:\.[0-9]+)?)\s*-\s*([0-9]+(?:\.[0-9]+)?)\s*$)");
  static const std::regex header_start_re(R"(^\s*Event\s+([0-9]+)\b)");
  static const std::regex triplet_re(
      R"(^\s*<\s*([^,<>]*?)\s*,\s*([^,<>]*?)\s*,\s*([^,<>]*?)\s*>\s*$)");

  std::vector<EventSubgraph> events;
  std::vector<std::string> warnings;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    if (std::regex_match(line, m, header_re)) {
      EventSubgraph ev;
      ev.index = std::stoi(m[1]);
      try {
        ev.span = TimeSpan::of_seconds(std::stod(m[2]), std::stod(m[3]));
      } catch (const DataError& e) {
        throw DataError("event " + m[1].str() + " has an invalid span: " + e.what());
      }
      events.push_back(std::move(ev));
      continue;
    }
    if (std::regex_search(line, m, header_start_re)) {
      throw DataError("event " + m[1].str() + " is missing timestamps (line " +
                      std::to_string(line_no) + ": '" + line + "')");
    }
    if (std::regex_match(line, m, triplet_re)) {
      if (events.empty()) {
        throw DataError("relation line " + std::to_string(line_no) +
                        " appears before any event header");
      }
      try {
        events.back().triplets.push_back(Triplet::make(m[1], m[2], m[3]));
      } catch (const DataError& e) {
        if (strict) {
          throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        warnings.push_back("line " + std::to_string(line_no) + " skipped: " + e.what());
      }
      continue;
    }
    if (strict) {
      throw DataError("line " + std::to_string(line_no) +
                      " matches neither an event header nor a relation: '" + line + "'");
    }
    warnings.push_back("line " + std::to_string(line_no) + " skipped: '" + line + "'");
  }
  return {std::move(events), std::move(warnings)};
}

mllm::ChatRequest extract_request(const VideoRef& video, const GrainedCaptionSet& middle,
                                  const PipelineConfig& cfg) {
  video.check();
  std::string tpl = load_template(cfg.template_dir, "extract_graph");
  return text_request(render_template(tpl, {{"duration", one_decimal(video.duration)},
                                            {"captions", render_caption_lines(middle)}}),
                      cfg);
}

mllm::ChatRequest refine_request(const VideoRef& video, const EventGraph& g_init,
                                 const GrainedCaptionSet& coarse, const GrainedCaptionSet& fine,
                                 const PipelineConfig& cfg) {
  video.check();
  std::string tpl = load_template(cfg.template_dir, "refine_graph");
  return text_request(
      render_template(tpl, {{"duration", one_decimal(video.duration)},
                            {"graph", render_prompt(g_init)},
                            {"coarse_captions", render_caption_lines(coarse)},
                            {"fine_captions", render_caption_lines(fine)}}),
      cfg);
}

std::pair<EventGraph, std::vector<std::string>> generate_initial_graph(
    mllm::CompletionClient& client, const VideoRef& video, const GrainedCaptionSet& middle,
    const PipelineConfig& cfg) {
  if (middle.segments.empty()) throw DataError("middle caption set is empty");
  mllm::ChatResponse resp = client.complete(extract_request(video, middle, cfg));
  auto [events, warnings] = parse_event_blocks(resp.text, cfg.strict_triplets);
  if (events.empty()) {
    throw DataError("extraction response contains no events:\n" + resp.text);
  }
  EventGraph graph = build_graph(video.uri, video.duration, std::move(events));
  return {std::move(graph), std::move(warnings)};
}

namespace {

void emit_triplet(std::ostringstream& out, const Triplet& t) {
  out << "{\"object\":" << json_quote(t.object) << ",\"relation\":" << json_quote(t.relation)
      << ",\"subject\":" << json_quote(t.subject) << "}";
}

}  // namespace

std::string RefinementLog::to_json() const {
  std::ostringstream out;
  out << "{\"added\":[";
  for (size_t i = 0; i < added.size(); ++i) {
    if (i) out << ",";
    out << "{\"event\":" << added[i].event_index << ",\"source\":" << json_quote(added[i].source)
        << ",\"triplet\":";
    emit_triplet(out, added[i].triplet);
    out << "}";
  }
  out << "],\"removed\":[";
  for (size_t i = 0; i < removed.size(); ++i) {
    if (i) out << ",";
    out << "{\"event\":" << removed[i].event_index
        << ",\"reason\":" << json_quote(removed[i].reason) << ",\"triplet\":";
    emit_triplet(out, removed[i].triplet);
    out << "}";
  }
  out << "],\"violations\":[";
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) out << ",";
    out << "{\"detail\":" << json_quote(violations[i].detail)
        << ",\"event\":" << violations[i].event_index
        << ",\"rule\":" << json_quote(violations[i].rule) << "}";
  }
  out << "],\"warnings\":[";
  for (size_t i = 0; i < warnings.size(); ++i) {
    if (i) out << ",";
    out << json_quote(warnings[i]);
  }
  out << "]}\n";
  return out.str();
}

std::pair<EventGraph, RefinementLog> refine_graph(mllm::CompletionClient& client,
                                                  const VideoRef& video, const EventGraph& g_init,
                                                  const GrainedCaptionSet& coarse,
                                                  const GrainedCaptionSet& fine,
                                                  const ConstraintLexicon& lexicon,
                                                  const PipelineConfig& cfg) {
  ValidationReport init_report = validate(g_init);
  if (!init_report.ok()) throw DataError("refine_graph needs a valid initial graph");

  mllm::ChatResponse resp = client.complete(refine_request(video, g_init, coarse, fine, cfg));
  auto [events, warnings] = parse_event_blocks(resp.text, cfg.strict_triplets);
  RefinementLog log;
  log.warnings = std::move(warnings);

  // Refinement edits relations and may nudge timestamps; it must not grow
  // or shrink the event list, so responses pair with the initial events by
  // position.
  if (events.size() != g_init.events.size()) {
    throw DataError("refinement changed the event count from " +
                    std::to_string(g_init.events.size()) + " to " +
                    std::to_string(events.size()));
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const EventSubgraph& a, const EventSubgraph& b) { return a.span < b.span; });
  const std::int64_t tol = TimeSpan::seconds_to_tenths(cfg.refine_timestamp_tolerance);
  for (size_t i = 0; i < events.size(); ++i) {
    const TimeSpan& before = g_init.events[i].span;
    const TimeSpan& after = events[i].span;
    auto moved = [](std::int64_t a, std::int64_t b) { return a > b ? a - b : b - a; };
    if (moved(after.start_tenths(), before.start_tenths()) > tol ||
        moved(after.end_tenths(), before.end_tenths()) > tol) {
      throw DataError("refinement moved event " + std::to_string(i + 1) + " from [" +
                      before.start_text() + ", " + before.end_text() + "] to [" +
                      after.start_text() + ", " + after.end_text() + "], beyond the " +
                      format_tenths(tol) + " s tolerance");
    }
  }

  // Same small-overlap repair as captions; larger overlaps mean the
  // endpoint rewrote the timeline rather than refining it.
  const std::int64_t repair_t = TimeSpan::seconds_to_tenths(cfg.overlap_repair_seconds);
  for (size_t i = 0; i + 1 < events.size(); ++i) {
    std::int64_t overlap = events[i].span.end_tenths() - events[i + 1].span.start_tenths();
    if (overlap <= 0) continue;
    if (overlap > repair_t) {
      throw DataError("refined events " + std::to_string(i + 1) + " and " +
                      std::to_string(i + 2) + " overlap by " + format_tenths(overlap) +
                      " s, beyond the " + format_tenths(repair_t) + " s repair tolerance");
    }
    std::int64_t mid = (events[i].span.end_tenths() + events[i + 1].span.start_tenths() + 1) / 2;
    if (mid <= events[i].span.start_tenths() || mid >= events[i + 1].span.end_tenths()) {
      throw DataError("refined events " + std::to_string(i + 1) + " and " +
                      std::to_string(i + 2) + " cannot be separated at their midpoint");
    }
    events[i].span = TimeSpan::of_tenths(events[i].span.start_tenths(), mid);
    events[i + 1].span = TimeSpan::of_tenths(mid, events[i + 1].span.end_tenths());
  }

  EventGraph refined = build_graph(g_init.video_id, video.duration, std::move(events));

  // Endpoint-side relation diff, before the rule pass.
  for (size_t i = 0; i < refined.events.size(); ++i) {
    std::map<Triplet, int> counts;
    for (const Triplet& t : g_init.events[i].triplets) ++counts[t];
    for (const Triplet& t : refined.events[i].triplets) --counts[t];
    for (const auto& [t, n] : counts) {
      for (int k = 0; k < n; ++k) {
        log.removed.push_back({static_cast<int>(i) + 1, t, "mllm-removed"});
      }
      for (int k = 0; k < -n; ++k) {
        log.added.push_back({static_cast<int>(i) + 1, t, "coarse+fine"});
      }
    }
  }

  auto [final_graph, creport] = apply_constraints(refined, lexicon);
  for (const auto& r : creport.removed) log.removed.push_back({r.event_index, r.triplet, r.note});
  for (const auto& a : creport.added) log.added.push_back({a.event_index, a.triplet, a.note});
  log.violations.insert(log.violations.end(), creport.violations.begin(),
                        creport.violations.end());

  ValidationReport report = validate(final_graph);
  if (!report.ok()) {
    std::string msg = "refined graph failed validation:";
    for (const auto& issue : report.errors) msg += " [" + issue.code + "] " + issue.message;
    throw DataError(msg);
  }
  return {std::move(final_graph), std::move(log)};
}

}  // namespace evsg::pipeline
