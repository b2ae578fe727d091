#include "evsg/pipeline/captions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "evsg/core/errors.hpp"
#include "evsg/core/serialize.hpp"
#include "evsg/pipeline/templates.hpp"
#include "json.hpp"

namespace evsg::pipeline {

namespace {

std::string one_decimal(double seconds) {
  return format_tenths(TimeSpan::seconds_to_tenths(seconds));
}

std::set<std::string> content_tokens(const std::string& text) {
  static const std::set<std::string> stopwords = {"a",  "an", "the", "and", "or",   "of",
                                                  "to", "in", "on",  "at",  "is",   "are",
                                                  "was", "were", "with", "then", "it"};
  std::set<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stopwords.count(cur)) out.insert(cur);
    cur.clear();
  };
  for (char ch : text) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace

void VideoRef::check() const {
  if (uri.empty()) throw DataError("video uri is empty");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DataError("video duration must be positive: " + uri);
  }
  const std::pair<const std::optional<int>*, const char*> dims[] = {
      {&frame_count, "frame_count"}, {&height, "height"}, {&width, "width"}};
  for (const auto& [value, name] : dims) {
    if (*value && **value <= 0) {
      throw DataError(std::string("video ") + name + " must be positive: " + uri);
    }
  }
}

void CaptionLimits::check() const {
  if (coarse < 1 || !(coarse < middle && middle < fine)) {
    throw ConfigError("caption limits must be strictly increasing and at least 1");
  }
}

mllm::ChatRequest caption_request(const VideoRef& video, int limit, const PipelineConfig& cfg) {
  video.check();
  std::string tpl = load_template(cfg.template_dir, "caption");
  std::string prompt = render_template(tpl, {{"duration", one_decimal(video.duration)},
                                             {"limit", std::to_string(limit)}});
  mllm::ChatRequest req;
  req.messages.push_back({mllm::Role::System,
                          "You are a careful video annotator. Follow the requested output "
                          "format exactly."});
  req.messages.push_back({mllm::Role::User, std::move(prompt)});
  req.video_ref = video.uri;
  req.temperature = cfg.caption_temperature;
  req.max_tokens = cfg.max_tokens;
  req.model_id = cfg.model_id;
  return req;
}

std::string render_caption_lines(const GrainedCaptionSet& set) {
  std::ostringstream out;
  for (size_t i = 0; i < set.segments.size(); ++i) {
    const auto& seg = set.segments[i];
    out << (i + 1) << ". [" << seg.span.start_text() << " - " << seg.span.end_text() << "] "
        << seg.text << "\n";
  }
  return out.str();
}

GrainedCaptionSet parse_caption_response(const std::string& text, int limit, double duration,
                                         const PipelineConfig& cfg) {
  static const std::regex line_re(
      R"(^\s*([0-9]+(?:\.[0-9]+)?)\s*-\s*([0-9]+(?:\.[0-9]+)?)\s*:\s*(.*\S)\s*$)");
  const std::int64_t duration_t = TimeSpan::seconds_to_tenths(duration);

  GrainedCaptionSet set;
  set.limit = limit;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      throw DataError("caption line " + std::to_string(line_no) +
                      " is not in 'start - end: text' form; response was:\n" + text);
    }
    std::int64_t s = std::max<std::int64_t>(0, TimeSpan::seconds_to_tenths(std::stod(m[1])));
    std::int64_t e = std::min(duration_t, TimeSpan::seconds_to_tenths(std::stod(m[2])));
    if (s >= e) {
      throw DataError("caption line " + std::to_string(line_no) +
                      " has an empty span after clamping to the video; response was:\n" + text);
    }
    set.segments.push_back({TimeSpan::of_tenths(s, e), m[3].str()});
  }
  if (set.segments.empty()) {
    throw DataError("no caption lines found in response:\n" + text);
  }
  if (static_cast<int>(set.segments.size()) > limit) {
    throw DataError("caption set has " + std::to_string(set.segments.size()) +
                    " segments, over the limit of " + std::to_string(limit));
  }

  std::stable_sort(set.segments.begin(), set.segments.end(),
                   [](const CaptionSegment& a, const CaptionSegment& b) { return a.span < b.span; });

  // Small overlaps are split at the midpoint (MLLM timestamps are noisy);
  // anything past the tolerance is a real inconsistency.
  const std::int64_t repair_t = TimeSpan::seconds_to_tenths(cfg.overlap_repair_seconds);
  for (size_t i = 0; i + 1 < set.segments.size(); ++i) {
    auto& prev = set.segments[i];
    auto& cur = set.segments[i + 1];
    std::int64_t overlap = prev.span.end_tenths() - cur.span.start_tenths();
    if (overlap <= 0) continue;
    if (overlap > repair_t) {
      throw DataError("caption segments " + std::to_string(i + 1) + " and " +
                      std::to_string(i + 2) + " overlap by " + format_tenths(overlap) +
                      " s, beyond the " + format_tenths(repair_t) + " s repair tolerance");
    }
    std::int64_t mid = (prev.span.end_tenths() + cur.span.start_tenths() + 1) / 2;
    if (mid <= prev.span.start_tenths() || mid >= cur.span.end_tenths()) {
      throw DataError("caption segments " + std::to_string(i + 1) + " and " +
                      std::to_string(i + 2) + " cannot be separated at their midpoint");
    }
    prev.span = TimeSpan::of_tenths(prev.span.start_tenths(), mid);
    cur.span = TimeSpan::of_tenths(mid, cur.span.end_tenths());
  }

  std::int64_t covered = 0;
  for (const auto& seg : set.segments) {
    covered += seg.span.end_tenths() - seg.span.start_tenths();
  }
  double coverage = static_cast<double>(covered) / static_cast<double>(duration_t);
  if (coverage < cfg.coverage_min) {
    std::ostringstream w;
    w << "segments cover " << format_tenths(covered) << " of " << format_tenths(duration_t)
      << " seconds, below the " << cfg.coverage_min << " floor";
    set.warnings.push_back(w.str());
  }
  return set;
}

MultiGrainedCaptions generate_captions(mllm::CompletionClient& client, const VideoRef& video,
                                       const PipelineConfig& cfg) {
  video.check();
  cfg.limits.check();
  MultiGrainedCaptions out;
  out.video_id = video.uri;
  out.duration_tenths = TimeSpan::seconds_to_tenths(video.duration);

  const std::pair<GrainedCaptionSet*, int> stages[] = {{&out.coarse, cfg.limits.coarse},
                                                       {&out.middle, cfg.limits.middle},
                                                       {&out.fine, cfg.limits.fine}};
  const char* names[] = {"coarse", "middle", "fine"};
  for (int i = 0; i < 3; ++i) {
    mllm::ChatResponse resp = client.complete(caption_request(video, stages[i].second, cfg));
    try {
      *stages[i].first = parse_caption_response(resp.text, stages[i].second, video.duration, cfg);
    } catch (const DataError& e) {
      throw DataError(std::string(names[i]) + " captions: " + e.what());
    }
  }
  return out;
}

std::vector<int> CrossLevelReport::flagged_indices() const {
  std::vector<int> out;
  for (const auto& e : entries) {
    if (e.flagged) out.push_back(e.middle_index);
  }
  return out;
}

CrossLevelReport cross_level_check(const MultiGrainedCaptions& captions, double threshold) {
  auto overlap_score = [](const CaptionSegment& mid, const GrainedCaptionSet& level) {
    std::set<std::string> mine = content_tokens(mid.text);
    if (mine.empty()) return 0.0;
    std::set<std::string> theirs;
    for (const auto& seg : level.segments) {
      if (mid.span.overlap_tenths(seg.span) > 0) {
        auto toks = content_tokens(seg.text);
        theirs.insert(toks.begin(), toks.end());
      }
    }
    int shared = 0;
    for (const auto& tok : mine) shared += theirs.count(tok) ? 1 : 0;
    return static_cast<double>(shared) / static_cast<double>(mine.size());
  };

  CrossLevelReport report;
  for (size_t i = 0; i < captions.middle.segments.size(); ++i) {
    CrossLevelEntry entry;
    entry.middle_index = static_cast<int>(i);
    entry.coarse_overlap = overlap_score(captions.middle.segments[i], captions.coarse);
    entry.fine_overlap = overlap_score(captions.middle.segments[i], captions.fine);
    entry.flagged = entry.coarse_overlap < threshold && entry.fine_overlap < threshold;
    report.entries.push_back(entry);
  }
  return report;
}

namespace {

void emit_set(std::ostringstream& out, const GrainedCaptionSet& set) {
  out << "{\"limit\":" << set.limit << ",\"segments\":[";
  for (size_t i = 0; i < set.segments.size(); ++i) {
    if (i) out << ",";
    const auto& seg = set.segments[i];
    out << "{\"end\":" << seg.span.end_text() << ",\"start\":" << seg.span.start_text()
        << ",\"text\":" << json_quote(seg.text) << "}";
  }
  out << "]}";
}

GrainedCaptionSet set_from_json(const nlohmann::json& j, const char* name,
                                std::int64_t duration_t) {
  if (!j.is_object() || !j.contains("limit") || !j.contains("segments") || j.size() != 2) {
    throw DataError(std::string("caption set '") + name +
                    "' must hold exactly {limit, segments}");
  }
  GrainedCaptionSet set;
  set.limit = j.at("limit").get<int>();
  if (set.limit < 1) throw DataError(std::string("caption set '") + name + "' limit must be >= 1");
  for (const auto& s : j.at("segments")) {
    if (!s.is_object() || !s.contains("start") || !s.contains("end") || !s.contains("text") ||
        s.size() != 3) {
      throw DataError(std::string("caption segment in '") + name +
                      "' must hold exactly {end, start, text}");
    }
    TimeSpan span = TimeSpan::of_seconds(s.at("start").get<double>(), s.at("end").get<double>());
    if (span.end_tenths() > duration_t) {
      throw DataError(std::string("caption segment in '") + name + "' ends after the video");
    }
    set.segments.push_back({span, s.at("text").get<std::string>()});
  }
  if (set.segments.empty()) {
    throw DataError(std::string("caption set '") + name + "' has no segments");
  }
  if (static_cast<int>(set.segments.size()) > set.limit) {
    throw DataError(std::string("caption set '") + name + "' exceeds its own limit");
  }
  for (size_t i = 0; i + 1 < set.segments.size(); ++i) {
    if (set.segments[i].span.end_tenths() > set.segments[i + 1].span.start_tenths()) {
      throw DataError(std::string("caption set '") + name +
                      "' segments are not sorted and non-overlapping");
    }
  }
  return set;
}

}  // namespace

std::string captions_to_json(const MultiGrainedCaptions& captions) {
  std::ostringstream out;
  out << "{\"coarse\":";
  emit_set(out, captions.coarse);
  out << ",\"duration\":" << format_tenths(captions.duration_tenths) << ",\"fine\":";
  emit_set(out, captions.fine);
  out << ",\"middle\":";
  emit_set(out, captions.middle);
  out << ",\"video_id\":" << json_quote(captions.video_id) << "}\n";
  return out.str();
}

MultiGrainedCaptions captions_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("captions file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("captions file must be a JSON object");
  for (const char* key : {"coarse", "duration", "fine", "middle", "video_id"}) {
    if (!j.contains(key)) throw DataError(std::string("captions file missing key: ") + key);
  }
  if (j.size() != 5) throw DataError("captions file has unexpected extra keys");

  MultiGrainedCaptions out;
  out.video_id = j.at("video_id").get<std::string>();
  double duration = j.at("duration").get<double>();
  if (!(duration > 0.0)) throw DataError("captions duration must be positive");
  out.duration_tenths = TimeSpan::seconds_to_tenths(duration);
  out.coarse = set_from_json(j.at("coarse"), "coarse", out.duration_tenths);
  out.middle = set_from_json(j.at("middle"), "middle", out.duration_tenths);
  out.fine = set_from_json(j.at("fine"), "fine", out.duration_tenths);
  if (!(out.coarse.limit < out.middle.limit && out.middle.limit < out.fine.limit)) {
    throw DataError("caption limits must be strictly increasing across granularities");
  }
  return out;
}

}  // namespace evsg::pipeline
