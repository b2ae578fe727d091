#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evsg/core/time_span.hpp"
#include "evsg/mllm/client.hpp"

namespace evsg::pipeline {

// Video metadata only; pixels are never read here.
struct VideoRef {
  std::string uri;
  double duration = 0.0;  // seconds
  std::optional<int> frame_count, height, width;

  void check() const;  // throws DataError
};

struct CaptionSegment {
  TimeSpan span;
  std::string text;

  bool operator==(const CaptionSegment&) const = default;
};

// One granularity: at most `limit` consecutive, non-overlapping segments.
struct GrainedCaptionSet {
  int limit = 0;
  std::vector<CaptionSegment> segments;
  std::vector<std::string> warnings;  // coverage shortfalls etc, not serialized
};

struct MultiGrainedCaptions {
  std::string video_id;
  std::int64_t duration_tenths = 0;
  GrainedCaptionSet coarse, middle, fine;
};

struct CaptionLimits {
  int coarse = 5;
  int middle = 10;
  int fine = 15;

  void check() const;  // strictly increasing, each >= 1; throws ConfigError
};

// Knobs shared by the caption and graph stages.
struct PipelineConfig {
  std::filesystem::path template_dir = "prompts";
  CaptionLimits limits;
  double coverage_min = 0.95;          // flagged (not failed) below this
  double overlap_repair_seconds = 0.5; // larger segment overlaps are errors
  double caption_temperature = 0.2;
  double graph_temperature = 0.0;
  int max_tokens = 1024;
  std::string model_id = "default";
  bool strict_triplets = false;        // malformed triplet lines: warn vs error
  double refine_timestamp_tolerance = 1.0;  // seconds each endpoint may move
};

// Prompt request builders, exposed so tests can fingerprint them when
// recording mock fixtures.
mllm::ChatRequest caption_request(const VideoRef& video, int limit, const PipelineConfig& cfg);

// "1. [0.0 - 12.5] text" lines, one per segment.
std::string render_caption_lines(const GrainedCaptionSet& set);

// Parses "start - end: text" lines, clamps spans to [0, duration], repairs
// overlaps up to the tolerance by splitting at the midpoint, and enforces
// the segment cap. Throws DataError on unparseable lines, spans that vanish
// under clamping, repair-exceeding overlaps, or more than `limit` segments.
GrainedCaptionSet parse_caption_response(const std::string& text, int limit, double duration,
                                         const PipelineConfig& cfg);

// One endpoint call per granularity; deterministic under the scripted mock.
MultiGrainedCaptions generate_captions(mllm::CompletionClient& client, const VideoRef& video,
                                       const PipelineConfig& cfg);

// Token-overlap consistency check of every middle segment against the
// temporally overlapping coarse and fine segments. A middle segment whose
// overlap with BOTH levels falls below the threshold is flagged.
struct CrossLevelEntry {
  int middle_index = 0;  // 0-based position in captions.middle.segments
  double coarse_overlap = 0.0;
  double fine_overlap = 0.0;
  bool flagged = false;
};

struct CrossLevelReport {
  std::vector<CrossLevelEntry> entries;

  std::vector<int> flagged_indices() const;
};

CrossLevelReport cross_level_check(const MultiGrainedCaptions& captions,
                                   double threshold = 0.1);

// Canonical captions file: single-line JSON, sorted keys, one-decimal
// timestamps, newline-terminated.
std::string captions_to_json(const MultiGrainedCaptions& captions);
MultiGrainedCaptions captions_from_json(const std::string& text);

}  // namespace evsg::pipeline
