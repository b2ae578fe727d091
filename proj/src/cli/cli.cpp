#include "evsg/cli/cli.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "evsg/core/errors.hpp"
#include "evsg/core/serialize.hpp"
#include "evsg/eval/metrics.hpp"
#include "evsg/mllm/mock.hpp"
#include "evsg/pipeline/graph_gen.hpp"
#include "evsg/pipeline/lexicon.hpp"
#include "json.hpp"

namespace evsg::cli {

namespace {

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string(what) + " not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write to " + path.string());
  out << content;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const EndpointError*>(&e)) return 4;
  return 1;
}

// Index-ordered parallel map: results land by input position, so output
// is independent of scheduling.
void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn) {
  size_t workers = parallelism > 0 ? static_cast<size_t>(parallelism)
                                   : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string stem_for(const std::string& uri) {
  std::string stem = std::filesystem::path(uri).stem().string();
  std::string out;
  for (char ch : stem) {
    unsigned char u = static_cast<unsigned char>(ch);
    out.push_back(std::isalnum(u) || ch == '-' || ch == '_' ? ch : '_');
  }
  return out.empty() ? "video" : out;
}

std::vector<pipeline::VideoRef> load_manifest(const std::filesystem::path& path) {
  std::string text = read_file(path, "video manifest");
  std::vector<pipeline::VideoRef> videos;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      pipeline::VideoRef video;
      video.uri = j.at("uri").get<std::string>();
      video.duration = j.at("duration").get<double>();
      if (j.contains("frame_count")) video.frame_count = j.at("frame_count").get<int>();
      if (j.contains("height")) video.height = j.at("height").get<int>();
      if (j.contains("width")) video.width = j.at("width").get<int>();
      video.check();
      videos.push_back(std::move(video));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (videos.empty()) throw DataError("video manifest is empty: " + path.string());
  return videos;
}

}  // namespace

void RunConfig::check() const {
  if (!mock_fixtures.empty() && !endpoint.base_url.empty()) {
    throw ConfigError("mock_fixtures and endpoint.base_url are mutually exclusive");
  }
  pipeline.limits.check();
  weights.check();
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("run config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");

  RunConfig cfg;
  try {
    if (j.contains("endpoint")) {
      const auto& e = j.at("endpoint");
      if (e.contains("base_url")) cfg.endpoint.base_url = e.at("base_url").get<std::string>();
      if (e.contains("auth_token_env")) {
        cfg.endpoint.auth_token_env = e.at("auth_token_env").get<std::string>();
      }
      if (e.contains("model_id")) cfg.endpoint.model_id = e.at("model_id").get<std::string>();
      if (e.contains("timeout_ms")) cfg.endpoint.timeout_ms = e.at("timeout_ms").get<int64_t>();
      if (e.contains("max_retries")) cfg.endpoint.max_retries = e.at("max_retries").get<int>();
      if (e.contains("backoff_ms")) cfg.endpoint.backoff_ms = e.at("backoff_ms").get<int64_t>();
      if (e.contains("max_in_flight")) {
        cfg.endpoint.max_in_flight = e.at("max_in_flight").get<int>();
      }
    }
    if (j.contains("mock_fixtures")) {
      cfg.mock_fixtures = j.at("mock_fixtures").get<std::string>();
    }
    if (j.contains("template_dir")) {
      cfg.pipeline.template_dir = j.at("template_dir").get<std::string>();
    }
    if (j.contains("lexicon")) cfg.lexicon_path = j.at("lexicon").get<std::string>();
    if (j.contains("limits")) {
      const auto& l = j.at("limits");
      cfg.pipeline.limits.coarse = l.at("coarse").get<int>();
      cfg.pipeline.limits.middle = l.at("middle").get<int>();
      cfg.pipeline.limits.fine = l.at("fine").get<int>();
    }
    if (j.contains("coverage_min")) {
      cfg.pipeline.coverage_min = j.at("coverage_min").get<double>();
    }
    if (j.contains("overlap_repair_seconds")) {
      cfg.pipeline.overlap_repair_seconds = j.at("overlap_repair_seconds").get<double>();
    }
    if (j.contains("caption_temperature")) {
      cfg.pipeline.caption_temperature = j.at("caption_temperature").get<double>();
    }
    if (j.contains("graph_temperature")) {
      cfg.pipeline.graph_temperature = j.at("graph_temperature").get<double>();
    }
    if (j.contains("max_tokens")) cfg.pipeline.max_tokens = j.at("max_tokens").get<int>();
    if (j.contains("strict_triplets")) {
      cfg.pipeline.strict_triplets = j.at("strict_triplets").get<bool>();
    }
    if (j.contains("refine_timestamp_tolerance")) {
      cfg.pipeline.refine_timestamp_tolerance = j.at("refine_timestamp_tolerance").get<double>();
    }
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      if (w.contains("alpha")) cfg.weights.alpha = w.at("alpha").get<double>();
      if (w.contains("lambda_acc")) cfg.weights.lambda_acc = w.at("lambda_acc").get<double>();
      if (w.contains("lambda_form")) cfg.weights.lambda_form = w.at("lambda_form").get<double>();
      if (w.contains("lambda_attn")) cfg.weights.lambda_attn = w.at("lambda_attn").get<double>();
      if (w.contains("gate_sim")) cfg.weights.gate_sim = w.at("gate_sim").get<double>();
      if (w.contains("gate_tiou")) cfg.weights.gate_tiou = w.at("gate_tiou").get<double>();
    }
    if (j.contains("train")) {
      cfg.train = grpo::train_config_from_json(j.at("train").dump());
    }
    if (j.contains("parallelism")) cfg.parallelism = j.at("parallelism").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config field has wrong type: ") + e.what());
  }
  cfg.pipeline.model_id = cfg.endpoint.model_id;
  cfg.check();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from_json(read_file(path, "run config"));
}

std::unique_ptr<mllm::CompletionClient> make_client(const RunConfig& cfg) {
  if (!cfg.mock_fixtures.empty()) {
    return std::make_unique<mllm::ScriptedMockClient>(cfg.mock_fixtures);
  }
  if (!cfg.endpoint.base_url.empty()) {
    return std::make_unique<mllm::HttpCompletionClient>(cfg.endpoint);
  }
  throw ConfigError("no completion source configured: set endpoint.base_url or mock_fixtures");
}

std::string score_record_json(const std::string& record_json,
                              const reward::RewardWeights& weights) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(record_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("reward record is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("reward record must be a JSON object");

  reward::GroundTruth gt;
  std::string raw_text;
  reward::AttentionDump dump = reward::AttentionDump::from_sums(0.0, 0.0);
  try {
    for (const char* key : {"raw_text", "gt_start", "gt_end", "gt_answer"}) {
      if (!j.contains(key)) throw DataError(std::string("reward record missing field ") + key);
    }
    raw_text = j.at("raw_text").get<std::string>();
    gt.gt_span = TimeSpan::of_seconds(j.at("gt_start").get<double>(),
                                      j.at("gt_end").get<double>());
    gt.gt_answer = j.at("gt_answer").get<std::string>();
    if (j.contains("attention")) {
      const auto& a = j.at("attention");
      if (a.is_string()) {
        dump = reward::AttentionDump::from_json(
            read_file(a.get<std::string>(), "attention dump"));
      } else {
        dump = reward::AttentionDump::from_json(a.dump());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("reward record field has wrong type: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(e.what());  // missing referenced dump is bad data here
  }

  reward::RewardBreakdown b =
      reward::composite(reward::parse_response(raw_text), gt, dump, weights);

  nlohmann::json out{{"r_sim", b.r_sim},           {"r_tiou", b.r_tiou},
                     {"r_acc", b.r_acc},           {"r_form", b.r_form},
                     {"r_attn_raw", b.r_attn_raw}, {"r_attn_gated", b.r_attn_gated},
                     {"total", b.total}};
  if (j.contains("id")) out["id"] = j.at("id");
  auto [vid, graph] = dump.group_sums();
  if (vid + graph <= 0.0) out["warnings"] = {"attention mass is zero"};
  return out.dump() + "\n";
}

namespace {

int cmd_caption(const RunConfig& cfg, const std::filesystem::path& manifest,
                const std::filesystem::path& out_dir) {
  std::vector<pipeline::VideoRef> videos = load_manifest(manifest);
  std::set<std::string> stems;
  for (const auto& v : videos) {
    if (!stems.insert(stem_for(v.uri)).second) {
      throw DataError("manifest produces duplicate output name for " + v.uri);
    }
  }
  auto client = make_client(cfg);

  struct Outcome {
    std::string uri, path, error;
    int code = 0;
  };
  std::vector<Outcome> outcomes(videos.size());
  parallel_for(videos.size(), cfg.parallelism, [&](size_t i) {
    Outcome& o = outcomes[i];
    o.uri = videos[i].uri;
    try {
      pipeline::MultiGrainedCaptions caps =
          pipeline::generate_captions(*client, videos[i], cfg.pipeline);
      std::filesystem::path out = out_dir / (stem_for(videos[i].uri) + ".captions.json");
      write_file(out, pipeline::captions_to_json(caps));
      o.path = out.string();
      for (const auto* set : {&caps.coarse, &caps.middle, &caps.fine}) {
        for (const auto& w : set->warnings) o.error += (o.error.empty() ? "" : "; ") + w;
      }
      for (int idx : pipeline::cross_level_check(caps).flagged_indices()) {
        o.error += (o.error.empty() ? "" : "; ") + std::string("middle segment ") +
                   std::to_string(idx + 1) + " is unsupported by the other caption levels";
      }
      if (!o.error.empty()) {
        std::cerr << "warning: " << o.uri << ": " << o.error << "\n";
        o.error.clear();
      }
    } catch (const std::exception& e) {
      o.error = e.what();
      o.code = exit_code_for(e);
    }
  });

  int failures = 0, code = 0;
  for (const auto& o : outcomes) {
    if (o.code != 0) {
      ++failures;
      if (code == 0) code = o.code;
      std::cerr << "failed: " << o.uri << ": " << o.error << "\n";
    } else {
      std::cout << "wrote " << o.path << "\n";
    }
  }
  if (failures > 0) {
    std::cerr << failures << " of " << videos.size() << " videos failed\n";
    return code;
  }
  return 0;
}

int cmd_graph_build(const RunConfig& cfg, const std::filesystem::path& captions_path,
                    const std::filesystem::path& out) {
  pipeline::MultiGrainedCaptions caps =
      pipeline::captions_from_json(read_file(captions_path, "captions file"));
  pipeline::VideoRef video;
  video.uri = caps.video_id;
  video.duration = static_cast<double>(caps.duration_tenths) / 10.0;
  auto client = make_client(cfg);
  auto [graph, warnings] =
      pipeline::generate_initial_graph(*client, video, caps.middle, cfg.pipeline);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  write_file(out, serialize(graph));
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_graph_refine(const RunConfig& cfg, const std::filesystem::path& graph_path,
                     const std::filesystem::path& captions_path,
                     const std::filesystem::path& out, const std::filesystem::path& log_path) {
  EventGraph g_init = parse_graph(read_file(graph_path, "graph file"));
  pipeline::MultiGrainedCaptions caps =
      pipeline::captions_from_json(read_file(captions_path, "captions file"));
  pipeline::VideoRef video;
  video.uri = g_init.video_id;
  video.duration = g_init.duration_seconds();
  pipeline::ConstraintLexicon lexicon = pipeline::ConstraintLexicon::load(cfg.lexicon_path);
  auto client = make_client(cfg);
  auto [refined, log] = pipeline::refine_graph(*client, video, g_init, caps.coarse, caps.fine,
                                               lexicon, cfg.pipeline);
  write_file(out, serialize(refined));
  if (!log_path.empty()) write_file(log_path, log.to_json());
  for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_graph_validate(const std::filesystem::path& graph_path) {
  std::string text = read_file(graph_path, "graph file");
  EventGraph graph;
  try {
    graph = parse_graph(text);
  } catch (const DataError& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return 3;
  }
  ValidationReport report = validate(graph);
  std::cout << "ok: " << graph.events.size() << " events, " << graph.edges.size() << " edges\n";
  for (const auto& w : report.warnings) {
    std::cout << "warning [" << w.code << "] " << w.message << "\n";
  }
  return 0;
}

int cmd_reward(const RunConfig& cfg, const std::filesystem::path& batch_path,
               const std::filesystem::path& out_path) {
  std::string text = read_file(batch_path, "reward batch");
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
    }
  }
  if (lines.empty()) throw DataError("reward batch is empty: " + batch_path.string());

  std::vector<std::string> results(lines.size());
  std::atomic<int> failures{0};
  parallel_for(lines.size(), cfg.parallelism, [&](size_t i) {
    try {
      results[i] = score_record_json(lines[i], cfg.weights);
    } catch (const std::exception& e) {
      nlohmann::json err{{"error", e.what()}, {"line", i + 1}};
      results[i] = err.dump() + "\n";
      failures.fetch_add(1);
    }
  });

  std::ostringstream out;
  for (const auto& r : results) out << r;
  write_file(out_path, out.str());
  std::cout << "wrote " << out_path.string() << " (" << lines.size() - failures.load() << "/"
            << lines.size() << " records scored)\n";
  return failures.load() == 0 ? 0 : 3;
}

int cmd_serve(const RunConfig& cfg, const std::string& host, int port) {
  RewardService service(cfg.weights);
  int bound = service.start(host, port);
  std::cout << "scoring service listening on " << host << ":" << bound << "\n";
  service.wait();
  std::cout << "scoring service stopped\n";
  return 0;
}

int cmd_train_toy(const RunConfig& cfg, const std::filesystem::path& out,
                  std::optional<std::uint64_t> seed) {
  grpo::TrainToyConfig train = cfg.train;
  if (seed) train.grpo.seed = *seed;
  grpo::TrainReport report = grpo::train_toy(train);
  write_file(out, grpo::report_to_json(report));
  std::cout << "initial eval " << report.initial_eval << ", final eval " << report.final_eval
            << " over " << report.mean_reward.size() << " iterations\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_eval(const std::filesystem::path& predictions, const std::filesystem::path& out,
             const std::string& matcher, double threshold) {
  eval::EvalOptions opts;
  if (matcher == "exact") {
    opts.matcher = eval::AnswerMatcher::Exact;
  } else if (matcher == "letter") {
    opts.matcher = eval::AnswerMatcher::Letter;
  } else if (matcher == "similarity") {
    opts.matcher = eval::AnswerMatcher::Similarity;
  } else {
    throw ConfigError("unknown matcher '" + matcher + "' (exact, letter, similarity)");
  }
  opts.similarity_threshold = threshold;
  auto records = eval::load_predictions(predictions, opts);
  eval::MetricsReport report = eval::compute_metrics(records);
  std::cout << report.to_text();
  if (!out.empty()) {
    write_file(out, report.to_json());
    std::cout << "wrote " << out.string() << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Event-based video scene graphs, composite rewards, and a toy GRPO lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mock_dir;
  int parallelism = -1;
  app.add_option("--config", config_path, "run config JSON file");
  app.add_option("--mock", mock_dir, "mock fixture directory (overrides endpoint)");
  app.add_option("--parallelism", parallelism, "worker threads for batch subcommands");

  auto* caption = app.add_subcommand("caption", "multi-grained captions for each video");
  std::string manifest, caption_out_dir = "out";
  caption->add_option("--manifest", manifest, "video manifest (JSON lines)")->required();
  caption->add_option("--out-dir", caption_out_dir, "output directory");

  auto* graph = app.add_subcommand("graph", "build, refine, or validate scene graphs");
  graph->require_subcommand(1);
  auto* build = graph->add_subcommand("build", "initial graph from middle captions");
  std::string build_captions, build_out = "graph.json";
  build->add_option("--captions", build_captions, "captions file")->required();
  build->add_option("--out", build_out, "output graph file");
  auto* refine = graph->add_subcommand("refine", "verify and enrich an initial graph");
  std::string refine_graph_path, refine_captions, refine_out = "refined.json", refine_log;
  refine->add_option("--graph", refine_graph_path, "initial graph file")->required();
  refine->add_option("--captions", refine_captions, "captions file")->required();
  refine->add_option("--out", refine_out, "output graph file");
  refine->add_option("--log", refine_log, "refinement log file");
  auto* validate_cmd = graph->add_subcommand("validate", "check a graph file");
  std::string validate_path;
  validate_cmd->add_option("--graph", validate_path, "graph file")->required();

  auto* reward_cmd = app.add_subcommand("reward", "score a batch of completions");
  std::string batch_path, reward_out = "rewards.jsonl";
  reward_cmd->add_option("--batch", batch_path, "batch file (JSON lines)")->required();
  reward_cmd->add_option("--out", reward_out, "output file");

  auto* serve = app.add_subcommand("serve", "run the scoring service");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks one)");

  auto* train = app.add_subcommand("train-toy", "seeded toy GRPO training run");
  std::string train_out = "train_report.json";
  std::uint64_t train_seed = 0;
  bool seed_given = false;
  train->add_option("--out", train_out, "report file");
  train->add_option("--seed", train_seed, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* eval_cmd = app.add_subcommand("eval", "metrics over a prediction file");
  std::string predictions, eval_out, matcher = "exact";
  double threshold = 0.7;
  eval_cmd->add_option("--predictions", predictions, "prediction file (JSON lines)")->required();
  eval_cmd->add_option("--out", eval_out, "machine-readable report file");
  eval_cmd->add_option("--matcher", matcher, "answer matcher: exact, letter, similarity");
  eval_cmd->add_option("--threshold", threshold, "similarity matcher threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::load(config_path);
    if (!mock_dir.empty()) {
      cfg.mock_fixtures = mock_dir;
      cfg.endpoint.base_url.clear();
    }
    if (parallelism >= 0) cfg.parallelism = parallelism;
    cfg.check();

    if (*caption) return cmd_caption(cfg, manifest, caption_out_dir);
    if (*build) return cmd_graph_build(cfg, build_captions, build_out);
    if (*refine) return cmd_graph_refine(cfg, refine_graph_path, refine_captions, refine_out,
                                         refine_log);
    if (*validate_cmd) return cmd_graph_validate(validate_path);
    if (*reward_cmd) return cmd_reward(cfg, batch_path, reward_out);
    if (*serve) return cmd_serve(cfg, host, port);
    if (*train) {
      return cmd_train_toy(cfg, train_out,
                           seed_given ? std::optional<std::uint64_t>(train_seed) : std::nullopt);
    }
    if (*eval_cmd) return cmd_eval(predictions, eval_out, matcher, threshold);
    throw Error("no subcommand dispatched");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace evsg::cli
