#include "evsg/core/serialize.hpp"

#include <json.hpp>
#include <sstream>

#include "evsg/core/errors.hpp"

namespace evsg {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw DataError(std::string("unknown field \"") + it.key() + "\" in " + where);
    }
  }
}

const json& require_field(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(std::string("missing field \"") + key + "\" in " + where);
  }
  return *it;
}

std::int64_t read_tenths(const json& v, const char* what) {
  if (!v.is_number()) {
    throw DataError(std::string(what) + " must be a number");
  }
  return TimeSpan::seconds_to_tenths(v.get<double>());
}

}  // namespace

std::string json_quote(const std::string& s) {
  return json(s).dump();
}

std::string serialize(const EventGraph& graph) {
  ValidationReport report = validate(graph);
  if (!report.ok()) {
    std::ostringstream os;
    os << "cannot serialize invalid graph:";
    for (const auto& e : report.errors) os << " [" << e.code << "] " << e.message << ";";
    throw DataError(os.str());
  }

  std::ostringstream os;
  os << "{\"duration\":" << format_tenths(graph.duration_tenths) << ",\"edges\":[";
  bool first = true;
  for (const auto& e : graph.edges) {
    if (!first) os << ',';
    first = false;
    os << '[' << e.first << ',' << e.second << ']';
  }
  os << "],\"events\":[";
  first = true;
  for (const auto& ev : graph.events) {
    if (!first) os << ',';
    first = false;
    os << "{\"end\":" << ev.span.end_text() << ",\"index\":" << ev.index
       << ",\"start\":" << ev.span.start_text() << ",\"triplets\":[";
    bool tfirst = true;
    for (const auto& t : ev.triplets) {
      if (!tfirst) os << ',';
      tfirst = false;
      os << "{\"object\":" << json_quote(t.object)
         << ",\"relation\":" << json_quote(t.relation)
         << ",\"subject\":" << json_quote(t.subject) << '}';
    }
    os << "]}";
  }
  os << "],\"video_id\":" << json_quote(graph.video_id) << "}\n";
  return os.str();
}

EventGraph parse_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "EVSG parse error at byte " << e.byte << ": " << e.what();
    throw DataError(os.str());
  }
  if (!doc.is_object()) {
    throw DataError("EVSG document must be a JSON object");
  }
  require_keys(doc, {"duration", "edges", "events", "video_id"}, "EVSG document");

  EventGraph g;
  g.video_id = require_field(doc, "video_id", "EVSG document").get<std::string>();
  g.duration_tenths = read_tenths(require_field(doc, "duration", "EVSG document"), "duration");

  const json& events = require_field(doc, "events", "EVSG document");
  if (!events.is_array()) throw DataError("\"events\" must be an array");
  for (const auto& ev : events) {
    if (!ev.is_object()) throw DataError("event entries must be objects");
    require_keys(ev, {"end", "index", "start", "triplets"}, "event");
    EventSubgraph sub;
    sub.index = require_field(ev, "index", "event").get<int>();
    std::int64_t s = read_tenths(require_field(ev, "start", "event"), "event start");
    std::int64_t e = read_tenths(require_field(ev, "end", "event"), "event end");
    sub.span = TimeSpan::of_tenths(s, e);
    const json& triplets = require_field(ev, "triplets", "event");
    if (!triplets.is_array()) throw DataError("event \"triplets\" must be an array");
    for (const auto& t : triplets) {
      if (!t.is_object()) throw DataError("triplet entries must be objects");
      require_keys(t, {"object", "relation", "subject"}, "triplet");
      sub.triplets.push_back(Triplet::make(
          require_field(t, "subject", "triplet").get<std::string>(),
          require_field(t, "relation", "triplet").get<std::string>(),
          require_field(t, "object", "triplet").get<std::string>()));
    }
    g.events.push_back(std::move(sub));
  }

  const json& edges = require_field(doc, "edges", "EVSG document");
  if (!edges.is_array()) throw DataError("\"edges\" must be an array");
  int n = static_cast<int>(g.events.size());
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw DataError("edge entries must be [i, j] integer pairs");
    }
    int i = e[0].get<int>();
    int j = e[1].get<int>();
    if (i < 1 || i > n || j < 1 || j > n) {
      std::ostringstream os;
      os << "edge [" << i << ", " << j << "] references a missing event (graph has "
         << n << " events)";
      throw DataError(os.str());
    }
    g.edges.emplace(i, j);
  }

  ValidationReport report = validate(g);
  if (!report.ok()) {
    std::ostringstream os;
    os << "parsed graph is structurally invalid:";
    for (const auto& err : report.errors) {
      os << " [" << err.code << "] " << err.message << ";";
    }
    throw DataError(os.str());
  }
  return g;
}

std::string render_prompt(const EventGraph& graph) {
  std::ostringstream os;
  for (const auto& ev : graph.events) {
    os << "Event " << ev.index << " [" << ev.span.start_text() << "-"
       << ev.span.end_text() << " s]:\n";
    if (ev.triplets.empty()) {
      os << "  (no relations)\n";
    } else {
      for (const auto& t : ev.triplets) {
        os << "  " << t.text() << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace evsg
