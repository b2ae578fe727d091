#include "evsg/pipeline/constraints.hpp"

#include <algorithm>
#include <map>

namespace evsg::pipeline {

namespace {

// Does `next` end the state carried by `t`? A terminator mentions the
// state's subject on either side, e.g. <towel, lies_on, ground> is ended
// by <man, picks_up, towel> as well as by <towel, falls_off, table>.
bool terminates_state(const ConstraintLexicon& lexicon, const Triplet& t,
                      const std::vector<Triplet>& next) {
  auto it = lexicon.termination_relations.find(t.relation);
  if (it == lexicon.termination_relations.end()) return false;
  for (const Triplet& u : next) {
    if (it->second.count(u.relation) && (u.subject == t.subject || u.object == t.subject)) {
      return true;
    }
  }
  return false;
}

bool conflicts_with_existing(const ConstraintLexicon& lexicon, const Triplet& t,
                             const std::vector<Triplet>& next) {
  for (const Triplet& u : next) {
    if (u.subject == t.subject && u.object == t.object && lexicon.excludes(u.relation, t.relation)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::pair<EventGraph, ConstraintReport> apply_constraints(const EventGraph& graph,
                                                          const ConstraintLexicon& lexicon,
                                                          bool propagate_states) {
  EventGraph out = graph;
  ConstraintReport report;

  // (a) mutual exclusion inside one event: no confidence scores exist here,
  // so the tie rule always applies and the later-listed triplet is dropped.
  for (auto& ev : out.events) {
    std::vector<Triplet> kept;
    for (const Triplet& t : ev.triplets) {
      bool drop = false;
      for (const Triplet& k : kept) {
        if (k.subject == t.subject && k.object == t.object && lexicon.excludes(k.relation, t.relation)) {
          drop = true;
          report.violations.push_back(
              {"mutual-exclusion", ev.index,
               t.text() + " contradicts " + k.text() + " in the same event"});
          report.removed.push_back({ev.index, t, "mutual-exclusion"});
          break;
        }
      }
      if (!drop) kept.push_back(t);
    }
    ev.triplets = std::move(kept);
  }

  // (b) causal order, report-only: the earliest sighting of a prerequisite
  // must not come after the earliest sighting of its consequent for the
  // same subject.
  for (const auto& [pre, post] : lexicon.causal_pairs) {
    std::map<std::string, int> first_pre, first_post;
    for (const auto& ev : out.events) {
      for (const Triplet& t : ev.triplets) {
        if (t.relation == pre && !first_pre.count(t.subject)) first_pre[t.subject] = ev.index;
        if (t.relation == post && !first_post.count(t.subject)) first_post[t.subject] = ev.index;
      }
    }
    for (const auto& [subject, pre_idx] : first_pre) {
      auto it = first_post.find(subject);
      if (it != first_post.end() && pre_idx > it->second) {
        report.violations.push_back(
            {"causal-order", it->second,
             "'" + post + "' for '" + subject + "' at event " + std::to_string(it->second) +
                 " precedes its prerequisite '" + pre + "' at event " +
                 std::to_string(pre_idx)});
      }
    }
  }

  // (c) static-state propagation into the next event. Copies are skipped
  // when the state is terminated there, already present, or would clash
  // with an exclusion rule (so a second pass changes nothing).
  if (propagate_states) {
    for (size_t i = 0; i + 1 < out.events.size(); ++i) {
      auto& next = out.events[i + 1];
      for (const Triplet& t : out.events[i].triplets) {
        if (!lexicon.state_relations.count(t.relation)) continue;
        if (std::find(next.triplets.begin(), next.triplets.end(), t) != next.triplets.end()) {
          continue;
        }
        if (terminates_state(lexicon, t, next.triplets)) continue;
        if (conflicts_with_existing(lexicon, t, next.triplets)) continue;
        next.triplets.push_back(t);
        report.added.push_back({next.index, t, "propagation"});
      }
    }
  }

  return {std::move(out), std::move(report)};
}

}  // namespace evsg::pipeline
