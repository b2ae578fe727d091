#include "evsg/pipeline/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "evsg/core/errors.hpp"
#include "evsg/core/triplet.hpp"

namespace evsg::pipeline {

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(normalize_label(w));
  return words;
}

}  // namespace

bool ConstraintLexicon::excludes(const std::string& a, const std::string& b) const {
  if (a == b) return false;
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  return exclusion_pairs.count(key) > 0;
}

void ConstraintLexicon::check() const {
  for (const auto& [state, terms] : termination_relations) {
    if (!state_relations.count(state)) {
      throw DataError("terminator declared for unknown state relation: " + state);
    }
    if (terms.count(state)) {
      throw DataError("state relation cannot terminate itself: " + state);
    }
  }
}

ConstraintLexicon ConstraintLexicon::parse(const std::string& text) {
  ConstraintLexicon lex;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> words = split_words(line);
    if (words.empty()) continue;
    const std::string& kind = words[0];
    auto need = [&](size_t n) {
      if (words.size() != n + 1) {
        throw DataError("lexicon line " + std::to_string(line_no) + ": '" + kind +
                        "' takes " + std::to_string(n) + " labels");
      }
    };
    if (kind == "exclude") {
      need(2);
      if (words[1] == words[2]) {
        throw DataError("lexicon line " + std::to_string(line_no) +
                        ": a relation cannot exclude itself");
      }
      lex.exclusion_pairs.insert(words[1] < words[2] ? std::make_pair(words[1], words[2])
                                                     : std::make_pair(words[2], words[1]));
    } else if (kind == "state") {
      need(1);
      lex.state_relations.insert(words[1]);
    } else if (kind == "terminates") {
      need(2);
      lex.termination_relations[words[1]].insert(words[2]);
    } else if (kind == "causes") {
      need(2);
      lex.causal_pairs.emplace_back(words[1], words[2]);
    } else {
      throw DataError("lexicon line " + std::to_string(line_no) + ": unknown rule kind '" +
                      kind + "'");
    }
  }
  lex.check();
  return lex;
}

ConstraintLexicon ConstraintLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("lexicon file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace evsg::pipeline
