#include "evsg/pipeline/templates.hpp"

#include <fstream>
#include <sstream>

#include "evsg/core/errors.hpp"

namespace evsg::pipeline {

std::string load_template(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::path path = dir / (name + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("prompt template not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string render_template(const std::string& tpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size());
  size_t pos = 0;
  while (pos < tpl.size()) {
    size_t open = tpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tpl, pos, std::string::npos);
      break;
    }
    out.append(tpl, pos, open - pos);
    size_t close = tpl.find("}}", open + 2);
    if (close == std::string::npos) {
      throw ConfigError("unterminated placeholder in template at offset " +
                        std::to_string(open));
    }
    std::string name = tpl.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end()) throw ConfigError("template placeholder has no value: " + name);
    out += it->second;
    pos = close + 2;
  }
  return out;
}

}  // namespace evsg::pipeline
