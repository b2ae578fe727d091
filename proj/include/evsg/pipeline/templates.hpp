#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace evsg::pipeline {

// Reads <dir>/<name>.txt. Throws ConfigError when the file is missing.
std::string load_template(const std::filesystem::path& dir, const std::string& name);

// Replaces every {{placeholder}} with its value. A placeholder without a
// value throws ConfigError naming it; values without a placeholder are fine.
std::string render_template(const std::string& tpl,
                            const std::map<std::string, std::string>& values);

}  // namespace evsg::pipeline
