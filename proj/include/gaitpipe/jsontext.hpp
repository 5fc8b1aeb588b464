#pragma once

#include <string>

#include <json.hpp>

namespace gaitpipe {

/// Same layout as json::dump, but floats use the shortest round-trip form
/// (the bundled printer sometimes emits 17 digits where fewer suffice).
std::string dump_json(const nlohmann::json& j, int indent = -1);

}  // namespace gaitpipe
