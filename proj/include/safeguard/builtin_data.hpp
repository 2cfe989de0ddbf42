#pragma once

#include <map>
#include <string>

namespace safeguard {

// Bundled config-file contents keyed by repo-relative path under models/
// (e.g. "robots/g1_fixed_base.robot"). Generated from the files in models/ at
// configure time so the shipped files and the compiled-in registry cannot
// drift apart.
const std::map<std::string, std::string>& builtin_data();

}  // namespace safeguard
