#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace bibmatch {

// English titles of the two-digit top-level MSC classes, shipped statically.
const std::map<std::string, std::string>& msc_titles();

// Title for a code's two-digit prefix; nullopt for unknown prefixes.
std::optional<std::string> msc_title(std::string_view code);

}  // namespace bibmatch
