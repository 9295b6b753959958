#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace axv {

/// Lowercases, deletes punctuation (so "isn't" becomes "isnt") and splits on
/// whitespace. Bytes outside ASCII are kept as word characters.
std::vector<std::string> normalize(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace axv
