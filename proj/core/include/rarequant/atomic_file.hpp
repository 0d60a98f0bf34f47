#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>

namespace rarequant {

// Writes through a temporary sibling file and renames it over path once the
// writer returns. If the writer throws, the temporary is removed and path is
// left untouched.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace rarequant
