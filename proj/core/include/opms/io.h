#ifndef OPMS_IO_H_
#define OPMS_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace opms {

inline constexpr int kFormatVersion = 1;

// 17 significant digits; parses back to the same double.
void append_double(std::string& out, double v);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// Pretty-printed JSON with a trailing newline.
void write_json_atomic(const std::filesystem::path& path,
                       const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& path);

// Throws FormatError unless doc["format_version"] == kFormatVersion.
void check_format_version(const nlohmann::json& doc, std::string_view what);

}  // namespace opms

#endif  // OPMS_IO_H_
