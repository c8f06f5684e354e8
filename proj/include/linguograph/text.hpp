#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lg::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

/// Case- and diacritic-folded form used for search matching. Latin letters
/// with diacritics (Latin-1 Supplement, Latin Extended-A) fold to their base
/// letter; other code points pass through unchanged.
std::string fold(std::string_view utf8);

struct Row {
  std::size_t line = 0;  // 1-based line of the row start
  std::vector<std::string> fields;
};

/// Reads a delimited text file. With `quoted` set, fields follow RFC 4180
/// quoting (CSV); otherwise fields are split verbatim on the delimiter (TSV).
/// Blank lines are skipped. Throws Error{io} when the file cannot be read.
std::vector<Row> read_delimited(const std::filesystem::path& path, char delim, bool quoted);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace lg::text
