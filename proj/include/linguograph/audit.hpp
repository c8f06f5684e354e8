#pragma once

// Classification of language-code inventories into valid / deprecated /
// region_code / unknown, with per-group breakdowns.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "linguograph/resolve.hpp"

namespace lg::audit {

enum class Category { valid, deprecated, region_code, unknown };
std::string_view to_string(Category c);

struct CodeVerdict {
  std::string code;
  Category category = Category::unknown;
  std::optional<IdType> matched_type;
  std::vector<std::string> replacements;
  std::string node_id;  // languoid or region id when one was matched
  std::string note;

  bool operator==(const CodeVerdict&) const = default;
};

/// Total: never throws. Order: current languoid code, deprecation, region
/// code (case-insensitive), unknown.
CodeVerdict classify_code(const resolve::Resolver& resolver, std::string_view code);

struct AuditReport {
  std::vector<CodeVerdict> verdicts;  // one per unique code, sorted by code
  std::size_t inputs = 0;             // rows read, duplicates included
  std::map<Category, std::size_t> counts;
  std::map<IdType, std::size_t> matched_types;  // over valid codes
  std::map<std::string, std::map<Category, std::size_t>> groups;

  std::string text() const;
  nlohmann::json to_json() const;
};

using GroupedCode = std::pair<std::string, std::string>;  // (group, code)

AuditReport audit_codes(const resolve::Resolver& resolver, const std::vector<GroupedCode>& codes);

/// One code per line, or "group<TAB>code". Blank lines and lines starting
/// with '#' are skipped.
std::vector<GroupedCode> read_codes(std::istream& in);
/// Throws Error{io} when the file cannot be read.
std::vector<GroupedCode> read_codes(const std::filesystem::path& path);

}  // namespace lg::audit
