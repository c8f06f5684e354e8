#pragma once

// Source registry, local snapshot cache and the per-source importers that
// turn upstream files into neutral RawRecords with provenance.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "linguograph/core.hpp"

namespace lg::ingest {

namespace fs = std::filesystem;

enum class Layout { json_per_language, cldf_csv, tsv, registry_text, csv };

std::string_view to_string(Layout layout);
std::optional<Layout> parse_layout(std::string_view s);

struct SourceDescriptor {
  std::string source_id;
  std::string locator;  // local path, file:// or http(s):// URL
  Layout expected_layout = Layout::tsv;
  std::optional<std::string> pinned_version;  // version string or sha256 checksum
};

struct FetchResult {
  std::vector<fs::path> files;  // sorted
  fs::path root;                // cache directory holding `files`
  std::string version;
  std::string checksum;
  bool refreshed = false;
};

// Retrieves the upstream bytes of a locator. The default fetcher handles
// local paths and file:// directly and http(s):// via a single GET.
class Fetcher {
 public:
  virtual ~Fetcher() = default;

  struct Snapshot {
    std::map<std::string, std::string> files;  // relative path -> bytes
  };

  /// Returns nullopt when the locator is unreachable.
  virtual std::optional<Snapshot> fetch(const std::string& locator) = 0;
};

class DefaultFetcher final : public Fetcher {
 public:
  std::optional<Snapshot> fetch(const std::string& locator) override;
};

/// sha256 over the snapshot's (relative path, bytes) pairs in path order.
std::string snapshot_checksum(const Fetcher::Snapshot& snapshot);

/// Copies the source into `<cache>/<source_id>/<version>/` and records
/// `<cache>/<source_id>/meta`. Unchanged upstream performs no writes.
FetchResult fetch_source(const SourceDescriptor& descriptor, const fs::path& cache_dir,
                         Fetcher& fetcher);
FetchResult fetch_source(const SourceDescriptor& descriptor, const fs::path& cache_dir);

// ---------------------------------------------------------------------------

struct SourceLocator {
  std::string file;  // relative to the fetched root
  std::size_t line = 0;

  auto operator<=>(const SourceLocator&) const = default;
  bool operator==(const SourceLocator&) const = default;
  std::string str() const { return file + ":" + std::to_string(line); }
};

using AttrValue = std::variant<bool, std::int64_t, std::string, std::vector<std::string>>;

struct NameEntry {
  std::string in_language;  // a languoid code of any type
  std::string name;
  bool endonym = false;

  auto operator<=>(const NameEntry&) const = default;
  bool operator==(const NameEntry&) const = default;
};

struct RawRecord {
  EntityKind entity_kind = EntityKind::languoid;
  std::map<IdType, std::string> identifiers;
  std::map<std::string, AttrValue> attributes;
  std::vector<NameEntry> names;
  std::string source_id;
  SourceLocator source_locator;
};

struct SkippedRow {
  std::string source_id;
  SourceLocator locator;
  std::string reason;
};

template <typename T>
struct Parsed {
  std::vector<T> items;
  std::vector<SkippedRow> skipped;
};

/// Dispatches to the importer registered for descriptor.source_id.
/// Throws Error{io} on unreadable files and Error{format} when a non-empty
/// source yields zero records or the layout does not match.
Parsed<RawRecord> parse_source(const SourceDescriptor& descriptor, const fs::path& root,
                               const std::vector<fs::path>& files);

/// Parses SIL retirement tables and IANA subtag registries.
Parsed<DeprecationRecord> parse_deprecations(const SourceDescriptor& descriptor,
                                             const fs::path& root,
                                             const std::vector<fs::path>& files);

bool provides_records(std::string_view source_id);
bool provides_deprecations(std::string_view source_id);

// ---------------------------------------------------------------------------
// Registry configuration.

struct ManualOverride {
  IdKey selector;
  std::string field;
  std::string value;  // converted to the field's declared type by merge
  std::string note;
};

struct RegistryConfig {
  std::vector<SourceDescriptor> sources;
  std::vector<std::string> priority;
  std::vector<ManualOverride> overrides;
  fs::path base_dir;  // relative locators resolve against this
};

/// Reads the INI-style registry (see docs/formats.md). Throws Error{format}
/// with a line number on malformed input.
RegistryConfig load_registry(const fs::path& path);
RegistryConfig parse_registry(std::string_view text, const fs::path& base_dir);

}  // namespace lg::ingest
