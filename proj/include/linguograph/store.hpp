#pragma once

// On-disk format: gzip-compressed canonical JSON (sorted keys, arrays in id
// order, fixed compressor settings) for the database and for the companion
// names table. See docs/formats.md.

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "linguograph/core.hpp"

namespace lg::store {

namespace fs = std::filesystem;

inline constexpr std::string_view kDatabaseExtension = ".lgdb.gz";
inline constexpr std::string_view kNamesExtension = ".lgnames.gz";
inline constexpr int kSupportedMajorVersion = 1;

std::string gzip_compress(std::string_view data);
/// Throws Error{corrupt} on bad magic, truncation or stream errors.
std::string gzip_decompress(std::string_view data);

nlohmann::json database_to_json(const Database& db);
/// Throws Error{corrupt} for schema violations, Error{version} for an
/// unsupported major format version, Error{integrity} if validation fails.
Database database_from_json(const nlohmann::json& doc);

std::string encode_database(const Database& db);  // compressed bytes
Database decode_database(std::string_view bytes);

/// Validates, then writes atomically. Returns the number of bytes written.
std::size_t serialize_database(const Database& db, const fs::path& path);
Database load_database(const fs::path& path);

std::string encode_names(const std::vector<NameRow>& rows);
std::vector<NameRow> decode_names(std::string_view bytes);
std::size_t serialize_names(const std::vector<NameRow>& rows, const fs::path& path);

/// `foo.lgdb.gz` -> `foo.lgnames.gz`.
fs::path names_path_for(const fs::path& db_path);

// Lazily loaded names table. Opening performs no I/O; the first query reads,
// decompresses and checks the file exactly once (thread-safe), and later
// queries reuse the loaded rows.
class NamesTable {
 public:
  NamesTable(fs::path path, std::shared_ptr<const Database> db);

  /// Rows whose subject is `subject_id`, in stored order. Throws
  /// Error{names_unavailable} if the file is missing or unreadable and
  /// Error{integrity} when a row names an unknown subject.
  std::vector<NameRow> rows_for(std::string_view subject_id) const;
  const std::vector<NameRow>& all_rows() const;

  bool loaded() const;
  int decompressions() const { return state_->decompressions.load(); }
  const fs::path& path() const { return state_->path; }

 private:
  struct State {
    fs::path path;
    std::shared_ptr<const Database> db;
    std::once_flag once;
    std::atomic<int> decompressions{0};
    std::atomic<bool> ready{false};
    std::vector<NameRow> rows;
    std::multimap<std::string, std::size_t> by_subject;
  };

  void ensure_loaded() const;

  std::shared_ptr<State> state_;
};

}  // namespace lg::store
