#pragma once

// End-to-end rebuild: fetch -> parse -> cluster -> merge -> assemble ->
// serialize, producing a BuildReport.

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "linguograph/ingest.hpp"
#include "linguograph/merge.hpp"

namespace lg::pipeline {

namespace fs = std::filesystem;

/// UTC ISO-8601 from SOURCE_DATE_EPOCH, or the epoch when unset.
std::string build_timestamp_from_env();
std::string format_timestamp(long long seconds_since_epoch);

struct BuildOutput {
  merge::Assembly assembly;
  merge::BuildReport report;
  std::map<std::string, ingest::FetchResult> fetched;
};

/// Sources are fetched and parsed concurrently; results are combined in
/// source_id order so the output does not depend on scheduling.
BuildOutput build_database(const ingest::RegistryConfig& config, const fs::path& cache_dir,
                           ingest::Fetcher& fetcher, const std::string& build_timestamp);

struct RebuildOptions {
  fs::path registry;
  fs::path cache_dir;
  fs::path output;  // database path; names go next to it
  std::optional<std::string> build_timestamp;
  ingest::Fetcher* fetcher = nullptr;  // DefaultFetcher when null
};

struct RebuildResult {
  BuildOutput build;
  fs::path database_path, names_path;
  std::size_t database_bytes = 0, names_bytes = 0;
};

RebuildResult rebuild(const RebuildOptions& options);

}  // namespace lg::pipeline
