#include "linguograph/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <ctime>
#include <future>

#include "linguograph/error.hpp"
#include "linguograph/store.hpp"

namespace lg::pipeline {

std::string format_timestamp(long long seconds) {
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string build_timestamp_from_env() {
  const char* env = std::getenv("SOURCE_DATE_EPOCH");
  long long seconds = 0;
  if (env && *env) {
    std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), seconds);
    if (ec != std::errc{} || p != s.data() + s.size() || seconds < 0)
      throw Error(ErrorKind::invalid_argument, "SOURCE_DATE_EPOCH is not a non-negative integer");
  }
  return format_timestamp(seconds);
}

namespace {

struct SourceOutput {
  ingest::FetchResult fetched;
  ingest::Parsed<ingest::RawRecord> records;
  ingest::Parsed<DeprecationRecord> deprecations;
};

SourceOutput process_source(const ingest::SourceDescriptor& d, const fs::path& cache_dir,
                            ingest::Fetcher& fetcher) {
  SourceOutput out;
  out.fetched = ingest::fetch_source(d, cache_dir, fetcher);
  if (ingest::provides_records(d.source_id))
    out.records = ingest::parse_source(d, out.fetched.root, out.fetched.files);
  if (ingest::provides_deprecations(d.source_id))
    out.deprecations = ingest::parse_deprecations(d, out.fetched.root, out.fetched.files);
  return out;
}

}  // namespace

BuildOutput build_database(const ingest::RegistryConfig& config, const fs::path& cache_dir,
                           ingest::Fetcher& fetcher, const std::string& build_timestamp) {
  merge::ResolutionPolicy policy = merge::default_policy();
  if (!config.priority.empty()) policy.source_priority = config.priority;
  policy.manual_overrides = config.overrides;
  merge::validate_policy(policy);

  auto sources = config.sources;
  std::sort(sources.begin(), sources.end(),
            [](const auto& a, const auto& b) { return a.source_id < b.source_id; });

  std::vector<std::future<SourceOutput>> jobs;
  for (const auto& d : sources)
    jobs.push_back(std::async(std::launch::async, process_source, std::cref(d), std::cref(cache_dir),
                              std::ref(fetcher)));

  BuildOutput out;
  std::vector<ingest::RawRecord> records;
  std::vector<ingest::SkippedRow> skipped;
  std::vector<std::pair<std::size_t, std::vector<DeprecationRecord>>> deps_by_rank;
  BuildMeta meta{std::string(kFormatVersion), build_timestamp, {}};

  for (std::size_t i = 0; i < sources.size(); ++i) {
    auto result = jobs[i].get();
    const auto& id = sources[i].source_id;
    meta.sources[id] = SourceVersion{result.fetched.version, result.fetched.checksum};
    records.insert(records.end(), std::make_move_iterator(result.records.items.begin()),
                   std::make_move_iterator(result.records.items.end()));
    skipped.insert(skipped.end(), result.records.skipped.begin(), result.records.skipped.end());
    skipped.insert(skipped.end(), result.deprecations.skipped.begin(), result.deprecations.skipped.end());
    const auto rank = policy.rank(id).value_or(policy.source_priority.size());
    deps_by_rank.emplace_back(rank, std::move(result.deprecations.items));
    out.fetched.emplace(id, std::move(result.fetched));
  }

  std::stable_sort(deps_by_rank.begin(), deps_by_rank.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<DeprecationRecord> deprecations;
  for (auto& [rank, list] : deps_by_rank)
    deprecations.insert(deprecations.end(), list.begin(), list.end());

  std::vector<merge::MergedEntity> entities;
  std::vector<merge::ConflictRecord> conflicts;
  for (const auto& cluster : merge::cluster_records(std::move(records))) {
    auto merged = merge::merge_cluster(cluster, policy);
    entities.push_back(std::move(merged.entity));
    conflicts.insert(conflicts.end(), merged.conflicts.begin(), merged.conflicts.end());
  }

  out.assembly = merge::assemble_database(entities, deprecations, std::move(meta));
  out.report = merge::build_report(std::move(conflicts), std::move(skipped), out.assembly);
  return out;
}

RebuildResult rebuild(const RebuildOptions& options) {
  const auto config = ingest::load_registry(options.registry);
  ingest::DefaultFetcher default_fetcher;
  ingest::Fetcher& fetcher = options.fetcher ? *options.fetcher : default_fetcher;
  const auto timestamp = options.build_timestamp ? *options.build_timestamp : build_timestamp_from_env();

  RebuildResult r;
  r.build = build_database(config, options.cache_dir, fetcher, timestamp);
  r.database_path = options.output;
  r.names_path = store::names_path_for(options.output);
  if (!options.output.parent_path().empty()) fs::create_directories(options.output.parent_path());
  r.database_bytes = store::serialize_database(r.build.assembly.db, r.database_path);
  r.names_bytes = store::serialize_names(r.build.assembly.names, r.names_path);
  return r;
}

}  // namespace lg::pipeline
