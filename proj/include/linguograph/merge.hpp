#pragma once

// Entity resolution over RawRecords: identifier-sharing clusters, field-wise
// merge under a resolution policy, and assembly of the graph Database.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "linguograph/core.hpp"
#include "linguograph/ingest.hpp"

namespace lg::merge {

struct ResolutionPolicy {
  std::vector<std::string> source_priority;  // earlier wins
  std::vector<ingest::ManualOverride> manual_overrides;

  /// Position in source_priority, or nullopt when the source is unranked.
  std::optional<std::size_t> rank(std::string_view source_id) const;
};

/// glottolog > iso_tables > linguameta > glotscript > wikidata_map, then the
/// deprecation sources.
ResolutionPolicy default_policy();

/// Rejects overrides naming unknown or set-valued fields and values that do
/// not convert to the field's type. Throws Error{format}.
void validate_policy(const ResolutionPolicy& policy);

enum class Strategy { manual, priority };
std::string_view to_string(Strategy s);

struct ConflictRecord {
  EntityKind entity_kind = EntityKind::languoid;
  IdKey entity;
  std::string field;
  std::vector<std::pair<std::string, std::string>> contenders;  // (source_id, rendered value)
  std::string winner;
  Strategy strategy = Strategy::priority;
  std::string note;

  bool operator==(const ConflictRecord&) const = default;
};

enum class FieldShape { scalar, set };

/// Static declaration; names not in the table are scalar strings.
FieldShape field_shape(std::string_view field);

using Cluster = std::vector<ingest::RawRecord>;

/// Union-find over (type, code) equality. Throws Error{build} when one
/// identifier is claimed by records of different entity kinds.
std::vector<Cluster> cluster_records(std::vector<ingest::RawRecord> records);

struct SetItem {
  std::string value;
  std::set<std::string> sources;

  bool operator==(const SetItem&) const = default;
};

struct ScalarValue {
  ingest::AttrValue value;
  std::string source;  // "manual" for override winners

  bool operator==(const ScalarValue&) const = default;
};

struct MergedEntity {
  EntityKind kind = EntityKind::languoid;
  IdKey selector;  // preferred identifier; also the node's internal id
  std::map<IdType, std::string> identifiers;
  std::map<std::string, ScalarValue> scalars;
  std::map<std::string, std::vector<SetItem>> sets;  // items in source-priority order
  std::vector<std::pair<ingest::NameEntry, std::string>> names;  // (entry, source)
  std::set<std::string> provenance;
};

struct MergeOutcome {
  MergedEntity entity;
  std::vector<ConflictRecord> conflicts;
};

/// Field-wise merge of one cluster. Throws Error{build} on an unresolvable
/// conflict (unequal values, no override, no ranked contender).
MergeOutcome merge_cluster(const Cluster& cluster, const ResolutionPolicy& policy);

std::string internal_id(const IdKey& key);

struct Assembly {
  Database db;
  std::vector<NameRow> names;
  std::vector<std::string> warnings;
};

/// Builds nodes, indexes and edges. `deprecations` must be ordered by source
/// priority; the first record for a (type, code) wins. Throws Error{build}
/// on index injectivity violations and Error{integrity} if the result fails
/// validation.
Assembly assemble_database(const std::vector<MergedEntity>& entities,
                           const std::vector<DeprecationRecord>& deprecations,
                           BuildMeta build_meta);

struct BuildReport {
  std::vector<ConflictRecord> conflicts;
  std::vector<ingest::SkippedRow> skipped;
  std::vector<std::string> warnings;
  std::size_t languoids = 0, scripts = 0, regions = 0, edges = 0, deprecations = 0;
  BuildMeta build_meta;

  std::string text() const;
  nlohmann::json to_json() const;
};

BuildReport build_report(std::vector<ConflictRecord> conflicts,
                         std::vector<ingest::SkippedRow> skipped,
                         const Assembly& assembly);

}  // namespace lg::merge
