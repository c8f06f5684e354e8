#pragma once

// Domain model shared by every part of the engine: identifier standards,
// languoid/script/region nodes, typed edges, deprecations and the Database.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lg {

enum class IdType {
  iso639_1,
  iso639_2b,
  iso639_2t,
  iso639_3,
  iso639_5,
  glottocode,
  wikidata_qid,
  bcp47,
  lang_script,
  iso15924,
  iso3166_1_alpha2,
  iso3166_1_alpha3,
  iso3166_2,
  iso3166_3,
};

inline constexpr std::array<IdType, 9> kLanguoidIdTypes = {
    IdType::iso639_1,  IdType::iso639_2b,    IdType::iso639_2t,
    IdType::iso639_3,  IdType::iso639_5,     IdType::glottocode,
    IdType::wikidata_qid, IdType::bcp47,     IdType::lang_script,
};

inline constexpr std::array<IdType, 4> kRegionIdTypes = {
    IdType::iso3166_1_alpha2, IdType::iso3166_1_alpha3, IdType::iso3166_2, IdType::iso3166_3};

std::string_view to_string(IdType type);
std::optional<IdType> parse_id_type(std::string_view name);

bool is_languoid_type(IdType type);
bool is_region_type(IdType type);
inline bool is_script_type(IdType type) { return type == IdType::iso15924; }

/// Purely syntactic check of `code` against the surface grammar of `type`.
/// Total: never throws, accepts arbitrary bytes.
bool validate_identifier(IdType type, std::string_view code);

enum class Level { family, language, dialect, macrolanguage, other };
enum class Flag { historical, constructed, unattested, macrolanguage };
enum class RegionKind { country, subdivision, former_country, continent, macroarea, other };
enum class EdgeKind { child_of, written_in, spoken_in, contained_in, replaced_by };
enum class ChangeKind { replace, split, merge, retire };
enum class EntityKind { languoid, script, region };

std::string_view to_string(Level v);
std::string_view to_string(Flag v);
std::string_view to_string(RegionKind v);
std::string_view to_string(EdgeKind v);
std::string_view to_string(ChangeKind v);
std::string_view to_string(EntityKind v);

std::optional<Level> parse_level(std::string_view s);
std::optional<Flag> parse_flag(std::string_view s);
std::optional<RegionKind> parse_region_kind(std::string_view s);
std::optional<EdgeKind> parse_edge_kind(std::string_view s);
std::optional<ChangeKind> parse_change_kind(std::string_view s);

struct IdKey {
  IdType type;
  std::string code;

  auto operator<=>(const IdKey&) const = default;
  bool operator==(const IdKey&) const = default;
};

std::string to_string(const IdKey& key);  // "iso639_3:deu"

struct Languoid {
  std::string id;
  std::string name;
  Level level = Level::language;
  std::map<IdType, std::string> codes;
  std::vector<std::string> endonyms;
  std::set<Flag> flags;
  std::optional<std::uint64_t> speaker_count;
  std::set<std::string> provenance;

  bool has_flag(Flag f) const { return flags.contains(f); }
  const std::string* code(IdType type) const;

  bool operator==(const Languoid&) const = default;
};

struct Script {
  std::string id;
  std::string code;  // ISO 15924, title case
  std::optional<std::string> numeric_code;
  std::string name;
  std::vector<std::string> aliases;
  std::set<std::string> provenance;

  bool operator==(const Script&) const = default;
};

struct Region {
  std::string id;
  std::string name;
  RegionKind kind = RegionKind::other;
  std::map<IdType, std::string> codes;
  bool historical = false;
  std::optional<std::string> parent;
  std::set<std::string> provenance;

  const std::string* code(IdType type) const;

  bool operator==(const Region&) const = default;
};

// Endpoints are internal ids. replaced_by edges start at a deprecation
// endpoint (see deprecation_endpoint()) rather than at a node.
struct Edge {
  EdgeKind kind;
  std::string from;
  std::string to;
  int rank = 0;  // order within (kind, from); preserves source-priority order of lists
  std::set<std::string> provenance;

  bool operator==(const Edge&) const = default;
};

struct DeprecationRecord {
  std::string code;
  IdType id_type = IdType::iso639_3;
  ChangeKind change_kind = ChangeKind::retire;
  std::vector<std::string> replacements;
  std::optional<int> year;
  std::string source;

  bool operator==(const DeprecationRecord&) const = default;
};

/// Checks the replacement-cardinality rule for a change kind.
bool deprecation_is_consistent(const DeprecationRecord& rec);

std::string deprecation_endpoint(const IdKey& key);  // "deprecated:iso639_3:eml"

struct SourceVersion {
  std::string version;
  std::string checksum;

  bool operator==(const SourceVersion&) const = default;
};

struct BuildMeta {
  std::string format_version;
  std::string build_timestamp;
  std::map<std::string, SourceVersion> sources;

  bool operator==(const BuildMeta&) const = default;
};

inline constexpr std::string_view kFormatVersion = "1.0";

// One row of the companion names table.
struct NameRow {
  std::string subject;      // internal id of a languoid, script or region
  std::string in_language;  // internal id when resolvable, otherwise the raw code
  std::string name;
  bool endonym = false;
  std::string source;

  auto operator<=>(const NameRow&) const = default;
  bool operator==(const NameRow&) const = default;
};

enum class NodeKind { languoid, script, region };

struct NodeRef {
  NodeKind kind;
  std::string id;

  auto operator<=>(const NodeRef&) const = default;
  bool operator==(const NodeRef&) const = default;
};

class Database {
 public:
  std::vector<Languoid> languoids;  // sorted by id
  std::vector<Script> scripts;
  std::vector<Region> regions;
  std::vector<Edge> edges;  // sorted by (kind, from, rank)
  std::map<IdKey, std::string> id_index;
  std::map<IdKey, DeprecationRecord> deprecations;
  BuildMeta build_meta;

  /// Rebuilds the id -> position lookup tables. Must be called after the
  /// node vectors are mutated.
  void reindex();

  const Languoid* languoid(std::string_view id) const;
  const Script* script(std::string_view id) const;
  const Region* region(std::string_view id) const;
  std::optional<NodeKind> node_kind(std::string_view id) const;

  const std::string* lookup(IdType type, std::string_view code) const;
  const DeprecationRecord* deprecation(IdType type, std::string_view code) const;

  bool operator==(const Database& other) const;

 private:
  std::unordered_map<std::string, std::size_t> languoid_pos_;
  std::unordered_map<std::string, std::size_t> script_pos_;
  std::unordered_map<std::string, std::size_t> region_pos_;
};

/// Checks every Database invariant (code syntax, one code per slot, index
/// injectivity, no dangling edges, edge endpoint kinds, deprecated codes
/// absent from the index, region/deprecation invariants). Returns the list
/// of violations; empty means valid.
std::vector<std::string> validate_database(const Database& db);

/// Throws Error{integrity} listing the first violations.
void require_valid(const Database& db);

}  // namespace lg
