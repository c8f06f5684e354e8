#include "linguograph/core.hpp"

#include <algorithm>
#include <sstream>

#include "linguograph/error.hpp"

namespace lg {

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool all_of(std::string_view s, bool (*pred)(char)) {
  return std::all_of(s.begin(), s.end(), pred);
}

bool lower_n(std::string_view s, std::size_t n) { return s.size() == n && all_of(s, is_lower); }
bool upper_n(std::string_view s, std::size_t n) { return s.size() == n && all_of(s, is_upper); }

bool script_shape(std::string_view s) {
  return s.size() == 4 && is_upper(s[0]) && all_of(s.substr(1), is_lower);
}

bool glottocode_shape(std::string_view s) {
  if (s.size() != 8) return false;
  for (std::size_t i = 0; i < 4; ++i)
    if (!is_lower(s[i]) && !is_digit(s[i])) return false;
  return all_of(s.substr(4), is_digit);
}

bool lang_script_shape(std::string_view s) {
  auto pos = s.find('_');
  if (pos == std::string_view::npos) return false;
  auto lang = s.substr(0, pos);
  return (lang.size() == 2 || lang.size() == 3) && all_of(lang, is_lower) &&
         script_shape(s.substr(pos + 1));
}

bool subdivision_shape(std::string_view s) {
  if (s.size() < 4 || s.size() > 6 || s[2] != '-') return false;
  if (!is_upper(s[0]) || !is_upper(s[1])) return false;
  return std::all_of(s.begin() + 3, s.end(), [](char c) { return is_upper(c) || is_digit(c); });
}

struct TypeName {
  IdType type;
  std::string_view name;
};

constexpr std::array<TypeName, 14> kTypeNames = {{
    {IdType::iso639_1, "iso639_1"},
    {IdType::iso639_2b, "iso639_2b"},
    {IdType::iso639_2t, "iso639_2t"},
    {IdType::iso639_3, "iso639_3"},
    {IdType::iso639_5, "iso639_5"},
    {IdType::glottocode, "glottocode"},
    {IdType::wikidata_qid, "wikidata_qid"},
    {IdType::bcp47, "bcp47"},
    {IdType::lang_script, "lang_script"},
    {IdType::iso15924, "iso15924"},
    {IdType::iso3166_1_alpha2, "iso3166_1_alpha2"},
    {IdType::iso3166_1_alpha3, "iso3166_1_alpha3"},
    {IdType::iso3166_2, "iso3166_2"},
    {IdType::iso3166_3, "iso3166_3"},
}};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup_name(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<Enum>(i);
  return std::nullopt;
}

constexpr std::array<std::string_view, 5> kLevelNames = {"family", "language", "dialect",
                                                         "macrolanguage", "other"};
constexpr std::array<std::string_view, 4> kFlagNames = {"historical", "constructed", "unattested",
                                                        "macrolanguage"};
constexpr std::array<std::string_view, 6> kRegionKindNames = {
    "country", "subdivision", "former_country", "continent", "macroarea", "other"};
constexpr std::array<std::string_view, 5> kEdgeKindNames = {"child_of", "written_in", "spoken_in",
                                                            "contained_in", "replaced_by"};
constexpr std::array<std::string_view, 4> kChangeKindNames = {"replace", "split", "merge",
                                                              "retire"};
constexpr std::array<std::string_view, 3> kEntityKindNames = {"languoid", "script", "region"};

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::ambiguous: return "ambiguous";
    case ErrorKind::type_mismatch: return "type-mismatch";
    case ErrorKind::missing_target: return "missing-target";
    case ErrorKind::names_unavailable: return "names-unavailable";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::fetch: return "fetch";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::version: return "version";
    case ErrorKind::corrupt: return "corrupt-file";
    case ErrorKind::build: return "build";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::undefined: return "undefined";
    case ErrorKind::empty: return "empty";
    case ErrorKind::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

std::string_view to_string(IdType type) {
  for (const auto& tn : kTypeNames)
    if (tn.type == type) return tn.name;
  return "unknown";
}

std::optional<IdType> parse_id_type(std::string_view name) {
  for (const auto& tn : kTypeNames)
    if (tn.name == name) return tn.type;
  return std::nullopt;
}

bool is_languoid_type(IdType type) {
  return std::find(kLanguoidIdTypes.begin(), kLanguoidIdTypes.end(), type) !=
         kLanguoidIdTypes.end();
}

bool is_region_type(IdType type) {
  return std::find(kRegionIdTypes.begin(), kRegionIdTypes.end(), type) != kRegionIdTypes.end();
}

bool validate_identifier(IdType type, std::string_view code) {
  switch (type) {
    case IdType::iso639_1: return lower_n(code, 2);
    case IdType::iso639_2b:
    case IdType::iso639_2t:
    case IdType::iso639_3:
    case IdType::iso639_5: return lower_n(code, 3);
    case IdType::glottocode: return glottocode_shape(code);
    case IdType::wikidata_qid:
      return code.size() >= 2 && code[0] == 'Q' && all_of(code.substr(1), is_digit);
    case IdType::lang_script: return lang_script_shape(code);
    case IdType::bcp47:
      return ((code.size() == 2 || code.size() == 3) && all_of(code, is_lower)) ||
             lang_script_shape(code);
    case IdType::iso15924: return script_shape(code);
    case IdType::iso3166_1_alpha2: return upper_n(code, 2);
    case IdType::iso3166_1_alpha3: return upper_n(code, 3);
    case IdType::iso3166_2: return subdivision_shape(code);
    case IdType::iso3166_3: return upper_n(code, 4);
  }
  return false;
}

std::string_view to_string(Level v) { return kLevelNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Flag v) { return kFlagNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(RegionKind v) { return kRegionKindNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(EdgeKind v) { return kEdgeKindNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(ChangeKind v) { return kChangeKindNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(EntityKind v) { return kEntityKindNames[static_cast<std::size_t>(v)]; }

std::optional<Level> parse_level(std::string_view s) { return lookup_name<Level>(kLevelNames, s); }
std::optional<Flag> parse_flag(std::string_view s) { return lookup_name<Flag>(kFlagNames, s); }
std::optional<RegionKind> parse_region_kind(std::string_view s) {
  return lookup_name<RegionKind>(kRegionKindNames, s);
}
std::optional<EdgeKind> parse_edge_kind(std::string_view s) {
  return lookup_name<EdgeKind>(kEdgeKindNames, s);
}
std::optional<ChangeKind> parse_change_kind(std::string_view s) {
  return lookup_name<ChangeKind>(kChangeKindNames, s);
}

std::string to_string(const IdKey& key) {
  std::string out(to_string(key.type));
  out += ':';
  out += key.code;
  return out;
}

const std::string* Languoid::code(IdType type) const {
  auto it = codes.find(type);
  return it == codes.end() ? nullptr : &it->second;
}

const std::string* Region::code(IdType type) const {
  auto it = codes.find(type);
  return it == codes.end() ? nullptr : &it->second;
}

bool deprecation_is_consistent(const DeprecationRecord& rec) {
  switch (rec.change_kind) {
    case ChangeKind::replace: return rec.replacements.size() == 1;
    case ChangeKind::split: return rec.replacements.size() >= 2;
    case ChangeKind::merge: return !rec.replacements.empty();
    case ChangeKind::retire: return rec.replacements.empty();
  }
  return false;
}

std::string deprecation_endpoint(const IdKey& key) { return "deprecated:" + to_string(key); }

void Database::reindex() {
  languoid_pos_.clear();
  script_pos_.clear();
  region_pos_.clear();
  for (std::size_t i = 0; i < languoids.size(); ++i) languoid_pos_.emplace(languoids[i].id, i);
  for (std::size_t i = 0; i < scripts.size(); ++i) script_pos_.emplace(scripts[i].id, i);
  for (std::size_t i = 0; i < regions.size(); ++i) region_pos_.emplace(regions[i].id, i);
}

const Languoid* Database::languoid(std::string_view id) const {
  auto it = languoid_pos_.find(std::string(id));
  return it == languoid_pos_.end() ? nullptr : &languoids[it->second];
}

const Script* Database::script(std::string_view id) const {
  auto it = script_pos_.find(std::string(id));
  return it == script_pos_.end() ? nullptr : &scripts[it->second];
}

const Region* Database::region(std::string_view id) const {
  auto it = region_pos_.find(std::string(id));
  return it == region_pos_.end() ? nullptr : &regions[it->second];
}

std::optional<NodeKind> Database::node_kind(std::string_view id) const {
  if (languoid(id)) return NodeKind::languoid;
  if (script(id)) return NodeKind::script;
  if (region(id)) return NodeKind::region;
  return std::nullopt;
}

const std::string* Database::lookup(IdType type, std::string_view code) const {
  auto it = id_index.find(IdKey{type, std::string(code)});
  return it == id_index.end() ? nullptr : &it->second;
}

const DeprecationRecord* Database::deprecation(IdType type, std::string_view code) const {
  auto it = deprecations.find(IdKey{type, std::string(code)});
  return it == deprecations.end() ? nullptr : &it->second;
}

bool Database::operator==(const Database& other) const {
  return languoids == other.languoids && scripts == other.scripts && regions == other.regions &&
         edges == other.edges && id_index == other.id_index &&
         deprecations == other.deprecations && build_meta == other.build_meta;
}

std::vector<std::string> validate_database(const Database& db) {
  std::vector<std::string> problems;
  auto report = [&](std::string msg) { problems.push_back(std::move(msg)); };

  std::map<IdKey, std::string> expected_index;
  auto claim = [&](const IdKey& key, const std::string& owner) {
    auto [it, inserted] = expected_index.emplace(key, owner);
    if (!inserted && it->second != owner)
      report("identifier " + to_string(key) + " claimed by " + it->second + " and " + owner);
  };

  std::set<std::string> ids;
  auto unique_id = [&](const std::string& id) {
    if (id.empty()) report("node with empty id");
    if (!ids.insert(id).second) report("duplicate node id " + id);
  };

  for (const auto& l : db.languoids) {
    unique_id(l.id);
    for (const auto& [type, code] : l.codes) {
      if (!is_languoid_type(type))
        report(l.id + ": non-languoid code type " + std::string(to_string(type)));
      if (!validate_identifier(type, code))
        report(l.id + ": code '" + code + "' fails " + std::string(to_string(type)) + " syntax");
      claim(IdKey{type, code}, l.id);
    }
  }
  for (const auto& s : db.scripts) {
    unique_id(s.id);
    if (!validate_identifier(IdType::iso15924, s.code))
      report(s.id + ": script code '" + s.code + "' invalid");
    claim(IdKey{IdType::iso15924, s.code}, s.id);
  }
  for (const auto& r : db.regions) {
    unique_id(r.id);
    if (r.kind == RegionKind::former_country && !r.historical)
      report(r.id + ": former_country must be historical");
    for (const auto& [type, code] : r.codes) {
      if (!is_region_type(type))
        report(r.id + ": non-region code type " + std::string(to_string(type)));
      if (!validate_identifier(type, code))
        report(r.id + ": code '" + code + "' fails " + std::string(to_string(type)) + " syntax");
      claim(IdKey{type, code}, r.id);
    }
    if (r.parent && !db.region(*r.parent)) report(r.id + ": dangling parent " + *r.parent);
  }

  if (expected_index != db.id_index) report("id_index does not match node codes");

  for (const auto& [key, rec] : db.deprecations) {
    if (key.type != rec.id_type || key.code != rec.code)
      report("deprecation key mismatch for " + to_string(key));
    if (!deprecation_is_consistent(rec))
      report("deprecation " + to_string(key) + " has inconsistent replacement count");
    if (db.id_index.contains(key)) report("deprecated code " + to_string(key) + " is indexed");
  }

  std::set<std::string> dep_endpoints;
  for (const auto& [key, rec] : db.deprecations) dep_endpoints.insert(deprecation_endpoint(key));

  for (const auto& e : db.edges) {
    const auto from_kind = db.node_kind(e.from);
    const auto to_kind = db.node_kind(e.to);
    bool ok = false;
    switch (e.kind) {
      case EdgeKind::child_of:
        ok = from_kind == NodeKind::languoid && to_kind == NodeKind::languoid;
        break;
      case EdgeKind::written_in:
        ok = from_kind == NodeKind::languoid && to_kind == NodeKind::script;
        break;
      case EdgeKind::spoken_in:
        ok = from_kind == NodeKind::languoid && to_kind == NodeKind::region;
        break;
      case EdgeKind::contained_in:
        ok = from_kind == NodeKind::region && to_kind == NodeKind::region;
        break;
      case EdgeKind::replaced_by:
        ok = dep_endpoints.contains(e.from) && to_kind == NodeKind::languoid;
        break;
    }
    if (!ok)
      report("edge " + std::string(to_string(e.kind)) + " " + e.from + " -> " + e.to +
             " has missing or mistyped endpoint");
  }
  return problems;
}

void require_valid(const Database& db) {
  auto problems = validate_database(db);
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "database failed validation (" << problems.size() << " problem(s))";
  for (std::size_t i = 0; i < problems.size() && i < 5; ++i) msg << "; " << problems[i];
  throw Error(ErrorKind::integrity, msg.str());
}

}  // namespace lg
