#include "linguograph/store.hpp"

#include <zlib.h>

#include <charconv>
#include <map>

#include "linguograph/error.hpp"
#include "linguograph/text.hpp"

namespace lg::store {

using nlohmann::json;

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, 9, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(ErrorKind::io, "deflateInit2 failed");
  // Fixed header fields: no mtime, OS "unknown", so bytes depend on content only.
  gz_header header{};
  header.time = 0;
  header.os = 255;
  deflateSetHeader(&zs, &header);

  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::io, "gzip compression failed");
  out.resize(produced);
  return out;
}

std::string gzip_decompress(std::string_view data) {
  if (data.size() < 18 || static_cast<unsigned char>(data[0]) != 0x1f ||
      static_cast<unsigned char>(data[1]) != 0x8b)
    throw Error(ErrorKind::corrupt, "not a gzip stream (bad magic)");

  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK) throw Error(ErrorKind::corrupt, "inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());

  std::string out;
  char buf[1 << 15];
  int rc = Z_OK;
  while (rc == Z_OK) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_BUF_ERROR && zs.avail_in == 0) break;
  }
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::corrupt, "gzip stream truncated or damaged");
  return out;
}

namespace {

json codes_to_json(const std::map<IdType, std::string>& codes) {
  json j = json::object();
  for (const auto& [t, c] : codes) j[std::string(to_string(t))] = c;
  return j;
}

json string_set(const std::set<std::string>& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorKind::corrupt, "database file schema violation: " + what);
}

template <typename T>
T field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) corrupt(std::string("missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    corrupt(std::string("wrong type for '") + key + "'");
  }
}

std::map<IdType, std::string> codes_from_json(const json& j) {
  if (!j.is_object()) corrupt("codes must be an object");
  std::map<IdType, std::string> out;
  for (const auto& [name, value] : j.items()) {
    auto type = parse_id_type(name);
    if (!type || !value.is_string()) corrupt("bad code entry '" + name + "'");
    out.emplace(*type, value.get<std::string>());
  }
  return out;
}

int major_of(const std::string& version) {
  int major = -1;
  auto [p, ec] = std::from_chars(version.data(), version.data() + version.size(), major);
  if (ec != std::errc{} || (p != version.data() + version.size() && *p != '.'))
    throw Error(ErrorKind::corrupt, "unparseable format_version '" + version + "'");
  return major;
}

void check_version(const json& doc) {
  const auto version = field<std::string>(doc, "format_version");
  const int major = major_of(version);
  if (major > kSupportedMajorVersion)
    throw Error(ErrorKind::version, "database format " + version +
                                        " is newer than supported major version " +
                                        std::to_string(kSupportedMajorVersion) +
                                        "; rebuild the database with this tool");
  if (major < 1) throw Error(ErrorKind::corrupt, "invalid format_version '" + version + "'");
}

}  // namespace

json database_to_json(const Database& db) {
  json doc;
  doc["format_version"] = std::string(kFormatVersion);

  json sources = json::object();
  for (const auto& [id, v] : db.build_meta.sources)
    sources[id] = {{"version", v.version}, {"checksum", v.checksum}};
  doc["build_meta"] = {{"format_version", db.build_meta.format_version},
                       {"build_timestamp", db.build_meta.build_timestamp},
                       {"sources", sources}};

  json langs = json::array();
  for (const auto& l : db.languoids) {
    json flags = json::array();
    for (auto f : l.flags) flags.push_back(std::string(to_string(f)));
    json j = {{"id", l.id},
              {"name", l.name},
              {"level", std::string(to_string(l.level))},
              {"codes", codes_to_json(l.codes)},
              {"endonyms", l.endonyms},
              {"flags", flags},
              {"provenance", string_set(l.provenance)}};
    if (l.speaker_count) j["speaker_count"] = *l.speaker_count;
    langs.push_back(std::move(j));
  }
  doc["languoids"] = std::move(langs);

  json scripts = json::array();
  for (const auto& s : db.scripts) {
    json j = {{"id", s.id},
              {"code", s.code},
              {"name", s.name},
              {"aliases", s.aliases},
              {"provenance", string_set(s.provenance)}};
    if (s.numeric_code) j["numeric_code"] = *s.numeric_code;
    scripts.push_back(std::move(j));
  }
  doc["scripts"] = std::move(scripts);

  json regions = json::array();
  for (const auto& r : db.regions) {
    json j = {{"id", r.id},
              {"name", r.name},
              {"kind", std::string(to_string(r.kind))},
              {"codes", codes_to_json(r.codes)},
              {"historical", r.historical},
              {"provenance", string_set(r.provenance)}};
    if (r.parent) j["parent"] = *r.parent;
    regions.push_back(std::move(j));
  }
  doc["regions"] = std::move(regions);

  json edges = json::array();
  for (const auto& e : db.edges)
    edges.push_back({{"kind", std::string(to_string(e.kind))},
                     {"from", e.from},
                     {"to", e.to},
                     {"rank", e.rank},
                     {"provenance", string_set(e.provenance)}});
  doc["edges"] = std::move(edges);

  json deps = json::array();
  for (const auto& [key, d] : db.deprecations) {
    json j = {{"code", d.code},
              {"id_type", std::string(to_string(d.id_type))},
              {"change_kind", std::string(to_string(d.change_kind))},
              {"replacements", d.replacements},
              {"source", d.source}};
    if (d.year) j["year"] = *d.year;
    deps.push_back(std::move(j));
  }
  doc["deprecations"] = std::move(deps);
  return doc;
}

Database database_from_json(const json& doc) {
  if (!doc.is_object()) corrupt("top level must be an object");
  check_version(doc);

  Database db;
  const auto& meta = doc.at("build_meta");
  db.build_meta.format_version = field<std::string>(meta, "format_version");
  db.build_meta.build_timestamp = field<std::string>(meta, "build_timestamp");
  const auto sources = field<json>(meta, "sources");
  for (auto it = sources.begin(); it != sources.end(); ++it)
    db.build_meta.sources[it.key()] =
        SourceVersion{field<std::string>(*it, "version"), field<std::string>(*it, "checksum")};

  for (const auto& j : field<json>(doc, "languoids")) {
    Languoid l;
    l.id = field<std::string>(j, "id");
    l.name = field<std::string>(j, "name");
    auto level = parse_level(field<std::string>(j, "level"));
    if (!level) corrupt("unknown level for " + l.id);
    l.level = *level;
    l.codes = codes_from_json(field<json>(j, "codes"));
    l.endonyms = field<std::vector<std::string>>(j, "endonyms");
    for (const auto& f : field<std::vector<std::string>>(j, "flags")) {
      auto flag = parse_flag(f);
      if (!flag) corrupt("unknown flag '" + f + "'");
      l.flags.insert(*flag);
    }
    auto prov = field<std::vector<std::string>>(j, "provenance");
    l.provenance = {prov.begin(), prov.end()};
    if (j.contains("speaker_count")) l.speaker_count = field<std::uint64_t>(j, "speaker_count");
    db.languoids.push_back(std::move(l));
  }

  for (const auto& j : field<json>(doc, "scripts")) {
    Script s;
    s.id = field<std::string>(j, "id");
    s.code = field<std::string>(j, "code");
    s.name = field<std::string>(j, "name");
    s.aliases = field<std::vector<std::string>>(j, "aliases");
    auto prov = field<std::vector<std::string>>(j, "provenance");
    s.provenance = {prov.begin(), prov.end()};
    if (j.contains("numeric_code")) s.numeric_code = field<std::string>(j, "numeric_code");
    db.scripts.push_back(std::move(s));
  }

  for (const auto& j : field<json>(doc, "regions")) {
    Region r;
    r.id = field<std::string>(j, "id");
    r.name = field<std::string>(j, "name");
    auto kind = parse_region_kind(field<std::string>(j, "kind"));
    if (!kind) corrupt("unknown region kind for " + r.id);
    r.kind = *kind;
    r.codes = codes_from_json(field<json>(j, "codes"));
    r.historical = field<bool>(j, "historical");
    auto prov = field<std::vector<std::string>>(j, "provenance");
    r.provenance = {prov.begin(), prov.end()};
    if (j.contains("parent")) r.parent = field<std::string>(j, "parent");
    db.regions.push_back(std::move(r));
  }

  for (const auto& j : field<json>(doc, "edges")) {
    Edge e;
    auto kind = parse_edge_kind(field<std::string>(j, "kind"));
    if (!kind) corrupt("unknown edge kind");
    e.kind = *kind;
    e.from = field<std::string>(j, "from");
    e.to = field<std::string>(j, "to");
    e.rank = field<int>(j, "rank");
    auto prov = field<std::vector<std::string>>(j, "provenance");
    e.provenance = {prov.begin(), prov.end()};
    db.edges.push_back(std::move(e));
  }

  for (const auto& j : field<json>(doc, "deprecations")) {
    DeprecationRecord d;
    d.code = field<std::string>(j, "code");
    auto type = parse_id_type(field<std::string>(j, "id_type"));
    auto change = parse_change_kind(field<std::string>(j, "change_kind"));
    if (!type || !change) corrupt("bad deprecation entry for " + d.code);
    d.id_type = *type;
    d.change_kind = *change;
    d.replacements = field<std::vector<std::string>>(j, "replacements");
    d.source = field<std::string>(j, "source");
    if (j.contains("year")) d.year = field<int>(j, "year");
    db.deprecations.emplace(IdKey{d.id_type, d.code}, std::move(d));
  }

  // The index is derived from node codes; injectivity is checked by validation.
  for (const auto& l : db.languoids)
    for (const auto& [t, c] : l.codes) db.id_index.try_emplace(IdKey{t, c}, l.id);
  for (const auto& s : db.scripts) db.id_index.try_emplace(IdKey{IdType::iso15924, s.code}, s.id);
  for (const auto& r : db.regions)
    for (const auto& [t, c] : r.codes) db.id_index.try_emplace(IdKey{t, c}, r.id);

  db.reindex();
  require_valid(db);
  return db;
}

std::string encode_database(const Database& db) {
  return gzip_compress(database_to_json(db).dump());
}

Database decode_database(std::string_view bytes) {
  const auto text = gzip_decompress(bytes);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::corrupt, std::string("database JSON unreadable: ") + e.what());
  }
  try {
    return database_from_json(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::corrupt, std::string("database JSON malformed: ") + e.what());
  }
}

std::size_t serialize_database(const Database& db, const fs::path& path) {
  require_valid(db);
  const auto bytes = encode_database(db);
  text::write_file_atomic(path, bytes);
  return bytes.size();
}

Database load_database(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::io, "database not found: " + path.string());
  return decode_database(text::read_file(path));
}

std::string encode_names(const std::vector<NameRow>& rows) {
  json doc;
  doc["format_version"] = std::string(kFormatVersion);
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"subject", r.subject},
                   {"in_language", r.in_language},
                   {"name", r.name},
                   {"endonym", r.endonym},
                   {"source", r.source}});
  doc["names"] = std::move(arr);
  return gzip_compress(doc.dump());
}

std::vector<NameRow> decode_names(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(gzip_decompress(bytes));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::corrupt, std::string("names JSON unreadable: ") + e.what());
  }
  check_version(doc);
  std::vector<NameRow> rows;
  for (const auto& j : field<json>(doc, "names"))
    rows.push_back(NameRow{field<std::string>(j, "subject"), field<std::string>(j, "in_language"),
                           field<std::string>(j, "name"), field<bool>(j, "endonym"),
                           field<std::string>(j, "source")});
  return rows;
}

std::size_t serialize_names(const std::vector<NameRow>& rows, const fs::path& path) {
  const auto bytes = encode_names(rows);
  text::write_file_atomic(path, bytes);
  return bytes.size();
}

fs::path names_path_for(const fs::path& db_path) {
  auto s = db_path.string();
  if (s.ends_with(kDatabaseExtension)) {
    s.resize(s.size() - kDatabaseExtension.size());
    return fs::path(s + std::string(kNamesExtension));
  }
  return fs::path(s + std::string(kNamesExtension));
}

NamesTable::NamesTable(fs::path path, std::shared_ptr<const Database> db)
    : state_(std::make_shared<State>()) {
  state_->path = std::move(path);
  state_->db = std::move(db);
}

bool NamesTable::loaded() const { return state_->ready.load(); }

void NamesTable::ensure_loaded() const {
  std::call_once(state_->once, [s = state_.get()] {
    std::string bytes;
    try {
      bytes = text::read_file(s->path);
    } catch (const Error&) {
      throw Error(ErrorKind::names_unavailable, "names table unavailable: " + s->path.string());
    }
    ++s->decompressions;
    std::vector<NameRow> rows;
    try {
      rows = decode_names(bytes);
    } catch (const Error& e) {
      throw Error(ErrorKind::names_unavailable, std::string("names table unreadable: ") + e.what());
    }
    for (const auto& r : rows)
      if (!s->db->node_kind(r.subject))
        throw Error(ErrorKind::integrity, "names table references unknown subject " + r.subject);
    s->rows = std::move(rows);
    for (std::size_t i = 0; i < s->rows.size(); ++i) s->by_subject.emplace(s->rows[i].subject, i);
    s->ready = true;
  });
}

std::vector<NameRow> NamesTable::rows_for(std::string_view subject_id) const {
  ensure_loaded();
  std::vector<NameRow> out;
  auto [b, e] = state_->by_subject.equal_range(std::string(subject_id));
  for (auto it = b; it != e; ++it) out.push_back(state_->rows[it->second]);
  return out;
}

const std::vector<NameRow>& NamesTable::all_rows() const {
  ensure_loaded();
  return state_->rows;
}

}  // namespace lg::store
