// Importers: one per registered source id. Each maps an upstream file layout
// onto RawRecords (or DeprecationRecords) and reports malformed rows.

#include <algorithm>
#include <charconv>
#include <functional>

#include "json.hpp"
#include "linguograph/error.hpp"
#include "linguograph/ingest.hpp"
#include "linguograph/text.hpp"

namespace lg::ingest {

namespace {

using nlohmann::json;

struct RowError {
  std::string reason;
};

// Header-indexed view over a delimited file.
class Table {
 public:
  Table(const fs::path& path, char delim, bool quoted) {
    rows_ = text::read_delimited(path, delim, quoted);
    if (rows_.empty()) return;
    for (std::size_t i = 0; i < rows_.front().fields.size(); ++i)
      columns_.emplace(std::string(text::trim(rows_.front().fields[i])), i);
    rows_.erase(rows_.begin());
  }

  bool has(const std::string& col) const { return columns_.contains(col); }

  void require(std::initializer_list<const char*> cols, const fs::path& path) const {
    for (auto c : cols)
      if (!has(c))
        throw Error(ErrorKind::format, path.string() + ": missing column '" + c + "'");
  }

  std::string get(const text::Row& row, const std::string& col) const {
    auto it = columns_.find(col);
    if (it == columns_.end() || it->second >= row.fields.size()) return {};
    return std::string(text::trim(row.fields[it->second]));
  }

  const std::vector<text::Row>& rows() const { return rows_; }

 private:
  std::map<std::string, std::size_t> columns_;
  std::vector<text::Row> rows_;
};

std::string rel_name(const fs::path& root, const fs::path& file) {
  return fs::relative(file, root).generic_string();
}

const fs::path* find_file(const std::vector<fs::path>& files, std::string_view name) {
  for (const auto& f : files)
    if (f.filename() == name) return &f;
  return nullptr;
}

void put_id(RawRecord& rec, IdType type, const std::string& code) {
  if (code.empty()) return;
  if (!validate_identifier(type, code))
    throw RowError{"invalid " + std::string(to_string(type)) + " code '" + code + "'"};
  rec.identifiers[type] = code;
}

std::optional<int> year_of(std::string_view date) {
  if (date.size() < 4) return std::nullopt;
  int y = 0;
  auto [p, ec] = std::from_chars(date.data(), date.data() + 4, y);
  if (ec != std::errc{} || p != date.data() + 4) return std::nullopt;
  return y;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  for (auto& part : text::split(s, sep)) {
    auto t = std::string(text::trim(part));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

bool parse_bool(std::string_view s) {
  auto v = text::to_lower_ascii(text::trim(s));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
  throw RowError{"invalid boolean '" + v + "'"};
}

struct Sink {
  const SourceDescriptor& d;
  const fs::path& root;
  Parsed<RawRecord> out;

  // Runs `fn` for one row; RowErrors become skip reports.
  template <typename Fn>
  void row(const fs::path& file, std::size_t line, Fn&& fn) {
    SourceLocator loc{rel_name(root, file), line};
    try {
      RawRecord rec;
      rec.source_id = d.source_id;
      rec.source_locator = loc;
      if (!fn(rec)) return;
      if (rec.identifiers.empty()) throw RowError{"row carries no identifier"};
      out.items.push_back(std::move(rec));
    } catch (const RowError& e) {
      out.skipped.push_back(SkippedRow{d.source_id, loc, e.reason});
    }
  }
};

// LinguaMeta: languages/<code>.json, one document per language, plus a
// regions.tsv (code, name, historical).
void import_linguameta(Sink& sink, const std::vector<fs::path>& files) {
  for (const auto& file : files) {
    if (file.extension() != ".json") continue;
    sink.row(file, 1, [&](RawRecord& rec) {
      json doc;
      try {
        doc = json::parse(text::read_file(file));
      } catch (const json::parse_error& e) {
        throw RowError{std::string("malformed JSON: ") + e.what()};
      }
      if (!doc.is_object()) throw RowError{"document is not an object"};
      auto str = [&](const char* key) -> std::string {
        auto it = doc.find(key);
        return it != doc.end() && it->is_string() ? it->get<std::string>() : std::string{};
      };
      rec.entity_kind = EntityKind::languoid;

      std::vector<std::string> scripts, regions;
      if (auto it = doc.find("locales"); it != doc.end() && it->is_array()) {
        for (const auto& loc : *it) {
          if (!loc.is_object()) continue;
          if (auto s = loc.find("script"); s != loc.end() && s->is_string()) {
            auto code = s->get<std::string>();
            if (!validate_identifier(IdType::iso15924, code))
              throw RowError{"invalid script '" + code + "'"};
            if (std::find(scripts.begin(), scripts.end(), code) == scripts.end())
              scripts.push_back(code);
          }
          if (auto r = loc.find("region"); r != loc.end() && r->is_string()) {
            auto code = r->get<std::string>();
            if (std::find(regions.begin(), regions.end(), code) == regions.end())
              regions.push_back(code);
          }
        }
      }

      const auto bcp = str("bcp_47_code");
      if (!bcp.empty()) {
        if (bcp.size() == 2) put_id(rec, IdType::iso639_1, bcp);
        put_id(rec, IdType::bcp47, scripts.empty() ? bcp : bcp + "_" + scripts.front());
      }
      put_id(rec, IdType::iso639_3, str("iso_639_3_code"));
      put_id(rec, IdType::iso639_2b, str("iso_639_2b_code"));
      put_id(rec, IdType::glottocode, str("glottocode"));
      put_id(rec, IdType::wikidata_qid, str("wikidata_id"));

      if (auto name = str("english_name"); !name.empty()) {
        rec.attributes["name"] = name;
        rec.names.push_back(NameEntry{"en", name, false});
      }
      if (auto endo = str("endonym"); !endo.empty()) {
        rec.attributes["endonyms"] = std::vector<std::string>{endo};
        if (auto self = rec.identifiers.begin(); self != rec.identifiers.end())
          rec.names.push_back(NameEntry{self->second, endo, true});
      }
      const auto scope = text::to_lower_ascii(str("language_scope"));
      if (scope == "macrolanguage") {
        rec.attributes["level"] = std::string("macrolanguage");
        rec.attributes["macrolanguage"] = true;
      } else if (scope == "language") {
        rec.attributes["level"] = std::string("language");
      }
      if (auto it = doc.find("estimated_number_of_speakers");
          it != doc.end() && it->is_number_integer()) {
        auto n = it->get<std::int64_t>();
        if (n < 0) throw RowError{"negative speaker count"};
        rec.attributes["speaker_count"] = n;
      }
      if (!scripts.empty()) rec.attributes["scripts"] = scripts;
      if (!regions.empty()) rec.attributes["regions"] = regions;
      return true;
    });
  }

  if (const auto* regions = find_file(files, "regions.tsv")) {
    Table t(*regions, '\t', false);
    t.require({"code", "name", "historical"}, *regions);
    for (const auto& row : t.rows()) {
      sink.row(*regions, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::region;
        const auto code = t.get(row, "code");
        put_id(rec, code.size() == 3 ? IdType::iso3166_1_alpha3 : IdType::iso3166_1_alpha2, code);
        rec.attributes["name"] = t.get(row, "name");
        rec.attributes["historical"] = parse_bool(t.get(row, "historical"));
        return true;
      });
    }
  }
}

// Glottolog CLDF: languages.csv (ID, Name, Level, Parent_ID, ISO639P3code,
// Countries separated by ';').
void import_glottolog(Sink& sink, const std::vector<fs::path>& files) {
  const auto* path = find_file(files, "languages.csv");
  if (!path) throw Error(ErrorKind::format, "glottolog: languages.csv not found");
  Table t(*path, ',', true);
  t.require({"ID", "Name", "Level"}, *path);
  for (const auto& row : t.rows()) {
    sink.row(*path, row.line, [&](RawRecord& rec) {
      rec.entity_kind = EntityKind::languoid;
      put_id(rec, IdType::glottocode, t.get(row, "ID"));
      put_id(rec, IdType::iso639_3, t.get(row, "ISO639P3code"));
      const auto name = t.get(row, "Name");
      if (name.empty()) throw RowError{"empty Name"};
      rec.attributes["name"] = name;
      rec.names.push_back(NameEntry{"en", name, false});
      const auto level = t.get(row, "Level");
      if (!parse_level(level)) throw RowError{"unknown Level '" + level + "'"};
      rec.attributes["level"] = level;
      if (auto parent = t.get(row, "Parent_ID"); !parent.empty()) {
        if (!validate_identifier(IdType::glottocode, parent))
          throw RowError{"invalid Parent_ID '" + parent + "'"};
        rec.attributes["parent"] = parent;
      }
      if (auto countries = split_list(t.get(row, "Countries"), ';'); !countries.empty())
        rec.attributes["regions"] = countries;
      return true;
    });
  }
}

// GlotScript: GlotScript.tsv (ISO639-3, ISO15924-Main as comma list).
void import_glotscript(Sink& sink, const std::vector<fs::path>& files) {
  for (const auto& file : files) {
    if (file.extension() != ".tsv") continue;
    Table t(file, '\t', false);
    t.require({"ISO639-3", "ISO15924-Main"}, file);
    for (const auto& row : t.rows()) {
      sink.row(file, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::languoid;
        put_id(rec, IdType::iso639_3, t.get(row, "ISO639-3"));
        auto scripts = split_list(t.get(row, "ISO15924-Main"), ',');
        for (const auto& s : scripts)
          if (!validate_identifier(IdType::iso15924, s)) throw RowError{"invalid script '" + s + "'"};
        if (scripts.empty()) throw RowError{"no scripts listed"};
        rec.attributes["scripts"] = scripts;
        return true;
      });
    }
  }
}

// ISO tables as compiled by pycountry-style packages: one CSV per standard.
void import_iso_tables(Sink& sink, const std::vector<fs::path>& files) {
  if (const auto* p = find_file(files, "iso639_3.csv")) {
    Table t(*p, ',', true);
    t.require({"Id", "Part2b", "Part2t", "Part1", "Scope", "Language_Type", "Ref_Name"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::languoid;
        const auto id = t.get(row, "Id");
        put_id(rec, IdType::iso639_3, id);
        put_id(rec, IdType::iso639_2b, t.get(row, "Part2b"));
        // 639-2/T is a subset of 639-3: identical codes are held by reference
        // to the 639-3 slot rather than stored twice.
        if (auto t2 = t.get(row, "Part2t"); t2 != id) put_id(rec, IdType::iso639_2t, t2);
        put_id(rec, IdType::iso639_1, t.get(row, "Part1"));
        const auto name = t.get(row, "Ref_Name");
        if (name.empty()) throw RowError{"empty Ref_Name"};
        rec.attributes["name"] = name;
        rec.names.push_back(NameEntry{"en", name, false});
        const auto scope = t.get(row, "Scope");
        if (scope == "M") {
          rec.attributes["level"] = std::string("macrolanguage");
          rec.attributes["macrolanguage"] = true;
        }
        const auto type = t.get(row, "Language_Type");
        rec.attributes["historical"] = (type == "H" || type == "A");
        rec.attributes["constructed"] = (type == "C");
        return true;
      });
    }
  }
  if (const auto* p = find_file(files, "iso639_5.csv")) {
    Table t(*p, ',', true);
    t.require({"code", "name"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::languoid;
        put_id(rec, IdType::iso639_5, t.get(row, "code"));
        rec.attributes["name"] = t.get(row, "name");
        rec.attributes["level"] = std::string("family");
        rec.names.push_back(NameEntry{"en", t.get(row, "name"), false});
        return true;
      });
    }
  }
  if (const auto* p = find_file(files, "iso15924.csv")) {
    Table t(*p, ',', true);
    t.require({"code", "numeric", "name"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::script;
        put_id(rec, IdType::iso15924, t.get(row, "code"));
        rec.attributes["name"] = t.get(row, "name");
        rec.names.push_back(NameEntry{"en", t.get(row, "name"), false});
        if (auto num = t.get(row, "numeric"); !num.empty()) {
          if (num.size() != 3 || !std::all_of(num.begin(), num.end(), ::isdigit))
            throw RowError{"invalid numeric code '" + num + "'"};
          rec.attributes["numeric_code"] = num;
        }
        if (auto aliases = split_list(t.get(row, "aliases"), ';'); !aliases.empty())
          rec.attributes["aliases"] = aliases;
        return true;
      });
    }
  }
  if (const auto* p = find_file(files, "iso3166_1.csv")) {
    Table t(*p, ',', true);
    t.require({"alpha_2", "alpha_3", "name"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::region;
        put_id(rec, IdType::iso3166_1_alpha2, t.get(row, "alpha_2"));
        put_id(rec, IdType::iso3166_1_alpha3, t.get(row, "alpha_3"));
        rec.attributes["name"] = t.get(row, "name");
        rec.attributes["kind"] = std::string("country");
        rec.attributes["historical"] = false;
        rec.names.push_back(NameEntry{"en", t.get(row, "name"), false});
        return true;
      });
    }
  }
  if (const auto* p = find_file(files, "iso3166_2.csv")) {
    Table t(*p, ',', true);
    t.require({"code", "name", "parent"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::region;
        put_id(rec, IdType::iso3166_2, t.get(row, "code"));
        rec.attributes["name"] = t.get(row, "name");
        rec.attributes["kind"] = std::string("subdivision");
        const auto parent = t.get(row, "parent");
        if (!parent.empty()) {
          if (!validate_identifier(IdType::iso3166_1_alpha2, parent))
            throw RowError{"invalid parent '" + parent + "'"};
          rec.attributes["region_parent"] = parent;
        }
        rec.names.push_back(NameEntry{"en", t.get(row, "name"), false});
        return true;
      });
    }
  }
  if (const auto* p = find_file(files, "iso3166_3.csv")) {
    Table t(*p, ',', true);
    t.require({"alpha_4", "alpha_2", "alpha_3", "name"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::region;
        put_id(rec, IdType::iso3166_3, t.get(row, "alpha_4"));
        put_id(rec, IdType::iso3166_1_alpha2, t.get(row, "alpha_2"));
        put_id(rec, IdType::iso3166_1_alpha3, t.get(row, "alpha_3"));
        rec.attributes["name"] = t.get(row, "name");
        rec.attributes["kind"] = std::string("former_country");
        rec.attributes["historical"] = true;
        rec.names.push_back(NameEntry{"en", t.get(row, "name"), false});
        return true;
      });
    }
  }
}

// Pre-exported Wikidata/Wikipedia mapping: ids.tsv and names.tsv keyed by QID.
void import_wikidata_map(Sink& sink, const std::vector<fs::path>& files) {
  std::map<std::string, std::vector<NameEntry>> names_by_qid;
  std::map<std::string, SourceLocator> name_locs;
  if (const auto* p = find_file(files, "names.tsv")) {
    Table t(*p, '\t', false);
    t.require({"qid", "in_language", "name", "endonym"}, *p);
    for (const auto& row : t.rows()) {
      SourceLocator loc{rel_name(sink.root, *p), row.line};
      try {
        const auto qid = t.get(row, "qid");
        if (!validate_identifier(IdType::wikidata_qid, qid)) throw RowError{"invalid qid"};
        const auto name = t.get(row, "name");
        const auto lang = t.get(row, "in_language");
        if (name.empty() || lang.empty()) throw RowError{"empty name or language"};
        names_by_qid[qid].push_back(NameEntry{lang, name, parse_bool(t.get(row, "endonym"))});
        name_locs.emplace(qid, loc);
      } catch (const RowError& e) {
        sink.out.skipped.push_back(SkippedRow{sink.d.source_id, loc, e.reason});
      }
    }
  }
  if (const auto* p = find_file(files, "ids.tsv")) {
    Table t(*p, '\t', false);
    t.require({"qid"}, *p);
    for (const auto& row : t.rows()) {
      sink.row(*p, row.line, [&](RawRecord& rec) {
        rec.entity_kind = EntityKind::languoid;
        const auto qid = t.get(row, "qid");
        put_id(rec, IdType::wikidata_qid, qid);
        put_id(rec, IdType::iso639_1, t.get(row, "iso639_1"));
        put_id(rec, IdType::iso639_3, t.get(row, "iso639_3"));
        put_id(rec, IdType::iso639_5, t.get(row, "iso639_5"));
        put_id(rec, IdType::glottocode, t.get(row, "glottocode"));
        if (auto it = names_by_qid.find(qid); it != names_by_qid.end()) {
          rec.names = std::move(it->second);
          names_by_qid.erase(it);
        }
        return true;
      });
    }
  }
  // Names for QIDs without an id row still form attributable records.
  for (auto& [qid, names] : names_by_qid) {
    const auto& loc = name_locs.at(qid);
    sink.row(sink.root / loc.file, loc.line, [&](RawRecord& rec) {
      rec.entity_kind = EntityKind::languoid;
      put_id(rec, IdType::wikidata_qid, qid);
      rec.names = std::move(names);
      return true;
    });
  }
}

using RecordImporter = void (*)(Sink&, const std::vector<fs::path>&);

struct ImporterEntry {
  std::string_view source_id;
  Layout layout;
  RecordImporter records;
  bool deprecations;
};

constexpr std::array<ImporterEntry, 7> kImporters = {{
    {"linguameta", Layout::json_per_language, import_linguameta, false},
    {"glottolog", Layout::cldf_csv, import_glottolog, false},
    {"glotscript", Layout::tsv, import_glotscript, false},
    {"iso_tables", Layout::csv, import_iso_tables, false},
    {"wikidata_map", Layout::tsv, import_wikidata_map, false},
    {"sil_deprecations", Layout::tsv, nullptr, true},
    {"iana_registry", Layout::registry_text, nullptr, true},
}};

const ImporterEntry& importer_for(const SourceDescriptor& d) {
  for (const auto& e : kImporters) {
    if (e.source_id != d.source_id) continue;
    if (e.layout != d.expected_layout)
      throw Error(ErrorKind::format, "source '" + d.source_id + "' expects layout " +
                                         std::string(to_string(e.layout)) + ", registry says " +
                                         std::string(to_string(d.expected_layout)));
    return e;
  }
  throw Error(ErrorKind::format, "no importer registered for source '" + d.source_id + "'");
}

void check_readable(const std::vector<fs::path>& files) {
  for (const auto& f : files) {
    std::error_code ec;
    if (!fs::is_regular_file(f, ec)) throw Error(ErrorKind::io, "cannot read " + f.string());
  }
}

void sort_by_locator(std::vector<RawRecord>& recs) {
  std::stable_sort(recs.begin(), recs.end(), [](const RawRecord& a, const RawRecord& b) {
    return a.source_locator < b.source_locator;
  });
}

// SIL retirement table: Id, Ref_Name, Ret_Reason, Change_To, Ret_Remedy, Effective.
void parse_sil(const SourceDescriptor& d, const fs::path& root, const fs::path& file,
               Parsed<DeprecationRecord>& out) {
  Table t(file, '\t', false);
  t.require({"Id", "Ret_Reason", "Change_To", "Ret_Remedy", "Effective"}, file);
  for (const auto& row : t.rows()) {
    SourceLocator loc{rel_name(root, file), row.line};
    try {
      DeprecationRecord rec;
      rec.code = t.get(row, "Id");
      rec.id_type = IdType::iso639_3;
      rec.source = d.source_id;
      if (!validate_identifier(IdType::iso639_3, rec.code))
        throw RowError{"invalid retired code '" + rec.code + "'"};
      rec.year = year_of(t.get(row, "Effective"));
      const auto reason = t.get(row, "Ret_Reason");
      const auto change_to = t.get(row, "Change_To");
      if (reason == "S") {
        // Successors appear as bracketed codes in the remedy text.
        const auto remedy = t.get(row, "Ret_Remedy");
        for (std::size_t pos = remedy.find('['); pos != std::string::npos;
             pos = remedy.find('[', pos + 1)) {
          auto end = remedy.find(']', pos);
          if (end == std::string::npos) break;
          rec.replacements.push_back(remedy.substr(pos + 1, end - pos - 1));
        }
        rec.change_kind = ChangeKind::split;
      } else if (reason == "N") {
        rec.change_kind = ChangeKind::retire;
      } else if (reason == "M") {
        rec.change_kind = ChangeKind::merge;
        if (!change_to.empty()) rec.replacements.push_back(change_to);
      } else if (reason == "C" || reason == "D") {
        rec.change_kind = change_to.empty() ? ChangeKind::retire : ChangeKind::replace;
        if (!change_to.empty()) rec.replacements.push_back(change_to);
      } else {
        throw RowError{"unknown Ret_Reason '" + reason + "'"};
      }
      for (const auto& r : rec.replacements)
        if (!validate_identifier(IdType::iso639_3, r))
          throw RowError{"invalid replacement code '" + r + "'"};
      if (!deprecation_is_consistent(rec))
        throw RowError{"replacement count does not fit change kind " +
                       std::string(to_string(rec.change_kind))};
      out.items.push_back(std::move(rec));
    } catch (const RowError& e) {
      out.skipped.push_back(SkippedRow{d.source_id, loc, e.reason});
    }
  }
}

// IANA language-subtag-registry: records separated by "%%", "Key: value"
// fields with whitespace-led continuation lines.
void parse_iana(const SourceDescriptor& d, const fs::path& root, const fs::path& file,
                Parsed<DeprecationRecord>& out) {
  const auto lines = text::split(text::read_file(file), '\n');
  std::map<std::string, std::string> fields;
  std::size_t record_line = 1;
  std::string last_key;

  auto flush = [&] {
    if (fields.empty()) return;
    SourceLocator loc{rel_name(root, file), record_line};
    const auto type = fields["Type"];
    if (type == "language" && fields.contains("Deprecated")) {
      try {
        DeprecationRecord rec;
        rec.code = fields["Subtag"];
        rec.source = d.source_id;
        rec.year = year_of(fields["Deprecated"]);
        auto type_for = [](const std::string& code) -> std::optional<IdType> {
          if (validate_identifier(IdType::iso639_1, code)) return IdType::iso639_1;
          if (validate_identifier(IdType::iso639_3, code)) return IdType::iso639_3;
          return std::nullopt;
        };
        auto t = type_for(rec.code);
        if (!t) throw RowError{"unsupported subtag '" + rec.code + "'"};
        rec.id_type = *t;
        if (auto pv = fields.find("Preferred-Value"); pv != fields.end()) {
          if (!type_for(pv->second))
            throw RowError{"invalid replacement code '" + pv->second + "'"};
          rec.change_kind = ChangeKind::replace;
          rec.replacements.push_back(pv->second);
        } else {
          rec.change_kind = ChangeKind::retire;
        }
        out.items.push_back(std::move(rec));
      } catch (const RowError& e) {
        out.skipped.push_back(SkippedRow{d.source_id, loc, e.reason});
      }
    }
    fields.clear();
    last_key.clear();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line == "%%") {
      flush();
      record_line = i + 2;
      continue;
    }
    if (line.empty()) continue;
    if ((line.front() == ' ' || line.front() == '\t') && !last_key.empty()) {
      fields[last_key] += " ";
      fields[last_key] += text::trim(line);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    last_key = std::string(text::trim(line.substr(0, colon)));
    // Repeated keys (e.g. Description) keep the first value.
    fields.emplace(last_key, std::string(text::trim(line.substr(colon + 1))));
  }
  flush();
}

}  // namespace

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::json_per_language: return "json_per_language";
    case Layout::cldf_csv: return "cldf_csv";
    case Layout::tsv: return "tsv";
    case Layout::registry_text: return "registry_text";
    case Layout::csv: return "csv";
  }
  return "unknown";
}

std::optional<Layout> parse_layout(std::string_view s) {
  for (auto l : {Layout::json_per_language, Layout::cldf_csv, Layout::tsv, Layout::registry_text,
                 Layout::csv})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

bool provides_records(std::string_view source_id) {
  for (const auto& e : kImporters)
    if (e.source_id == source_id) return e.records != nullptr;
  return false;
}

bool provides_deprecations(std::string_view source_id) {
  for (const auto& e : kImporters)
    if (e.source_id == source_id) return e.deprecations;
  return false;
}

Parsed<RawRecord> parse_source(const SourceDescriptor& d, const fs::path& root,
                               const std::vector<fs::path>& files) {
  const auto& entry = importer_for(d);
  if (!entry.records)
    throw Error(ErrorKind::format, "source '" + d.source_id + "' provides no entity records");
  check_readable(files);
  Sink sink{d, root, {}};
  entry.records(sink, files);
  if (sink.out.items.empty() && !files.empty())
    throw Error(ErrorKind::format, "source '" + d.source_id + "': zero records parsed from " +
                                       std::to_string(files.size()) +
                                       " file(s); layout mismatch suspected");
  sort_by_locator(sink.out.items);
  return std::move(sink.out);
}

Parsed<DeprecationRecord> parse_deprecations(const SourceDescriptor& d, const fs::path& root,
                                             const std::vector<fs::path>& files) {
  const auto& entry = importer_for(d);
  if (!entry.deprecations)
    throw Error(ErrorKind::format, "source '" + d.source_id + "' provides no deprecations");
  check_readable(files);
  Parsed<DeprecationRecord> out;
  for (const auto& f : files) {
    if (f.filename() == "VERSION") continue;
    if (d.expected_layout == Layout::registry_text)
      parse_iana(d, root, f, out);
    else
      parse_sil(d, root, f, out);
  }
  if (out.items.empty() && !files.empty())
    throw Error(ErrorKind::format,
                "source '" + d.source_id + "': zero deprecations parsed; layout mismatch suspected");
  return out;
}

}  // namespace lg::ingest
