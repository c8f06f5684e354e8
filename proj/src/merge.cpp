#include "linguograph/merge.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "linguograph/error.hpp"

namespace lg::merge {

namespace {

using ingest::AttrValue;
using ingest::RawRecord;

enum class FieldType { string, boolean, integer, level, region_kind, list };

struct FieldDecl {
  std::string_view name;
  FieldType type;
};

constexpr std::array<FieldDecl, 15> kFields = {{
    {"name", FieldType::string},
    {"level", FieldType::level},
    {"speaker_count", FieldType::integer},
    {"historical", FieldType::boolean},
    {"constructed", FieldType::boolean},
    {"unattested", FieldType::boolean},
    {"macrolanguage", FieldType::boolean},
    {"parent", FieldType::string},
    {"numeric_code", FieldType::string},
    {"kind", FieldType::region_kind},
    {"region_parent", FieldType::string},
    {"endonyms", FieldType::list},
    {"scripts", FieldType::list},
    {"regions", FieldType::list},
    {"aliases", FieldType::list},
}};

std::optional<FieldType> declared_type(std::string_view field) {
  for (const auto& f : kFields)
    if (f.name == field) return f.type;
  return std::nullopt;
}

std::string render(const AttrValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, std::string>) return x;
        else return "[" + std::accumulate(x.begin(), x.end(), std::string{},
                                          [](std::string a, const std::string& b) {
                                            return a.empty() ? b : a + "," + b;
                                          }) + "]";
      },
      v);
}

AttrValue convert_override(std::string_view field, const std::string& value) {
  const auto type = declared_type(field).value_or(FieldType::string);
  switch (type) {
    case FieldType::boolean:
      if (value == "true") return true;
      if (value == "false") return false;
      break;
    case FieldType::integer: {
      std::int64_t n = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec == std::errc{} && p == value.data() + value.size() && n >= 0) return n;
      break;
    }
    case FieldType::level:
      if (parse_level(value)) return value;
      break;
    case FieldType::region_kind:
      if (parse_region_kind(value)) return value;
      break;
    case FieldType::string: return value;
    case FieldType::list: break;
  }
  throw Error(ErrorKind::format,
              "override value '" + value + "' is not valid for field '" + std::string(field) + "'");
}

constexpr std::array<IdType, 8> kLanguoidIdPreference = {
    IdType::glottocode, IdType::iso639_3,     IdType::iso639_5, IdType::iso639_1,
    IdType::iso639_2b,  IdType::wikidata_qid, IdType::bcp47,    IdType::lang_script};
constexpr std::array<IdType, 4> kRegionIdPreference = {
    IdType::iso3166_1_alpha2, IdType::iso3166_1_alpha3, IdType::iso3166_3, IdType::iso3166_2};

IdKey preferred_key(EntityKind kind, const std::map<IdType, std::string>& ids) {
  auto pick = [&](auto const& prefs) -> std::optional<IdKey> {
    for (auto t : prefs)
      if (auto it = ids.find(t); it != ids.end()) return IdKey{t, it->second};
    return std::nullopt;
  };
  std::optional<IdKey> key;
  switch (kind) {
    case EntityKind::languoid: key = pick(kLanguoidIdPreference); break;
    case EntityKind::script: key = pick(std::array{IdType::iso15924}); break;
    case EntityKind::region: key = pick(kRegionIdPreference); break;
  }
  if (!key && !ids.empty()) key = IdKey{ids.begin()->first, ids.begin()->second};
  if (!key) throw Error(ErrorKind::build, "entity without identifiers");
  return *key;
}

struct Contender {
  std::string source;
  AttrValue value;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string provenance_of(const RawRecord& r) {
  return r.source_id + " " + r.source_locator.str();
}

}  // namespace

std::optional<std::size_t> ResolutionPolicy::rank(std::string_view source_id) const {
  for (std::size_t i = 0; i < source_priority.size(); ++i)
    if (source_priority[i] == source_id) return i;
  return std::nullopt;
}

ResolutionPolicy default_policy() {
  return ResolutionPolicy{{"glottolog", "iso_tables", "linguameta", "glotscript", "wikidata_map",
                           "sil_deprecations", "iana_registry"},
                          {}};
}

void validate_policy(const ResolutionPolicy& policy) {
  for (const auto& o : policy.manual_overrides) {
    if (o.field.starts_with("code:")) {
      auto type = parse_id_type(std::string_view(o.field).substr(5));
      if (!type) throw Error(ErrorKind::format, "override names unknown field '" + o.field + "'");
      if (!validate_identifier(*type, o.value))
        throw Error(ErrorKind::format, "override value '" + o.value + "' is not a valid " +
                                           std::string(to_string(*type)));
      continue;
    }
    auto type = declared_type(o.field);
    if (!type) throw Error(ErrorKind::format, "override names unknown field '" + o.field + "'");
    if (*type == FieldType::list)
      throw Error(ErrorKind::format, "override cannot force set-valued field '" + o.field + "'");
    convert_override(o.field, o.value);
  }
}

std::string_view to_string(Strategy s) { return s == Strategy::manual ? "manual" : "priority"; }

FieldShape field_shape(std::string_view field) {
  auto t = declared_type(field);
  return t && *t == FieldType::list ? FieldShape::set : FieldShape::scalar;
}

std::string internal_id(const IdKey& key) { return to_string(key); }

std::vector<Cluster> cluster_records(std::vector<RawRecord> records) {
  UnionFind uf(records.size());
  std::map<IdKey, std::size_t> owner;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& [type, code] : records[i].identifiers) {
      IdKey key{type, code};
      auto [it, inserted] = owner.emplace(key, i);
      if (inserted) continue;
      const auto& other = records[it->second];
      if (other.entity_kind != records[i].entity_kind)
        throw Error(ErrorKind::build,
                    "identifier " + to_string(key) + " claimed by a " +
                        std::string(to_string(other.entity_kind)) + " (" + provenance_of(other) +
                        ") and a " + std::string(to_string(records[i].entity_kind)) + " (" +
                        provenance_of(records[i]) + ")");
      uf.unite(it->second, i);
    }
  }

  std::map<std::size_t, Cluster> by_root;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_root[uf.find(i)].push_back(std::move(records[i]));

  std::vector<std::pair<IdKey, Cluster>> keyed;
  for (auto& [root, cluster] : by_root) {
    std::optional<IdKey> smallest;
    for (const auto& r : cluster)
      for (const auto& [type, code] : r.identifiers) {
        IdKey k{type, code};
        if (!smallest || k < *smallest) smallest = k;
      }
    if (!smallest) throw Error(ErrorKind::build, "record without identifiers");
    keyed.emplace_back(std::move(*smallest), std::move(cluster));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Cluster> out;
  out.reserve(keyed.size());
  for (auto& [key, cluster] : keyed) out.push_back(std::move(cluster));
  return out;
}

MergeOutcome merge_cluster(const Cluster& cluster, const ResolutionPolicy& policy) {
  if (cluster.empty()) throw Error(ErrorKind::build, "empty cluster");
  const auto kind = cluster.front().entity_kind;
  for (const auto& r : cluster)
    if (r.entity_kind != kind) throw Error(ErrorKind::build, "cluster mixes entity kinds");

  // Records visited in source-priority order (unranked sources last, by id),
  // then by locator, so "first seen" is "highest priority".
  std::vector<const RawRecord*> ordered;
  for (const auto& r : cluster) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [&](const RawRecord* a, const RawRecord* b) {
    auto ra = policy.rank(a->source_id).value_or(policy.source_priority.size());
    auto rb = policy.rank(b->source_id).value_or(policy.source_priority.size());
    if (ra != rb) return ra < rb;
    if (a->source_id != b->source_id) return a->source_id < b->source_id;
    return a->source_locator < b->source_locator;
  });

  std::set<IdKey> cluster_ids;
  for (const auto* r : ordered)
    for (const auto& [t, c] : r->identifiers) cluster_ids.insert(IdKey{t, c});

  auto find_override = [&](const std::string& field) -> const ingest::ManualOverride* {
    for (const auto& o : policy.manual_overrides)
      if (o.field == field && cluster_ids.contains(o.selector)) return &o;
    return nullptr;
  };

  MergeOutcome out;
  auto& entity = out.entity;
  entity.kind = kind;
  std::vector<ConflictRecord> pending;

  // Resolves one scalar field; returns the winner, or nullopt if no value.
  auto resolve = [&](const std::string& field,
                     const std::vector<Contender>& contenders) -> std::optional<ScalarValue> {
    std::vector<Contender> distinct;
    for (const auto& c : contenders)
      if (std::none_of(distinct.begin(), distinct.end(),
                       [&](const Contender& d) { return d.value == c.value; }))
        distinct.push_back(c);

    const auto* ov = find_override(field);
    std::optional<AttrValue> forced;
    if (ov) {
      forced = field.starts_with("code:") ? AttrValue{ov->value} : convert_override(field, ov->value);
    }

    if (distinct.empty()) {
      if (forced) return ScalarValue{*forced, "manual"};
      return std::nullopt;
    }
    const bool unequal = distinct.size() > 1 || (forced && *forced != distinct.front().value);
    if (!unequal) return ScalarValue{contenders.front().value, contenders.front().source};

    ConflictRecord rec;
    rec.entity_kind = kind;
    rec.field = field;
    for (const auto& c : contenders) rec.contenders.emplace_back(c.source, render(c.value));
    std::sort(rec.contenders.begin(), rec.contenders.end());
    rec.contenders.erase(std::unique(rec.contenders.begin(), rec.contenders.end()),
                         rec.contenders.end());

    ScalarValue winner;
    if (forced) {
      winner = ScalarValue{*forced, "manual"};
      rec.strategy = Strategy::manual;
      rec.note = ov->note;
    } else {
      // contenders arrive in priority order; the first ranked one wins
      const Contender* best = nullptr;
      for (const auto& c : contenders)
        if (policy.rank(c.source)) {
          best = &c;
          break;
        }
      if (!best) {
        std::string who;
        for (const auto& [s, v] : rec.contenders) who += " " + s + "=" + v;
        throw Error(ErrorKind::build, "unresolvable conflict on field '" + field +
                                          "' (no override, no ranked source):" + who);
      }
      winner = ScalarValue{best->value, best->source};
      rec.strategy = Strategy::priority;
    }
    rec.winner = render(winner.value);
    pending.push_back(std::move(rec));
    return winner;
  };

  // Identifiers first: they determine the entity selector.
  std::map<IdType, std::vector<Contender>> id_contenders;
  for (const auto* r : ordered)
    for (const auto& [t, c] : r->identifiers) id_contenders[t].push_back({r->source_id, c});
  for (const auto& [t, contenders] : id_contenders) {
    auto win = resolve("code:" + std::string(to_string(t)), contenders);
    if (win) entity.identifiers[t] = std::get<std::string>(win->value);
  }

  std::map<std::string, std::vector<Contender>> scalar_contenders;
  for (const auto* r : ordered) {
    entity.provenance.insert(r->source_id);
    for (const auto& [field, value] : r->attributes) {
      if (field_shape(field) == FieldShape::set) {
        const auto* items = std::get_if<std::vector<std::string>>(&value);
        if (!items) continue;
        auto& merged = entity.sets[field];
        for (const auto& item : *items) {
          auto it = std::find_if(merged.begin(), merged.end(),
                                 [&](const SetItem& s) { return s.value == item; });
          if (it == merged.end())
            merged.push_back(SetItem{item, {r->source_id}});
          else
            it->sources.insert(r->source_id);
        }
      } else {
        scalar_contenders[field].push_back({r->source_id, value});
      }
    }
    for (const auto& n : r->names) entity.names.emplace_back(n, r->source_id);
  }
  for (const auto& o : policy.manual_overrides)
    if (!o.field.starts_with("code:") && cluster_ids.contains(o.selector))
      scalar_contenders.try_emplace(o.field);
  for (const auto& [field, contenders] : scalar_contenders)
    if (auto win = resolve(field, contenders)) entity.scalars[field] = std::move(*win);

  entity.selector = preferred_key(kind, entity.identifiers);
  for (auto& c : pending) c.entity = entity.selector;
  out.conflicts = std::move(pending);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Assembler {
  Assembly out;
  std::map<std::string, std::string> id_owner_provenance;

  Database& db() { return out.db; }

  void warn(std::string msg) { out.warnings.push_back(std::move(msg)); }

  template <typename T>
  const T* scalar(const MergedEntity& e, const std::string& field) {
    auto it = e.scalars.find(field);
    if (it == e.scalars.end()) return nullptr;
    return std::get_if<T>(&it->second.value);
  }

  std::string scalar_source(const MergedEntity& e, const std::string& field) {
    auto it = e.scalars.find(field);
    return it == e.scalars.end() ? std::string{} : it->second.source;
  }

  const std::vector<SetItem>* set(const MergedEntity& e, const std::string& field) {
    auto it = e.sets.find(field);
    return it == e.sets.end() ? nullptr : &it->second;
  }

  std::string provenance_text(const MergedEntity& e) {
    std::string s;
    for (const auto& p : e.provenance) s += (s.empty() ? "" : ",") + p;
    return internal_id(e.selector) + " [" + s + "]";
  }

  // Looks a bare languoid code up across types, most specific first.
  const std::string* find_languoid(const std::string& code, std::optional<IdType> first = {}) {
    if (first)
      if (auto* id = db().lookup(*first, code)) return id;
    for (auto t : {IdType::glottocode, IdType::iso639_3, IdType::iso639_2b, IdType::iso639_5,
                   IdType::iso639_1, IdType::wikidata_qid, IdType::lang_script, IdType::bcp47})
      if (validate_identifier(t, code))
        if (auto* id = db().lookup(t, code)) return id;
    return nullptr;
  }

  const std::string* find_region(const std::string& code) {
    for (auto t : kRegionIdTypes)
      if (validate_identifier(t, code))
        if (auto* id = db().lookup(t, code)) return id;
    return nullptr;
  }
};

}  // namespace

Assembly assemble_database(const std::vector<MergedEntity>& entities,
                           const std::vector<DeprecationRecord>& deprecations,
                           BuildMeta build_meta) {
  Assembler a;
  auto& db = a.db();
  db.build_meta = std::move(build_meta);

  for (const auto& rec : deprecations) {
    if (!deprecation_is_consistent(rec)) {
      a.warn("deprecation " + rec.code + " has inconsistent replacements; ignored");
      continue;
    }
    db.deprecations.try_emplace(IdKey{rec.id_type, rec.code}, rec);
  }

  // Nodes and the identifier index.
  std::map<IdKey, std::string> claimed_by;
  auto claim = [&](const MergedEntity& e, IdType type, const std::string& code) -> bool {
    IdKey key{type, code};
    if (db.deprecations.contains(key)) {
      a.warn(a.provenance_text(e) + ": dropped deprecated code " + to_string(key));
      return false;
    }
    auto [it, inserted] = claimed_by.emplace(key, a.provenance_text(e));
    if (!inserted)
      throw Error(ErrorKind::build, "identifier " + to_string(key) + " claimed by " + it->second +
                                        " and " + a.provenance_text(e));
    db.id_index.emplace(key, internal_id(e.selector));
    return true;
  };

  for (const auto& e : entities) {
    const auto id = internal_id(e.selector);
    switch (e.kind) {
      case EntityKind::languoid: {
        Languoid l;
        l.id = id;
        for (const auto& [t, c] : e.identifiers) {
          if (!is_languoid_type(t)) {
            a.warn(id + ": ignoring non-languoid code " + to_string(IdKey{t, c}));
            continue;
          }
          if (claim(e, t, c)) l.codes[t] = c;
        }
        const auto* name = a.scalar<std::string>(e, "name");
        l.name = name && !name->empty() ? *name : e.selector.code;
        if (const auto* level = a.scalar<std::string>(e, "level")) {
          if (auto parsed = parse_level(*level))
            l.level = *parsed;
          else
            a.warn(id + ": unknown level '" + *level + "', defaulting to language");
        }
        if (const auto* endo = a.set(e, "endonyms"))
          for (const auto& item : *endo) l.endonyms.push_back(item.value);
        for (auto flag : {Flag::historical, Flag::constructed, Flag::unattested, Flag::macrolanguage})
          if (const auto* b = a.scalar<bool>(e, std::string(to_string(flag))); b && *b)
            l.flags.insert(flag);
        if (const auto* n = a.scalar<std::int64_t>(e, "speaker_count"))
          l.speaker_count = static_cast<std::uint64_t>(*n);
        l.provenance = e.provenance;
        db.languoids.push_back(std::move(l));
        break;
      }
      case EntityKind::script: {
        Script s;
        s.id = id;
        s.code = e.selector.code;
        claim(e, IdType::iso15924, s.code);
        const auto* name = a.scalar<std::string>(e, "name");
        s.name = name && !name->empty() ? *name : s.code;
        if (const auto* num = a.scalar<std::string>(e, "numeric_code")) s.numeric_code = *num;
        if (const auto* aliases = a.set(e, "aliases"))
          for (const auto& item : *aliases) s.aliases.push_back(item.value);
        s.provenance = e.provenance;
        db.scripts.push_back(std::move(s));
        break;
      }
      case EntityKind::region: {
        Region r;
        r.id = id;
        for (const auto& [t, c] : e.identifiers) {
          if (!is_region_type(t)) {
            a.warn(id + ": ignoring non-region code " + to_string(IdKey{t, c}));
            continue;
          }
          if (claim(e, t, c)) r.codes[t] = c;
        }
        const auto* name = a.scalar<std::string>(e, "name");
        r.name = name && !name->empty() ? *name : e.selector.code;
        if (const auto* kind = a.scalar<std::string>(e, "kind"))
          r.kind = parse_region_kind(*kind).value_or(RegionKind::other);
        if (const auto* hist = a.scalar<bool>(e, "historical")) r.historical = *hist;
        r.provenance = e.provenance;
        db.regions.push_back(std::move(r));
        break;
      }
    }
  }

  auto by_id = [](const auto& x, const auto& y) { return x.id < y.id; };
  std::sort(db.languoids.begin(), db.languoids.end(), by_id);
  std::sort(db.scripts.begin(), db.scripts.end(), by_id);
  std::sort(db.regions.begin(), db.regions.end(), by_id);
  db.reindex();

  // Edges.
  std::map<std::tuple<EdgeKind, std::string, std::string>, std::size_t> edge_pos;
  auto add_edge = [&](EdgeKind kind, const std::string& from, const std::string& to, int rank,
                      const std::set<std::string>& prov) {
    auto key = std::make_tuple(kind, from, to);
    if (auto it = edge_pos.find(key); it != edge_pos.end()) {
      db.edges[it->second].provenance.insert(prov.begin(), prov.end());
      return;
    }
    edge_pos.emplace(key, db.edges.size());
    db.edges.push_back(Edge{kind, from, to, rank, prov});
  };

  for (const auto& e : entities) {
    const auto id = internal_id(e.selector);
    if (e.kind == EntityKind::languoid) {
      if (const auto* parent = a.scalar<std::string>(e, "parent")) {
        if (const auto* pid = db.lookup(IdType::glottocode, *parent); pid && *pid != id)
          add_edge(EdgeKind::child_of, id, *pid, 0, {a.scalar_source(e, "parent")});
        else
          a.warn(id + ": dangling parent glottocode " + *parent + "; edge dropped");
      }
      if (const auto* scripts = a.set(e, "scripts")) {
        int rank = 0;
        for (const auto& item : *scripts) {
          if (const auto* sid = db.lookup(IdType::iso15924, item.value))
            add_edge(EdgeKind::written_in, id, *sid, rank++, item.sources);
          else
            a.warn(id + ": unknown script " + item.value + "; edge dropped");
        }
      }
      if (const auto* regions = a.set(e, "regions")) {
        int rank = 0;
        for (const auto& item : *regions) {
          if (const auto* rid = a.find_region(item.value))
            add_edge(EdgeKind::spoken_in, id, *rid, rank++, item.sources);
          else
            a.warn(id + ": unknown region " + item.value + "; edge dropped");
        }
      }
    } else if (e.kind == EntityKind::region) {
      if (const auto* parent = a.scalar<std::string>(e, "region_parent")) {
        if (const auto* pid = a.find_region(*parent); pid && *pid != id) {
          add_edge(EdgeKind::contained_in, id, *pid, 0, {a.scalar_source(e, "region_parent")});
          for (auto& r : db.regions)
            if (r.id == id) r.parent = *pid;
        } else {
          a.warn(id + ": dangling region parent " + *parent + "; edge dropped");
        }
      }
    }
  }

  for (const auto& [key, rec] : db.deprecations) {
    int rank = 0;
    for (const auto& repl : rec.replacements) {
      if (const auto* target = a.find_languoid(repl, rec.id_type))
        add_edge(EdgeKind::replaced_by, deprecation_endpoint(key), *target, rank++, {rec.source});
      else
        a.warn("deprecation " + to_string(key) + ": replacement " + repl + " does not resolve");
    }
  }

  std::sort(db.edges.begin(), db.edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.kind, x.from, x.rank, x.to) < std::tie(y.kind, y.from, y.rank, y.to);
  });

  // Names table.
  std::set<std::tuple<std::string, std::string, std::string, bool>> seen_names;
  for (const auto& e : entities) {
    const auto id = internal_id(e.selector);
    for (const auto& [entry, source] : e.names) {
      std::string in_lang = entry.in_language;
      if (const auto* lid = a.find_languoid(entry.in_language)) in_lang = *lid;
      if (entry.endonym && e.kind == EntityKind::languoid && in_lang != id) {
        a.warn(id + ": endonym '" + entry.name + "' tagged with foreign language " +
               entry.in_language + "; stored as plain name");
      }
      const bool endonym = entry.endonym && in_lang == id;
      if (!seen_names.emplace(id, in_lang, entry.name, endonym).second) continue;
      a.out.names.push_back(NameRow{id, in_lang, entry.name, endonym, source});
    }
  }
  std::sort(a.out.names.begin(), a.out.names.end());

  require_valid(db);
  return std::move(a.out);
}

// ---------------------------------------------------------------------------

BuildReport build_report(std::vector<ConflictRecord> conflicts,
                         std::vector<ingest::SkippedRow> skipped, const Assembly& assembly) {
  BuildReport r;
  std::stable_sort(conflicts.begin(), conflicts.end(), [](const auto& x, const auto& y) {
    return std::tie(x.strategy, x.entity, x.field) < std::tie(y.strategy, y.entity, y.field);
  });
  r.conflicts = std::move(conflicts);
  r.skipped = std::move(skipped);
  r.warnings = assembly.warnings;
  const auto& db = assembly.db;
  r.languoids = db.languoids.size();
  r.scripts = db.scripts.size();
  r.regions = db.regions.size();
  r.edges = db.edges.size();
  r.deprecations = db.deprecations.size();
  r.build_meta = db.build_meta;
  return r;
}

std::string BuildReport::text() const {
  std::ostringstream out;
  out << "build report (format " << build_meta.format_version << ", built "
      << build_meta.build_timestamp << ")\n";
  out << "sources:\n";
  for (const auto& [id, v] : build_meta.sources)
    out << "  " << id << "  version " << v.version << "  sha256 " << v.checksum.substr(0, 16)
        << "\n";
  out << "totals: " << languoids << " languoids, " << scripts << " scripts, " << regions
      << " regions, " << edges << " edges, " << deprecations << " deprecations\n";

  if (!conflicts.empty()) {
    out << "conflicts: " << conflicts.size() << "\n";
    for (auto strategy : {Strategy::manual, Strategy::priority}) {
      const auto n = std::count_if(conflicts.begin(), conflicts.end(),
                                   [&](const auto& c) { return c.strategy == strategy; });
      if (n == 0) continue;
      out << "  " << to_string(strategy) << ": " << n << "\n";
      for (const auto& c : conflicts) {
        if (c.strategy != strategy) continue;
        out << "    " << internal_id(c.entity) << " field=" << c.field << " contenders=[";
        for (std::size_t i = 0; i < c.contenders.size(); ++i)
          out << (i ? ", " : "") << c.contenders[i].first << ":" << c.contenders[i].second;
        out << "] winner=" << c.winner;
        if (!c.note.empty()) out << " (" << c.note << ")";
        out << "\n";
      }
    }
  }
  if (!skipped.empty()) {
    std::map<std::string, std::size_t> per_source;
    for (const auto& s : skipped) ++per_source[s.source_id];
    out << "skipped rows: " << skipped.size() << "\n";
    for (const auto& [src, n] : per_source) out << "  " << src << ": " << n << "\n";
    for (const auto& s : skipped)
      out << "    " << s.source_id << " " << s.locator.str() << ": " << s.reason << "\n";
  }
  if (!warnings.empty()) {
    out << "warnings: " << warnings.size() << "\n";
    for (const auto& w : warnings) out << "  " << w << "\n";
  }
  return out.str();
}

nlohmann::json BuildReport::to_json() const {
  using nlohmann::json;
  json j;
  j["build_meta"] = {{"format_version", build_meta.format_version},
                     {"build_timestamp", build_meta.build_timestamp}};
  json sources = json::object();
  for (const auto& [id, v] : build_meta.sources)
    sources[id] = {{"version", v.version}, {"checksum", v.checksum}};
  j["build_meta"]["sources"] = sources;
  j["totals"] = {{"languoids", languoids}, {"scripts", scripts},           {"regions", regions},
                 {"edges", edges},         {"deprecations", deprecations}};

  json by_strategy = {{"manual", json::array()}, {"priority", json::array()}};
  for (const auto& c : conflicts) {
    json contenders = json::array();
    for (const auto& [src, val] : c.contenders) contenders.push_back({{"source", src}, {"value", val}});
    by_strategy[std::string(to_string(c.strategy))].push_back(
        {{"entity", internal_id(c.entity)},
         {"entity_kind", std::string(to_string(c.entity_kind))},
         {"field", c.field},
         {"contenders", contenders},
         {"winner", c.winner},
         {"note", c.note}});
  }
  j["conflicts"] = by_strategy;

  json skips = json::object();
  for (const auto& s : skipped) {
    if (!skips.contains(s.source_id)) skips[s.source_id] = {{"count", 0}, {"rows", json::array()}};
    skips[s.source_id]["count"] = skips[s.source_id]["count"].get<int>() + 1;
    skips[s.source_id]["rows"].push_back({{"locator", s.locator.str()}, {"reason", s.reason}});
  }
  j["skipped"] = skips;
  j["warnings"] = warnings;
  return j;
}

}  // namespace lg::merge
