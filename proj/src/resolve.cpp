#include "linguograph/resolve.hpp"

#include <algorithm>
#include <set>

#include "linguograph/error.hpp"
#include "linguograph/text.hpp"

namespace lg::resolve {

namespace {

constexpr std::array<std::pair<Relation, std::string_view>, 9> kRelationNames = {{
    {Relation::parents, "parents"},
    {Relation::ancestors, "ancestors"},
    {Relation::children, "children"},
    {Relation::family_root, "family_root"},
    {Relation::scripts, "scripts"},
    {Relation::regions, "regions"},
    {Relation::co_script_languoids, "co_script_languoids"},
    {Relation::co_region_languoids, "co_region_languoids"},
    {Relation::languoids, "languoids"},
}};

const std::vector<const Edge*> kNoEdges;
const std::string kNoName;

std::string describe(const DeprecationRecord& rec) {
  std::string out = "code '" + rec.code + "' (" + std::string(to_string(rec.id_type)) +
                    ") is deprecated";
  switch (rec.change_kind) {
    case ChangeKind::split: out += ": split into " + text::join(rec.replacements, ", "); break;
    case ChangeKind::merge: out += ": merged into " + text::join(rec.replacements, ", "); break;
    case ChangeKind::replace: out += ": replaced by " + text::join(rec.replacements, ", "); break;
    case ChangeKind::retire: out += ": retired"; break;
  }
  if (rec.year) out += " in " + std::to_string(*rec.year);
  out += " [" + rec.source + "]";
  return out;
}

std::string type_list(const std::vector<IdType>& types) {
  std::vector<std::string> names;
  for (auto t : types) names.emplace_back(to_string(t));
  return text::join(names, ", ");
}

bool any_languoid_shape(std::string_view code) {
  return std::any_of(kLanguoidIdTypes.begin(), kLanguoidIdTypes.end(),
                     [&](IdType t) { return validate_identifier(t, code); });
}

}  // namespace

std::string_view to_string(Relation r) {
  for (const auto& [rel, name] : kRelationNames)
    if (rel == r) return name;
  return "?";
}

std::optional<Relation> parse_relation(std::string_view s) {
  for (const auto& [rel, name] : kRelationNames)
    if (name == s) return rel;
  return std::nullopt;
}

Resolver::Resolver(std::shared_ptr<const Database> db, std::optional<store::NamesTable> names,
                   NoticeSink sink)
    : db_(std::move(db)), names_(std::move(names)), sink_(std::move(sink)) {
  if (!db_) throw Error(ErrorKind::invalid_argument, "resolver needs a database");
  for (const auto& e : db_->edges) {
    const auto k = static_cast<std::size_t>(e.kind);
    out_[k][e.from].push_back(&e);
    in_[k][e.to].push_back(&e);
  }
}

const std::vector<const Edge*>& Resolver::out_edges(EdgeKind kind, std::string_view from) const {
  const auto& m = out_[static_cast<std::size_t>(kind)];
  auto it = m.find(from);
  return it == m.end() ? kNoEdges : it->second;
}

const std::vector<const Edge*>& Resolver::in_edges(EdgeKind kind, std::string_view to) const {
  const auto& m = in_[static_cast<std::size_t>(kind)];
  auto it = m.find(to);
  return it == m.end() ? kNoEdges : it->second;
}

void Resolver::notify(std::string_view input, const DeprecationRecord& rec) const {
  if (sink_) sink_(Notice{std::string(input), rec, describe(rec)});
}

Resolution Resolver::follow_deprecation(std::string_view input, const DeprecationRecord& rec,
                                        IdType matched) const {
  notify(input, rec);
  std::vector<const Languoid*> targets;
  for (const auto* e : out_edges(EdgeKind::replaced_by, deprecation_endpoint({rec.id_type, rec.code})))
    if (const auto* l = db_->languoid(e->to)) targets.push_back(l);

  if (rec.change_kind == ChangeKind::retire || targets.empty())
    throw Error(ErrorKind::not_found, describe(rec) + "; no current replacement");

  Resolution r;
  r.matched_type = matched;
  r.deprecation = rec;
  if (rec.change_kind == ChangeKind::split && targets.size() > 1)
    r.ambiguity = std::move(targets);
  else
    r.node = targets.front();
  return r;
}

const Languoid* Resolver::resolve_composite(std::string_view code, IdType type) const {
  if (!validate_identifier(type, code)) return nullptr;
  const auto pos = code.find('_');
  if (pos == std::string_view::npos) return nullptr;
  const auto lang = code.substr(0, pos);
  if (!db_->lookup(IdType::iso15924, code.substr(pos + 1))) return nullptr;

  const std::string* id = nullptr;
  if (type == IdType::lang_script) {
    id = db_->lookup(IdType::iso639_3, lang);
  } else if (lang.size() == 2) {
    id = db_->lookup(IdType::iso639_1, lang);
  } else {
    // BCP-47 takes the shortest code, so a 3-letter subtag is only valid
    // for languoids without an ISO 639-1 code.
    id = db_->lookup(IdType::iso639_3, lang);
    if (!id) id = db_->lookup(IdType::iso639_5, lang);
    if (id && db_->languoid(*id)->code(IdType::iso639_1)) return nullptr;
  }
  return id ? db_->languoid(*id) : nullptr;
}

std::optional<std::pair<const Languoid*, IdType>> Resolver::find_current(
    std::string_view code) const {
  for (auto t : kLanguoidResolutionOrder)
    if (validate_identifier(t, code))
      if (const auto* id = db_->lookup(t, code))
        if (const auto* l = db_->languoid(*id)) return std::pair{l, t};
  for (auto t : {IdType::lang_script, IdType::bcp47})
    if (const auto* l = resolve_composite(code, t)) return std::pair{l, t};
  return std::nullopt;
}

Resolution Resolver::get_languoid(std::string_view code) const {
  if (auto hit = find_current(code)) return Resolution{hit->first, hit->second, std::nullopt, {}};
  std::vector<IdType> tried;
  for (auto t : kLanguoidResolutionOrder)
    if (validate_identifier(t, code)) tried.push_back(t);
  for (auto t : tried)
    if (const auto* rec = db_->deprecation(t, code)) return follow_deprecation(code, *rec, t);

  if (tried.empty()) {
    std::string msg = "'" + std::string(code) + "' is not a syntactically valid languoid identifier";
    if (std::any_of(kRegionIdTypes.begin(), kRegionIdTypes.end(),
                    [&](IdType t) { return validate_identifier(t, code); }))
      msg += " (it has the shape of a region code; try get_region)";
    else if (validate_identifier(IdType::iso15924, code))
      msg += " (it has the shape of a script code; try get_script)";
    throw Error(ErrorKind::not_found, msg);
  }
  throw Error(ErrorKind::not_found,
              "no languoid with code '" + std::string(code) + "' (tried " + type_list(tried) + ")");
}

const Script& Resolver::get_script(std::string_view code) const {
  if (const auto* id = db_->lookup(IdType::iso15924, code))
    if (const auto* s = db_->script(*id)) return *s;
  std::string msg = "no script with ISO 15924 code '" + std::string(code) + "'";
  if (any_languoid_shape(code)) msg += " (it has the shape of a languoid code; try get)";
  throw Error(ErrorKind::not_found, msg);
}

const Region& Resolver::get_region(std::string_view code) const {
  for (auto t : kRegionIdTypes)
    if (validate_identifier(t, code))
      if (const auto* id = db_->lookup(t, code))
        if (const auto* r = db_->region(*id)) return *r;
  std::string msg = "no region with ISO 3166 code '" + std::string(code) + "'";
  if (any_languoid_shape(code)) msg += " (it has the shape of a languoid code; try get)";
  throw Error(ErrorKind::not_found, msg);
}

const Script* Resolver::default_script(const Languoid& l) const {
  const auto& edges = out_edges(EdgeKind::written_in, l.id);
  return edges.empty() ? nullptr : db_->script(edges.front()->to);
}

std::optional<std::string> Resolver::code_of(const Languoid& l, IdType type) const {
  if (const auto* c = l.code(type)) return *c;
  switch (type) {
    case IdType::iso639_2t:
      if (l.code(IdType::iso639_2b) && l.code(IdType::iso639_3)) return *l.code(IdType::iso639_3);
      return std::nullopt;
    case IdType::lang_script: {
      const auto* s = default_script(l);
      const auto* lang = l.code(IdType::iso639_3);
      if (!s || !lang) return std::nullopt;
      return *lang + "_" + s->code;
    }
    case IdType::bcp47: {
      const auto* s = default_script(l);
      const std::string* lang = nullptr;
      for (auto t : {IdType::iso639_1, IdType::iso639_3, IdType::iso639_5})
        if ((lang = l.code(t))) break;
      if (!s || !lang) return std::nullopt;
      return *lang + "_" + s->code;
    }
    default: return std::nullopt;
  }
}

std::optional<std::string> Resolver::code_of(const Region& r, IdType type) const {
  if (const auto* c = r.code(type)) return *c;
  return std::nullopt;
}

std::string Resolver::convert(std::string_view code, IdType from, IdType to) const {
  const std::string c(code);
  if (!validate_identifier(from, code))
    throw Error(ErrorKind::type_mismatch,
                "'" + c + "' is not a valid " + std::string(to_string(from)) + " code");

  auto missing = [&](const std::string& who) {
    return Error(ErrorKind::missing_target,
                 who + " has no " + std::string(to_string(to)) + " code");
  };
  auto mismatch = [&] {
    return Error(ErrorKind::type_mismatch, "'" + c + "' is not indexed as " +
                                               std::string(to_string(from)));
  };

  if (is_region_type(from)) {
    const auto* id = db_->lookup(from, code);
    if (!id) throw Error(ErrorKind::not_found, "no region with " + std::string(to_string(from)) + " '" + c + "'");
    const auto* r = db_->region(*id);
    if (!is_region_type(to)) throw Error(ErrorKind::type_mismatch, "cannot convert a region code to " + std::string(to_string(to)));
    if (auto out = code_of(*r, to)) return *out;
    throw missing(r->name);
  }
  if (is_script_type(from)) {
    const auto& s = get_script(code);
    if (to != IdType::iso15924) throw Error(ErrorKind::type_mismatch, "cannot convert a script code to " + std::string(to_string(to)));
    return s.code;
  }

  const Languoid* node = nullptr;
  if (const auto* id = db_->lookup(from, code)) {
    node = db_->languoid(*id);
  } else if (from == IdType::iso639_2t) {
    if (const auto* id3 = db_->lookup(IdType::iso639_3, code)) {
      const auto* l = db_->languoid(*id3);
      if (l->code(IdType::iso639_2b) && !l->code(IdType::iso639_2t)) node = l;
    }
  } else if (from == IdType::lang_script || from == IdType::bcp47) {
    node = resolve_composite(code, from);
  }
  if (!node) {
    if (const auto* rec = db_->deprecation(from, code)) {
      auto r = follow_deprecation(code, *rec, from);
      if (r.ambiguous()) {
        std::vector<std::string> ids;
        for (const auto* l : r.ambiguity) {
          auto target = is_languoid_type(to) ? code_of(*l, to) : std::nullopt;
          ids.push_back(target ? *target : l->id);
        }
        throw Error(ErrorKind::ambiguous, describe(*rec) + "; candidates: " + text::join(ids, ", "), ids);
      }
      node = r.node;
    }
  }
  if (!node) {
    for (auto t : kLanguoidIdTypes)
      if (t != from && db_->lookup(t, code)) throw mismatch();
    throw Error(ErrorKind::not_found,
                "no languoid with " + std::string(to_string(from)) + " code '" + c + "'");
  }
  if (!is_languoid_type(to))
    throw Error(ErrorKind::type_mismatch, "cannot convert a languoid code to " + std::string(to_string(to)));
  if (auto out = code_of(*node, to)) return *out;
  throw missing(node->name + " (" + node->id + ")");
}

std::string Resolver::normalize(std::string_view code, IdType to) const {
  if (is_region_type(to)) {
    const auto& r = get_region(code);
    if (auto out = code_of(r, to)) return *out;
    throw Error(ErrorKind::missing_target, r.name + " has no " + std::string(to_string(to)) + " code");
  }
  if (is_script_type(to)) return get_script(code).code;

  const auto r = get_languoid(code);
  if (r.ambiguous()) {
    std::vector<std::string> candidates;
    for (const auto* l : r.ambiguity) {
      auto c = code_of(*l, IdType::iso639_3);
      candidates.push_back(c ? *c : l->id);
    }
    throw Error(ErrorKind::ambiguous,
                describe(*r.deprecation) + "; candidates: " + text::join(candidates, ", "),
                candidates);
  }
  if (auto out = code_of(*r.node, to)) return *out;
  throw Error(ErrorKind::missing_target, r.node->name + " (" + r.node->id + ") has no " +
                                             std::string(to_string(to)) + " code");
}

const std::string& Resolver::reference_name(std::string_view node_id) const {
  if (const auto* l = db_->languoid(node_id)) return l->name;
  if (const auto* s = db_->script(node_id)) return s->name;
  if (const auto* r = db_->region(node_id)) return r->name;
  return kNoName;
}

std::optional<NodeRef> Resolver::node_ref(std::string_view node_id) const {
  auto kind = db_->node_kind(node_id);
  if (!kind) return std::nullopt;
  return NodeRef{*kind, std::string(node_id)};
}

std::vector<NodeRef> Resolver::sorted_refs(const std::vector<std::string>& ids) const {
  std::set<std::string> unique(ids.begin(), ids.end());
  std::vector<NodeRef> out;
  for (const auto& id : unique)
    if (auto ref = node_ref(id)) out.push_back(*ref);
  std::sort(out.begin(), out.end(), [&](const NodeRef& a, const NodeRef& b) {
    const auto& na = reference_name(a.id);
    const auto& nb = reference_name(b.id);
    return na != nb ? na < nb : a.id < b.id;
  });
  return out;
}

std::vector<std::string> Resolver::ancestor_chain(std::string_view node_id) const {
  const auto kind = db_->node_kind(node_id);
  if (!kind || *kind == NodeKind::script) return {};
  const auto hier = *kind == NodeKind::languoid ? EdgeKind::child_of : EdgeKind::contained_in;
  std::vector<std::string> chain;
  std::set<std::string, std::less<>> seen{std::string(node_id)};
  std::string cur(node_id);
  while (true) {
    const auto& up = out_edges(hier, cur);
    if (up.empty() || seen.contains(up.front()->to)) break;
    cur = up.front()->to;
    seen.insert(cur);
    chain.push_back(cur);
  }
  return chain;
}

std::vector<NodeRef> Resolver::neighbors(std::string_view node_id, Relation rel) const {
  const auto kind = db_->node_kind(node_id);
  if (!kind) throw Error(ErrorKind::not_found, "no node with id '" + std::string(node_id) + "'");
  const auto hier = *kind == NodeKind::region ? EdgeKind::contained_in : EdgeKind::child_of;
  const bool hierarchical = *kind != NodeKind::script;

  std::vector<std::string> ids;
  auto targets = [&](EdgeKind k, std::string_view from) {
    for (const auto* e : out_edges(k, from)) ids.push_back(e->to);
  };
  auto sources = [&](EdgeKind k, std::string_view to) {
    for (const auto* e : in_edges(k, to)) ids.push_back(e->from);
  };
  auto two_hop = [&](EdgeKind k) {
    for (const auto* e : out_edges(k, node_id))
      for (const auto* back : in_edges(k, e->to))
        if (back->from != node_id) ids.push_back(back->from);
  };

  switch (rel) {
    case Relation::parents:
      if (hierarchical) targets(hier, node_id);
      break;
    case Relation::children:
      if (hierarchical) sources(hier, node_id);
      break;
    case Relation::ancestors: ids = ancestor_chain(node_id); break;
    case Relation::family_root: {
      auto chain = ancestor_chain(node_id);
      if (!chain.empty()) ids.push_back(chain.back());
      break;
    }
    case Relation::scripts: targets(EdgeKind::written_in, node_id); break;
    case Relation::regions: targets(EdgeKind::spoken_in, node_id); break;
    case Relation::co_script_languoids: two_hop(EdgeKind::written_in); break;
    case Relation::co_region_languoids: two_hop(EdgeKind::spoken_in); break;
    case Relation::languoids:
      if (*kind == NodeKind::script) sources(EdgeKind::written_in, node_id);
      if (*kind == NodeKind::region) sources(EdgeKind::spoken_in, node_id);
      break;
  }
  return sorted_refs(ids);
}

std::vector<std::string> Resolver::name_of(std::string_view subject_id,
                                           std::string_view in_language) const {
  if (!db_->node_kind(subject_id))
    throw Error(ErrorKind::not_found, "no node with id '" + std::string(subject_id) + "'");
  const auto lang = get_languoid(in_language);
  if (lang.ambiguous())
    throw Error(ErrorKind::ambiguous, "in-language '" + std::string(in_language) + "' is ambiguous");
  if (!names_) throw Error(ErrorKind::names_unavailable, "no names table attached");

  std::vector<std::string> out;
  for (const auto& row : names_->rows_for(subject_id))
    if (row.in_language == lang.node->id &&
        std::find(out.begin(), out.end(), row.name) == out.end())
      out.push_back(row.name);
  return out;
}

std::vector<SearchHit> Resolver::search(std::string_view query, std::size_t limit) const {
  if (limit == 0) throw Error(ErrorKind::invalid_argument, "search limit must be positive");
  const auto q = text::fold(text::trim(query));
  if (q.empty()) return {};

  std::vector<SearchHit> hits;
  auto consider = [&](NodeKind kind, const std::string& id, const std::vector<std::string>& names) {
    int best = 0;
    for (const auto& n : names) {
      const auto f = text::fold(n);
      if (f == q) best = std::max(best, 3);
      else if (f.starts_with(q)) best = std::max(best, 2);
      else if (f.find(q) != std::string::npos) best = std::max(best, 1);
    }
    if (best > 0) hits.push_back(SearchHit{NodeRef{kind, id}, best});
  };

  for (const auto& l : db_->languoids) {
    std::vector<std::string> names{l.name};
    names.insert(names.end(), l.endonyms.begin(), l.endonyms.end());
    consider(NodeKind::languoid, l.id, names);
  }
  for (const auto& s : db_->scripts) {
    std::vector<std::string> names{s.name};
    names.insert(names.end(), s.aliases.begin(), s.aliases.end());
    consider(NodeKind::script, s.id, names);
  }
  for (const auto& r : db_->regions) consider(NodeKind::region, r.id, {r.name});

  std::sort(hits.begin(), hits.end(), [&](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& na = reference_name(a.node.id);
    const auto& nb = reference_name(b.node.id);
    return na != nb ? na < nb : a.node.id < b.node.id;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

CompiledQuery Resolver::compile(const QuerySpec& spec) const {
  CompiledQuery q;
  q.resolver = this;
  q.levels = spec.levels;
  for (const auto& c : spec.has_script) q.script_ids.push_back(get_script(c).id);
  for (const auto& c : spec.has_region) q.region_ids.push_back(get_region(c).id);
  for (const auto& c : spec.descendant_of) {
    const auto r = get_languoid(c);
    if (r.ambiguous()) throw Error(ErrorKind::ambiguous, "descendant_of code '" + c + "' is ambiguous");
    q.ancestor_ids.push_back(r.node->id);
  }
  q.flags = spec.flags;
  q.min_speakers = spec.min_speakers;
  q.max_speakers = spec.max_speakers;
  if (spec.name_contains) q.folded_name = text::fold(*spec.name_contains);
  return q;
}

bool CompiledQuery::operator()(const Languoid& l) const {
  if (!levels.empty() && std::find(levels.begin(), levels.end(), l.level) == levels.end())
    return false;
  auto has_edge = [&](EdgeKind k, const std::string& to) {
    const auto& edges = resolver->out_edges(k, l.id);
    return std::any_of(edges.begin(), edges.end(), [&](const Edge* e) { return e->to == to; });
  };
  for (const auto& s : script_ids)
    if (!has_edge(EdgeKind::written_in, s)) return false;
  for (const auto& r : region_ids)
    if (!has_edge(EdgeKind::spoken_in, r)) return false;
  if (!ancestor_ids.empty()) {
    const auto chain = resolver->ancestor_chain(l.id);
    for (const auto& a : ancestor_ids)
      if (std::find(chain.begin(), chain.end(), a) == chain.end()) return false;
  }
  for (const auto& [flag, want] : flags)
    if (l.has_flag(flag) != want) return false;
  if (min_speakers || max_speakers) {
    if (!l.speaker_count) return false;
    if (min_speakers && *l.speaker_count < *min_speakers) return false;
    if (max_speakers && *l.speaker_count > *max_speakers) return false;
  }
  if (folded_name && text::fold(l.name).find(*folded_name) == std::string::npos) return false;
  return true;
}

LanguoidView Resolver::filter_languoids(const QuerySpec& spec) const {
  return LanguoidView(std::ranges::ref_view(db_->languoids), compile(spec));
}

}  // namespace lg::resolve
