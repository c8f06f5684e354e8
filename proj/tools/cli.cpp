#include "cli.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "linguograph/audit.hpp"
#include "linguograph/error.hpp"
#include "linguograph/pipeline.hpp"
#include "linguograph/resolve.hpp"
#include "linguograph/signals.hpp"
#include "linguograph/store.hpp"
#include "linguograph/text.hpp"

#ifndef LINGUOGRAPH_DEFAULT_DB
#define LINGUOGRAPH_DEFAULT_DB "linguograph.lgdb.gz"
#endif
#ifndef LINGUOGRAPH_DEFAULT_REGISTRY
#define LINGUOGRAPH_DEFAULT_REGISTRY "sources.conf"
#endif

namespace lg::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string database = LINGUOGRAPH_DEFAULT_DB;
  std::string cache_dir = ".linguograph-cache";
  std::string format = "text";
  std::uint64_t seed = 12345;
  int verbosity = 0;
};

class Session {
 public:
  Session(const Config& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  const resolve::Resolver& resolver() {
    if (!resolver_) {
      auto db = std::make_shared<const Database>(store::load_database(cfg_.database));
      if (cfg_.verbosity > 0) err_ << "loaded " << cfg_.database << "\n";
      store::NamesTable names(store::names_path_for(cfg_.database), db);
      resolver_ = std::make_unique<resolve::Resolver>(db, std::move(names), [this](const resolve::Notice& n) {
        err_ << "warning: " << n.message << "\n";
      });
    }
    return *resolver_;
  }

  void require_format(std::initializer_list<std::string_view> allowed) const {
    if (std::find(allowed.begin(), allowed.end(), cfg_.format) == allowed.end())
      throw UsageError("format '" + cfg_.format + "' is not supported by this subcommand");
  }

  const Config& cfg() const { return cfg_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

 private:
  const Config& cfg_;
  std::ostream& out_;
  std::ostream& err_;
  std::unique_ptr<resolve::Resolver> resolver_;
};

IdType id_type_arg(const std::string& s) {
  auto t = parse_id_type(s);
  if (!t) throw UsageError("unknown identifier type '" + s + "'");
  return *t;
}

std::string codes_of(const resolve::Resolver& r, const std::string& id, EdgeKind kind) {
  std::vector<std::string> codes;
  for (const auto* e : r.out_edges(kind, id)) {
    if (const auto* s = r.db().script(e->to)) codes.push_back(s->code);
    else if (const auto* g = r.db().region(e->to)) codes.push_back(g->codes.begin()->second);
  }
  return text::join(codes, ", ");
}

json languoid_json(const resolve::Resolver& r, const Languoid& l) {
  json codes = json::object();
  for (auto t : kLanguoidIdTypes)
    if (auto c = r.code_of(l, t)) codes[std::string(to_string(t))] = *c;
  json flags = json::array();
  for (auto f : l.flags) flags.push_back(std::string(to_string(f)));
  json scripts = json::array(), regions = json::array();
  for (const auto* e : r.out_edges(EdgeKind::written_in, l.id)) scripts.push_back(r.db().script(e->to)->code);
  for (const auto* e : r.out_edges(EdgeKind::spoken_in, l.id)) regions.push_back(e->to);
  const auto chain = r.ancestor_chain(l.id);
  json j = {{"id", l.id},
            {"name", l.name},
            {"level", std::string(to_string(l.level))},
            {"codes", codes},
            {"flags", flags},
            {"endonyms", l.endonyms},
            {"scripts", scripts},
            {"regions", regions},
            {"parent", chain.empty() ? json(nullptr) : json(chain.front())},
            {"family", chain.empty() ? json(nullptr) : json(chain.back())}};
  j["speaker_count"] = l.speaker_count ? json(*l.speaker_count) : json(nullptr);
  return j;
}

json script_json(const Script& s) {
  return {{"id", s.id}, {"code", s.code}, {"name", s.name}, {"aliases", s.aliases},
          {"numeric_code", s.numeric_code ? json(*s.numeric_code) : json(nullptr)}};
}

json region_json(const Region& g) {
  json codes = json::object();
  for (const auto& [t, c] : g.codes) codes[std::string(to_string(t))] = c;
  return {{"id", g.id}, {"name", g.name}, {"kind", std::string(to_string(g.kind))}, {"codes", codes},
          {"historical", g.historical}, {"parent", g.parent ? json(*g.parent) : json(nullptr)}};
}

json deprecation_json(const DeprecationRecord& d) {
  return {{"code", d.code}, {"id_type", std::string(to_string(d.id_type))},
          {"change_kind", std::string(to_string(d.change_kind))}, {"replacements", d.replacements},
          {"year", d.year ? json(*d.year) : json(nullptr)}, {"source", d.source}};
}

void print_languoid_text(std::ostream& out, const resolve::Resolver& r, const Languoid& l) {
  out << l.name << "  [" << l.id << "]\n";
  out << "  level: " << to_string(l.level) << "\n";
  for (auto t : kLanguoidIdTypes)
    if (auto c = r.code_of(l, t)) out << "  " << to_string(t) << ": " << *c << "\n";
  if (!l.flags.empty()) {
    std::vector<std::string> f;
    for (auto x : l.flags) f.emplace_back(to_string(x));
    out << "  flags: " << text::join(f, ", ") << "\n";
  }
  if (!l.endonyms.empty()) out << "  endonyms: " << text::join(l.endonyms, ", ") << "\n";
  if (l.speaker_count) out << "  speakers: " << *l.speaker_count << "\n";
  if (auto s = codes_of(r, l.id, EdgeKind::written_in); !s.empty()) out << "  scripts: " << s << "\n";
  if (auto g = codes_of(r, l.id, EdgeKind::spoken_in); !g.empty()) out << "  regions: " << g << "\n";
  const auto chain = r.ancestor_chain(l.id);
  if (!chain.empty()) {
    out << "  parent: " << r.reference_name(chain.front()) << "\n";
    out << "  family: " << r.reference_name(chain.back()) << "\n";
  }
}

std::string node_label(const resolve::Resolver& r, const NodeRef& n) {
  return r.reference_name(n.id) + "\t" + n.id;
}

// --- subcommands -----------------------------------------------------------

int cmd_rebuild(Session& s, const std::string& registry, const std::string& output) {
  s.require_format({"text", "json"});
  pipeline::RebuildOptions opts;
  opts.registry = registry;
  opts.cache_dir = s.cfg().cache_dir;
  opts.output = output.empty() ? s.cfg().database : output;
  const auto result = pipeline::rebuild(opts);
  if (s.cfg().format == "json") {
    auto j = result.build.report.to_json();
    j["output"] = {{"database", result.database_path.string()}, {"database_bytes", result.database_bytes},
                   {"names", result.names_path.string()}, {"names_bytes", result.names_bytes}};
    s.out() << j.dump(2) << "\n";
  } else {
    s.out() << result.build.report.text();
    s.out() << "wrote " << result.database_path.string() << " (" << result.database_bytes << " bytes), "
            << result.names_path.string() << " (" << result.names_bytes << " bytes)\n";
  }
  return kOk;
}

int cmd_get(Session& s, const std::string& code, const std::string& kind, const std::string& name_in) {
  s.require_format({"text", "json"});
  const auto& r = s.resolver();
  const bool as_json = s.cfg().format == "json";
  if (kind == "script") {
    const auto& sc = r.get_script(code);
    if (as_json) s.out() << script_json(sc).dump(2) << "\n";
    else s.out() << sc.name << "  [" << sc.id << "]\n  iso15924: " << sc.code << "\n";
    return kOk;
  }
  if (kind == "region") {
    const auto& g = r.get_region(code);
    if (as_json) {
      s.out() << region_json(g).dump(2) << "\n";
    } else {
      s.out() << g.name << "  [" << g.id << "]\n  kind: " << to_string(g.kind) << "\n";
      for (const auto& [t, c] : g.codes) s.out() << "  " << to_string(t) << ": " << c << "\n";
      s.out() << "  historical: " << (g.historical ? "true" : "false") << "\n";
    }
    return kOk;
  }

  const auto res = r.get_languoid(code);
  if (res.ambiguous()) {
    std::vector<std::string> cands;
    for (const auto* l : res.ambiguity) {
      auto c = r.code_of(*l, IdType::iso639_3);
      cands.push_back((c ? *c : l->id) + " (" + l->name + ")");
    }
    s.err() << "error: '" << code << "' is ambiguous; candidates: " << text::join(cands, ", ") << "\n";
    if (as_json) {
      json j = {{"input", code}, {"ambiguity", json::array()}, {"deprecation", deprecation_json(*res.deprecation)}};
      for (const auto* l : res.ambiguity) j["ambiguity"].push_back(languoid_json(r, *l));
      s.out() << j.dump(2) << "\n";
    }
    return kNotFound;
  }
  std::vector<std::string> names;
  if (!name_in.empty()) names = r.name_of(res.node->id, name_in);
  if (as_json) {
    json j = {{"input", code}, {"matched_type", std::string(to_string(res.matched_type))},
              {"languoid", languoid_json(r, *res.node)},
              {"deprecation", res.deprecation ? deprecation_json(*res.deprecation) : json(nullptr)}};
    if (!name_in.empty()) j["names"] = {{"in_language", name_in}, {"names", names}};
    s.out() << j.dump(2) << "\n";
  } else {
    print_languoid_text(s.out(), r, *res.node);
    s.out() << "  matched as: " << to_string(res.matched_type) << "\n";
    if (!name_in.empty()) s.out() << "  names in " << name_in << ": " << text::join(names, ", ") << "\n";
  }
  return kOk;
}

int cmd_convert(Session& s, const std::string& code, const std::string& from, const std::string& to) {
  s.require_format({"text", "json"});
  const auto result = s.resolver().convert(code, id_type_arg(from), id_type_arg(to));
  if (s.cfg().format == "json")
    s.out() << json{{"input", code}, {"from", from}, {"to", to}, {"output", result}}.dump(2) << "\n";
  else
    s.out() << result << "\n";
  return kOk;
}

int cmd_normalize(Session& s, const std::string& code, const std::string& to) {
  s.require_format({"text", "json"});
  const auto result = s.resolver().normalize(code, id_type_arg(to));
  if (s.cfg().format == "json")
    s.out() << json{{"input", code}, {"to", to}, {"output", result}}.dump(2) << "\n";
  else
    s.out() << result << "\n";
  return kOk;
}

int cmd_search(Session& s, const std::string& query, std::size_t limit) {
  s.require_format({"text", "json", "tsv"});
  const auto& r = s.resolver();
  const auto hits = r.search(query, limit);
  static constexpr std::array<std::string_view, 4> kTier = {"", "substring", "prefix", "exact"};
  if (s.cfg().format == "json") {
    json arr = json::array();
    for (const auto& h : hits)
      arr.push_back({{"id", h.node.id}, {"name", r.reference_name(h.node.id)}, {"score", h.score},
                     {"match", std::string(kTier[h.score])}});
    s.out() << arr.dump(2) << "\n";
  } else {
    for (const auto& h : hits) s.out() << node_label(r, h.node) << "\t" << kTier[h.score] << "\n";
  }
  return kOk;
}

std::string node_from_code(const resolve::Resolver& r, const std::string& code, const std::string& kind) {
  if (kind == "script") return r.get_script(code).id;
  if (kind == "region") return r.get_region(code).id;
  const auto res = r.get_languoid(code);
  if (res.ambiguous()) {
    std::vector<std::string> ids;
    for (const auto* l : res.ambiguity) ids.push_back(l->id);
    throw Error(ErrorKind::ambiguous, "'" + code + "' is ambiguous; candidates: " + text::join(ids, ", "), ids);
  }
  return res.node->id;
}

int cmd_neighbors(Session& s, const std::string& code, const std::string& relation, const std::string& kind) {
  s.require_format({"text", "json", "tsv"});
  const auto rel = resolve::parse_relation(relation);
  if (!rel) throw UsageError("unknown relation '" + relation + "'");
  const auto& r = s.resolver();
  const auto id = node_from_code(r, code, kind);
  const auto nodes = r.neighbors(id, *rel);
  if (s.cfg().format == "json") {
    json arr = json::array();
    for (const auto& n : nodes) arr.push_back({{"id", n.id}, {"name", r.reference_name(n.id)}});
    s.out() << json{{"node", id}, {"relation", relation}, {"neighbors", arr}}.dump(2) << "\n";
  } else {
    for (const auto& n : nodes) s.out() << node_label(r, n) << "\n";
  }
  return kOk;
}

int cmd_audit(Session& s, const std::string& file) {
  s.require_format({"text", "json", "tsv"});
  const auto codes = file == "-" ? audit::read_codes(std::cin) : audit::read_codes(std::filesystem::path(file));
  const auto report = audit::audit_codes(s.resolver(), codes);
  if (s.cfg().format == "json") {
    s.out() << report.to_json().dump(2) << "\n";
  } else if (s.cfg().format == "tsv") {
    s.out() << "code\tcategory\tmatched_type\treplacements\tnote\n";
    for (const auto& v : report.verdicts)
      s.out() << v.code << "\t" << audit::to_string(v.category) << "\t"
              << (v.matched_type ? std::string(to_string(*v.matched_type)) : "") << "\t"
              << text::join(v.replacements, ",") << "\t" << v.note << "\n";
  } else {
    s.out() << report.text();
  }
  return kOk;
}

std::string latex_escape(std::string_view in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      case '\\': out += "\\textbackslash{}"; break;
      default: out += c;
    }
  }
  return out;
}

std::string column_label(const std::string& col) {
  static const std::map<std::string, std::string> labels = {
      {"name", "Name"},          {"id", "ID"},
      {"level", "Level"},        {"family", "Family"},
      {"parent", "Parent"},      {"scripts", "Scripts"},
      {"regions", "Regions"},    {"speakers", "Speakers"},
      {"endonym", "Endonym"},    {"iso639_1", "ISO 639-1"},
      {"iso639_2b", "ISO 639-2B"}, {"iso639_2t", "ISO 639-2T"},
      {"iso639_3", "ISO 639-3"}, {"iso639_5", "ISO 639-5"},
      {"glottocode", "Glottocode"}, {"wikidata_qid", "Wikidata"},
      {"bcp47", "BCP-47"},       {"lang_script", "Lang-Script"},
  };
  auto it = labels.find(col);
  if (it == labels.end()) throw UsageError("unknown column '" + col + "'");
  return it->second;
}

std::string column_value(const resolve::Resolver& r, const Languoid& l, const std::string& col) {
  if (col == "name") return l.name;
  if (col == "id") return l.id;
  if (col == "level") return std::string(to_string(l.level));
  if (col == "family" || col == "parent") {
    const auto chain = r.ancestor_chain(l.id);
    if (chain.empty()) return "";
    return r.reference_name(col == "family" ? chain.back() : chain.front());
  }
  if (col == "scripts") return codes_of(r, l.id, EdgeKind::written_in);
  if (col == "regions") return codes_of(r, l.id, EdgeKind::spoken_in);
  if (col == "speakers") return l.speaker_count ? std::to_string(*l.speaker_count) : "";
  if (col == "endonym") return l.endonyms.empty() ? "" : l.endonyms.front();
  auto c = r.code_of(l, id_type_arg(col));
  return c ? *c : "";
}

int cmd_table(Session& s, const std::vector<std::string>& codes, const std::string& columns_arg) {
  s.require_format({"text", "json", "tsv", "latex"});
  const auto columns = text::split(columns_arg, ',');
  std::vector<std::string> labels;
  for (auto& c : columns) labels.push_back(column_label(std::string(text::trim(c))));
  const auto& r = s.resolver();

  std::vector<std::vector<std::string>> rows;
  for (const auto& code : codes) {
    const auto id = node_from_code(r, code, "languoid");
    const auto* l = r.db().languoid(id);
    std::vector<std::string> row;
    for (const auto& c : columns) row.push_back(column_value(r, *l, std::string(text::trim(c))));
    rows.push_back(std::move(row));
  }

  auto& out = s.out();
  const auto& fmt = s.cfg().format;
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json o = json::object();
      for (std::size_t i = 0; i < columns.size(); ++i) o[std::string(text::trim(columns[i]))] = row[i];
      arr.push_back(o);
    }
    out << arr.dump(2) << "\n";
  } else if (fmt == "tsv") {
    out << text::join(labels, "\t") << "\n";
    for (const auto& row : rows) out << text::join(row, "\t") << "\n";
  } else if (fmt == "latex") {
    out << "\\begin{tabular}{" << std::string(columns.size(), 'l') << "}\n\\toprule\n";
    std::vector<std::string> esc;
    for (const auto& l : labels) esc.push_back(latex_escape(l));
    out << text::join(esc, " & ") << " \\\\\n\\midrule\n";
    for (const auto& row : rows) {
      esc.clear();
      for (const auto& v : row) esc.push_back(latex_escape(v));
      out << text::join(esc, " & ") << " \\\\\n";
    }
    out << "\\bottomrule\n\\end{tabular}\n";
  } else {
    std::vector<std::size_t> width(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      width[i] = labels[i].size();
      for (const auto& row : rows) width[i] = std::max(width[i], row[i].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i];
        if (i + 1 < cells.size()) out << std::string(width[i] - cells[i].size() + 2, ' ');
      }
      out << "\n";
    };
    line(labels);
    for (const auto& row : rows) line(row);
  }
  return kOk;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

int cmd_colex(Session& s, const std::string& edges_path, const std::string& ratings_path,
              const std::string& dimension, bool own_vs_other, std::size_t permutations, unsigned threads) {
  s.require_format({"text", "json", "tsv", "latex"});
  const auto& r = s.resolver();
  const auto key = signals::resolver_key(r);
  const auto table = signals::zscore_normalize(signals::read_ratings(ratings_path), key);
  const auto build = signals::build_concept_graph(signals::read_colex_edges(edges_path), table, dimension, key);
  for (const auto& tag : table.skipped_tags) s.err() << "warning: unresolvable language tag '" << tag << "' in ratings\n";
  for (const auto& tag : build.skipped_tags) s.err() << "warning: unresolvable language tag '" << tag << "' in edges\n";

  const auto smooth = signals::smoothness_table(build, permutations, s.cfg().seed, threads);
  std::vector<signals::OwnVsOtherRow> ovo;
  if (own_vs_other) ovo = signals::own_vs_other_analysis(build);

  auto& out = s.out();
  const auto& fmt = s.cfg().format;
  if (fmt == "json") {
    json j;
    j["dimension"] = dimension;
    j["graph"] = {{"vertices", build.graph.vertices.size()}, {"edges", build.graph.edges.size()},
                  {"excluded_rows", build.excluded_edges}};
    j["seed"] = s.cfg().seed;
    j["permutations"] = permutations;
    json rows = json::array();
    for (const auto& row : smooth)
      rows.push_back({{"language", row.language}, {"name", r.reference_name(row.language)},
                      {"vertices", row.vertices}, {"edges", row.edges}, {"R", row.result.statistic},
                      {"p", row.result.p_value}, {"stars", std::string(signals::stars(row.result.p_value))}});
    j["smoothness"] = rows;
    if (own_vs_other) {
      json o = json::array();
      for (const auto& row : ovo) {
        json e = {{"language", row.language}, {"name", r.reference_name(row.language)},
                  {"n_own", row.n_own}, {"n_other", row.n_other}};
        if (row.skipped()) {
          e["note"] = row.note;
        } else {
          e.update({{"mean_own", row.mean_own}, {"mean_other", row.mean_other}, {"U", row.u},
                    {"p", row.p}, {"d", row.d}, {"stars", std::string(signals::stars(row.p))}});
        }
        o.push_back(e);
      }
      j["own_vs_other"] = o;
    }
    out << j.dump(2) << "\n";
    return kOk;
  }

  const std::string sep = fmt == "latex" ? " & " : "\t";
  const std::string eol = fmt == "latex" ? " \\\\\n" : "\n";
  if (fmt == "latex") out << "\\begin{tabular}{lrrll}\n\\toprule\n";
  out << "language" << sep << "vertices" << sep << "edges" << sep << "R" << sep << "p" << eol;
  if (fmt == "latex") out << "\\midrule\n";
  for (const auto& row : smooth) {
    const auto st = signals::stars(row.result.p_value);
    std::string rv = fixed(row.result.statistic);
    if (fmt == "latex" && !st.empty()) rv += "\\textsuperscript{" + std::string(st) + "}";
    else rv += std::string(st);
    out << (fmt == "latex" ? latex_escape(r.reference_name(row.language)) : r.reference_name(row.language)) << sep
        << row.vertices << sep << row.edges << sep << rv << sep << fixed(row.result.p_value, 4) << eol;
  }
  if (fmt == "latex") out << "\\bottomrule\n\\end{tabular}\n";

  if (own_vs_other) {
    out << "\n";
    if (fmt == "latex") out << "\\begin{tabular}{lrrrrrrl}\n\\toprule\n";
    out << "language" << sep << "n_own" << sep << "n_other" << sep << "mean_own" << sep << "mean_other" << sep
        << "U" << sep << "p" << sep << "d" << eol;
    if (fmt == "latex") out << "\\midrule\n";
    for (const auto& row : ovo) {
      const auto name = fmt == "latex" ? latex_escape(r.reference_name(row.language)) : r.reference_name(row.language);
      out << name << sep << row.n_own << sep << row.n_other << sep;
      if (row.skipped()) {
        out << "-" << sep << "-" << sep << "-" << sep << "-" << sep << "skipped: " << row.note << eol;
        continue;
      }
      out << fixed(row.mean_own) << sep << fixed(row.mean_other) << sep << fixed(row.u, 1) << sep
          << fixed(row.p, 4) << sep << fixed(row.d) << signals::stars(row.p) << eol;
    }
    if (fmt == "latex") out << "\\bottomrule\n\\end{tabular}\n";
  }
  return kOk;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::not_found:
    case ErrorKind::ambiguous:
    case ErrorKind::type_mismatch:
    case ErrorKind::missing_target:
    case ErrorKind::names_unavailable:
    case ErrorKind::degenerate:
    case ErrorKind::undefined:
    case ErrorKind::empty: return kNotFound;
    case ErrorKind::invalid_argument: return kUsage;
    default: return kBuild;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Language identifier resolution and metadata toolkit", "linguograph"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-d,--database", cfg.database, "Database file (.lgdb.gz)")->envname("LINGUOGRAPH_DB");
  app.add_option("--cache-dir", cfg.cache_dir, "Source snapshot cache");
  app.add_option("-f,--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "tsv", "latex"}));
  app.add_option("--seed", cfg.seed, "Seed for permutation tests");
  app.add_flag("-v,--verbose", cfg.verbosity, "More diagnostics");

  std::string registry = LINGUOGRAPH_DEFAULT_REGISTRY, output;
  auto* rebuild = app.add_subcommand("rebuild", "Fetch sources, merge and write the database");
  rebuild->add_option("--registry", registry, "Source registry file");
  rebuild->add_option("-o,--output", output, "Output path (defaults to --database)");

  std::string code, kind = "languoid", name_in;
  auto* get = app.add_subcommand("get", "Resolve a code to its canonical node");
  get->add_option("code", code)->required();
  get->add_option("--kind", kind)->check(CLI::IsMember({"languoid", "script", "region"}));
  get->add_option("--names-in", name_in, "Also list names in this language");

  std::string from, to;
  auto* convert = app.add_subcommand("convert", "Convert a code between identifier types");
  convert->add_option("code", code)->required();
  convert->add_option("--from", from)->required();
  convert->add_option("--to", to)->required();

  auto* normalize = app.add_subcommand("normalize", "Resolve a code and project it to a type");
  normalize->add_option("code", code)->required();
  normalize->add_option("--to", to)->required();

  std::string query;
  std::size_t limit = 10;
  auto* search = app.add_subcommand("search", "Search names and endonyms");
  search->add_option("query", query)->required();
  search->add_option("-n,--limit", limit)->check(CLI::PositiveNumber);

  std::string relation;
  auto* neighbors = app.add_subcommand("neighbors", "Traverse relations from a node");
  neighbors->add_option("code", code)->required();
  neighbors->add_option("-r,--relation", relation)->required();
  neighbors->add_option("--kind", kind)->check(CLI::IsMember({"languoid", "script", "region"}));

  std::string file;
  auto* audit_cmd = app.add_subcommand("audit", "Classify a list of language codes");
  audit_cmd->add_option("file", file, "Code list (TSV), or - for standard input")->required();

  std::vector<std::string> codes;
  std::string columns = "name,iso639_3,glottocode,family";
  auto* table = app.add_subcommand("table", "Emit a metadata table for languoids");
  table->add_option("codes", codes)->required();
  table->add_option("-c,--columns", columns);

  std::string edges_path, ratings_path, dimension;
  bool own_vs_other = false;
  std::size_t permutations = signals::kDefaultPermutations;
  unsigned threads = 1;
  auto* colex = app.add_subcommand("colex", "Colexification graph-signal statistics");
  colex->add_option("--edges", edges_path)->required();
  colex->add_option("--ratings", ratings_path)->required();
  colex->add_option("--dimension", dimension)->required();
  colex->add_flag("--own-vs-other", own_vs_other);
  colex->add_option("--permutations", permutations)->check(CLI::PositiveNumber);
  colex->add_option("--threads", threads)->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  Session session(cfg, out, err);
  try {
    if (rebuild->parsed()) return cmd_rebuild(session, registry, output);
    if (get->parsed()) return cmd_get(session, code, kind, name_in);
    if (convert->parsed()) return cmd_convert(session, code, from, to);
    if (normalize->parsed()) return cmd_normalize(session, code, to);
    if (search->parsed()) return cmd_search(session, query, limit);
    if (neighbors->parsed()) return cmd_neighbors(session, code, relation, kind);
    if (audit_cmd->parsed()) return cmd_audit(session, file);
    if (table->parsed()) return cmd_table(session, codes, columns);
    if (colex->parsed()) return cmd_colex(session, edges_path, ratings_path, dimension, own_vs_other, permutations, threads);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    if (!e.candidates().empty() && std::string_view(e.what()).find("candidates:") == std::string_view::npos)
      err << "candidates: " << text::join(e.candidates(), ", ") << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return kBuild;
  }
  return kUsage;
}

}  // namespace lg::cli
