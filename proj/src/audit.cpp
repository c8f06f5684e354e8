#include "linguograph/audit.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "linguograph/error.hpp"
#include "linguograph/text.hpp"

namespace lg::audit {

namespace {

constexpr std::array<Category, 4> kCategories = {Category::valid, Category::deprecated,
                                                 Category::region_code, Category::unknown};

const Region* find_region(const Database& db, std::string_view code, IdType* matched) {
  const auto upper = text::to_upper_ascii(code);
  for (auto t : kRegionIdTypes)
    if (validate_identifier(t, upper))
      if (const auto* id = db.lookup(t, upper)) {
        *matched = t;
        return db.region(*id);
      }
  return nullptr;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::valid: return "valid";
    case Category::deprecated: return "deprecated";
    case Category::region_code: return "region_code";
    case Category::unknown: return "unknown";
  }
  return "?";
}

CodeVerdict classify_code(const resolve::Resolver& resolver, std::string_view code) {
  const auto& db = resolver.db();
  CodeVerdict v;
  v.code = std::string(code);

  if (auto hit = resolver.find_current(code)) {
    v.category = Category::valid;
    v.matched_type = hit->second;
    v.node_id = hit->first->id;
    return v;
  }

  IdType region_type{};
  const Region* region = find_region(db, code, &region_type);

  for (auto t : resolve::kLanguoidResolutionOrder) {
    if (!validate_identifier(t, code)) continue;
    if (const auto* rec = db.deprecation(t, code)) {
      v.category = Category::deprecated;
      v.matched_type = t;
      v.replacements = rec->replacements;
      v.note = std::string(to_string(rec->change_kind));
      if (rec->year) v.note += " " + std::to_string(*rec->year);
      if (region) v.note += "; also the region code of " + region->name;
      return v;
    }
  }

  if (region) {
    v.category = Category::region_code;
    v.matched_type = region_type;
    v.node_id = region->id;
    v.note = region->name;
    return v;
  }
  return v;
}

AuditReport audit_codes(const resolve::Resolver& resolver, const std::vector<GroupedCode>& codes) {
  AuditReport report;
  report.inputs = codes.size();
  for (auto c : kCategories) report.counts[c] = 0;

  std::map<std::string, CodeVerdict> unique;
  for (const auto& [group, code] : codes) {
    auto it = unique.find(code);
    if (it == unique.end()) it = unique.emplace(code, classify_code(resolver, code)).first;
    auto& g = report.groups[group];
    ++g[it->second.category];
  }
  for (auto& [code, v] : unique) {
    ++report.counts[v.category];
    if (v.category == Category::valid) ++report.matched_types[*v.matched_type];
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

std::string AuditReport::text() const {
  std::ostringstream out;
  out << "unique codes: " << verdicts.size() << " (from " << inputs << " rows)\n";
  for (auto c : kCategories) {
    auto it = counts.find(c);
    out << "  " << to_string(c) << ": " << (it == counts.end() ? 0 : it->second) << "\n";
  }
  if (!matched_types.empty()) {
    out << "identifier types (valid codes):\n";
    for (const auto& [t, n] : matched_types) out << "  " << to_string(t) << ": " << n << "\n";
  }
  if (groups.size() > 1 || (groups.size() == 1 && !groups.begin()->first.empty())) {
    out << "groups:\n";
    for (const auto& [g, cs] : groups) {
      out << "  " << g << ":";
      for (const auto& [c, n] : cs) out << " " << to_string(c) << "=" << n;
      out << "\n";
    }
  }
  out << "codes:\n";
  for (const auto& v : verdicts) {
    out << "  " << v.code << "\t" << to_string(v.category);
    if (v.matched_type) out << "\t" << to_string(*v.matched_type);
    if (!v.replacements.empty()) out << "\t-> " << text::join(v.replacements, ", ");
    if (!v.note.empty()) out << "\t(" << v.note << ")";
    out << "\n";
  }
  return out.str();
}

nlohmann::json AuditReport::to_json() const {
  nlohmann::json j;
  j["inputs"] = inputs;
  j["unique_codes"] = verdicts.size();
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [cat, n] : counts) c[std::string(to_string(cat))] = n;
  j["counts"] = c;
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [type, n] : matched_types) t[std::string(to_string(type))] = n;
  j["matched_types"] = t;
  nlohmann::json g = nlohmann::json::object();
  for (const auto& [group, cs] : groups) {
    nlohmann::json gc = nlohmann::json::object();
    for (const auto& [cat, n] : cs) gc[std::string(to_string(cat))] = n;
    g[group] = gc;
  }
  j["groups"] = g;
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : verdicts) {
    nlohmann::json e = {{"code", v.code},
                        {"category", std::string(to_string(v.category))},
                        {"replacements", v.replacements},
                        {"note", v.note}};
    e["matched_type"] = v.matched_type ? nlohmann::json(std::string(to_string(*v.matched_type)))
                                       : nlohmann::json(nullptr);
    e["node"] = v.node_id.empty() ? nlohmann::json(nullptr) : nlohmann::json(v.node_id);
    vs.push_back(std::move(e));
  }
  j["verdicts"] = vs;
  return j;
}

std::vector<GroupedCode> read_codes(std::istream& in) {
  std::vector<GroupedCode> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() >= 2)
      out.emplace_back(std::string(text::trim(fields[0])), std::string(text::trim(fields[1])));
    else
      out.emplace_back("", std::string(trimmed));
  }
  return out;
}

std::vector<GroupedCode> read_codes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read code list " + path.string());
  return read_codes(in);
}

}  // namespace lg::audit
