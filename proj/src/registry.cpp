#include <set>

#include "linguograph/error.hpp"
#include "linguograph/ingest.hpp"
#include "linguograph/text.hpp"

namespace lg::ingest {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::format, "registry line " + std::to_string(line) + ": " + msg);
}

IdKey parse_selector(std::string_view s, std::size_t line) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos) fail(line, "selector must be <id_type>:<code>");
  auto type = parse_id_type(text::trim(s.substr(0, colon)));
  if (!type) fail(line, "unknown identifier type in selector '" + std::string(s) + "'");
  auto code = std::string(text::trim(s.substr(colon + 1)));
  if (!validate_identifier(*type, code)) fail(line, "selector code '" + code + "' is malformed");
  return IdKey{*type, code};
}

std::string resolve_locator(const std::string& locator, const fs::path& base) {
  if (locator.find("://") != std::string::npos) return locator;
  fs::path p(locator);
  if (p.is_absolute()) return locator;
  return (base / p).lexically_normal().string();
}

}  // namespace

RegistryConfig load_registry(const fs::path& path) {
  auto base = fs::absolute(path).parent_path();
  return parse_registry(text::read_file(path), base);
}

RegistryConfig parse_registry(std::string_view input, const fs::path& base_dir) {
  RegistryConfig cfg;
  cfg.base_dir = base_dir;

  enum class Section { none, source, policy, override_ };
  Section section = Section::none;
  std::size_t section_line = 0;

  struct PendingOverride {
    std::optional<IdKey> selector;
    std::string field, value, note;
    bool has_value = false;
  } pending;

  auto close_section = [&] {
    if (section == Section::source) {
      const auto& src = cfg.sources.back();
      if (src.locator.empty()) fail(section_line, "source '" + src.source_id + "' has no locator");
    } else if (section == Section::override_) {
      if (!pending.selector || pending.field.empty() || !pending.has_value)
        fail(section_line, "override needs select, field and value");
      cfg.overrides.push_back(
          ManualOverride{*pending.selector, pending.field, pending.value, pending.note});
      pending = PendingOverride{};
    }
  };

  const auto lines = text::split(input, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      close_section();
      auto header = text::trim(line.substr(1, line.size() - 2));
      section_line = line_no;
      if (header.starts_with("source ")) {
        section = Section::source;
        SourceDescriptor d;
        d.source_id = std::string(text::trim(header.substr(7)));
        if (d.source_id.empty()) fail(line_no, "source section without id");
        for (const auto& s : cfg.sources)
          if (s.source_id == d.source_id) fail(line_no, "duplicate source '" + d.source_id + "'");
        cfg.sources.push_back(std::move(d));
      } else if (header == "policy") {
        section = Section::policy;
      } else if (header == "override") {
        section = Section::override_;
      } else {
        fail(line_no, "unknown section '" + std::string(header) + "'");
      }
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const auto key = std::string(text::trim(line.substr(0, eq)));
    const auto value = std::string(text::trim(line.substr(eq + 1)));

    switch (section) {
      case Section::none: fail(line_no, "key outside of a section");
      case Section::source: {
        auto& d = cfg.sources.back();
        if (key == "locator") {
          d.locator = resolve_locator(value, base_dir);
        } else if (key == "layout") {
          auto layout = parse_layout(value);
          if (!layout) fail(line_no, "unknown layout '" + value + "'");
          d.expected_layout = *layout;
        } else if (key == "pinned") {
          if (!value.empty()) d.pinned_version = value;
        } else {
          fail(line_no, "unknown source key '" + key + "'");
        }
        break;
      }
      case Section::policy:
        if (key != "priority") fail(line_no, "unknown policy key '" + key + "'");
        cfg.priority.clear();
        for (auto& part : text::split(value, ','))
          if (auto id = std::string(text::trim(part)); !id.empty()) cfg.priority.push_back(id);
        break;
      case Section::override_:
        if (key == "select") {
          pending.selector = parse_selector(value, line_no);
        } else if (key == "field") {
          pending.field = value;
        } else if (key == "value") {
          pending.value = value;
          pending.has_value = true;
        } else if (key == "note") {
          pending.note = value;
        } else {
          fail(line_no, "unknown override key '" + key + "'");
        }
        break;
    }
  }
  close_section();

  std::set<std::string> ids;
  for (const auto& s : cfg.sources) ids.insert(s.source_id);
  std::set<std::string> seen;
  for (const auto& p : cfg.priority) {
    if (!ids.contains(p))
      throw Error(ErrorKind::format, "priority lists unregistered source '" + p + "'");
    if (!seen.insert(p).second)
      throw Error(ErrorKind::format, "priority lists '" + p + "' twice");
  }
  return cfg;
}

}  // namespace lg::ingest
