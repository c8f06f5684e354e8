#pragma once

// Query surface over a loaded Database: resolution, conversion,
// normalization, traversal, names, search and predicate filtering.

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "linguograph/core.hpp"
#include "linguograph/store.hpp"

namespace lg::resolve {

struct Notice {
  std::string code;  // the input as given
  DeprecationRecord record;
  std::string message;
};

using NoticeSink = std::function<void(const Notice&)>;

struct Resolution {
  const Languoid* node = nullptr;  // unset when ambiguous
  IdType matched_type = IdType::glottocode;
  std::optional<DeprecationRecord> deprecation;
  std::vector<const Languoid*> ambiguity;  // split deprecations, ordered by rank

  bool ambiguous() const { return !ambiguity.empty(); }
};

enum class Relation {
  parents,
  ancestors,
  children,
  family_root,
  scripts,
  regions,
  co_script_languoids,
  co_region_languoids,
  languoids,  // from a script or region: languoids written in / spoken in it
};

std::string_view to_string(Relation r);
std::optional<Relation> parse_relation(std::string_view s);

struct SearchHit {
  NodeRef node;
  int score = 0;  // 3 exact, 2 prefix, 1 substring

  bool operator==(const SearchHit&) const = default;
};

struct QuerySpec {
  std::vector<Level> levels;  // empty: any
  std::vector<std::string> has_script;
  std::vector<std::string> has_region;
  std::vector<std::string> descendant_of;
  std::map<Flag, bool> flags;
  std::optional<std::uint64_t> min_speakers, max_speakers;
  std::optional<std::string> name_contains;
};

class Resolver;

// A QuerySpec whose codes have been resolved to node ids.
struct CompiledQuery {
  const Resolver* resolver = nullptr;
  std::vector<Level> levels;
  std::vector<std::string> script_ids, region_ids, ancestor_ids;
  std::map<Flag, bool> flags;
  std::optional<std::uint64_t> min_speakers, max_speakers;
  std::optional<std::string> folded_name;

  bool operator()(const Languoid& l) const;
};

using LanguoidView =
    std::ranges::filter_view<std::ranges::ref_view<const std::vector<Languoid>>, CompiledQuery>;

// Read-only over a shared immutable Database; safe for concurrent callers as
// long as the notice sink is.
class Resolver {
 public:
  explicit Resolver(std::shared_ptr<const Database> db,
                    std::optional<store::NamesTable> names = std::nullopt,
                    NoticeSink sink = {});

  const Database& db() const { return *db_; }
  std::shared_ptr<const Database> shared_db() const { return db_; }
  void set_notice_sink(NoticeSink sink) { sink_ = std::move(sink); }
  const store::NamesTable* names() const { return names_ ? &*names_ : nullptr; }

  /// Fixed type order: glottocode, iso639_3, iso639_2b, iso639_5, iso639_1,
  /// wikidata_qid, lang_script, bcp47. Throws Error{not_found}.
  Resolution get_languoid(std::string_view code) const;
  /// Current (non-deprecated) match only; never notifies or throws.
  std::optional<std::pair<const Languoid*, IdType>> find_current(std::string_view code) const;
  const Script& get_script(std::string_view code) const;
  const Region& get_region(std::string_view code) const;

  /// Throws Error{type_mismatch}, Error{not_found} or Error{missing_target}.
  std::string convert(std::string_view code, IdType from, IdType to) const;
  /// Throws Error{not_found}, Error{ambiguous} or Error{missing_target}.
  std::string normalize(std::string_view code, IdType to) const;

  /// Code of `type` for a node, composing derivable types (iso639_2t,
  /// lang_script, bcp47). nullopt when the node has none.
  std::optional<std::string> code_of(const Languoid& l, IdType type) const;
  std::optional<std::string> code_of(const Region& r, IdType type) const;
  const Script* default_script(const Languoid& l) const;

  std::vector<NodeRef> neighbors(std::string_view node_id, Relation rel) const;
  /// Ancestors ordered from the parent up to the root.
  std::vector<std::string> ancestor_chain(std::string_view node_id) const;

  std::vector<std::string> name_of(std::string_view subject_id, std::string_view in_language) const;

  /// Throws Error{invalid_argument} when limit is 0.
  std::vector<SearchHit> search(std::string_view query, std::size_t limit) const;

  /// Throws Error{not_found} for unresolvable codes in the spec.
  CompiledQuery compile(const QuerySpec& spec) const;
  LanguoidView filter_languoids(const QuerySpec& spec) const;

  const std::string& reference_name(std::string_view node_id) const;
  std::optional<NodeRef> node_ref(std::string_view node_id) const;

  /// Outgoing/incoming edges of a kind, ordered by rank.
  const std::vector<const Edge*>& out_edges(EdgeKind kind, std::string_view from) const;
  const std::vector<const Edge*>& in_edges(EdgeKind kind, std::string_view to) const;

 private:
  Resolution follow_deprecation(std::string_view input, const DeprecationRecord& rec,
                                IdType matched) const;
  const Languoid* resolve_composite(std::string_view code, IdType type) const;
  void notify(std::string_view input, const DeprecationRecord& rec) const;
  std::vector<NodeRef> sorted_refs(const std::vector<std::string>& ids) const;

  std::shared_ptr<const Database> db_;
  std::optional<store::NamesTable> names_;
  NoticeSink sink_;
  using EdgeMap = std::map<std::string, std::vector<const Edge*>, std::less<>>;
  std::array<EdgeMap, 5> out_, in_;  // indexed by EdgeKind
};

inline constexpr std::array<IdType, 8> kLanguoidResolutionOrder = {
    IdType::glottocode, IdType::iso639_3,     IdType::iso639_2b,   IdType::iso639_5,
    IdType::iso639_1,   IdType::wikidata_qid, IdType::lang_script, IdType::bcp47};

}  // namespace lg::resolve
