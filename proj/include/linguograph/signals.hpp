#pragma once

// Graph-signal statistics over colexification concept graphs: z-scored
// ratings, normalized-Laplacian Rayleigh quotients, permutation tests and
// own- vs other-language rank comparisons.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

namespace lg::resolve {
class Resolver;
}

namespace lg::signals {

// Maps a raw language tag to a language key; nullopt when unresolvable.
using LanguageKey = std::function<std::optional<std::string>(std::string_view tag)>;

/// Keys are languoid internal ids. Deprecated single-replacement tags follow
/// their replacement silently; split or unknown tags yield nullopt.
LanguageKey resolver_key(const resolve::Resolver& resolver);

struct RawRating {
  std::string dataset;
  std::string language;
  std::string concept_id;
  double value = 0;
  std::string dimension;  // empty when the input has no dimension column
};

struct DatasetStats {
  std::string dimension;
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;  // population
};

struct ZEntry {
  std::string dataset, language, concept_id;
  double raw = 0, z = 0;
};

struct ConceptMean {
  std::vector<std::string> datasets;  // D_{c,l}
  double mean = 0;                    // equal-weight mean of z over D_{c,l}
};

struct ZScoreTable {
  std::map<std::string, DatasetStats> datasets;
  std::vector<ZEntry> entries;
  // (dimension, language key, concept) -> mean z
  std::map<std::tuple<std::string, std::string, std::string>, ConceptMean> means;
  std::set<std::string> skipped_tags;
};

/// Throws Error{degenerate} naming a dataset whose population sd is zero.
ZScoreTable zscore_normalize(const std::vector<RawRating>& ratings, const LanguageKey& key = {});

struct ColexRow {
  std::string concept_a, concept_b, language, lemma;
};

struct EdgeRating {
  double x_u = 0, x_v = 0, delta = 0;  // delta = |x_u - x_v|
};

struct ConceptEdge {
  std::size_t u = 0, v = 0;  // u < v
  std::set<std::string> languages;
  std::set<std::string> lemmas;
  std::map<std::string, EdgeRating> ratings;  // per language with both endpoints rated
};

struct ConceptGraph {
  std::vector<std::string> vertices;  // sorted concept ids
  std::vector<ConceptEdge> edges;     // sorted by (u, v)

  std::optional<std::size_t> index_of(std::string_view concept_id) const;
};

struct RatingSignal {
  std::string dimension;
  std::string language;
  std::map<std::size_t, double> values;  // vertex -> mean z; only rated vertices
};

struct GraphBuild {
  ConceptGraph graph;
  std::map<std::string, RatingSignal> signals;  // by language key
  std::set<std::string> skipped_tags;
  std::size_t excluded_edges = 0;  // rows with an unrated endpoint or unresolvable tag
};

/// Empty dimension selects every rating. Throws Error{empty} if no edge
/// survives the restriction to rated endpoints.
GraphBuild build_concept_graph(const std::vector<ColexRow>& rows, const ZScoreTable& table,
                               std::string_view dimension, const LanguageKey& key = {});

// Signal restricted to its rated vertices with the induced edge set.
struct InducedSignal {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> x;
};

InducedSignal induce(const ConceptGraph& graph, const RatingSignal& signal);

/// R = x'Lx / x'x with L = I - D^-1/2 A D^-1/2 over the given (simple,
/// undirected) edges. Degree-zero vertices contribute x_i^2. Throws
/// Error{empty} for n == 0 and Error{undefined} for a zero signal.
double rayleigh_quotient(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges,
                         std::span<const double> x);
double rayleigh_quotient(const InducedSignal& s);
double rayleigh_quotient(const ConceptGraph& graph, const RatingSignal& signal);

struct StatResult {
  double statistic = 0;
  double p_value = 1;
  std::size_t n_permutations = 0;
  std::size_t n_a = 0, n_b = 0;
  std::optional<double> mean_a, mean_b, sd_a, sd_b;
  std::optional<std::uint64_t> seed;
  std::string method;
};

inline constexpr std::size_t kDefaultPermutations = 2000;
// Permuted quotients within this relative distance of the observed one count
// as ties (<=); guards automorphic relabelings against rounding.
inline constexpr double kTieTolerance = 1e-12;

/// One-sided p = (1 + #{R_perm <= R_obs}) / (n + 1) over uniform shuffles of
/// x across the signal's vertices. Permutation i draws from its own
/// mt19937_64 seeded by splitmix64(seed + i), so results do not depend on
/// `threads`.
StatResult permutation_pvalue(const InducedSignal& s, std::size_t n_permutations,
                              std::uint64_t seed, unsigned threads = 1);

/// Exact one-sided p = #{R_perm <= R_obs} / n! over all n! relabelings.
/// Throws Error{invalid_argument} for n > 10.
StatResult exhaustive_permutation_pvalue(const InducedSignal& s);

/// The permutation i of 0..n-1 used by permutation_pvalue.
std::vector<std::size_t> permutation_for(std::size_t n, std::uint64_t seed, std::uint64_t i);

std::uint64_t splitmix64(std::uint64_t x);

/// Edge indices (E_l, E_not_l). Throws Error{empty} if l labels no edge.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> edge_partition(
    const ConceptGraph& graph, std::string_view language);

enum class Alternative { less, greater };
enum class UMethod { automatic, exact, normal };

// n*m at or below this uses the exact null distribution.
inline constexpr std::size_t kExactUThreshold = 400;

/// U of sample a via midrank sums. Exact p from the permutation distribution
/// of midrank sums; normal path uses tie-corrected variance with continuity
/// correction. Throws Error{invalid_argument} for an empty sample.
StatResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alt = Alternative::less, UMethod method = UMethod::automatic);

/// d = (mean(other) - mean(own)) / sqrt((sd_other^2 + sd_own^2) / 2), population
/// sds. Throws Error{invalid_argument} for fewer than 2 values and
/// Error{undefined} when the pooled sd is zero.
double cohens_d(std::span<const double> delta_own, std::span<const double> delta_other);

struct OwnVsOtherRow {
  std::string language;
  std::size_t n_own = 0, n_other = 0;
  double mean_own = 0, mean_other = 0;
  double u = 0, p = 1, d = 0;
  std::string note;  // non-empty when the language was skipped
  bool skipped() const { return !note.empty(); }
};

std::vector<OwnVsOtherRow> own_vs_other_analysis(const GraphBuild& build);

struct SmoothnessRow {
  std::string language;
  std::size_t vertices = 0, edges = 0;
  StatResult result;
};

std::vector<SmoothnessRow> smoothness_table(const GraphBuild& build, std::size_t n_permutations,
                                            std::uint64_t seed, unsigned threads = 1);

/// "***" below .001, "**" below .01, "*" below .05, else "".
std::string_view stars(double p);

/// TSV readers; a first row starting with "concept_a" / "dataset" is a header.
std::vector<ColexRow> read_colex_edges(const std::filesystem::path& path);
std::vector<RawRating> read_ratings(const std::filesystem::path& path);

}  // namespace lg::signals
