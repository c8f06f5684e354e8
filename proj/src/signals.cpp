#include "linguograph/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "linguograph/error.hpp"
#include "linguograph/resolve.hpp"
#include "linguograph/text.hpp"

namespace lg::signals {

namespace {

std::uint64_t bounded(std::mt19937_64& g, std::uint64_t k) {
  const std::uint64_t threshold = (0 - k) % k;
  std::uint64_t x;
  do x = g();
  while (x < threshold);
  return x % k;
}

double mean_of(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_sd(std::span<const double> v, double mean) {
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

bool ties_or_below(double r, double observed) {
  return r <= observed + kTieTolerance * std::max(1.0, std::abs(observed));
}

double parse_double(std::string_view s, const std::string& where) {
  s = text::trim(s);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw Error(ErrorKind::format, where + ": not a finite number '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

LanguageKey resolver_key(const resolve::Resolver& resolver) {
  return [&resolver](std::string_view tag) -> std::optional<std::string> {
    if (auto hit = resolver.find_current(tag)) return hit->first->id;
    try {
      auto r = resolver.get_languoid(tag);
      if (r.node) return r.node->id;
    } catch (const Error&) {
    }
    return std::nullopt;
  };
}

ZScoreTable zscore_normalize(const std::vector<RawRating>& ratings, const LanguageKey& key) {
  ZScoreTable table;
  std::map<std::string, std::vector<const RawRating*>> by_dataset;
  for (const auto& r : ratings) by_dataset[r.dataset].push_back(&r);

  for (const auto& [name, rows] : by_dataset) {
    std::vector<double> values;
    for (const auto* r : rows) values.push_back(r->value);
    const double mean = mean_of(values);
    const double sd = population_sd(values, mean);
    if (!(sd > 0))
      throw Error(ErrorKind::degenerate, "dataset '" + name + "' has zero variance");
    const auto& dim = rows.front()->dimension;
    for (const auto* r : rows)
      if (r->dimension != dim)
        throw Error(ErrorKind::format, "dataset '" + name + "' mixes dimensions " + dim + " and " +
                                           r->dimension);
    table.datasets[name] = DatasetStats{dim, rows.size(), mean, sd};

    for (const auto* r : rows) {
      std::string lang = r->language;
      if (key) {
        auto k = key(r->language);
        if (!k) {
          table.skipped_tags.insert(r->language);
          continue;
        }
        lang = *k;
      }
      const double z = (r->value - mean) / sd;
      table.entries.push_back(ZEntry{name, lang, r->concept_id, r->value, z});
    }
  }

  std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::pair<std::string, double>>> acc;
  for (const auto& e : table.entries)
    acc[{table.datasets[e.dataset].dimension, e.language, e.concept_id}].emplace_back(e.dataset, e.z);
  for (auto& [k, list] : acc) {
    // One value per dataset: a dataset rating a concept twice contributes its mean.
    std::map<std::string, std::vector<double>> per_dataset;
    for (const auto& [d, z] : list) per_dataset[d].push_back(z);
    ConceptMean cm;
    double sum = 0;
    for (const auto& [d, zs] : per_dataset) {
      cm.datasets.push_back(d);
      sum += mean_of(zs);
    }
    cm.mean = sum / static_cast<double>(per_dataset.size());
    table.means.emplace(k, std::move(cm));
  }
  return table;
}

std::optional<std::size_t> ConceptGraph::index_of(std::string_view concept_id) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), concept_id);
  if (it == vertices.end() || *it != concept_id) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

GraphBuild build_concept_graph(const std::vector<ColexRow>& rows, const ZScoreTable& table,
                               std::string_view dimension, const LanguageKey& key) {
  GraphBuild out;
  // concept -> language -> mean z, for the selected dimension
  std::map<std::string, std::map<std::string, double>> rated;
  for (const auto& [k, m] : table.means) {
    const auto& [dim, lang, concept_id] = k;
    if (!dimension.empty() && dim != dimension) continue;
    rated[concept_id][lang] = m.mean;
  }

  std::map<std::pair<std::string, std::string>, std::pair<std::set<std::string>, std::set<std::string>>> pairs;
  for (const auto& r : rows) {
    if (r.concept_a == r.concept_b) {
      ++out.excluded_edges;
      continue;
    }
    std::string lang = r.language;
    if (key) {
      auto k = key(r.language);
      if (!k) {
        out.skipped_tags.insert(r.language);
        ++out.excluded_edges;
        continue;
      }
      lang = *k;
    }
    if (!rated.contains(r.concept_a) || !rated.contains(r.concept_b)) {
      ++out.excluded_edges;
      continue;
    }
    auto p = std::minmax(r.concept_a, r.concept_b);
    auto& slot = pairs[{p.first, p.second}];
    slot.first.insert(lang);
    if (!r.lemma.empty()) slot.second.insert(r.lemma);
  }
  if (pairs.empty())
    throw Error(ErrorKind::empty, "no colexification edge has two rated endpoints");

  std::set<std::string> verts;
  for (const auto& [p, _] : pairs) {
    verts.insert(p.first);
    verts.insert(p.second);
  }
  auto& g = out.graph;
  g.vertices.assign(verts.begin(), verts.end());
  for (const auto& [p, data] : pairs) {
    ConceptEdge e;
    e.u = *g.index_of(p.first);
    e.v = *g.index_of(p.second);
    if (e.u > e.v) std::swap(e.u, e.v);
    e.languages = data.first;
    e.lemmas = data.second;
    const auto& ru = rated[p.first];
    const auto& rv = rated[p.second];
    for (const auto& [lang, xu] : ru)
      if (auto it = rv.find(lang); it != rv.end())
        e.ratings[lang] = EdgeRating{xu, it->second, std::abs(xu - it->second)};
    g.edges.push_back(std::move(e));
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const ConceptEdge& a, const ConceptEdge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });

  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    for (const auto& [lang, z] : rated[g.vertices[i]]) {
      auto& s = out.signals[lang];
      s.dimension = std::string(dimension);
      s.language = lang;
      s.values[i] = z;
    }
  return out;
}

InducedSignal induce(const ConceptGraph& graph, const RatingSignal& signal) {
  InducedSignal s;
  std::map<std::size_t, std::size_t> local;
  for (const auto& [v, z] : signal.values) {
    local[v] = s.x.size();
    s.x.push_back(z);
  }
  s.n = s.x.size();
  for (const auto& e : graph.edges) {
    auto a = local.find(e.u), b = local.find(e.v);
    if (a != local.end() && b != local.end()) s.edges.emplace_back(a->second, b->second);
  }
  return s;
}

double rayleigh_quotient(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges,
                         std::span<const double> x) {
  if (n == 0) throw Error(ErrorKind::empty, "Rayleigh quotient of an empty graph");
  if (x.size() != n) throw Error(ErrorKind::invalid_argument, "signal length differs from vertex count");
  std::vector<double> degree(n, 0.0);
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n || i == j) throw Error(ErrorKind::invalid_argument, "bad edge in Rayleigh quotient");
    degree[i] += 1;
    degree[j] += 1;
  }
  double denom = 0;
  for (double v : x) denom += v * v;
  if (!(denom > 0)) throw Error(ErrorKind::undefined, "Rayleigh quotient undefined for a zero signal");

  // x'Lx = sum over edges (x_i/sqrt(d_i) - x_j/sqrt(d_j))^2 + sum over isolated x_i^2
  double num = 0;
  for (const auto& [i, j] : edges) {
    const double t = x[i] / std::sqrt(degree[i]) - x[j] / std::sqrt(degree[j]);
    num += t * t;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (degree[i] == 0) num += x[i] * x[i];
  return num / denom;
}

double rayleigh_quotient(const InducedSignal& s) { return rayleigh_quotient(s.n, s.edges, s.x); }

double rayleigh_quotient(const ConceptGraph& graph, const RatingSignal& signal) {
  return rayleigh_quotient(induce(graph, signal));
}

std::vector<std::size_t> permutation_for(std::size_t n, std::uint64_t seed, std::uint64_t i) {
  std::mt19937_64 g(splitmix64(seed + i));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[bounded(g, k)]);
  return perm;
}

StatResult permutation_pvalue(const InducedSignal& s, std::size_t n_permutations,
                              std::uint64_t seed, unsigned threads) {
  if (n_permutations == 0) throw Error(ErrorKind::invalid_argument, "need at least one permutation");
  const double observed = rayleigh_quotient(s);

  auto count_range = [&](std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    std::vector<double> y(s.n);
    for (std::size_t i = begin; i < end; ++i) {
      const auto perm = permutation_for(s.n, seed, i);
      for (std::size_t k = 0; k < s.n; ++k) y[k] = s.x[perm[k]];
      if (ties_or_below(rayleigh_quotient(s.n, s.edges, y), observed)) ++hits;
    }
    return hits;
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_permutations)));
  std::size_t hits = 0;
  if (threads == 1) {
    hits = count_range(0, n_permutations);
  } else {
    std::vector<std::size_t> partial(threads, 0);
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n_permutations + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t b = std::min(n_permutations, t * chunk);
        const std::size_t e = std::min(n_permutations, b + chunk);
        pool.emplace_back([&, t, b, e] { partial[t] = count_range(b, e); });
      }
    }
    hits = std::accumulate(partial.begin(), partial.end(), std::size_t{0});
  }

  StatResult r;
  r.statistic = observed;
  r.p_value = static_cast<double>(1 + hits) / static_cast<double>(n_permutations + 1);
  r.n_permutations = n_permutations;
  r.n_a = s.n;
  r.seed = seed;
  r.method = "permutation";
  return r;
}

StatResult exhaustive_permutation_pvalue(const InducedSignal& s) {
  if (s.n > 10) throw Error(ErrorKind::invalid_argument, "exhaustive enumeration limited to 10 vertices");
  const double observed = rayleigh_quotient(s);
  std::vector<std::size_t> perm(s.n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<double> y(s.n);
  std::size_t total = 0, hits = 0;
  do {
    for (std::size_t k = 0; k < s.n; ++k) y[k] = s.x[perm[k]];
    if (ties_or_below(rayleigh_quotient(s.n, s.edges, y), observed)) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));

  StatResult r;
  r.statistic = observed;
  r.p_value = static_cast<double>(hits) / static_cast<double>(total);
  r.n_permutations = total;
  r.n_a = s.n;
  r.method = "exhaustive";
  return r;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> edge_partition(
    const ConceptGraph& graph, std::string_view language) {
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    if (graph.edges[i].languages.contains(std::string(language)))
      out.first.push_back(i);
    else
      out.second.push_back(i);
  }
  if (out.first.empty())
    throw Error(ErrorKind::empty, "language '" + std::string(language) + "' labels no edge");
  return out;
}

StatResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alt,
                          UMethod method) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::invalid_argument, "Mann-Whitney U needs two non-empty samples");
  const std::size_t n = a.size(), m = b.size(), total = n + m;

  std::vector<std::pair<double, bool>> pooled;  // (value, from a)
  for (double v : a) pooled.emplace_back(v, true);
  for (double v : b) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // Doubled midranks are integers: 2*midrank = first + last positions (1-based).
  std::vector<long> rank2(total);
  double tie_term = 0;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j + 1 < total && pooled[j + 1].first == pooled[i].first) ++j;
    for (std::size_t k = i; k <= j; ++k) rank2[k] = static_cast<long>(i + 1 + j + 1);
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  long sum2_a = 0;
  for (std::size_t k = 0; k < total; ++k)
    if (pooled[k].second) sum2_a += rank2[k];
  const double u = static_cast<double>(sum2_a) / 2.0 - static_cast<double>(n * (n + 1)) / 2.0;

  StatResult r;
  r.statistic = u;
  r.n_a = n;
  r.n_b = m;
  r.mean_a = mean_of(a);
  r.mean_b = mean_of(b);
  r.sd_a = population_sd(a, *r.mean_a);
  r.sd_b = population_sd(b, *r.mean_b);

  const bool exact = method == UMethod::exact || (method == UMethod::automatic && n * m <= kExactUThreshold);
  if (exact) {
    // ways[k][s]: subsets of size k of the processed items with doubled rank sum s.
    const long max_sum = std::accumulate(rank2.begin(), rank2.end(), 0L);
    std::vector<std::vector<double>> ways(n + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1;
    for (std::size_t item = 0; item < total; ++item) {
      const long w = rank2[item];
      for (std::size_t k = std::min(n, item + 1); k >= 1; --k)
        for (long s = max_sum; s >= w; --s) ways[k][s] += ways[k - 1][s - w];
    }
    double all = 0, tail = 0;
    for (long s = 0; s <= max_sum; ++s) {
      all += ways[n][s];
      if (alt == Alternative::less ? s <= sum2_a : s >= sum2_a) tail += ways[n][s];
    }
    r.p_value = tail / all;
    r.method = "exact";
  } else {
    const double nm = static_cast<double>(n) * static_cast<double>(m);
    const double N = static_cast<double>(total);
    const double var = nm / 12.0 * ((N + 1) - tie_term / (N * (N - 1)));
    if (!(var > 0)) {
      r.p_value = 1.0;
    } else {
      const double mu = nm / 2.0;
      const double sd = std::sqrt(var);
      r.p_value = alt == Alternative::less ? normal_cdf((u - mu + 0.5) / sd)
                                           : 1.0 - normal_cdf((u - mu - 0.5) / sd);
    }
    r.method = "normal";
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

double cohens_d(std::span<const double> delta_own, std::span<const double> delta_other) {
  if (delta_own.size() < 2 || delta_other.size() < 2)
    throw Error(ErrorKind::invalid_argument, "Cohen's d needs at least two values per group");
  const double mo = mean_of(delta_own), mn = mean_of(delta_other);
  const double so = population_sd(delta_own, mo), sn = population_sd(delta_other, mn);
  const double pooled = std::sqrt((sn * sn + so * so) / 2.0);
  if (!(pooled > 0)) throw Error(ErrorKind::undefined, "Cohen's d undefined: pooled sd is zero");
  return (mn - mo) / pooled;
}

std::vector<OwnVsOtherRow> own_vs_other_analysis(const GraphBuild& build) {
  std::set<std::string> languages;
  for (const auto& e : build.graph.edges) languages.insert(e.languages.begin(), e.languages.end());

  std::vector<OwnVsOtherRow> rows;
  for (const auto& lang : languages) {
    if (!build.signals.contains(lang)) continue;
    OwnVsOtherRow row;
    row.language = lang;
    std::vector<double> own, other;
    for (const auto& e : build.graph.edges) {
      auto it = e.ratings.find(lang);
      if (it == e.ratings.end()) continue;
      (e.languages.contains(lang) ? own : other).push_back(it->second.delta);
    }
    row.n_own = own.size();
    row.n_other = other.size();
    if (own.size() < 2 || other.size() < 2) {
      row.note = "fewer than 2 rated pairs in one partition";
      rows.push_back(std::move(row));
      continue;
    }
    const auto u = mann_whitney_u(own, other, Alternative::less);
    row.mean_own = *u.mean_a;
    row.mean_other = *u.mean_b;
    row.u = u.statistic;
    row.p = u.p_value;
    try {
      row.d = cohens_d(own, other);
    } catch (const Error& e) {
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SmoothnessRow> smoothness_table(const GraphBuild& build, std::size_t n_permutations,
                                            std::uint64_t seed, unsigned threads) {
  std::vector<SmoothnessRow> rows;
  std::uint64_t k = 0;
  for (const auto& [lang, signal] : build.signals) {
    const auto s = induce(build.graph, signal);
    SmoothnessRow row;
    row.language = lang;
    row.vertices = s.n;
    row.edges = s.edges.size();
    // Each language gets its own stream derived from the master seed.
    row.result = permutation_pvalue(s, n_permutations, splitmix64(seed ^ splitmix64(k++)), threads);
    row.result.seed = seed;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::vector<ColexRow> read_colex_edges(const std::filesystem::path& path) {
  std::vector<ColexRow> out;
  for (const auto& row : text::read_delimited(path, '\t', false)) {
    if (row.line == 1 && !row.fields.empty() && row.fields[0] == "concept_a") continue;
    const auto where = path.string() + ":" + std::to_string(row.line);
    if (row.fields.size() < 3) throw Error(ErrorKind::format, where + ": expected concept_a, concept_b, language[, lemma]");
    out.push_back(ColexRow{std::string(text::trim(row.fields[0])), std::string(text::trim(row.fields[1])),
                           std::string(text::trim(row.fields[2])),
                           row.fields.size() > 3 ? std::string(text::trim(row.fields[3])) : ""});
  }
  return out;
}

std::vector<RawRating> read_ratings(const std::filesystem::path& path) {
  std::vector<RawRating> out;
  for (const auto& row : text::read_delimited(path, '\t', false)) {
    if (row.line == 1 && !row.fields.empty() && row.fields[0] == "dataset") continue;
    const auto where = path.string() + ":" + std::to_string(row.line);
    if (row.fields.size() < 4) throw Error(ErrorKind::format, where + ": expected dataset, language, concept, rating[, dimension]");
    out.push_back(RawRating{std::string(text::trim(row.fields[0])), std::string(text::trim(row.fields[1])),
                            std::string(text::trim(row.fields[2])), parse_double(row.fields[3], where),
                            row.fields.size() > 4 ? std::string(text::trim(row.fields[4])) : ""});
  }
  return out;
}

}  // namespace lg::signals
