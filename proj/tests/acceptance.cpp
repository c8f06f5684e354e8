// Acceptance harness: one PASS/FAIL line per acceptance criterion. Exit status is
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "linguograph/audit.hpp"
#include "linguograph/error.hpp"
#include "linguograph/pipeline.hpp"
#include "linguograph/resolve.hpp"
#include "linguograph/signals.hpp"
#include "linguograph/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lg;
using namespace lg::resolve;

namespace {

// Tolerances and limits.
constexpr double kRayleighTol = 1e-9;
constexpr double kKsMax = 0.1;
constexpr double kExactTol = 1e-12;
constexpr double kFastLimitSec = 1.0;
constexpr double kRayleighLimitSec = 30.0;
constexpr double kStatsLimitSec = 10.0;
constexpr std::uint64_t kSeed = 12345;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      else detail << "; " << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int n, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = seconds_since(t0);
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s (%.3fs)%s%s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), secs,
              o.pass ? "" : ": ", o.pass ? "" : o.detail.str().c_str());
  std::fflush(stdout);
}

template <typename F>
std::optional<std::string> try_string(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::set<std::string> ids_of(const std::vector<NodeRef>& refs) {
  std::set<std::string> out;
  for (const auto& r : refs) out.insert(r.id);
  return out;
}

// --- 1 ----------------------------------------------------------------------
void german_web(Outcome& o) {
  const auto t0 = Clock::now();
  const auto r = lgtest::fixture_resolver();
  const std::vector<std::pair<IdType, std::string>> web = {{IdType::iso639_1, "de"},
                                                           {IdType::iso639_3, "deu"},
                                                           {IdType::iso639_2b, "ger"},
                                                           {IdType::glottocode, "stan1295"},
                                                           {IdType::wikidata_qid, "Q188"}};
  const std::map<IdType, std::string> normal = {
      {IdType::iso639_1, "de"},       {IdType::iso639_3, "deu"},     {IdType::iso639_2b, "ger"},
      {IdType::glottocode, "stan1295"}, {IdType::wikidata_qid, "Q188"}, {IdType::bcp47, "de_Latn"},
      {IdType::lang_script, "deu_Latn"}};
  std::set<const Languoid*> nodes;
  for (const auto& [t, c] : web) nodes.insert(r.get_languoid(c).node);
  o.require(nodes.size() == 1, "codes resolve to " + std::to_string(nodes.size()) + " nodes");
  for (const auto& [ta, a] : web)
    for (const auto& [tb, b] : web) {
      const auto got = try_string([&] { return r.convert(a, ta, tb); });
      o.require(got == b, "convert " + a + " -> " + std::string(to_string(tb)) + " = " + got.value_or("<error>"));
    }
  for (const auto& [ta, a] : web)
    for (const auto& [t, want] : normal) {
      const auto got = try_string([&] { return r.normalize(a, t); });
      o.require(got == want, "normalize " + a + " -> " + std::string(to_string(t)) + " = " + got.value_or("<error>"));
    }
  const double secs = seconds_since(t0);
  o.require(secs < kFastLimitSec, "took " + std::to_string(secs) + "s");
}

// --- 2 ----------------------------------------------------------------------
void ethiopic_graph(Outcome& o) {
  const auto t0 = Clock::now();
  const auto r = lgtest::fixture_resolver();
  const auto amh = r.get_languoid("amh").node->id;
  const auto tir = r.get_languoid("tir").node->id;
  for (const auto& id : {amh, tir}) {
    o.require(ids_of(r.neighbors(id, Relation::family_root)) == std::set<std::string>{"glottocode:afro1255"},
              id + " family_root");
    bool et = false;
    for (const auto& g : r.neighbors(id, Relation::regions)) {
      const auto* reg = r.db().region(g.id);
      if (reg && r.code_of(*reg, IdType::iso3166_1_alpha2) == "ET" && r.code_of(*reg, IdType::iso3166_1_alpha3) == "ETH")
        et = true;
    }
    o.require(et, id + " not spoken_in ET/ETH");
    o.require(ids_of(r.neighbors(id, Relation::scripts)).contains("iso15924:Ethi"), id + " not written_in Ethi");
  }
  o.require(ids_of(r.neighbors(amh, Relation::co_script_languoids)).contains(tir), "co_script amh -/-> tir");
  o.require(ids_of(r.neighbors(tir, Relation::co_script_languoids)).contains(amh), "co_script tir -/-> amh");
  const double secs = seconds_since(t0);
  o.require(secs < kFastLimitSec, "took " + std::to_string(secs) + "s");
}

// --- 3 ----------------------------------------------------------------------
void deprecation(Outcome& o) {
  int notices = 0;
  const auto r = lgtest::fixture_resolver([&](const Notice&) { ++notices; });
  const auto res = r.get_languoid("eml");
  std::set<std::string> cands;
  for (const auto* l : res.ambiguity) cands.insert(r.code_of(*l, IdType::iso639_3).value_or("?"));
  o.require(res.ambiguous() && cands == std::set<std::string>{"egl", "rgn"}, "ambiguity set wrong");
  o.require(res.deprecation && res.deprecation->year == 2009, "year is not 2009");
  o.require(res.deprecation && res.deprecation->change_kind == ChangeKind::split, "not a split");

  std::vector<std::pair<std::string, IdType>> inputs = {{"eml", IdType::iso639_3}};
  for (const auto& l : r.db().languoids)
    for (auto t : kLanguoidIdTypes)
      if (auto c = r.code_of(l, t)) inputs.emplace_back(*c, t);
  for (const auto& [code, from] : inputs)
    for (auto to : kLanguoidIdTypes) {
      o.require(try_string([&] { return r.convert(code, from, to); }) != "eml", "convert produced eml from " + code);
      o.require(try_string([&] { return r.normalize(code, to); }) != "eml", "normalize produced eml from " + code);
    }
}

// --- 4 ----------------------------------------------------------------------
void conflict_resolution(Outcome& o) {
  lgtest::TempDir cache;
  const auto cfg = ingest::load_registry(lgtest::fixture_registry());
  ingest::DefaultFetcher f;
  const auto out = pipeline::build_database(cfg, cache.path(), f, "1970-01-01T00:00:00Z");
  std::vector<merge::ConflictRecord> pri;
  for (const auto& c : out.report.conflicts)
    if (c.strategy == merge::Strategy::priority) pri.push_back(c);
  o.require(pri.size() == 1, std::to_string(pri.size()) + " priority conflicts");
  if (pri.size() == 1) {
    o.require(pri[0].entity == IdKey{IdType::iso3166_1_alpha2, "AN"}, "conflict entity " + to_string(pri[0].entity));
    o.require(pri[0].field == "historical", "conflict field " + pri[0].field);
    o.require(pri[0].winner == "true", "winner " + pri[0].winner);
  }
  const auto* an = out.assembly.db.lookup(IdType::iso3166_1_alpha2, "AN");
  o.require(an && out.assembly.db.region(*an)->historical, "AN not historical in database");
}

// --- 5 ----------------------------------------------------------------------
void determinism(Outcome& o) {
  lgtest::TempDir dir;
  std::vector<std::string> outputs;
  for (const auto* name : {"first.lgdb.gz", "second.lgdb.gz"}) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"linguograph", "--cache-dir", (dir / "cache").string(), "rebuild", "--registry",
                                   lgtest::fixture_registry().string(), "--output", (dir / name).string()},
                                  out, err);
    o.require(code == 0, std::string("rebuild exit ") + std::to_string(code) + ": " + err.str());
    outputs.push_back(text::read_file(dir / name));
  }
  o.require(!outputs[0].empty() && outputs[0] == outputs[1], "database bytes differ");
}

// --- 6 ----------------------------------------------------------------------
void audit_categories(Outcome& o) {
  const auto r = lgtest::fixture_resolver();
  std::vector<audit::GroupedCode> codes;
  for (const auto* c : {"de", "deu", "eml", "DE", "xx", "deu_Latn"}) codes.emplace_back("", c);
  const auto rep = audit::audit_codes(r, codes);
  const std::map<audit::Category, std::size_t> want = {{audit::Category::valid, 3},
                                                       {audit::Category::deprecated, 1},
                                                       {audit::Category::region_code, 1},
                                                       {audit::Category::unknown, 1}};
  for (const auto& [cat, n] : want)
    o.require(rep.counts.at(cat) == n, std::string(audit::to_string(cat)) + "=" + std::to_string(rep.counts.at(cat)));
}

// --- 7 ----------------------------------------------------------------------
void rayleigh(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> g;
  auto randvec = [&](std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    return x;
  };
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 50;
    const auto e = lgtest::random_graph(n, std::uniform_real_distribution<double>(0.02, 0.5)(rng), rng);
    const auto x = randvec(n);
    worst = std::max(worst, std::abs(signals::rayleigh_quotient(n, e, x) - lgtest::rayleigh_eigen(n, e, x)));
  }
  o.require(worst <= kRayleighTol, "oracle deviation " + std::to_string(worst));

  std::size_t out_of_range = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + rng() % 30;
    const auto e = lgtest::random_graph(n, std::uniform_real_distribution<double>(0, 1)(rng), rng);
    auto x = randvec(n);
    const double R = signals::rayleigh_quotient(n, e, x);
    if (!(R >= 0.0 && R <= 2.0)) ++out_of_range;
  }
  o.require(out_of_range == 0, std::to_string(out_of_range) + " fuzz cases outside [0,2]");

  double kernel = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 49;
    const auto e = lgtest::random_connected_graph(n, 0.15, rng);
    std::vector<double> d(n, 0);
    for (auto [u, v] : e) d[u] += 1, d[v] += 1;
    for (auto& v : d) v = std::sqrt(v);
    kernel = std::max(kernel, std::abs(signals::rayleigh_quotient(n, e, d)));
  }
  o.require(kernel <= kRayleighTol, "R(D^1/2 1) = " + std::to_string(kernel));

  const double p3 = signals::rayleigh_quotient(3, lgtest::EdgeList{{0, 1}, {1, 2}}, std::vector<double>{1, 0, -1});
  const double k2 = signals::rayleigh_quotient(2, lgtest::EdgeList{{0, 1}}, std::vector<double>{1, -1});
  o.require(std::abs(p3 - 1.0) <= kRayleighTol, "P3 R=" + std::to_string(p3));
  o.require(std::abs(k2 - 2.0) <= kRayleighTol, "K2 R=" + std::to_string(k2));
  const double secs = seconds_since(t0);
  o.require(secs < kRayleighLimitSec, "took " + std::to_string(secs) + "s");
}

// --- 8 ----------------------------------------------------------------------

// 7-vertex graph with no nontrivial automorphism; the observed labelling is the
// extreme (minimum or maximum R) relabelling of the values 1..7.
signals::InducedSignal extreme_fixture(bool smoothest) {
  const lgtest::EdgeList e = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {1, 3}, {3, 5}, {0, 4}};
  std::vector<double> best;
  double best_r = smoothest ? 1e300 : -1e300;
  std::vector<double> x = {1, 2, 3, 4, 5, 6, 7};
  do {
    const double r = signals::rayleigh_quotient(7, e, x);
    if (smoothest ? r < best_r : r > best_r) best_r = r, best = x;
  } while (std::next_permutation(x.begin(), x.end()));
  return {7, e, best};
}

void permutation_test(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  const auto e = lgtest::random_connected_graph(25, 0.2, rng);
  std::vector<double> x(25);
  std::normal_distribution<double> g;
  for (auto& v : x) v = g(rng);
  const signals::InducedSignal s{25, e, x};
  const auto a = signals::permutation_pvalue(s, signals::kDefaultPermutations, kSeed, 1);
  const auto b = signals::permutation_pvalue(s, signals::kDefaultPermutations, kSeed, 1);
  const auto c = signals::permutation_pvalue(s, signals::kDefaultPermutations, kSeed, 8);
  o.require(a.p_value == b.p_value && a.p_value == c.p_value, "p not bit-identical across runs/threads");

  const double resolution = 1.0 / static_cast<double>(signals::kDefaultPermutations + 1);
  for (bool smoothest : {true, false}) {
    const auto fx = extreme_fixture(smoothest);
    const double exact = signals::exhaustive_permutation_pvalue(fx).p_value;
    const double oracle = lgtest::exhaustive_p_oracle(fx.n, fx.edges, fx.x);
    const double mc = signals::permutation_pvalue(fx, signals::kDefaultPermutations, kSeed).p_value;
    o.require(exact == oracle, "exhaustive route disagrees with brute-force oracle");
    std::ostringstream msg;
    msg << (smoothest ? "floor" : "ceiling") << " fixture |p_mc - p_exact| = |" << mc << " - " << exact
        << "| > " << resolution;
    o.require(std::abs(mc - exact) <= resolution, msg.str());
  }

  const auto ge = lgtest::random_connected_graph(20, 0.15, rng);
  std::vector<double> ps;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> y(20);
    for (auto& v : y) v = g(rng);
    ps.push_back(signals::permutation_pvalue({20, ge, y}, 999, kSeed + static_cast<std::uint64_t>(t)).p_value);
  }
  const double ks = lgtest::ks_uniform(ps);
  o.require(ks < kKsMax, "KS statistic " + std::to_string(ks));
}

// --- 9 ----------------------------------------------------------------------
void mann_whitney(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed);
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t m = 1; m <= 8; ++m)
      for (int range : {1000, 4}) {
        std::vector<double> a(n), b(m);
        for (auto& v : a) v = static_cast<double>(rng() % static_cast<unsigned>(range));
        for (auto& v : b) v = static_cast<double>(rng() % static_cast<unsigned>(range));
        const auto want = lgtest::enumerate_u(a, b);
        const auto got = signals::mann_whitney_u(a, b, signals::Alternative::less, signals::UMethod::exact);
        const auto got_g = signals::mann_whitney_u(a, b, signals::Alternative::greater, signals::UMethod::exact);
        if (std::abs(got.p_value - want.p_less) > kExactTol || std::abs(got_g.p_value - want.p_greater) > kExactTol ||
            got.statistic != want.u_obs)
          ++mismatches;
      }
  o.require(mismatches == 0, std::to_string(mismatches) + " enumeration mismatches");

  const std::vector<double> a = {1, 2}, b = {3, 4};
  const auto two = signals::mann_whitney_u(a, b, signals::Alternative::less);
  o.require(two.statistic == 0 && std::abs(two.p_value - 1.0 / 6.0) <= kExactTol,
            "[1,2] vs [3,4] p=" + std::to_string(two.p_value));

  const double d = signals::cohens_d(std::vector<double>{0, 2}, std::vector<double>{1, 3});
  o.require(std::abs(d - 1.0) <= kExactTol, "substitution d=" + std::to_string(d));

  std::vector<signals::RawRating> rs;
  std::vector<signals::ColexRow> rows;
  int c = 0;
  double base = 0;
  auto add = [&](double delta, const char* lang) {
    const auto x = "c" + std::to_string(c++), y = "c" + std::to_string(c++);
    rs.push_back({"norms", "L", x, base, "valence"});
    rs.push_back({"norms", "L", y, base + delta, "valence"});
    rows.push_back({x, y, lang, ""});
    base += 2;
  };
  for (double v : {0.1, 0.12, 0.08, 0.11, 0.09}) add(v, "L");
  for (double v : {0.9, 0.88, 0.92, 0.91, 0.89}) add(v, "M");
  const auto build = signals::build_concept_graph(rows, signals::zscore_normalize(rs), "valence");
  const auto ovo = signals::own_vs_other_analysis(build);
  o.require(ovo.size() == 1 && !ovo[0].skipped(), "own-vs-other row missing");
  if (ovo.size() == 1) {
    o.require(ovo[0].d > 0, "d_l=" + std::to_string(ovo[0].d));
    o.require(ovo[0].p < 0.05, "p=" + std::to_string(ovo[0].p));
  }
  const double secs = seconds_since(t0);
  o.require(secs < kStatsLimitSec, "took " + std::to_string(secs) + "s");
}

// --- 10 ---------------------------------------------------------------------
void idempotence_and_consistency(Outcome& o) {
  const auto r = lgtest::fixture_resolver();
  std::size_t idem = 0, cons = 0, complete = 0, checks = 0;
  std::vector<std::string> inputs;
  for (const auto& l : r.db().languoids)
    for (auto t : kLanguoidIdTypes)
      if (auto c = r.code_of(l, t)) {
        inputs.push_back(*c);
        const auto res = r.get_languoid(*c);
        if (res.node != &l) ++complete;
      }
  for (const auto& [key, rec] : r.db().deprecations) inputs.push_back(key.code);
  for (const auto& c : inputs)
    for (auto t : kLanguoidIdTypes)
      if (auto once = try_string([&] { return r.normalize(c, t); })) {
        ++checks;
        if (try_string([&] { return r.normalize(*once, t); }) != once) ++idem;
      }
  for (const auto& l : r.db().languoids)
    for (auto ta : kLanguoidIdTypes)
      for (auto tb : kLanguoidIdTypes) {
        auto a = r.code_of(l, ta), b = r.code_of(l, tb);
        if (!a || !b) continue;
        ++checks;
        if (try_string([&] { return r.convert(*a, ta, tb); }) != b) ++cons;
      }
  o.require(idem == 0, std::to_string(idem) + " idempotence violations");
  o.require(cons == 0, std::to_string(cons) + " conversion inconsistencies");
  o.require(complete == 0, std::to_string(complete) + " index completeness violations");
  o.require(checks > 0, "no checks ran");
}

}  // namespace

int main() {
  report(1, "German identifier web", german_web);
  report(2, "Amharic and Tigrinya graph", ethiopic_graph);
  report(3, "Split deprecation of eml", deprecation);
  report(4, "AN historical conflict", conflict_resolution);
  report(5, "Byte-identical rebuilds", determinism);
  report(6, "Audit category counts", audit_categories);
  report(7, "Rayleigh quotient correctness", rayleigh);
  report(8, "Permutation test", permutation_test);
  report(9, "Mann-Whitney U and Cohen's d", mann_whitney);
  report(10, "Resolution idempotence and conversion consistency", idempotence_and_consistency);
  return failures;
}
