#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "linguograph/error.hpp"
#include "linguograph/merge.hpp"
#include "linguograph/pipeline.hpp"
#include "linguograph/store.hpp"
#include "linguograph/text.hpp"
#include "support.hpp"

using namespace lg;
using namespace lg::merge;
using ingest::RawRecord;

namespace {

RawRecord rec(EntityKind kind, std::map<IdType, std::string> ids, std::string source,
              std::map<std::string, ingest::AttrValue> attrs = {}, std::size_t line = 1) {
  RawRecord r;
  r.entity_kind = kind;
  r.identifiers = std::move(ids);
  r.attributes = std::move(attrs);
  r.source_id = std::move(source);
  r.source_locator = {"f", line};
  return r;
}

RawRecord lang(std::map<IdType, std::string> ids, std::string source = "glottolog",
               std::map<std::string, ingest::AttrValue> attrs = {}) {
  return rec(EntityKind::languoid, std::move(ids), std::move(source), std::move(attrs));
}

std::set<IdKey> keys_of(const Cluster& c) {
  std::set<IdKey> out;
  for (const auto& r : c)
    for (const auto& [t, code] : r.identifiers) out.insert({t, code});
  return out;
}

std::vector<MergedEntity> merge_all(std::vector<RawRecord> records, const ResolutionPolicy& p,
                                    std::vector<ConflictRecord>* conflicts = nullptr) {
  std::vector<MergedEntity> out;
  for (const auto& c : cluster_records(std::move(records))) {
    auto m = merge_cluster(c, p);
    if (conflicts) conflicts->insert(conflicts->end(), m.conflicts.begin(), m.conflicts.end());
    out.push_back(std::move(m.entity));
  }
  return out;
}

}  // namespace

TEST(Cluster, SharedKeyUnites) {
  auto cs = cluster_records({lang({{IdType::iso639_3, "deu"}}),
                             lang({{IdType::glottocode, "stan1295"}, {IdType::iso639_3, "deu"}})});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(keys_of(cs[0]).size(), 2u);
}

TEST(Cluster, DisjointStaySeparate) {
  auto cs = cluster_records({lang({{IdType::iso639_3, "amh"}}), lang({{IdType::iso639_3, "tir"}})});
  EXPECT_EQ(cs.size(), 2u);
}

TEST(Cluster, TransitiveGermanWeb) {
  auto cs = cluster_records({lang({{IdType::iso639_1, "de"}, {IdType::iso639_3, "deu"}}),
                             lang({{IdType::iso639_3, "deu"}, {IdType::wikidata_qid, "Q188"}}),
                             lang({{IdType::wikidata_qid, "Q188"}, {IdType::glottocode, "stan1295"}}),
                             lang({{IdType::iso639_2b, "ger"}, {IdType::iso639_1, "de"}})});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(keys_of(cs[0]), (std::set<IdKey>{{IdType::iso639_1, "de"},
                                             {IdType::iso639_2b, "ger"},
                                             {IdType::iso639_3, "deu"},
                                             {IdType::glottocode, "stan1295"},
                                             {IdType::wikidata_qid, "Q188"}}));
}

TEST(Cluster, KindClashIsBuildError) {
  std::vector<RawRecord> rs = {lang({{IdType::iso639_3, "deu"}}),
                               rec(EntityKind::region, {{IdType::iso639_3, "deu"}}, "iso_tables")};
  try {
    cluster_records(rs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::build);
  }
}

// Oracle: repeated pairwise merging of id sets until no two sets intersect.
TEST(Cluster, MatchesBruteForceClosure) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> nrec(1, 12), nids(1, 3), code(0, 14);
    std::vector<RawRecord> records;
    const int n = nrec(rng);
    for (int i = 0; i < n; ++i) {
      std::map<IdType, std::string> ids;
      const int k = nids(rng);
      for (int j = 0; j < k; ++j) {
        const auto type = j % 2 ? IdType::iso639_3 : IdType::glottocode;
        const int c = code(rng);
        ids[type] = type == IdType::iso639_3 ? std::string("a") + char('a' + c) + "a"
                                             : std::string("abcd") + std::to_string(1000 + c);
      }
      records.push_back(lang(ids));
    }

    std::vector<std::set<IdKey>> sets;
    for (const auto& r : records) {
      std::set<IdKey> s;
      for (const auto& [t, c] : r.identifiers) s.insert({t, c});
      sets.push_back(s);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < sets.size() && !changed; ++i)
        for (std::size_t j = i + 1; j < sets.size() && !changed; ++j) {
          std::vector<IdKey> common;
          std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                                std::back_inserter(common));
          if (common.empty()) continue;
          sets[i].insert(sets[j].begin(), sets[j].end());
          sets.erase(sets.begin() + static_cast<long>(j));
          changed = true;
        }
    }

    const auto clusters = cluster_records(records);
    std::set<std::set<IdKey>> got, want(sets.begin(), sets.end());
    std::size_t total = 0;
    for (const auto& c : clusters) {
      got.insert(keys_of(c));
      total += c.size();
    }
    EXPECT_EQ(got, want) << "trial " << trial;
    EXPECT_EQ(total, records.size());
  }
}

TEST(Merge, PriorityConflictOnHistorical) {
  const auto policy = default_policy();
  Cluster c = {rec(EntityKind::region, {{IdType::iso3166_1_alpha2, "AN"}}, "linguameta",
                   {{"historical", false}, {"name", std::string("Netherlands Antilles")}}),
               rec(EntityKind::region, {{IdType::iso3166_1_alpha2, "AN"}, {IdType::iso3166_3, "ANHH"}},
                   "iso_tables", {{"historical", true}, {"name", std::string("Netherlands Antilles")}})};
  const auto out = merge_cluster(c, policy);
  EXPECT_EQ(std::get<bool>(out.entity.scalars.at("historical").value), true);
  ASSERT_EQ(out.conflicts.size(), 1u);
  EXPECT_EQ(out.conflicts[0].field, "historical");
  EXPECT_EQ(out.conflicts[0].strategy, Strategy::priority);
  EXPECT_EQ(out.conflicts[0].winner, "true");
}

TEST(Merge, ManualOverrideBeatsPriority) {
  auto policy = default_policy();
  policy.manual_overrides.push_back({{IdType::glottocode, "berl1235"}, "level", "dialect", "forced"});
  Cluster c = {lang({{IdType::glottocode, "berl1235"}}, "glottolog", {{"level", std::string("language")}})};
  const auto out = merge_cluster(c, policy);
  EXPECT_EQ(std::get<std::string>(out.entity.scalars.at("level").value), "dialect");
  EXPECT_EQ(out.entity.scalars.at("level").source, "manual");
  ASSERT_EQ(out.conflicts.size(), 1u);
  EXPECT_EQ(out.conflicts[0].strategy, Strategy::manual);
  EXPECT_EQ(out.conflicts[0].winner, "dialect");
}

TEST(Merge, AgreementProducesNoConflicts) {
  Cluster c = {lang({{IdType::iso639_3, "amh"}}, "glottolog", {{"name", std::string("Amharic")}}),
               lang({{IdType::iso639_3, "amh"}}, "iso_tables", {{"name", std::string("Amharic")}}),
               lang({{IdType::iso639_3, "amh"}}, "linguameta", {{"name", std::string("Amharic")}})};
  const auto out = merge_cluster(c, default_policy());
  EXPECT_TRUE(out.conflicts.empty());
  EXPECT_EQ(std::get<std::string>(out.entity.scalars.at("name").value), "Amharic");
}

TEST(Merge, UnrankedDisagreementIsBuildError) {
  ResolutionPolicy p;
  p.source_priority = {"glottolog"};
  Cluster c = {lang({{IdType::iso639_3, "amh"}}, "a", {{"name", std::string("X")}}),
               lang({{IdType::iso639_3, "amh"}}, "b", {{"name", std::string("Y")}})};
  EXPECT_THROW(merge_cluster(c, p), Error);
}

TEST(Merge, ConflictCountEqualsUnequalFields) {
  std::mt19937_64 rng(5);
  const auto policy = default_policy();
  const std::vector<std::string> sources = {"glottolog", "iso_tables", "linguameta"};
  for (int trial = 0; trial < 200; ++trial) {
    Cluster c;
    std::set<std::string> names, levels;
    for (const auto& s : sources) {
      if (rng() % 3 == 0) continue;
      const auto name = std::string(1, char('A' + rng() % 2));
      const auto level = rng() % 2 ? std::string("language") : std::string("dialect");
      names.insert(name);
      levels.insert(level);
      c.push_back(lang({{IdType::iso639_3, "amh"}}, s, {{"name", name}, {"level", level}}));
    }
    if (c.empty()) continue;
    const auto out = merge_cluster(c, policy);
    const std::size_t expected = (names.size() > 1) + (levels.size() > 1);
    EXPECT_EQ(out.conflicts.size(), expected);
  }
}

TEST(Merge, PolicyValidation) {
  auto p = default_policy();
  p.manual_overrides.push_back({{IdType::glottocode, "stan1295"}, "no_such_field", "x", ""});
  EXPECT_THROW(validate_policy(p), Error);
  p = default_policy();
  p.manual_overrides.push_back({{IdType::glottocode, "stan1295"}, "speaker_count", "many", ""});
  EXPECT_THROW(validate_policy(p), Error);
  p = default_policy();
  p.manual_overrides.push_back({{IdType::glottocode, "stan1295"}, "scripts", "Latn", ""});
  EXPECT_THROW(validate_policy(p), Error);
  EXPECT_NO_THROW(validate_policy(default_policy()));
}

TEST(Assemble, EthiopicLanguagesGraph) {
  std::vector<RawRecord> rs = {
      lang({{IdType::glottocode, "afro1255"}}, "glottolog",
           {{"name", std::string("Afro-Asiatic")}, {"level", std::string("family")}}),
      lang({{IdType::glottocode, "amha1245"}, {IdType::iso639_3, "amh"}, {IdType::iso639_1, "am"}}, "glottolog",
           {{"name", std::string("Amharic")}, {"parent", std::string("afro1255")},
            {"regions", std::vector<std::string>{"ET"}}, {"scripts", std::vector<std::string>{"Ethi"}}}),
      lang({{IdType::glottocode, "tigr1271"}, {IdType::iso639_3, "tir"}}, "glottolog",
           {{"name", std::string("Tigrinya")}, {"parent", std::string("afro1255")},
            {"regions", std::vector<std::string>{"ET"}}, {"scripts", std::vector<std::string>{"Ethi"}}}),
      rec(EntityKind::region, {{IdType::iso3166_1_alpha2, "ET"}, {IdType::iso3166_1_alpha3, "ETH"}}, "iso_tables",
          {{"name", std::string("Ethiopia")}, {"kind", std::string("country")}}),
      rec(EntityKind::script, {{IdType::iso15924, "Ethi"}}, "iso_tables", {{"name", std::string("Ethiopic")}}),
  };
  const auto entities = merge_all(rs, default_policy());
  const auto a = assemble_database(entities, {}, BuildMeta{"1.0", "1970-01-01T00:00:00Z", {}});
  const auto& db = a.db;
  EXPECT_EQ(db.languoids.size(), 3u);
  EXPECT_EQ(db.regions.size(), 1u);
  EXPECT_EQ(db.scripts.size(), 1u);
  std::map<EdgeKind, std::vector<std::pair<std::string, std::string>>> edges;
  for (const auto& e : db.edges) edges[e.kind].emplace_back(e.from, e.to);
  using P = std::vector<std::pair<std::string, std::string>>;
  EXPECT_EQ(edges[EdgeKind::child_of], (P{{"glottocode:amha1245", "glottocode:afro1255"},
                                          {"glottocode:tigr1271", "glottocode:afro1255"}}));
  EXPECT_EQ(edges[EdgeKind::spoken_in], (P{{"glottocode:amha1245", "iso3166_1_alpha2:ET"},
                                           {"glottocode:tigr1271", "iso3166_1_alpha2:ET"}}));
  EXPECT_EQ(edges[EdgeKind::written_in], (P{{"glottocode:amha1245", "iso15924:Ethi"},
                                            {"glottocode:tigr1271", "iso15924:Ethi"}}));
  EXPECT_TRUE(validate_database(db).empty());
}

TEST(Assemble, SplitDeprecationEdges) {
  std::vector<RawRecord> rs = {lang({{IdType::iso639_3, "egl"}}, "iso_tables", {{"name", std::string("Emilian")}}),
                               lang({{IdType::iso639_3, "rgn"}}, "iso_tables", {{"name", std::string("Romagnol")}})};
  const auto entities = merge_all(rs, default_policy());
  const auto a = assemble_database(
      entities, {{"eml", IdType::iso639_3, ChangeKind::split, {"egl", "rgn"}, 2009, "sil_deprecations"}},
      BuildMeta{"1.0", "t", {}});
  EXPECT_FALSE(a.db.id_index.contains({IdType::iso639_3, "eml"}));
  std::vector<std::string> targets;
  for (const auto& e : a.db.edges)
    if (e.kind == EdgeKind::replaced_by && e.from == "deprecated:iso639_3:eml") targets.push_back(e.to);
  EXPECT_EQ(targets, (std::vector<std::string>{"iso639_3:egl", "iso639_3:rgn"}));
}

TEST(Assemble, EmptyInput) {
  const auto a = assemble_database({}, {}, BuildMeta{"1.0", "1970-01-01T00:00:00Z", {}});
  EXPECT_TRUE(a.db.languoids.empty());
  EXPECT_TRUE(a.db.edges.empty());
  EXPECT_EQ(a.db.build_meta.format_version, "1.0");
  EXPECT_TRUE(validate_database(a.db).empty());
}

TEST(Report, ZeroConflictsShowsTotalsOnly) {
  const auto a = assemble_database({}, {}, BuildMeta{"1.0", "t", {}});
  const auto r = build_report({}, {}, a);
  const auto text = r.text();
  EXPECT_NE(text.find("totals: 0 languoids"), std::string::npos);
  EXPECT_EQ(text.find("conflicts"), std::string::npos);
}

class FixtureBuild : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    cache_ = new lgtest::TempDir;
    const auto cfg = ingest::load_registry(lgtest::fixture_registry());
    ingest::DefaultFetcher f;
    build_ = new pipeline::BuildOutput(pipeline::build_database(cfg, cache_->path(), f, "1970-01-01T00:00:00Z"));
  }
  static void TearDownTestSuite() {
    delete build_;
    delete cache_;
  }
  static lgtest::TempDir* cache_;
  static pipeline::BuildOutput* build_;
};
lgtest::TempDir* FixtureBuild::cache_ = nullptr;
pipeline::BuildOutput* FixtureBuild::build_ = nullptr;

TEST_F(FixtureBuild, AnIsTheOnlyPriorityConflict) {
  const auto& r = build_->report;
  std::vector<ConflictRecord> priority;
  for (const auto& c : r.conflicts)
    if (c.strategy == Strategy::priority) priority.push_back(c);
  ASSERT_EQ(priority.size(), 1u);
  EXPECT_EQ(priority[0].entity, (IdKey{IdType::iso3166_1_alpha2, "AN"}));
  EXPECT_EQ(priority[0].field, "historical");
  EXPECT_EQ(priority[0].winner, "true");
  EXPECT_NE(r.text().find("priority: 1"), std::string::npos);
  EXPECT_NE(r.text().find("field=historical"), std::string::npos);
}

TEST_F(FixtureBuild, TotalsMatchTables) {
  const auto& r = build_->report;
  const auto& db = build_->assembly.db;
  EXPECT_EQ(r.languoids, db.languoids.size());
  EXPECT_EQ(r.scripts, db.scripts.size());
  EXPECT_EQ(r.regions, db.regions.size());
  EXPECT_EQ(r.edges, db.edges.size());
  EXPECT_EQ(r.deprecations, db.deprecations.size());
  EXPECT_TRUE(validate_database(db).empty());
}

TEST_F(FixtureBuild, MatchesBundledDatabase) {
  EXPECT_EQ(build_->assembly.db, *lgtest::fixture_db());
  EXPECT_EQ(store::encode_database(build_->assembly.db), lg::text::read_file(lgtest::fixture_db_path()));
}

TEST_F(FixtureBuild, SerializationIsDeterministic) {
  const auto cfg = ingest::load_registry(lgtest::fixture_registry());
  ingest::DefaultFetcher f;
  const auto again = pipeline::build_database(cfg, cache_->path(), f, "1970-01-01T00:00:00Z");
  EXPECT_EQ(store::encode_database(again.assembly.db), store::encode_database(build_->assembly.db));
  EXPECT_EQ(store::encode_names(again.assembly.names), store::encode_names(build_->assembly.names));
}

TEST(Pipeline, TimestampFromEnvironment) {
  EXPECT_EQ(pipeline::format_timestamp(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(pipeline::format_timestamp(1700000000), "2023-11-14T22:13:20Z");
}
