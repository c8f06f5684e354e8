#include <gtest/gtest.h>

#include <thread>

#include "linguograph/error.hpp"
#include "linguograph/store.hpp"
#include "linguograph/text.hpp"
#include "support.hpp"

using namespace lg;
using namespace lg::store;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::undefined;
}

}  // namespace

TEST(Store, CanonicalRoundTrip) {
  const auto& db = *lgtest::fixture_db();
  const auto bytes = encode_database(db);
  const auto back = decode_database(bytes);
  EXPECT_EQ(back, db);
  EXPECT_EQ(encode_database(back), bytes);
  EXPECT_EQ(back.languoids.size(), db.languoids.size());
  EXPECT_EQ(back.edges.size(), db.edges.size());
  EXPECT_EQ(back.id_index, db.id_index);
}

TEST(Store, EmptyDatabase) {
  Database db;
  db.build_meta = {"1.0", "1970-01-01T00:00:00Z", {}};
  db.reindex();
  lgtest::TempDir dir;
  serialize_database(db, dir / "empty.lgdb.gz");
  const auto back = load_database(dir / "empty.lgdb.gz");
  EXPECT_EQ(back, db);
  EXPECT_TRUE(back.languoids.empty());
}

TEST(Store, FixtureSizeBound) {
  EXPECT_LT(fs::file_size(lgtest::fixture_db_path()), 200u * 1024u);
}

TEST(Store, TruncatedFileIsCorrupt) {
  const auto bytes = text::read_file(lgtest::fixture_db_path());
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1})
    EXPECT_EQ(kind_of([&] { decode_database(bytes.substr(0, cut)); }), ErrorKind::corrupt) << cut;
  EXPECT_EQ(kind_of([&] { decode_database("not gzip at all, definitely"); }), ErrorKind::corrupt);
}

TEST(Store, NewerMajorVersionRejected) {
  auto doc = database_to_json(*lgtest::fixture_db());
  doc["format_version"] = "2.0";
  EXPECT_EQ(kind_of([&] { database_from_json(doc); }), ErrorKind::version);
  doc["format_version"] = "1.7";
  EXPECT_NO_THROW(database_from_json(doc));
  doc["format_version"] = "zero";
  EXPECT_EQ(kind_of([&] { database_from_json(doc); }), ErrorKind::corrupt);
}

TEST(Store, SchemaViolationsAreCorrupt) {
  auto doc = database_to_json(*lgtest::fixture_db());
  doc.erase("languoids");
  EXPECT_EQ(kind_of([&] { database_from_json(doc); }), ErrorKind::corrupt);
  doc = database_to_json(*lgtest::fixture_db());
  doc["languoids"][0]["level"] = "galaxy";
  EXPECT_EQ(kind_of([&] { database_from_json(doc); }), ErrorKind::corrupt);
}

TEST(Store, InvalidContentFailsValidation) {
  auto doc = database_to_json(*lgtest::fixture_db());
  doc["edges"].push_back({{"kind", "child_of"}, {"from", "glottocode:amha1245"}, {"to", "glottocode:none0000"},
                          {"rank", 9}, {"provenance", nlohmann::json::array()}});
  EXPECT_EQ(kind_of([&] { database_from_json(doc); }), ErrorKind::integrity);
}

TEST(Store, MissingFileIsIo) {
  EXPECT_EQ(kind_of([&] { load_database("/nonexistent/x.lgdb.gz"); }), ErrorKind::io);
}

TEST(Store, GzipIsDeterministic) {
  const std::string data(10000, 'a');
  EXPECT_EQ(gzip_compress(data), gzip_compress(data));
  EXPECT_EQ(gzip_decompress(gzip_compress(data)), data);
  EXPECT_EQ(gzip_decompress(gzip_compress("")), "");
}

TEST(Store, NamesPath) {
  EXPECT_EQ(names_path_for("/a/b/x.lgdb.gz"), fs::path("/a/b/x.lgnames.gz"));
}

TEST(Names, RoundTrip) {
  const auto bytes = text::read_file(names_path_for(lgtest::fixture_db_path()));
  const auto rows = decode_names(bytes);
  EXPECT_FALSE(rows.empty());
  EXPECT_EQ(encode_names(rows), bytes);
}

TEST(Names, LazyLoadCountsOnce) {
  NamesTable t(names_path_for(lgtest::fixture_db_path()), lgtest::fixture_db());
  EXPECT_EQ(t.decompressions(), 0);
  EXPECT_FALSE(t.loaded());
  const auto rows = t.rows_for("glottocode:tigr1271");
  EXPECT_FALSE(rows.empty());
  EXPECT_EQ(t.decompressions(), 1);
  t.rows_for("glottocode:stan1295");
  t.all_rows();
  EXPECT_EQ(t.decompressions(), 1);
  EXPECT_TRUE(t.loaded());
}

TEST(Names, ConcurrentFirstAccessLoadsOnce) {
  NamesTable t(names_path_for(lgtest::fixture_db_path()), lgtest::fixture_db());
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { t.rows_for("glottocode:stan1295"); });
  threads.clear();
  EXPECT_EQ(t.decompressions(), 1);
}

TEST(Names, ResolverConstructionDoesNotLoad) {
  auto r = lgtest::fixture_resolver();
  EXPECT_EQ(r.names()->decompressions(), 0);
  r.get_languoid("deu");
  r.convert("de", IdType::iso639_1, IdType::glottocode);
  EXPECT_EQ(r.names()->decompressions(), 0);
  EXPECT_EQ(r.name_of("glottocode:tigr1271", "en"), std::vector<std::string>{"Tigrinya"});
  EXPECT_EQ(r.names()->decompressions(), 1);
}

TEST(Names, MissingFileIsNamesUnavailable) {
  auto db = lgtest::fixture_db();
  resolve::Resolver r(db, NamesTable("/nonexistent/x.lgnames.gz", db));
  EXPECT_EQ(kind_of([&] { r.name_of("glottocode:tigr1271", "en"); }), ErrorKind::names_unavailable);
  EXPECT_EQ(r.convert("deu", IdType::iso639_3, IdType::iso639_1), "de");
  resolve::Resolver bare(db);
  EXPECT_EQ(kind_of([&] { bare.name_of("glottocode:tigr1271", "en"); }), ErrorKind::names_unavailable);
}

TEST(Names, UnknownSubjectIsIntegrityError) {
  lgtest::TempDir dir;
  serialize_names({NameRow{"glottocode:zzzz0000", "glottocode:stan1293", "Nothing", false, "t"}},
                  dir / "x.lgnames.gz");
  NamesTable t(dir / "x.lgnames.gz", lgtest::fixture_db());
  EXPECT_EQ(kind_of([&] { t.rows_for("glottocode:stan1295"); }), ErrorKind::integrity);
}
