#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "linguograph/audit.hpp"
#include "linguograph/error.hpp"
#include "support.hpp"

using namespace lg;
using namespace lg::audit;

namespace {

std::vector<GroupedCode> ungrouped(std::initializer_list<const char*> codes) {
  std::vector<GroupedCode> out;
  for (auto c : codes) out.emplace_back("", c);
  return out;
}

}  // namespace

TEST(Audit, ClassifyExamples) {
  const auto r = lgtest::fixture_resolver();
  const auto eml = classify_code(r, "eml");
  EXPECT_EQ(eml.category, Category::deprecated);
  EXPECT_EQ(eml.replacements, (std::vector<std::string>{"egl", "rgn"}));
  const auto de = classify_code(r, "DE");
  EXPECT_EQ(de.category, Category::region_code);
  EXPECT_EQ(de.node_id, "iso3166_1_alpha2:DE");
  EXPECT_EQ(classify_code(r, "xx").category, Category::unknown);
  const auto ls = classify_code(r, "deu_Latn");
  EXPECT_EQ(ls.category, Category::valid);
  EXPECT_EQ(ls.matched_type, IdType::lang_script);
  EXPECT_EQ(classify_code(r, "").category, Category::unknown);
  EXPECT_EQ(classify_code(r, std::string("\xff\x00zz", 4)).category, Category::unknown);
}

TEST(Audit, FixtureCounts) {
  const auto r = lgtest::fixture_resolver();
  const auto report = audit_codes(r, ungrouped({"de", "deu", "eml", "DE", "xx"}));
  EXPECT_EQ(report.counts.at(Category::valid), 2u);
  EXPECT_EQ(report.counts.at(Category::deprecated), 1u);
  EXPECT_EQ(report.counts.at(Category::region_code), 1u);
  EXPECT_EQ(report.counts.at(Category::unknown), 1u);
  EXPECT_EQ(report.matched_types.at(IdType::iso639_1), 1u);
  EXPECT_EQ(report.matched_types.at(IdType::iso639_3), 1u);
}

TEST(Audit, EmptyInput) {
  const auto r = lgtest::fixture_resolver();
  const auto report = audit_codes(r, {});
  EXPECT_TRUE(report.verdicts.empty());
  EXPECT_EQ(report.inputs, 0u);
  for (auto c : {Category::valid, Category::deprecated, Category::region_code, Category::unknown})
    EXPECT_EQ(report.counts.at(c), 0u);
}

TEST(Audit, DuplicatesAcrossGroups) {
  const auto r = lgtest::fixture_resolver();
  const auto report = audit_codes(r, {{"a", "deu"}, {"b", "deu"}, {"b", "xx"}, {"a", "deu"}});
  EXPECT_EQ(report.inputs, 4u);
  EXPECT_EQ(report.verdicts.size(), 2u);
  EXPECT_EQ(report.counts.at(Category::valid), 1u);
  EXPECT_EQ(report.counts.at(Category::unknown), 1u);
  EXPECT_EQ(report.groups.at("a").at(Category::valid), 2u);
  EXPECT_EQ(report.groups.at("b").at(Category::valid), 1u);
  EXPECT_EQ(report.groups.at("b").at(Category::unknown), 1u);
}

TEST(Audit, PartitionAndConsistencyWithResolver) {
  const auto r = lgtest::fixture_resolver();
  std::vector<GroupedCode> codes;
  for (const auto& [key, id] : r.db().id_index) codes.emplace_back("", key.code);
  for (const auto& [key, rec] : r.db().deprecations) codes.emplace_back("", key.code);
  for (auto junk : {"xx", "dog", "multilingual", "Q0", "zzz", "de-DE", "en_US"}) codes.emplace_back("", junk);
  const auto report = audit_codes(r, codes);

  std::size_t total = 0;
  for (const auto& [c, n] : report.counts) total += n;
  EXPECT_EQ(total, report.verdicts.size());

  for (const auto& v : report.verdicts) {
    bool clean = false;
    try {
      const auto res = r.get_languoid(v.code);
      clean = !res.ambiguous() && !res.deprecation;
    } catch (const Error&) {
    }
    EXPECT_EQ(v.category == Category::valid, clean) << v.code;
  }
}

TEST(Audit, ReadCodes) {
  std::istringstream in("# header\nde\n\nmarket1\teml\n  \nDE\n");
  const auto codes = read_codes(in);
  EXPECT_EQ(codes, (std::vector<GroupedCode>{{"", "de"}, {"market1", "eml"}, {"", "DE"}}));
  try {
    read_codes(std::filesystem::path("/nonexistent/codes.tsv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(Audit, JsonShape) {
  const auto r = lgtest::fixture_resolver();
  const auto j = audit_codes(r, ungrouped({"de", "eml"})).to_json();
  EXPECT_EQ(j["counts"]["valid"], 1);
  EXPECT_EQ(j["counts"]["deprecated"], 1);
  EXPECT_EQ(j["counts"]["unknown"], 0);
}
