#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "linguograph/resolve.hpp"
#include "linguograph/store.hpp"

namespace lgtest {

namespace fs = std::filesystem;

inline fs::path source_dir() { return LG_SOURCE_DIR; }
inline fs::path fixture_db_path() { return LG_FIXTURE_DB; }
inline fs::path fixture_registry() { return source_dir() / "fixtures" / "sources.conf"; }

inline std::shared_ptr<const lg::Database> fixture_db() {
  static auto db = std::make_shared<const lg::Database>(lg::store::load_database(fixture_db_path()));
  return db;
}

inline lg::resolve::Resolver fixture_resolver(lg::resolve::NoticeSink sink = {}) {
  auto db = fixture_db();
  return lg::resolve::Resolver(db, lg::store::NamesTable(lg::store::names_path_for(fixture_db_path()), db),
                               std::move(sink));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("lgtest-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const fs::path& p) const { return path_ / p; }

 private:
  fs::path path_;
};

}  // namespace lgtest
