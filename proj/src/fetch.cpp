#include <openssl/evp.h>

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "linguograph/error.hpp"
#include "linguograph/ingest.hpp"
#include "linguograph/text.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace lg::ingest {

namespace {

std::string hex(const unsigned char* bytes, std::size_t n) {
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (std::size_t i = 0; i < n; ++i) out << std::setw(2) << static_cast<int>(bytes[i]);
  return out.str();
}

std::optional<Fetcher::Snapshot> fetch_http(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end + 3);
  const auto origin = url.substr(0, path_start);
  const auto path = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res || res->status != 200) return std::nullopt;

  auto name = path.substr(path.find_last_of('/') + 1);
  if (name.empty()) name = "index";
  Fetcher::Snapshot snap;
  snap.files.emplace(name, res->body);
  return snap;
}

std::optional<Fetcher::Snapshot> fetch_local(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  Fetcher::Snapshot snap;
  if (fs::is_regular_file(path, ec)) {
    snap.files.emplace(path.filename().generic_string(), text::read_file(path));
    return snap;
  }
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), path).generic_string();
    snap.files.emplace(std::move(rel), text::read_file(entry.path()));
  }
  return snap;
}

struct CacheMeta {
  std::string version;
  std::string checksum;
};

std::optional<CacheMeta> read_meta(const fs::path& meta_path) {
  std::error_code ec;
  if (!fs::exists(meta_path, ec)) return std::nullopt;
  auto lines = text::split(text::read_file(meta_path), '\n');
  if (lines.size() < 2) return std::nullopt;
  return CacheMeta{std::string(text::trim(lines[0])), std::string(text::trim(lines[1]))};
}

std::vector<fs::path> list_files(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

void check_pin(const SourceDescriptor& d, const std::string& version, const std::string& checksum) {
  if (!d.pinned_version) return;
  if (*d.pinned_version == version || *d.pinned_version == checksum) return;
  throw Error(ErrorKind::integrity, "source '" + d.source_id + "': pinned version " +
                                        *d.pinned_version + " does not match " + version +
                                        " (sha256 " + checksum + ")");
}

}  // namespace

std::optional<Fetcher::Snapshot> DefaultFetcher::fetch(const std::string& locator) {
  if (locator.starts_with("http://") || locator.starts_with("https://"))
    return fetch_http(locator);
  if (locator.starts_with("file://")) return fetch_local(fs::path(locator.substr(7)));
  return fetch_local(fs::path(locator));
}

std::string snapshot_checksum(const Fetcher::Snapshot& snapshot) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  for (const auto& [rel, bytes] : snapshot.files) {
    EVP_DigestUpdate(ctx.get(), rel.data(), rel.size());
    const unsigned char sep = 0;
    EVP_DigestUpdate(ctx.get(), &sep, 1);
    const auto size = std::to_string(bytes.size());
    EVP_DigestUpdate(ctx.get(), size.data(), size.size());
    EVP_DigestUpdate(ctx.get(), &sep, 1);
    EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  return hex(digest, len);
}

FetchResult fetch_source(const SourceDescriptor& descriptor, const fs::path& cache_dir) {
  DefaultFetcher fetcher;
  return fetch_source(descriptor, cache_dir, fetcher);
}

FetchResult fetch_source(const SourceDescriptor& d, const fs::path& cache_dir, Fetcher& fetcher) {
  const auto source_dir = cache_dir / d.source_id;
  const auto meta_path = source_dir / "meta";
  const auto cached = read_meta(meta_path);

  auto snapshot = fetcher.fetch(d.locator);
  if (!snapshot) {
    if (!cached)
      throw Error(ErrorKind::fetch,
                  "source '" + d.source_id + "': locator unreachable and no cached copy (" +
                      d.locator + ")");
    check_pin(d, cached->version, cached->checksum);
    const auto root = source_dir / cached->version;
    auto files = list_files(root);
    if (files.empty())
      throw Error(ErrorKind::fetch, "source '" + d.source_id + "': cached copy is empty");
    return FetchResult{std::move(files), root, cached->version, cached->checksum, false};
  }

  const auto checksum = snapshot_checksum(*snapshot);
  std::string version = "sha256-" + checksum.substr(0, 12);
  if (auto it = snapshot->files.find("VERSION"); it != snapshot->files.end()) {
    auto v = std::string(text::trim(it->second));
    if (!v.empty() && v.find('/') == std::string::npos && v != "." && v != "..") version = v;
  }
  check_pin(d, version, checksum);

  const auto root = source_dir / version;
  std::error_code ec;
  if (cached && cached->checksum == checksum && cached->version == version &&
      fs::is_directory(root, ec)) {
    return FetchResult{list_files(root), root, version, checksum, false};
  }

  fs::remove_all(root, ec);
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create cache directory " + root.string());
  for (const auto& [rel, bytes] : snapshot->files) {
    const auto target = root / fs::path(rel);
    fs::create_directories(target.parent_path(), ec);
    text::write_file_atomic(target, bytes);
  }
  text::write_file_atomic(meta_path, version + "\n" + checksum + "\n");
  return FetchResult{list_files(root), root, version, checksum, true};
}

}  // namespace lg::ingest
