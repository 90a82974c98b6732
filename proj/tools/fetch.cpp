// fetch-urm: download the universal register machine pattern and pin its hash.

#include <curl/curl.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "cli.hpp"
#include "lifespec/manifest.hpp"
#include "lifespec/pattern.hpp"

namespace lifespec::cli {
namespace {

// Rendell's notes page; the pattern file itself is linked from there.
constexpr const char* kUrmPage = "http://www.rendell-attic.org/gol/UCM/CMappNotes.html";

struct FetchArgs {
  std::string url = kUrmPage;
  std::string out = "urm.rle";
  std::string sha256;
};

std::string download(const std::string& url) {
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
  if (!curl) throw std::runtime_error("curl_easy_init failed");
  std::string body;
  char err[CURL_ERROR_SIZE] = "";
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, err);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, +[](char* p, size_t size, size_t n, void* ud) -> size_t {
    static_cast<std::string*>(ud)->append(p, size * n);
    return size * n;
  });
  if (const auto rc = curl_easy_perform(curl.get()); rc != CURLE_OK)
    throw UsageError("download of " + url + " failed: " + (*err ? err : curl_easy_strerror(rc)));
  return body;
}

std::string lower_trim(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void run_fetch(const FetchArgs& a) {
  namespace fs = std::filesystem;
  const fs::path out = a.out;
  const fs::path pin = fs::path(a.out + ".sha256");
  std::string expected = lower_trim(a.sha256);
  if (expected.empty() && fs::exists(pin)) expected = lower_trim(read_file(pin));

  const auto body = download(a.url);
  const auto got = sha256_hex(body);
  if (!expected.empty() && got != expected)
    throw UsageError("sha256 mismatch for " + a.url + ": expected " + expected + ", got " + got);
  try {
    const auto p = parse_rle(body);
    std::printf("pattern %lldx%lld, %zu live cells\n", (long long)p.width, (long long)p.height, p.live_cells.size());
  } catch (const RleError& e) {
    throw UsageError(a.url + " is not a Life RLE pattern (" + e.what() +
                     "); pass --url pointing at the pattern file linked from " + kUrmPage);
  }
  write_file(out, body);
  if (expected.empty()) {
    write_file(pin, got + "\n");
    std::printf("no recorded hash; pinned %s in %s\n", got.c_str(), pin.string().c_str());
  } else {
    std::printf("sha256 verified: %s\n", got.c_str());
  }
  std::printf("%s\n", out.string().c_str());
}

}  // namespace

void add_fetch_urm(CLI::App& app) {
  auto a = std::make_shared<FetchArgs>();
  auto* sub = app.add_subcommand("fetch-urm", "Download the universal register machine pattern");
  sub->add_option("--url", a->url, "Pattern URL (http, https or file)")->capture_default_str();
  sub->add_option("-o,--out", a->out, "Destination RLE file; its hash is pinned in <out>.sha256")
      ->capture_default_str();
  sub->add_option("--sha256", a->sha256, "Expected SHA-256; overrides the pinned hash");
  sub->callback([a] { run_fetch(*a); });
}

}  // namespace lifespec::cli
