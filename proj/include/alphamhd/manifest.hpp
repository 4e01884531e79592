// Campaign manifest: one line per artifact file with a 64-bit FNV-1a content
// hash, sorted by relative path, plus a trailing block for failed runs.
// Reruns of a deterministic campaign produce byte-identical manifests.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "alphamhd/common.hpp"

namespace alphamhd {

struct ManifestEntry {
  std::string relpath;
  std::uint64_t hash = 0;
  std::uint64_t bytes = 0;
};

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for hashing");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0) h = fnv1a64(buf, static_cast<std::size_t>(got), h);
  }
  return h;
}

// Hash every regular file under root (except the manifest itself), sorted by
// path. failures go into a labeled block so a partial campaign is visible.
inline void write_manifest(const std::string& root,
                           const std::vector<std::string>& failures,
                           const std::string& filename = "manifest.txt") {
  namespace fs = std::filesystem;
  std::vector<ManifestEntry> entries;
  for (const auto& de : fs::recursive_directory_iterator(root)) {
    if (!de.is_regular_file()) continue;
    const std::string rel = fs::relative(de.path(), root).generic_string();
    if (rel == filename) continue;
    ManifestEntry e;
    e.relpath = rel;
    e.bytes = static_cast<std::uint64_t>(fs::file_size(de.path()));
    e.hash = hash_file(de.path().string());
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return a.relpath < b.relpath;
            });

  const fs::path out_path = fs::path(root) / filename;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path.string() + "' for writing");
  char hex[17];
  for (const auto& e : entries) {
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(e.hash));
    out << hex << "  " << e.bytes << "  " << e.relpath << '\n';
  }
  std::vector<std::string> sorted_failures = failures;
  std::sort(sorted_failures.begin(), sorted_failures.end());
  for (const auto& f : sorted_failures) out << "FAILED  " << f << '\n';
  if (!out) throw IoError("write failed for '" + out_path.string() + "'");
}

}  // namespace alphamhd
