#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace proxtrace {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance record emitted once per command run. The manifest is the one
/// output allowed to differ between reruns (timestamps live here and only
/// here); every digest is a content hash of the named input.
struct RunManifest {
    std::string command;
    std::string config_digest = "-";   // "-" when the run took no config file
    std::vector<std::pair<std::string, std::string>> dataset_digests;   // name -> hex digest
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::string started_at;    // ISO-8601 UTC
    std::string finished_at;

    std::string to_json() const;
};

/// FNV-1a 64-bit content hash of a file, as 16 hex digits. Throws
/// errc::io_error when the file cannot be read.
std::string file_digest_hex(const std::string& path);

/// Same hash over an in-memory buffer.
std::string content_digest_hex(const std::string& bytes);

std::string iso8601_utc_now();

} // namespace proxtrace
