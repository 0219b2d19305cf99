#pragma once

#include "commands.hpp"

#include "proxtrace/report.hpp"

#include <filesystem>
#include <string>

namespace proxtrace::tools {

/// Creates parent directories and writes the content atomically enough for
/// this tool (single writer). Throws errc::io_error on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Whole-file read. Throws errc::io_error.
std::string read_file(const std::string& path);

/// Manifest skeleton for a command run: records the command name, the
/// global seed and the config digest; the caller appends input digests.
RunManifest start_manifest(const GlobalArgs& g, const std::string& command);

/// Stamps the end time and writes `<command>.manifest.json` under -out.
void finish_manifest(RunManifest& m, const GlobalArgs& g);

} // namespace proxtrace::tools
