#include "tool_io.hpp"

#include "proxtrace/error.hpp"

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace proxtrace::tools {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        raise(errc::io_error, "cannot write '" + path.string() + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(errc::io_error, "cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunManifest start_manifest(const GlobalArgs& g, const std::string& command) {
    RunManifest m;
    m.command = command;
    m.seed = g.seed;
    m.started_at = iso8601_utc_now();
    if (g.config_path) {
        m.config_digest = file_digest_hex(*g.config_path);
    }
    return m;
}

void finish_manifest(RunManifest& m, const GlobalArgs& g) {
    m.finished_at = iso8601_utc_now();
    write_file(fs::path(g.out_dir) / (m.command + ".manifest.json"), m.to_json());
}

} // namespace proxtrace::tools
