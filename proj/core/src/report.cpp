#include "proxtrace/report.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/hash.hpp"

#include "json.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

namespace proxtrace {

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["config_digest"] = config_digest;
    nlohmann::ordered_json datasets = nlohmann::ordered_json::object();
    for (const auto& [name, digest] : dataset_digests) {
        datasets[name] = digest;
    }
    j["dataset_digests"] = datasets;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j.dump(2) + "\n";
}

std::string content_digest_hex(const std::string& bytes) {
    return u64_hex(fnv1a64(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size())));
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(errc::io_error, "cannot read '" + path + "' for digest");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return content_digest_hex(buf.str());
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace proxtrace
