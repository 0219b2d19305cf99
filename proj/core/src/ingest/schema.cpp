#include "proxtrace/ingest/schema.hpp"

#include "proxtrace/error.hpp"

#include <fstream>

namespace proxtrace::ingest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

SchemaMap parse_schema(std::istream& in) {
    SchemaMap schema;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(errc::config_invalid,
                  "schema line " + std::to_string(lineno) + " is not key=value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            raise(errc::config_invalid, "schema key '" + key + "' has an empty value");

        if (key == "col.rss") {
            schema.col_rss = value;
        } else if (key == "col.distance") {
            schema.col_distance = value;
        } else if (key == "col.position") {
            schema.col_position = value;
        } else if (key == "col.time") {
            schema.col_time = value;
        } else if (key == "col.session") {
            schema.col_session = value;
        } else if (key == "delimiter") {
            std::string d = value;
            if (d == "\\t" || d == "tab") d = "\t";
            if (d == "comma") d = ",";
            if (d.size() != 1)
                raise(errc::config_invalid, "delimiter must be a single character");
            schema.delimiter = d[0];
        } else if (key == "const.distance") {
            try {
                schema.const_distance = std::stod(value);
            } catch (const std::exception&) {
                raise(errc::config_invalid, "const.distance is not numeric: '" + value + "'");
            }
        } else if (key == "const.position") {
            schema.const_position = value;
        } else if (key == "path.distance") {
            schema.path_distance = value;
        } else if (key == "path.position") {
            schema.path_position = value;
        } else {
            raise(errc::config_invalid, "unknown schema key '" + key + "'");
        }
    }
    if (!schema.col_rss)
        raise(errc::config_invalid, "schema must name the RSS column (col.rss)");
    if (!schema.col_distance && !schema.const_distance && !schema.path_distance)
        raise(errc::config_invalid,
              "schema must provide the distance via col.distance, const.distance or path.distance");
    if (!schema.col_position && !schema.const_position && !schema.path_position)
        raise(errc::config_invalid,
              "schema must provide the position via col.position, const.position or path.position");
    return schema;
}

SchemaMap load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open schema file '" + path + "'");
    return parse_schema(in);
}

SchemaMap canonical_schema() {
    SchemaMap s;
    s.col_rss = "rss_dbm";
    s.col_distance = "distance_m";
    s.col_position = "position_pair";
    s.col_time = "t_offset_s";
    s.col_session = "session_id";
    return s;
}

} // namespace proxtrace::ingest
