#include "proxtrace/ingest/parse.hpp"

#include "proxtrace/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace proxtrace::ingest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    for (auto& f : out) f = trim(f);
    return out;
}

std::optional<double> parse_number(const std::string& field) {
    const std::string t = trim(field);
    if (t.empty()) return std::nullopt;
    double v = 0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

char detect_delimiter(const std::string& header) {
    const auto commas = std::count(header.begin(), header.end(), ',');
    const auto tabs = std::count(header.begin(), header.end(), '\t');
    return tabs > commas ? '\t' : ',';
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::string regex_extract(const std::string& pattern, const std::string& subject,
                          const std::string& what) {
    std::regex re(pattern);
    std::smatch m;
    if (!std::regex_search(subject, m, re) || m.size() < 2)
        raise(errc::config_invalid,
              "schema path." + what + " pattern '" + pattern + "' does not match '" + subject + "'");
    return m[1].str();
}

} // namespace

namespace {

// "$3" in a col.* value means the third column of a headerless file.
std::optional<std::size_t> indexed_column(const std::string& name) {
    if (name.size() < 2 || name[0] != '$') return std::nullopt;
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), n);
    if (ec != std::errc() || ptr != name.data() + name.size() || n == 0) return std::nullopt;
    return n - 1;
}

} // namespace

ParseResult parse_dataset(std::istream& in, const SchemaMap& schema,
                          const std::string& source_name, double max_malformed_fraction) {
    std::string first_line;
    ParseResult result;
    if (!std::getline(in, first_line)) return result;   // empty source: no rows, no errors

    // Schemas may address columns by header name or, for headerless files,
    // by $index — but not both at once.
    bool any_indexed = false;
    bool any_named = false;
    for (const auto& name : {schema.col_rss, schema.col_distance, schema.col_position,
                             schema.col_time, schema.col_session}) {
        if (!name) continue;
        (indexed_column(*name) ? any_indexed : any_named) = true;
    }
    if (any_indexed && any_named)
        raise(errc::config_invalid,
              "schema mixes named and $indexed columns; a file either has a header or does not");
    const bool headerless = any_indexed;

    const char delim = schema.delimiter.value_or(detect_delimiter(first_line));
    const std::vector<std::string> header = headerless ? std::vector<std::string>{}
                                                       : split(first_line, delim);

    auto require_column = [&](const std::optional<std::string>& name) -> std::optional<std::size_t> {
        if (!name) return std::nullopt;
        if (auto idx = indexed_column(*name)) return idx;
        auto idx = find_column(header, *name);
        if (!idx)
            raise(errc::missing_column,
                  "column '" + *name + "' not found in header of " + source_name);
        return idx;
    };

    const auto rss_col = require_column(schema.col_rss);
    const auto dist_col = require_column(schema.col_distance);
    const auto pos_col = require_column(schema.col_position);
    const auto time_col = require_column(schema.col_time);
    const auto session_col = require_column(schema.col_session);

    // Per-file constants resolved once, from the schema or the source name.
    std::optional<double> const_distance = schema.const_distance;
    if (!const_distance && schema.path_distance) {
        const std::string tok = regex_extract(*schema.path_distance, source_name, "distance");
        const auto v = parse_number(tok);
        if (!v)
            raise(errc::config_invalid, "path.distance extracted non-numeric '" + tok + "'");
        const_distance = v;
    }
    std::optional<PositionPair> const_position;
    if (schema.const_position) {
        const_position = parse_position(*schema.const_position);
        if (!const_position)
            raise(errc::config_invalid, "const.position '" + *schema.const_position + "' unknown");
    } else if (schema.path_position) {
        const std::string tok = regex_extract(*schema.path_position, source_name, "position");
        const_position = parse_position(tok);
        if (!const_position)
            raise(errc::config_invalid, "path.position extracted unknown token '" + tok + "'");
    }

    std::string line;
    std::size_t lineno = headerless ? 0 : 1;
    bool pending_first = headerless;   // a headerless file's first line is data
    while (pending_first || std::getline(in, line)) {
        if (pending_first) {
            line = first_line;
            pending_first = false;
        }
        ++lineno;
        if (trim(line).empty()) continue;
        ++result.rows_seen;
        const std::vector<std::string> fields = split(line, delim);

        auto field_at = [&](std::size_t idx) -> const std::string* {
            return idx < fields.size() ? &fields[idx] : nullptr;
        };
        auto malformed = [&](const std::string& why) {
            result.malformed.push_back({lineno, why});
        };

        RssSample s;

        const std::string* rss_field = rss_col ? field_at(*rss_col) : nullptr;
        if (!rss_field) {
            malformed("row too short for rss column");
            continue;
        }
        if (auto v = parse_number(*rss_field)) {
            s.rss_dbm = *v;
        } else {
            malformed("non-numeric rss '" + *rss_field + "'");
            continue;
        }

        if (dist_col) {
            const std::string* f = field_at(*dist_col);
            auto v = f ? parse_number(*f) : std::nullopt;
            if (!v) {
                malformed("non-numeric distance");
                continue;
            }
            s.distance_m = *v;
        } else {
            s.distance_m = *const_distance;
        }

        if (pos_col) {
            const std::string* f = field_at(*pos_col);
            auto p = f ? parse_position(*f) : std::nullopt;
            if (!p) {
                malformed("unknown position '" + (f ? *f : std::string("<missing>")) + "'");
                continue;
            }
            s.position_pair = *p;
        } else {
            s.position_pair = *const_position;
        }
        s.device_kind = device_of(s.position_pair);

        if (time_col) {
            if (const std::string* f = field_at(*time_col); f && !trim(*f).empty()) {
                auto v = parse_number(*f);
                if (!v) {
                    malformed("non-numeric time offset");
                    continue;
                }
                s.t_offset_s = *v;
            }
        }

        if (session_col) {
            const std::string* f = field_at(*session_col);
            s.session_id = f ? *f : source_name;
        } else {
            s.session_id = source_name;
        }

        if (auto why = validate_sample(s)) {
            malformed(*why);
            continue;
        }
        result.samples.push_back(std::move(s));
    }

    if (result.rows_seen > 0) {
        const double frac =
            static_cast<double>(result.malformed.size()) / static_cast<double>(result.rows_seen);
        if (frac > max_malformed_fraction) {
            std::string first = result.malformed.empty() ? "" : result.malformed.front().reason;
            raise(errc::malformed_data,
                  source_name + ": " + std::to_string(result.malformed.size()) + " of " +
                      std::to_string(result.rows_seen) + " rows malformed (first: " + first + ")");
        }
    }
    return result;
}

std::string format_double(double v) {
    char buf[40];
    // Shortest of %.15g/%.16g/%.17g that survives the round trip.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0;
        auto [ptr, ec] = std::from_chars(buf, buf + std::string_view(buf).size(), back);
        (void)ptr;
        if (ec == std::errc() && back == v) return buf;
    }
    return buf;
}

void write_canonical(std::ostream& out, const std::vector<RssSample>& samples) {
    out << "rss_dbm,distance_m,position_pair,device_kind,session_id,t_offset_s\n";
    for (const auto& s : samples) {
        out << format_double(s.rss_dbm) << ',' << format_double(s.distance_m) << ','
            << to_string(s.position_pair) << ',' << to_string(s.device_kind) << ',' << s.session_id
            << ',';
        if (s.t_offset_s) out << format_double(*s.t_offset_s);
        out << '\n';
    }
}

std::string canonical_dump(const std::vector<RssSample>& samples) {
    std::ostringstream out;
    write_canonical(out, samples);
    return out.str();
}

} // namespace proxtrace::ingest
