#pragma once

#include <istream>
#include <optional>
#include <string>

namespace proxtrace::ingest {

/// Column mapping for one dataset family. The public corpora do not share
/// a fixed header, so ingestion is driven by this user-editable config
/// instead of hard-coded column names.
///
/// Key=value text, `#` comments. Recognized keys:
///   col.rss         column holding RSS in dBm            (required unless const.rss)
///   col.distance    column holding ground-truth meters   (required unless const/path)
///   col.position    column holding the position pair     (required unless const/path)
///   col.time        column holding seconds since session start (optional)
///   col.session     column holding a session key (optional; defaults to source name)
///   delimiter       single character; auto-detected from the header when absent
///   const.distance  fixed distance for every row of a file
///   const.position  fixed position pair for every row of a file
///   path.distance   ECMAScript regex with one capture group, applied to the
///                   source name, yielding the distance (e.g. "([0-9.]+)m")
///   path.position   same, yielding the position token
///
/// A col.* value of the form `$N` addresses the N-th column (1-based) of a
/// headerless file; named and $indexed columns cannot be mixed.
struct SchemaMap {
    std::optional<std::string> col_rss;
    std::optional<std::string> col_distance;
    std::optional<std::string> col_position;
    std::optional<std::string> col_time;
    std::optional<std::string> col_session;
    std::optional<char> delimiter;
    std::optional<double> const_distance;
    std::optional<std::string> const_position;
    std::optional<std::string> path_distance;
    std::optional<std::string> path_position;
};

/// Parses schema text. Throws errc::config_invalid on unknown keys or
/// malformed lines.
SchemaMap parse_schema(std::istream& in);
SchemaMap load_schema(const std::string& path);

/// Schema matching the canonical sample dump emitted by this tool.
SchemaMap canonical_schema();

} // namespace proxtrace::ingest
