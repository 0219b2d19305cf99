#pragma once

#include "proxtrace/ingest/sample.hpp"
#include "proxtrace/ingest/schema.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace proxtrace::ingest {

struct RowError {
    std::size_t line;    // 1-based, header is line 1
    std::string reason;
};

struct ParseResult {
    std::vector<RssSample> samples;
    std::vector<RowError> malformed;
    std::size_t rows_seen = 0;   // data rows, well-formed or not
};

/// Parses one delimited-text table. The delimiter comes from the schema or
/// is auto-detected from the header line (comma vs tab). Throws
/// errc::missing_column when the schema names a column the header lacks.
/// Malformed rows (non-numeric rss/distance, unknown position, domain
/// violations) are collected and skipped; the parse fails with
/// errc::malformed_data only when they exceed `max_malformed_fraction`
/// (default 1%).
ParseResult parse_dataset(std::istream& in, const SchemaMap& schema,
                          const std::string& source_name = "<stream>",
                          double max_malformed_fraction = 0.01);

/// Canonical sample dump. Fixed header
/// `rss_dbm,distance_m,position_pair,device_kind,session_id,t_offset_s`;
/// t_offset_s left empty when absent. Parsing the dump with
/// canonical_schema() reproduces the samples exactly.
void write_canonical(std::ostream& out, const std::vector<RssSample>& samples);
std::string canonical_dump(const std::vector<RssSample>& samples);

/// Formats a double with enough digits to round-trip exactly (%.17g,
/// trailing-zero trimmed when shorter forms survive the round trip).
std::string format_double(double v);

} // namespace proxtrace::ingest
