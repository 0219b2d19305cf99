#pragma once

#include "proxtrace/ingest/parse.hpp"
#include "proxtrace/ingest/schema.hpp"

#include <string>
#include <utility>
#include <vector>

namespace proxtrace::tools {

/// Samples aggregated from one file or a whole directory tree.
struct LoadedDataset {
    std::vector<ingest::RssSample> samples;
    std::vector<std::pair<std::string, std::string>> digests;   // file -> content hash
    std::size_t rows_seen = 0;
    std::size_t malformed_rows = 0;
    std::size_t files = 0;
};

/// Loads a delimited-text file, or every *.csv/*.tsv/*.txt under a
/// directory in sorted order. Each file is parsed with `schema`; the
/// file's path relative to `path` feeds the schema's path.* extractors and
/// the default session id. Throws the parser's errors (missing column,
/// excess malformed rows) and errc::io_error for unreadable paths.
LoadedDataset load_dataset(const std::string& path, const ingest::SchemaMap& schema);

} // namespace proxtrace::tools
