#include "dataset_io.hpp"

#include "proxtrace/error.hpp"
#include "proxtrace/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace proxtrace::tools {

namespace {

bool data_extension(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".csv" || ext == ".tsv" || ext == ".txt";
}

void load_one(const fs::path& file, const std::string& display_name,
              const ingest::SchemaMap& schema, LoadedDataset& out) {
    std::ifstream in(file);
    if (!in) {
        raise(errc::io_error, "cannot open dataset file '" + file.string() + "'");
    }
    auto result = ingest::parse_dataset(in, schema, display_name);
    out.rows_seen += result.rows_seen;
    out.malformed_rows += result.malformed.size();
    out.files += 1;
    out.digests.emplace_back(display_name, file_digest_hex(file.string()));
    out.samples.insert(out.samples.end(), std::make_move_iterator(result.samples.begin()),
                       std::make_move_iterator(result.samples.end()));
}

} // namespace

LoadedDataset load_dataset(const std::string& path, const ingest::SchemaMap& schema) {
    LoadedDataset out;
    const fs::path root(path);
    std::error_code ec;
    if (fs::is_directory(root, ec)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (entry.is_regular_file() && data_extension(entry.path())) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            raise(errc::io_error, "no *.csv/*.tsv/*.txt files under '" + path + "'");
        }
        for (const auto& f : files) {
            load_one(f, fs::relative(f, root).generic_string(), schema, out);
        }
    } else if (fs::is_regular_file(root, ec)) {
        load_one(root, root.filename().generic_string(), schema, out);
    } else {
        raise(errc::io_error, "dataset path '" + path + "' is not a file or directory");
    }
    return out;
}

} // namespace proxtrace::tools
