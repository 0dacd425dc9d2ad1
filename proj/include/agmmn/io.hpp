#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agmmn/common.hpp"

namespace agmmn {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double value);

struct CsvTable {
    std::vector<std::string> header;
    Matrix data;
};

/// Comma-separated numeric table with a header row. Throws
/// std::invalid_argument on ragged rows, non-numeric or missing cells, or
/// fewer than `min_rows` data rows.
CsvTable read_numeric_csv(const std::filesystem::path& path, Index min_rows = 1);

struct IngestResult {
    Matrix u;
    std::vector<std::string> columns;
    bool rank_transformed = false;
};

/// Reads a dataset for training. Entries outside (0,1) trigger a
/// pseudo-observation transform (with a warning on stderr).
IngestResult ingest_csv_detailed(const std::filesystem::path& path);
Matrix ingest_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& data);

/// Writes `text` to `path` in one go (binary mode, no newline translation).
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace agmmn
