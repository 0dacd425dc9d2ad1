#include "agmmn/io.hpp"

#include "agmmn/copula.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace agmmn {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, int line_no) {
    const std::string cell = trim(raw);
    if (cell.empty()) throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": missing value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE) {
        throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CsvTable read_numeric_csv(const std::filesystem::path& path, Index min_rows) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    int line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (table.header.empty()) {
            for (auto& c : cells) table.header.push_back(trim(c));
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header.size()) + " cells, found " +
                                        std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
        rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw std::invalid_argument("'" + path.string() + "' is empty");
    if (static_cast<Index>(rows.size()) < min_rows) {
        throw std::invalid_argument("'" + path.string() + "' has " + std::to_string(rows.size()) +
                                    " data rows, at least " + std::to_string(min_rows) + " needed");
    }
    table.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) table.data(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return table;
}

IngestResult ingest_csv_detailed(const std::filesystem::path& path) {
    CsvTable table = read_numeric_csv(path, 2);
    IngestResult out;
    out.columns = std::move(table.header);
    const bool inside = (table.data.array() > 0.0).all() && (table.data.array() < 1.0).all();
    if (inside) {
        out.u = std::move(table.data);
    } else {
        out.u = pseudo_obs(table.data);
        out.rank_transformed = true;
    }
    return out;
}

Matrix ingest_csv(const std::filesystem::path& path) {
    IngestResult r = ingest_csv_detailed(path);
    if (r.rank_transformed) {
        std::cerr << "warning: '" << path.string() << "' has values outside (0,1); using pseudo-observations\n";
    }
    return std::move(r.u);
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& data) {
    if (static_cast<Index>(header.size()) != data.cols()) throw DimensionError("CSV header width differs from data");
    std::string text;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) text += ',';
        text += header[j];
    }
    text += '\n';
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j) {
            if (j) text += ',';
            text += format_double(data(i, j));
        }
        text += '\n';
    }
    write_text_file(path, text);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace agmmn
