#include "diffcast/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace diffcast {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : columns_(header.size()), path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_ = std::fopen(path.string().c_str(), "w");
    if (!file_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(file_, i ? ",%s" : "%s", header[i].c_str());
    std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(file_);
}

void CsvWriter::write(const std::vector<double>& row) {
    if (row.size() != columns_) throw std::invalid_argument("CsvWriter: row width does not match header of " + path_.string());
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) std::fputc(',', file_);
        std::fprintf(file_, "%.17g", row[i]);
    }
    std::fputc('\n', file_);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("CSV has no column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
    {
        std::istringstream is(line);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
            table.columns.push_back(tok);
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        row.reserve(table.columns.size());
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = std::find(p, end, ',');
            const char* tail = comma;
            while (tail > p && (tail[-1] == '\r' || tail[-1] == ' ')) --tail;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(p, tail, v);
            if (ec != std::errc{} || ptr != tail) {
                // from_chars rejects "inf"/"nan" spellings printed by printf.
                std::string tok(p, tail);
                if (tok == "nan" || tok == "-nan") v = std::nan("");
                else if (tok == "inf") v = INFINITY;
                else if (tok == "-inf") v = -INFINITY;
                else throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
            }
            row.push_back(v);
            if (comma == end) break;
            p = comma + 1;
        }
        if (row.size() != table.columns.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.columns.size()) + " fields");
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace diffcast
