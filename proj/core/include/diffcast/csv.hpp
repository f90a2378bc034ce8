#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace diffcast {

/// Numeric CSV with a header row. Values are written with 17 significant
/// digits so a read-back reproduces them exactly.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void write(const std::vector<double>& row);

private:
    std::FILE* file_ = nullptr;
    std::size_t columns_ = 0;
    std::filesystem::path path_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace diffcast
