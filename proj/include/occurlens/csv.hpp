#pragma once

#include <optional>
#include <string>
#include <vector>

namespace occurlens {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
};

// Reads a comma-separated UTF-8 file with a header row. Throws ParseError with
// a line number on ragged rows; empty cells are kept as empty strings.
CsvTable read_csv(const std::string& path);

class CsvWriter {
public:
    explicit CsvWriter(std::string path);
    void write_header(const std::vector<std::string>& names);
    void write_row(const std::vector<std::string>& cells);
    void close();

private:
    std::string path_;
    std::string buf_;
    bool closed_ = false;
};

// Formats with 6 significant digits, the print precision of every report CSV.
std::string format_sig6(double v);

double parse_double_cell(const std::string& cell, const std::string& file, std::size_t line);
long long parse_int_cell(const std::string& cell, const std::string& file, std::size_t line);

} // namespace occurlens
