#include "occurlens/csv.hpp"

#include "occurlens/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace occurlens {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            t.header = split_line(line);
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ParseError(path + ": missing header row");
    return t;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::write_header(const std::vector<std::string>& names) {
    write_row(names);
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_.push_back(',');
        buf_ += cells[i];
    }
    buf_.push_back('\n');
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path_ + "'");
    out << buf_;
    if (!out) throw IoError("write failed for '" + path_ + "'");
    closed_ = true;
}

std::string format_sig6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double parse_double_cell(const std::string& cell, const std::string& file, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError(file + ":" + std::to_string(line) + ": bad numeric cell '" + cell + "'");
    return v;
}

long long parse_int_cell(const std::string& cell, const std::string& file, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError(file + ":" + std::to_string(line) + ": bad integer cell '" + cell + "'");
    return v;
}

} // namespace occurlens
