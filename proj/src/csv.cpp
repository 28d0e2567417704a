#include "rcm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcm {

void CsvWriter::field_sep() {
    if (!first_field_) buf_ += ',';
    first_field_ = false;
}

void CsvWriter::set_header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += names[i];
    }
    buf_ += '\n';
}

void CsvWriter::begin_row() {
    if (row_open_) buf_ += '\n';
    row_open_ = true;
    first_field_ = true;
}

void CsvWriter::add(double v) {
    field_sep();
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    buf_ += tmp;
}

void CsvWriter::add(std::uint64_t v) {
    field_sep();
    buf_ += std::to_string(v);
}

void CsvWriter::add(int v) {
    field_sep();
    buf_ += std::to_string(v);
}

void CsvWriter::add(const std::string& s) {
    field_sep();
    buf_ += s;
}

void CsvWriter::write_atomic(const std::string& path) const {
    std::string out = buf_;
    if (row_open_) out += '\n';
    write_text_atomic(path, out);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
        f << content;
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv: missing column " + name);
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    return std::stod(rows.at(row).at(col));
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (lineno == 1) {
            t.header = fields;
        } else {
            if (fields.size() != t.header.size())
                throw std::runtime_error(path + ": ragged row at line " +
                                         std::to_string(lineno));
            t.rows.push_back(fields);
        }
    }
    if (t.header.empty()) throw std::runtime_error(path + ": empty file");
    return t;
}

}  // namespace rcm
