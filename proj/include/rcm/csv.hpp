// Minimal CSV writing/reading. Writes are atomic (temp file + rename) and
// numeric formatting is fixed at %.17g, so identical data produces identical
// bytes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcm {

class CsvWriter {
  public:
    void set_header(const std::vector<std::string>& names);
    void begin_row();
    void add(double v);
    void add(std::uint64_t v);
    void add(std::uint32_t v) { add(static_cast<std::uint64_t>(v)); }
    void add(int v);
    void add(const std::string& s);

    const std::string& buffer() const { return buf_; }
    void write_atomic(const std::string& path) const;

  private:
    std::string buf_;
    bool row_open_ = false;
    bool first_field_ = true;

    void field_sep();
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; throws if absent.
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, std::size_t col) const;
};

// Throws std::runtime_error with a line number on malformed input (ragged
// rows) or a missing file.
CsvTable read_csv(const std::string& path);

// Atomic text write used for manifests and summaries as well.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace rcm
