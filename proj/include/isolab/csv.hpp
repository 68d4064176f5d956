#ifndef ISOLAB_CSV_HPP
#define ISOLAB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "isolab/errors.hpp"

namespace isolab {

// All floating point values are printed with 17 significant digits so that
// round-trips and byte-level diffs of exported data are exact.
inline std::string fp17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw IoError("cannot open " + path);
        write_row_strings(header);
    }

    void field(double v) { row_.push_back(fp17(v)); }
    void field(int v) { row_.push_back(std::to_string(v)); }
    void field(std::size_t v) { row_.push_back(std::to_string(v)); }
    void field(const std::string& v) { row_.push_back(v); }

    void end_row() {
        write_row_strings(row_);
        row_.clear();
    }

private:
    void write_row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::vector<std::string> row_;
};

} // namespace isolab

#endif
