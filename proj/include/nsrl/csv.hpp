#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "nsrl/errors.hpp"

namespace nsrl {

/// Full-precision decimal rendering (17 significant digits) so downstream
/// comparisons are exact.
inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path, std::ios::trunc) {
        if (!out_) throw IoError("csv: cannot open " + path);
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    void row_values(const std::vector<double>& vals) {
        std::vector<std::string> cells;
        cells.reserve(vals.size());
        for (double v : vals) cells.push_back(format_full(v));
        row(cells);
    }

private:
    std::ofstream out_;
};

} // namespace nsrl
