// Round-trip numeric formatting shared by every CSV writer, and a small
// reader for the plot pipeline's trace files.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "krylreg/dense_core.hpp"

namespace krylreg {

// Full round-trip precision decimal (%.17g): parsing it back recovers the
// exact double, and equal inputs give byte-equal text.
std::string format_double(double x);

// One header line naming the columns, then rows of doubles. Lines starting
// with '#' carry human-oriented comments and are skipped wherever they
// appear.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    // Column position by name; throws std::runtime_error when absent.
    Index column(const std::string& name) const;
};

// Throws std::runtime_error naming the file (and line, for cell errors) on
// anything unreadable.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace krylreg
