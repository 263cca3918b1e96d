#include "krylreg/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace krylreg {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Index CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<Index>(i);
    throw std::runtime_error("csv: no column named '" + name + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    long lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            table.columns = split_fields(line);
            have_header = true;
            continue;
        }
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != table.columns.size())
            throw std::runtime_error("csv: " + path.string() + " line " +
                                     std::to_string(lineno) + " has " +
                                     std::to_string(fields.size()) +
                                     " fields, header has " +
                                     std::to_string(table.columns.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0')
                throw std::runtime_error("csv: " + path.string() + " line " +
                                         std::to_string(lineno) +
                                         ": non-numeric cell '" + f + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header)
        throw std::runtime_error("csv: " + path.string() + " has no header");
    return table;
}

}  // namespace krylreg
