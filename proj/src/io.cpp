#include "latticeecho/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "latticeecho/error.hpp"

namespace latticeecho {

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto out = open_for_writing(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    if (!header.empty()) out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path, bool header) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    CsvTable table;
    std::string line;
    int line_no = 0;
    if (header) {
        if (!std::getline(in, line)) throw ParseError(path.string() + ": empty CSV", 1);
        ++line_no;
        table.header = split_csv(line);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& field : split_csv(line)) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(field, &used));
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw ParseError(path.string() + ": bad number '" + field + "'", line_no);
            }
        }
        if (header && row.size() != table.header.size())
            throw ParseError(path.string() + ": column count differs from header", line_no);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_pgm(const std::filesystem::path& path, int rows, int cols, const std::vector<double>& values) {
    if (static_cast<std::size_t>(rows) * cols != values.size())
        throw InvalidInput("graymap dimensions do not match the data");
    const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    auto out = open_for_writing(path);
    out << "P2\n" << cols << ' ' << rows << "\n255\n";
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = values[static_cast<std::size_t>(r) * cols + c];
            const int level = peak > 0.0 ? static_cast<int>(std::lround(255.0 * v / peak)) : 0;
            out << (c ? " " : "") << level;
        }
        out << '\n';
    }
}

Graymap read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::string magic;
    Graymap g;
    if (!(in >> magic >> g.cols >> g.rows >> g.maxval) || magic != "P2")
        throw ParseError(path.string() + ": not a plain graymap", 1);
    g.pixels.resize(static_cast<std::size_t>(g.rows) * g.cols);
    for (auto& p : g.pixels)
        if (!(in >> p) || p < 0 || p > g.maxval) throw ParseError(path.string() + ": bad pixel", 0);
    return g;
}

}  // namespace latticeecho
