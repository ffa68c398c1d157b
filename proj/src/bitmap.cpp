#include "latticeecho/bitmap.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "latticeecho/error.hpp"

namespace latticeecho {

std::size_t BinaryGrid::count_marked() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

namespace {

bool skippable(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
}

}  // namespace

BinaryGrid parse_bitmap(std::istream& in) {
    std::string line;
    int line_no = 0;
    bool have_header = false;
    BinaryGrid grid;
    int row = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::istringstream fields(line);
        if (!have_header) {
            std::string magic;
            long rows = 0;
            long cols = 0;
            std::string extra;
            if (!(fields >> magic >> rows >> cols) || magic != "P-GRID" || (fields >> extra))
                throw ParseError("expected header 'P-GRID <rows> <cols>'", line_no);
            if (rows <= 0 || cols <= 0 || rows > 1 << 15 || cols > 1 << 15)
                throw ParseError("grid dimensions must be positive", line_no);
            grid.rows = static_cast<int>(rows);
            grid.cols = static_cast<int>(cols);
            grid.cells.reserve(static_cast<std::size_t>(rows) * cols);
            have_header = true;
            continue;
        }
        if (row >= grid.rows) throw ParseError("more rows than declared in the header", line_no);
        std::string token;
        int count = 0;
        while (fields >> token) {
            if (token != "0" && token != "1")
                throw ParseError("invalid token '" + token + "', expected 0 or 1", line_no);
            if (++count > grid.cols) throw ParseError("row longer than declared width", line_no);
            grid.cells.push_back(token == "1" ? 1 : 0);
        }
        if (count != grid.cols)
            throw ParseError("row has " + std::to_string(count) + " cells, expected " +
                                 std::to_string(grid.cols),
                             line_no);
        ++row;
    }
    if (!have_header) throw ParseError("missing P-GRID header", std::max(line_no, 1));
    if (row != grid.rows)
        throw ParseError("expected " + std::to_string(grid.rows) + " rows, found " +
                             std::to_string(row),
                         line_no);
    return grid;
}

BinaryGrid load_bitmap(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open bitmap " + path.string());
    try {
        return parse_bitmap(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.message(), e.line());
    }
}

void write_bitmap(std::ostream& out, const BinaryGrid& grid) {
    out << "P-GRID " << grid.rows << ' ' << grid.cols << '\n';
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) out << (c ? " " : "") << (grid.at(r, c) ? '1' : '0');
        out << '\n';
    }
}

}  // namespace latticeecho
