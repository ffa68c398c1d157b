#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <vector>

namespace latticeecho {

// Rectangular 0/1 grid read from the plain-text `P-GRID` format:
//
//   P-GRID <rows> <cols>
//   0 1 1 0 ...
//
// one line per row, whitespace separated. Blank lines and lines starting
// with '#' are skipped.
struct BinaryGrid {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> cells;  // row-major

    bool at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c] != 0; }
    std::size_t count_marked() const;
};

BinaryGrid parse_bitmap(std::istream& in);
BinaryGrid load_bitmap(const std::filesystem::path& path);
void write_bitmap(std::ostream& out, const BinaryGrid& grid);

}  // namespace latticeecho
