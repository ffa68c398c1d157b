#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace latticeecho {

// Every floating-point value written by the tools goes through this:
// 17 significant digits, so outputs round-trip bit-exactly.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
// header = false reads a bare numeric grid.
CsvTable read_csv(const std::filesystem::path& path, bool header = true);

// Plain 8-bit graymap (P2), values scaled so the frame maximum maps to 255.
void write_pgm(const std::filesystem::path& path, int rows, int cols, const std::vector<double>& values);

struct Graymap {
    int rows = 0;
    int cols = 0;
    int maxval = 0;
    std::vector<int> pixels;
};

Graymap read_pgm(const std::filesystem::path& path);

}  // namespace latticeecho
