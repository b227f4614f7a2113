#ifndef ISAC_HEATMAP_IO_HPP
#define ISAC_HEATMAP_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace isac {

// Labeled-matrix CSV: first row holds the column axis (leading empty cell),
// each following row starts with its row-axis value. dB values are clamped at
// floor_db (default -120) to keep the file finite.
void write_heatmap_csv(const std::filesystem::path& path, const std::string& row_axis_name,
                       const std::vector<double>& row_values, const std::string& col_axis_name,
                       const std::vector<double>& col_values, const std::vector<double>& db_grid,
                       double floor_db = -120.0);

// Binary 8-bit PGM (P5). The dB grid maps linearly onto [0, 255] over
// [peak - dynamic_range_db, peak]; row 0 is the last row axis value so images
// read with the conventional y-up orientation.
void write_heatmap_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                       const std::vector<double>& db_grid, double dynamic_range_db = 50.0);

} // namespace isac

#endif
