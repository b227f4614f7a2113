#include "isac/heatmap_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace isac {

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + path.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

void write_heatmap_csv(const std::filesystem::path& path, const std::string& row_axis_name,
                       const std::vector<double>& row_values, const std::string& col_axis_name,
                       const std::vector<double>& col_values, const std::vector<double>& db_grid,
                       double floor_db) {
    if (db_grid.size() != row_values.size() * col_values.size())
        throw std::invalid_argument("write_heatmap_csv: grid size mismatch");

    std::ostringstream out;
    out.precision(10);
    out << row_axis_name << "\\" << col_axis_name;
    for (double c : col_values) out << "," << c;
    out << "\n";
    for (std::size_t r = 0; r < row_values.size(); ++r) {
        out << row_values[r];
        for (std::size_t c = 0; c < col_values.size(); ++c) {
            const double v = std::max(db_grid[r * col_values.size() + c], floor_db);
            out << "," << v;
        }
        out << "\n";
    }
    atomic_write(path, out.str());
}

void write_heatmap_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                       const std::vector<double>& db_grid, double dynamic_range_db) {
    if (db_grid.size() != rows * cols) throw std::invalid_argument("write_heatmap_pgm: grid size mismatch");
    if (dynamic_range_db <= 0.0) throw std::invalid_argument("write_heatmap_pgm: bad dynamic range");

    double peak = -std::numeric_limits<double>::infinity();
    for (double v : db_grid) peak = std::max(peak, v);
    if (!std::isfinite(peak)) peak = 0.0;

    std::string bytes;
    bytes += "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    bytes.reserve(bytes.size() + rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t rr = rows - 1 - r; // y-up
        for (std::size_t c = 0; c < cols; ++c) {
            double v = db_grid[rr * cols + c];
            if (!std::isfinite(v)) v = peak - dynamic_range_db;
            const double t = std::clamp((v - (peak - dynamic_range_db)) / dynamic_range_db, 0.0, 1.0);
            bytes.push_back(static_cast<char>(std::lround(t * 255.0)));
        }
    }
    atomic_write(path, bytes);
}

} // namespace isac
