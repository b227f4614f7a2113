#include "isac/array_geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double ArrayGeometry::aperture_m() const {
    double best = 0.0;
    for (std::size_t i = 0; i < elements.size(); ++i)
        for (std::size_t j = i + 1; j < elements.size(); ++j)
            best = std::max(best, (elements[i] - elements[j]).norm());
    return best;
}

std::vector<std::size_t> ArrayGeometry::tx_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < tx_mask.size(); ++k)
        if (tx_mask[k]) out.push_back(k);
    return out;
}

std::vector<std::size_t> ArrayGeometry::rx_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < rx_mask.size(); ++k)
        if (rx_mask[k]) out.push_back(k);
    return out;
}

Vec3 direction_unit_vector(const FarFieldDirection& dir) {
    const double el = dir.elevation_deg * kPi / 180.0;
    const double az = dir.azimuth_deg * kPi / 180.0;
    return {std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el)};
}

ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing_wl,
                        double carrier_hz) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("build_upa: rows and cols must be >= 1");
    if (spacing_wl <= 0.0) throw std::invalid_argument("build_upa: spacing must be positive");
    if (carrier_hz <= 0.0) throw std::invalid_argument("build_upa: carrier must be positive");

    ArrayGeometry g;
    g.wavelength_m = kSpeedOfLight / carrier_hz;
    g.layout = {ArrayLayout::Kind::Upa, rows, cols, rows * cols, spacing_wl};

    const double d = spacing_wl * g.wavelength_m;
    const double x0 = 0.5 * static_cast<double>(cols - 1);
    const double z0 = 0.5 * static_cast<double>(rows - 1);
    g.elements.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            g.elements.push_back({(static_cast<double>(c) - x0) * d, 0.0,
                                  (static_cast<double>(r) - z0) * d});

    g.tx_mask.assign(g.elements.size(), true);
    g.rx_mask.assign(g.elements.size(), true);
    return g;
}

ArrayGeometry build_split_ula(std::size_t count, double spacing_wl,
                              double carrier_hz, std::size_t tx_count) {
    if (count < 2) throw std::invalid_argument("build_split_ula: need at least 2 elements");
    if (spacing_wl <= 0.0) throw std::invalid_argument("build_split_ula: spacing must be positive");
    if (carrier_hz <= 0.0) throw std::invalid_argument("build_split_ula: carrier must be positive");
    if (tx_count < 1 || tx_count >= count)
        throw std::invalid_argument("build_split_ula: tx_count must satisfy 1 <= tx_count < count");

    ArrayGeometry g;
    g.wavelength_m = kSpeedOfLight / carrier_hz;
    g.layout = {ArrayLayout::Kind::Ula, 0, 0, count, spacing_wl};

    const double d = spacing_wl * g.wavelength_m;
    const double x0 = 0.5 * static_cast<double>(count - 1);
    g.elements.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        g.elements.push_back({(static_cast<double>(k) - x0) * d, 0.0, 0.0});

    g.tx_mask.assign(count, false);
    g.rx_mask.assign(count, false);
    for (std::size_t k = 0; k < count; ++k) {
        if (k < tx_count)
            g.tx_mask[k] = true;
        else
            g.rx_mask[k] = true;
    }
    return g;
}

std::vector<std::complex<double>> far_field_steering(const ArrayGeometry& geometry,
                                                     const FarFieldDirection& dir) {
    if (dir.elevation_deg < -90.0 || dir.elevation_deg > 90.0 ||
        dir.azimuth_deg < -180.0 || dir.azimuth_deg > 180.0)
        throw std::invalid_argument("far_field_steering: direction out of range");

    const Vec3 u = direction_unit_vector(dir);
    const double k0 = 2.0 * kPi / geometry.wavelength_m;
    std::vector<std::complex<double>> s;
    s.reserve(geometry.size());
    for (const Vec3& r : geometry.elements)
        s.push_back(std::polar(1.0, k0 * r.dot(u)));
    return s;
}

std::vector<std::complex<double>> near_field_phases(const ArrayGeometry& geometry,
                                                    const NearFieldPoint& pt,
                                                    std::span<const std::size_t> element_indices) {
    const double d0 = pt.position.norm();
    if (d0 <= 0.0) throw std::invalid_argument("near_field_phases: point at the phase center");

    const double k0 = 2.0 * kPi / geometry.wavelength_m;
    std::vector<std::complex<double>> s;
    s.reserve(element_indices.size());
    for (std::size_t k : element_indices) {
        const double dk = (pt.position - geometry.elements.at(k)).norm();
        if (dk < 1e-12)
            throw std::invalid_argument("near_field_phases: point coincides with an element");
        s.push_back(std::polar(1.0, k0 * (d0 - dk)));
    }
    return s;
}

std::vector<std::complex<double>> near_field_phases(const ArrayGeometry& geometry,
                                                    const NearFieldPoint& pt) {
    std::vector<std::size_t> all(geometry.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return near_field_phases(geometry, pt, all);
}

} // namespace isac
