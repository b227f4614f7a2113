#ifndef ISAC_ARRAY_GEOMETRY_HPP
#define ISAC_ARRAY_GEOMETRY_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace isac {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
};

// Coordinate frame shared by both operating modes: array phase center at the
// origin, elements in the x-z plane, array normal along +y, z up.
//   elevation  = angle from the x-y plane toward +z, in [-90, 90] deg
//   azimuth    = angle from +y toward +x, in [-180, 180] deg
struct FarFieldDirection {
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
};

// A point target close enough that wavefront curvature matters. The split-ULA
// scenarios live in the x-y plane (z = 0), but any position is accepted.
struct NearFieldPoint {
    Vec3 position;
};

struct ArrayLayout {
    enum class Kind { Upa, Ula };
    Kind kind = Kind::Upa;
    std::size_t rows = 0;   // UPA only (along z)
    std::size_t cols = 0;   // UPA only (along x)
    std::size_t count = 0;  // ULA only
    double spacing_wl = 0.5;
};

struct ArrayGeometry {
    std::vector<Vec3> elements;  // meters, phase center = origin
    double wavelength_m = 0.0;
    ArrayLayout layout;
    std::vector<bool> tx_mask;   // duplex arrays: all true
    std::vector<bool> rx_mask;

    std::size_t size() const { return elements.size(); }
    double spacing_m() const { return layout.spacing_wl * wavelength_m; }
    // Largest pairwise element distance; 0 for a single element.
    double aperture_m() const;
    std::vector<std::size_t> tx_indices() const;
    std::vector<std::size_t> rx_indices() const;
};

// Unit vector pointing from the array toward a far-field direction:
// u = (cos(el)*sin(az), cos(el)*cos(az), sin(el)).
Vec3 direction_unit_vector(const FarFieldDirection& dir);

// rows x cols planar grid in the x-z plane, duplex Tx/Rx masks,
// wavelength = c / carrier_hz. Element order is row-major (z outer, x inner).
ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing_wl,
                        double carrier_hz);

// Collinear elements along x, centered at the origin; the first tx_count
// elements (most negative x) transmit, the rest receive.
ArrayGeometry build_split_ula(std::size_t count, double spacing_wl,
                              double carrier_hz, std::size_t tx_count);

// Plane-wave steering vector: entry k = exp(j*(2*pi/lambda) * r_k . u).
std::vector<std::complex<double>> far_field_steering(const ArrayGeometry& geometry,
                                                     const FarFieldDirection& dir);

// Spherical-wavefront differential phases relative to the phase center:
// entry k = exp(j*(2*pi/lambda) * (|pt| - |pt - r_k|)) over the given element
// subset. Converges to far_field_steering as the point recedes.
std::vector<std::complex<double>> near_field_phases(const ArrayGeometry& geometry,
                                                    const NearFieldPoint& pt,
                                                    std::span<const std::size_t> element_indices);

// Convenience overload over all elements in order.
std::vector<std::complex<double>> near_field_phases(const ArrayGeometry& geometry,
                                                    const NearFieldPoint& pt);

} // namespace isac

#endif
