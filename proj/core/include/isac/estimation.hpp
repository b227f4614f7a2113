#ifndef ISAC_ESTIMATION_HPP
#define ISAC_ESTIMATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isac/array_geometry.hpp"
#include "isac/dataset.hpp"

namespace isac {

enum class Window { None, Hanning };

Window window_from_name(const std::string& name);

// Symmetric zero-endpoint taper; length 1 degenerates to {1}.
std::vector<double> window_weights(Window kind, std::size_t n);
std::vector<std::complex<double>> apply_window(std::vector<std::complex<double>> v, Window kind);

// Inclusive uniform grid start, start+step, ..., <= stop (+ rounding slack).
std::vector<double> linear_grid(double start, double stop, double step);

struct DetectedTarget {
    double range_m = 0.0;
    std::optional<double> velocity_mps;
    std::optional<double> elevation_deg;
    std::optional<double> azimuth_deg; // split-array bearing also lands here
    double power_db = 0.0;             // relative to the map peak
};

// Joint range-velocity power map from one monostatic port. The 2D transform is
// conjugate-matched to the synthesis phase signs, so a target at (R, v) with
// positive approach velocity peaks at positive (R, v). Velocity axis spans
// (-v_nyq, +v_nyq] so a Nyquist-edge Doppler reads as positive.
struct RangeVelocityMap {
    std::vector<double> velocity_axis; // m/s, monotone increasing (rows)
    std::vector<double> range_axis;    // m, monotone increasing (cols)
    std::vector<double> power_db;      // peak = 0 dB; -inf marks empty cells
    double peak_power_linear = 0.0;
    double total_power_linear = 0.0;   // pre-dB grid power (Parseval checks)
    std::size_t port = 0;
    std::string snapshot_label;
    bool velocity_degenerate = false;  // single time step: range-only profile

    std::size_t rows() const { return velocity_axis.size(); }
    std::size_t cols() const { return range_axis.size(); }
    double db(std::size_t r, std::size_t c) const { return power_db[r * cols() + c]; }
};

RangeVelocityMap range_velocity_map(const CfrDataset& dataset, std::size_t port,
                                    std::size_t pad_time, std::size_t pad_freq, Window window);

struct PeakList {
    std::vector<DetectedTarget> peaks; // descending power
    bool truncated = false;            // fewer maxima than requested
};

// Greedy maxima with a Chebyshev guard-region exclusion around each accepted
// peak. The velocity axis is circular, so the guard wraps across its ends.
PeakList detect_peaks(const RangeVelocityMap& map, std::size_t n_peaks, std::size_t guard_bins);

// Per-port delay-domain vectors at one time step (conjugate-matched transform
// over frequency, zero-padded).
struct DelayProfiles {
    std::vector<double> delay_axis_s;
    std::vector<std::vector<std::complex<double>>> per_port;
};

DelayProfiles delay_profiles(const CfrDataset& dataset, std::size_t time_index,
                             std::size_t pad_freq);

// Continuous counterpart of delay_profiles at one delay hypothesis:
// x_k(tau) = sum_j X[t, f_j, k] * exp(-j*2*pi*f'_j*tau).
std::vector<std::complex<double>> delay_correlate_adtr(const CfrDataset& dataset,
                                                       std::size_t time_index, double tau_s);

// Monostatic per-port signature: elementwise square of the one-way steering
// vector. The squared term halves the beamwidth relative to one-way scanning.
std::vector<std::complex<double>> two_way_signature(const ArrayGeometry& geometry,
                                                    const FarFieldDirection& dir);

// Bartlett power |sum_k conj(b_k) x_k|^2 over the angle grids (linear scale,
// unnormalized), row-major [elevation][azimuth].
std::vector<double> beamform_two_way(std::span<const std::complex<double>> port_values,
                                     const ArrayGeometry& geometry,
                                     const std::vector<double>& elevation_deg,
                                     const std::vector<double>& azimuth_deg);

struct Padp {
    std::vector<double> elevation_deg;
    std::vector<double> azimuth_deg;
    std::vector<double> delay_s;
    std::vector<double> power_db; // [elevation][azimuth][delay], peak = 0 dB
    double peak_power_linear = 0.0;

    double db(std::size_t e, std::size_t a, std::size_t d) const {
        return power_db[(e * azimuth_deg.size() + a) * delay_s.size() + d];
    }
};

Padp padp_beamform(const DelayProfiles& profiles, const ArrayGeometry& geometry,
                   const std::vector<double>& elevation_deg,
                   const std::vector<double>& azimuth_deg);

struct PasSlice {
    std::vector<double> elevation_deg;
    std::vector<double> azimuth_deg;
    std::vector<double> power_db; // relative to the parent PADP peak
    DetectedTarget peak;
};

PasSlice pas_slice(const Padp& padp, std::size_t delay_bin);

// Near-field matched filter over a (range, bearing) grid for split-array
// datasets: spherical Tx/Rx phases plus the round-trip delay phasor, with the
// chosen taper over frequency.
struct RangeAngleMap {
    std::vector<double> range_axis_m;  // rows
    std::vector<double> angle_axis_deg; // cols
    std::vector<double> power_db;      // peak = 0 dB
    double peak_power_linear = 0.0;
    DetectedTarget peak;

    double db(std::size_t r, std::size_t c) const { return power_db[r * angle_axis_deg.size() + c]; }
};

RangeAngleMap joint_range_angle_satr(const CfrDataset& dataset, const ArrayGeometry& geometry,
                                     const std::vector<double>& range_grid_m,
                                     const std::vector<double>& angle_grid_deg, Window window);

} // namespace isac

#endif
