#ifndef ISAC_SCENARIO_HPP
#define ISAC_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "isac/array_geometry.hpp"

namespace isac {

enum class Mode : std::uint8_t { Adtr = 1, Satr = 2 };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// APM hardware settings. ideal=true disables both phase and amplitude
// quantization; amp_step_db = 0 leaves amplitudes continuous.
struct Quantization {
    bool ideal = false;
    int phase_bits = 6;
    double amp_step_db = 0.5;
};

struct NoiseSpec {
    std::optional<double> snr_db; // unset = noiseless
    std::uint64_t seed = 0;
};

// Single-angle bearing in the split-array frame: measured from the array
// normal (+y) toward +x, degrees.
struct PlanarBearing {
    double angle_deg = 0.0;
};

struct TargetState {
    double range_m = 0.0;
    double radial_velocity_mps = 0.0; // positive = approaching
    std::variant<FarFieldDirection, PlanarBearing> direction;
    std::optional<double> gain_db; // normalized two-way channel gain
    std::optional<double> rcs_m2;  // alternative: radar cross-section

    bool is_far_field() const { return std::holds_alternative<FarFieldDirection>(direction); }
    const FarFieldDirection& far_field() const { return std::get<FarFieldDirection>(direction); }
    const PlanarBearing& bearing() const { return std::get<PlanarBearing>(direction); }
    // Split-array target position (R*sin(a), R*cos(a), 0).
    NearFieldPoint near_field_point() const;
};

struct Snapshot {
    std::string label;
    std::vector<TargetState> targets;
};

struct ArrayParams {
    ArrayLayout::Kind kind = ArrayLayout::Kind::Upa;
    std::size_t rows = 4;
    std::size_t cols = 8;
    std::size_t count = 16;   // split ULA
    std::size_t tx_count = 8; // split ULA
    double spacing_wl = 0.5;
};

struct SensingScenario {
    Mode mode = Mode::Adtr;
    ArrayParams array;
    double carrier_hz = 3.5e9;
    double bandwidth_hz = 40e6;
    std::size_t n_freq = 251;
    std::size_t n_time = 256; // 1 for static split-array runs
    Quantization quantization;
    NoiseSpec noise;
    bool range_migration = false; // per-sample delay update within a snapshot
    std::vector<Snapshot> snapshots;

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    double freq_step_hz() const;
    ArrayGeometry make_geometry() const;
};

// Monostatic round-trip delay, tau = 2R/c.
double delay_of(double range_m);

// Monostatic Doppler, nu = 2v/lambda; sign of v preserved.
double doppler_of(double radial_velocity_mps, double wavelength_m);

// Two-way power gain from the radar equation: sigma*lambda^2 / ((4*pi)^3 * R^4).
double rcs_to_gain(double rcs_m2, double range_m, double wavelength_m);

// Amplitude (voltage) gain for a target; gain_db is a power-dB quantity.
double target_amplitude(const TargetState& t, double wavelength_m);

// CIR update interval: 1/(2*max Doppler) over the snapshot, 1 ms when static.
double snapshot_update_interval_s(const SensingScenario& s, const Snapshot& snap);

struct Violation {
    std::string path;    // e.g. "snapshots[1].targets[0].range_m"
    std::string message;
};

// Checks every scenario invariant plus the delay-ambiguity and Doppler-rate
// bounds. Returns an empty list when the scenario is acceptable; never throws.
std::vector<Violation> validate_scenario(const SensingScenario& s);

// Scenario file format: JSON with the documented key set (see README).
// save -> load -> save is byte-identical.
SensingScenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const SensingScenario& s);
SensingScenario load_scenario(const std::filesystem::path& path);
void save_scenario(const SensingScenario& s, const std::filesystem::path& path);

} // namespace isac

#endif
