#include "isac/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

const char* mode_name(Mode m) { return m == Mode::Adtr ? "ADTR" : "SATR"; }

Mode mode_from_name(const std::string& name) {
    if (name == "ADTR") return Mode::Adtr;
    if (name == "SATR") return Mode::Satr;
    throw std::invalid_argument("unknown mode: " + name);
}

NearFieldPoint TargetState::near_field_point() const {
    const double a = bearing().angle_deg * kPi / 180.0;
    return {{range_m * std::sin(a), range_m * std::cos(a), 0.0}};
}

double SensingScenario::freq_step_hz() const {
    if (n_freq < 2) return 0.0;
    return bandwidth_hz / static_cast<double>(n_freq - 1);
}

ArrayGeometry SensingScenario::make_geometry() const {
    if (array.kind == ArrayLayout::Kind::Upa)
        return build_upa(array.rows, array.cols, array.spacing_wl, carrier_hz);
    return build_split_ula(array.count, array.spacing_wl, carrier_hz, array.tx_count);
}

double delay_of(double range_m) {
    if (range_m <= 0.0) throw std::invalid_argument("delay_of: range must be positive");
    return 2.0 * range_m / kSpeedOfLight;
}

double doppler_of(double radial_velocity_mps, double wavelength_m) {
    if (wavelength_m <= 0.0) throw std::invalid_argument("doppler_of: wavelength must be positive");
    return 2.0 * radial_velocity_mps / wavelength_m;
}

double rcs_to_gain(double rcs_m2, double range_m, double wavelength_m) {
    if (rcs_m2 <= 0.0 || range_m <= 0.0 || wavelength_m <= 0.0)
        throw std::invalid_argument("rcs_to_gain: all arguments must be positive");
    const double four_pi = 4.0 * kPi;
    return rcs_m2 * wavelength_m * wavelength_m /
           (four_pi * four_pi * four_pi * range_m * range_m * range_m * range_m);
}

double target_amplitude(const TargetState& t, double wavelength_m) {
    if (t.gain_db.has_value()) return std::pow(10.0, *t.gain_db / 20.0);
    if (t.rcs_m2.has_value()) return std::sqrt(rcs_to_gain(*t.rcs_m2, t.range_m, wavelength_m));
    throw std::invalid_argument("target has neither gain_db nor rcs_m2");
}

double snapshot_update_interval_s(const SensingScenario& s, const Snapshot& snap) {
    double nu_max = 0.0;
    for (const TargetState& t : snap.targets)
        nu_max = std::max(nu_max, std::abs(doppler_of(t.radial_velocity_mps, s.wavelength_m())));
    if (nu_max <= 0.0) return 1e-3;
    return 1.0 / (2.0 * nu_max);
}

namespace {

void check_target(const SensingScenario& s, const TargetState& t, const std::string& path,
                  std::vector<Violation>& out) {
    if (!(t.range_m > 0.0) || !std::isfinite(t.range_m))
        out.push_back({path + ".range_m", "must be positive and finite"});
    if (!std::isfinite(t.radial_velocity_mps))
        out.push_back({path + ".radial_velocity_mps", "must be finite"});
    const int set = (t.gain_db.has_value() ? 1 : 0) + (t.rcs_m2.has_value() ? 1 : 0);
    if (set != 1)
        out.push_back({path, "exactly one of gain_db / rcs_m2 must be set"});
    if (t.gain_db && !std::isfinite(*t.gain_db))
        out.push_back({path + ".gain_db", "must be finite"});
    if (t.rcs_m2 && !(*t.rcs_m2 > 0.0))
        out.push_back({path + ".rcs_m2", "must be positive"});

    if (s.mode == Mode::Adtr) {
        if (!t.is_far_field()) {
            out.push_back({path, "ADTR targets need elevation_deg/azimuth_deg"});
        } else {
            const FarFieldDirection& d = t.far_field();
            if (d.elevation_deg < -90.0 || d.elevation_deg > 90.0)
                out.push_back({path + ".elevation_deg", "must lie in [-90, 90]"});
            if (d.azimuth_deg < -180.0 || d.azimuth_deg > 180.0)
                out.push_back({path + ".azimuth_deg", "must lie in [-180, 180]"});
        }
    } else {
        if (t.is_far_field())
            out.push_back({path, "SATR targets need angle_deg"});
    }
}

} // namespace

std::vector<Violation> validate_scenario(const SensingScenario& s) {
    std::vector<Violation> out;

    if (s.carrier_hz <= 0.0) out.push_back({"sweep.carrier_hz", "must be positive"});
    if (s.bandwidth_hz <= 0.0) out.push_back({"sweep.bandwidth_hz", "must be positive"});
    if (s.n_freq < 2) out.push_back({"sweep.n_freq", "need >= 2 frequency points for range estimation"});
    if (s.n_time < 1) out.push_back({"sweep.n_time", "must be >= 1"});
    if (s.mode == Mode::Satr && s.n_time != 1)
        out.push_back({"sweep.n_time", "split-array acquisition is static (n_time must be 1)"});
    if (!s.quantization.ideal) {
        if (s.quantization.phase_bits < 1)
            out.push_back({"quantization.phase_bits", "must be >= 1"});
        if (s.quantization.amp_step_db < 0.0)
            out.push_back({"quantization.amp_step_db", "must be >= 0"});
    }
    if (s.array.spacing_wl <= 0.0) out.push_back({"array.spacing_wl", "must be positive"});
    if (s.array.kind == ArrayLayout::Kind::Upa) {
        if (s.array.rows < 1 || s.array.cols < 1)
            out.push_back({"array", "UPA needs rows, cols >= 1"});
    } else {
        if (s.array.count < 2 || s.array.tx_count < 1 || s.array.tx_count >= s.array.count)
            out.push_back({"array", "split ULA needs 1 <= tx_count < count"});
    }

    if (s.snapshots.empty()) out.push_back({"snapshots", "at least one snapshot required"});

    std::size_t first_count = s.snapshots.empty() ? 0 : s.snapshots.front().targets.size();
    for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
        const Snapshot& snap = s.snapshots[i];
        const std::string base = "snapshots[" + std::to_string(i) + "]";
        if (snap.targets.empty()) {
            out.push_back({base + ".targets", "at least one target required"});
            continue;
        }
        if (snap.targets.size() != first_count)
            out.push_back({base + ".targets", "target count must be constant across snapshots"});
        for (std::size_t j = 0; j < snap.targets.size(); ++j)
            check_target(s, snap.targets[j], base + ".targets[" + std::to_string(j) + "]", out);
    }
    if (!out.empty()) return out;

    // Physical bounds. Delay-unambiguous window is 1/df; the CIR update rate
    // 1/dt supports |nu| up to 1/(2*dt), attained at the Nyquist-edge bin.
    const double df = s.freq_step_hz();
    for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
        const Snapshot& snap = s.snapshots[i];
        const std::string base = "snapshots[" + std::to_string(i) + "]";
        const double dt = snapshot_update_interval_s(s, snap);
        for (std::size_t j = 0; j < snap.targets.size(); ++j) {
            const TargetState& t = snap.targets[j];
            const std::string path = base + ".targets[" + std::to_string(j) + "]";
            if (df > 0.0 && delay_of(t.range_m) >= 1.0 / df)
                out.push_back({path + ".range_m",
                               "round-trip delay exceeds the unambiguous window 1/df (max range " +
                                   std::to_string(kSpeedOfLight / (2.0 * df)) + " m)"});
            const double nu = std::abs(doppler_of(t.radial_velocity_mps, s.wavelength_m()));
            if (nu * 2.0 * dt > 1.0 + 1e-9)
                out.push_back({path + ".radial_velocity_mps",
                               "Doppler exceeds half the CIR update rate"});
        }
    }
    return out;
}

} // namespace isac
