#ifndef ISAC_TEST_HELPERS_HPP
#define ISAC_TEST_HELPERS_HPP

#include "isac/scenario.hpp"

namespace isac_test {

// Two-drone duplex-mode scenario: three snapshots, 4x8 half-wavelength UPA at
// 3.5 GHz, 40 MHz sweep. Sizes default to the scaled run.
inline isac::SensingScenario adtr_two_drone_scenario(std::size_t nt = 256, std::size_t nf = 251,
                                                     bool ideal_quantization = true) {
    using namespace isac;
    SensingScenario s;
    s.mode = Mode::Adtr;
    s.array.kind = ArrayLayout::Kind::Upa;
    s.array.rows = 4;
    s.array.cols = 8;
    s.array.spacing_wl = 0.5;
    s.carrier_hz = 3.5e9;
    s.bandwidth_hz = 40e6;
    s.n_time = nt;
    s.n_freq = nf;
    s.quantization.ideal = ideal_quantization;
    s.quantization.phase_bits = 6;
    s.quantization.amp_step_db = 0.5;

    auto target = [](double range, double vel, double el, double az, double gain) {
        TargetState t;
        t.range_m = range;
        t.radial_velocity_mps = vel;
        t.direction = FarFieldDirection{el, az};
        t.gain_db = gain;
        return t;
    };
    s.snapshots = {
        {"t1", {target(50, 7, 50, -20, -5), target(155, 5, 0, 0, -25)}},
        {"t2", {target(26, 2, 20, 10, 0), target(125, 10, 0, 0, -20)}},
        {"t3", {target(38, 10, -10, 30, -3), target(110, 15, 0, 0, -13)}},
    };
    return s;
}

// Static near-field scenario: 1x16 split ULA, single drone at 3 m / 30 deg.
inline isac::SensingScenario satr_single_drone_scenario(std::size_t nf = 251) {
    using namespace isac;
    SensingScenario s;
    s.mode = Mode::Satr;
    s.array.kind = ArrayLayout::Kind::Ula;
    s.array.count = 16;
    s.array.tx_count = 8;
    s.array.spacing_wl = 0.5;
    s.carrier_hz = 3.5e9;
    s.bandwidth_hz = 40e6;
    s.n_time = 1;
    s.n_freq = nf;
    s.quantization.ideal = true;

    TargetState t;
    t.range_m = 3.0;
    t.radial_velocity_mps = 0.0;
    t.direction = PlanarBearing{30.0};
    t.gain_db = 0.0;
    s.snapshots = {{"s1", {t}}};
    return s;
}

} // namespace isac_test

#endif
