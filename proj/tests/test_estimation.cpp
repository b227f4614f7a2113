#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "isac/emulation.hpp"
#include "isac/estimation.hpp"
#include "isac/synthesis.hpp"
#include "test_helpers.hpp"

using namespace isac;

namespace {

CfrDataset synth_adtr(const SensingScenario& s, const Snapshot& snap) {
    const CompiledSnapshot cs = compile_adtr(s, snap);
    return synthesize_cfr_adtr(cs.apm, cs.units, {s.carrier_hz, s.bandwidth_hz, s.n_freq},
                               R"({"label":")" + snap.label + R"("})");
}

// Closed-form two-way array factor of the half-wavelength 4x8 grid.
double two_way_af_power(double el0, double az0, double el, double az) {
    auto dirichlet = [](double psi, std::size_t n) {
        const double s = std::sin(psi / 2.0);
        if (std::abs(s) < 1e-12) return static_cast<double>(n);
        return std::sin(static_cast<double>(n) * psi / 2.0) / s;
    };
    const Vec3 u0 = direction_unit_vector({el0, az0});
    const Vec3 u = direction_unit_vector({el, az});
    const double psi_x = 2.0 * kPi * (u0.x - u.x); // 2 * k0 * d with d = lambda/2
    const double psi_z = 2.0 * kPi * (u0.z - u.z);
    const double af = dirichlet(psi_x, 8) * dirichlet(psi_z, 4);
    return af * af;
}

} // namespace

TEST_CASE("window weights") {
    CHECK(window_weights(Window::None, 5) == std::vector<double>{1, 1, 1, 1, 1});
    const auto h3 = window_weights(Window::Hanning, 3);
    CHECK(h3[0] == doctest::Approx(0.0));
    CHECK(h3[1] == doctest::Approx(1.0));
    CHECK(h3[2] == doctest::Approx(0.0));
    CHECK(window_weights(Window::Hanning, 1) == std::vector<double>{1.0});

    SUBCASE("apply_window: none is the identity") {
        std::vector<std::complex<double>> v{{1, 2}, {3, 4}, {5, 6}};
        CHECK(apply_window(v, Window::None) == v);
    }

    SUBCASE("Parseval ratio of a windowed white sequence matches the power gain") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<std::complex<double>> x(256);
        for (auto& c : x) c = {g(rng), g(rng)};
        const auto wx = apply_window(x, Window::Hanning);
        double px = 0.0, pw = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            px += std::norm(x[i]);
            pw += std::norm(wx[i]);
        }
        const auto w = window_weights(Window::Hanning, x.size());
        double gain = 0.0;
        for (double wi : w) gain += wi * wi;
        gain /= static_cast<double>(x.size());
        CHECK(pw / px == doctest::Approx(gain).epsilon(0.15));
    }
}

TEST_CASE("range_velocity_map recovers a single target") {
    SensingScenario s = isac_test::adtr_two_drone_scenario(64, 101);
    Snapshot snap{"t1", {s.snapshots[0].targets[0]}}; // 50 m, 7 m/s, -5 dB
    const CfrDataset d = synth_adtr(s, snap);
    const RangeVelocityMap map = range_velocity_map(d, 0, 4, 4, Window::None);

    CHECK(map.snapshot_label == "t1");
    CHECK(!map.velocity_degenerate);
    for (std::size_t i = 1; i < map.velocity_axis.size(); ++i)
        CHECK(map.velocity_axis[i] > map.velocity_axis[i - 1]);
    for (std::size_t i = 1; i < map.range_axis.size(); ++i)
        CHECK(map.range_axis[i] > map.range_axis[i - 1]);

    const PeakList peaks = detect_peaks(map, 1, 8);
    REQUIRE(peaks.peaks.size() == 1);
    const double df = s.bandwidth_hz / 100.0;
    const double range_bin = kSpeedOfLight / (2.0 * 404.0 * df);
    CHECK(std::abs(peaks.peaks[0].range_m - 50.0) <= range_bin / 2.0 + 1e-9);
    // 7 m/s rides exactly on the Doppler Nyquist edge and must read positive
    REQUIRE(peaks.peaks[0].velocity_mps.has_value());
    CHECK(*peaks.peaks[0].velocity_mps == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(peaks.peaks[0].power_db == doctest::Approx(0.0));
}

TEST_CASE("zero-delay static target peaks at the origin") {
    ApmConfig apm;
    apm.mode = Mode::Adtr;
    apm.type_a_count = 2;
    apm.type_b_groups = {{0, 1}};
    apm.weights_tx = ComplexMatrix(2, 1);
    apm.weights_rx = ComplexMatrix(2, 1);
    for (std::size_t k = 0; k < 2; ++k) {
        apm.weights_tx.at(k, 0) = 1.0;
        apm.weights_rx.at(k, 0) = 1.0;
        apm.tx_ports.push_back(static_cast<std::uint32_t>(k));
        apm.rx_ports.push_back(static_cast<std::uint32_t>(k));
    }
    RtsUnitConfig u;
    u.update_interval_s = 1e-3;
    u.cir_sequence.assign(8, {0.0, {1.0, 0.0}, 0.0});
    const CfrDataset d = synthesize_cfr_adtr(apm, {u}, {3.5e9, 40e6, 16});
    const RangeVelocityMap map = range_velocity_map(d, 1, 4, 4, Window::None);
    const PeakList peaks = detect_peaks(map, 1, 4);
    REQUIRE(peaks.peaks.size() == 1);
    CHECK(peaks.peaks[0].range_m == doctest::Approx(0.0));
    CHECK(*peaks.peaks[0].velocity_mps == doctest::Approx(0.0));
}

TEST_CASE("two-target map: ordering and brute-force DFT oracle") {
    SensingScenario s = isac_test::adtr_two_drone_scenario(64, 101);
    const CfrDataset d = synth_adtr(s, s.snapshots[0]); // -5 dB and -25 dB
    const std::size_t port = 3;
    const RangeVelocityMap map = range_velocity_map(d, port, 4, 4, Window::None);
    const PeakList peaks = detect_peaks(map, 2, 24);
    REQUIRE(peaks.peaks.size() == 2);
    CHECK(!peaks.truncated);

    // power ordering matches the gain ordering
    CHECK(peaks.peaks[0].power_db == doctest::Approx(0.0));
    CHECK(peaks.peaks[1].power_db < -15.0);
    CHECK(std::abs(peaks.peaks[0].range_m - 50.0) < 0.5);
    CHECK(std::abs(peaks.peaks[1].range_m - 155.0) < 0.5);
    CHECK(*peaks.peaks[0].velocity_mps > 0.0); // approaching => positive
    CHECK(*peaks.peaks[1].velocity_mps > 0.0);

    // brute-force DFT of the port slice at the two peak bins
    const std::size_t Nt = 64, Nf = 101, Mt = 256, Mf = 404;
    auto linear_at = [&](double range, double velocity) {
        std::size_t row = 0, col = 0;
        for (std::size_t r = 0; r < map.velocity_axis.size(); ++r)
            if (std::abs(map.velocity_axis[r] - velocity) < 1e-12) row = r;
        for (std::size_t c = 0; c < map.range_axis.size(); ++c)
            if (std::abs(map.range_axis[c] - range) < 1e-12) col = c;
        const auto s_min = -static_cast<std::ptrdiff_t>((Mt - 1) / 2);
        const std::ptrdiff_t sidx = static_cast<std::ptrdiff_t>(row) + s_min;
        const std::size_t kt = static_cast<std::size_t>(
            (sidx + static_cast<std::ptrdiff_t>(Mt)) % static_cast<std::ptrdiff_t>(Mt));
        std::complex<double> acc{};
        for (std::size_t i = 0; i < Nt; ++i)
            for (std::size_t j = 0; j < Nf; ++j)
                acc += d.at(i, j, port) *
                       std::polar(1.0, -2.0 * kPi *
                                           (double(i) * double(kt) / double(Mt) +
                                            double(j) * double(col) / double(Mf)));
        const double oracle = std::norm(acc);
        const double mapped =
            map.peak_power_linear * std::pow(10.0, map.db(row, col) / 10.0);
        return std::make_pair(oracle, mapped);
    };
    for (const auto& pk : peaks.peaks) {
        const auto [oracle, mapped] = linear_at(pk.range_m, *pk.velocity_mps);
        CHECK(mapped == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("Parseval: transform power equals padded input power") {
    SensingScenario s = isac_test::adtr_two_drone_scenario(32, 51);
    const CfrDataset d = synth_adtr(s, s.snapshots[1]);
    const std::size_t Mt = 128, Mf = 204;

    SUBCASE("no window") {
        const RangeVelocityMap map = range_velocity_map(d, 5, 4, 4, Window::None);
        double input_power = 0.0;
        for (std::size_t i = 0; i < 32; ++i)
            for (std::size_t j = 0; j < 51; ++j) input_power += std::norm(d.at(i, j, 5));
        CHECK(map.total_power_linear ==
              doctest::Approx(double(Mt) * double(Mf) * input_power).epsilon(1e-10));
    }
    SUBCASE("Hanning window") {
        const RangeVelocityMap map = range_velocity_map(d, 5, 4, 4, Window::Hanning);
        const auto wt = window_weights(Window::Hanning, 32);
        const auto wf = window_weights(Window::Hanning, 51);
        double input_power = 0.0;
        for (std::size_t i = 0; i < 32; ++i)
            for (std::size_t j = 0; j < 51; ++j)
                input_power += std::norm(d.at(i, j, 5) * wt[i] * wf[j]);
        CHECK(map.total_power_linear ==
              doctest::Approx(double(Mt) * double(Mf) * input_power).epsilon(1e-10));
    }
}

TEST_CASE("single time step degenerates to a range profile") {
    SensingScenario s = isac_test::adtr_two_drone_scenario(1, 51);
    Snapshot snap{"t", {s.snapshots[0].targets[0]}};
    const CfrDataset d = synth_adtr(s, snap);
    const RangeVelocityMap map = range_velocity_map(d, 0, 4, 4, Window::None);
    CHECK(map.velocity_degenerate);
    CHECK(map.velocity_axis.size() == 1);
    const PeakList peaks = detect_peaks(map, 1, 4);
    REQUIRE(peaks.peaks.size() == 1);
    CHECK(!peaks.peaks[0].velocity_mps.has_value());
    CHECK(std::abs(peaks.peaks[0].range_m - 50.0) < 0.5);
}

TEST_CASE("detect_peaks on hand-built grids") {
    RangeVelocityMap map;
    map.velocity_axis = {-2, -1, 0, 1, 2};
    map.range_axis = {0, 1, 2, 3, 4, 5};
    map.power_db.assign(5 * 6, -std::numeric_limits<double>::infinity());
    map.power_db[1 * 6 + 1] = 0.0;
    map.power_db[3 * 6 + 4] = -3.0;

    SUBCASE("two isolated spikes recovered exactly") {
        const PeakList p = detect_peaks(map, 2, 1);
        REQUIRE(p.peaks.size() == 2);
        CHECK(!p.truncated);
        CHECK(p.peaks[0].range_m == 1.0);
        CHECK(*p.peaks[0].velocity_mps == -1.0);
        CHECK(p.peaks[0].power_db == 0.0);
        CHECK(p.peaks[1].range_m == 4.0);
        CHECK(*p.peaks[1].velocity_mps == 1.0);
    }

    SUBCASE("two spikes inside one guard region collapse to one detection") {
        const PeakList p = detect_peaks(map, 2, 4);
        CHECK(p.peaks.size() == 1);
        CHECK(p.truncated);
    }

    SUBCASE("n_peaks must be positive") {
        CHECK_THROWS_AS(detect_peaks(map, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("delay_profiles") {
    SUBCASE("flat spectrum gives an impulse at bin zero (unpadded)") {
        ApmConfig apm;
        apm.mode = Mode::Adtr;
        apm.type_a_count = 1;
        apm.type_b_groups = {{0, 1}};
        apm.weights_tx = ComplexMatrix(1, 1);
        apm.weights_rx = ComplexMatrix(1, 1);
        apm.weights_tx.at(0, 0) = 1.0;
        apm.weights_rx.at(0, 0) = 1.0;
        apm.tx_ports = {0};
        apm.rx_ports = {0};
        RtsUnitConfig u;
        u.update_interval_s = 1e-3;
        u.cir_sequence.assign(2, {0.0, {1.0, 0.0}, 0.0});
        const CfrDataset d = synthesize_cfr_adtr(apm, {u}, {3.5e9, 40e6, 32});
        const DelayProfiles prof = delay_profiles(d, 0, 1);
        CHECK(std::abs(prof.per_port[0][0]) == doctest::Approx(32.0).epsilon(1e-12));
        for (std::size_t m = 1; m < 32; ++m) CHECK(std::abs(prof.per_port[0][m]) < 1e-10);
    }

    SUBCASE("single target peaks at the nearest padded delay bin") {
        SensingScenario s = isac_test::adtr_two_drone_scenario(2, 101);
        Snapshot snap{"t", {s.snapshots[0].targets[0]}};
        snap.targets[0].radial_velocity_mps = 0.0;
        const CfrDataset d = synth_adtr(s, snap);
        const DelayProfiles prof = delay_profiles(d, 0, 4);
        const double tau = 100.0 / kSpeedOfLight;
        const double tau_bin = prof.delay_axis_s[1];
        const auto expected_bin = static_cast<std::size_t>(std::llround(tau / tau_bin));
        for (const auto& port : prof.per_port) {
            std::size_t best = 0;
            for (std::size_t m = 1; m < port.size(); ++m)
                if (std::abs(port[m]) > std::abs(port[best])) best = m;
            CHECK(best == expected_bin);
        }
    }

    SUBCASE("linearity across targets") {
        SensingScenario s = isac_test::adtr_two_drone_scenario(4, 31);
        const CompiledSnapshot cs = compile_adtr(s, s.snapshots[0]);
        const SweepParams sweep{s.carrier_hz, s.bandwidth_hz, s.n_freq};
        const CfrDataset joint = synthesize_cfr_adtr(cs.apm, cs.units, sweep);
        std::vector<CfrDataset> singles;
        for (std::size_t n = 0; n < 2; ++n) {
            ApmConfig apm = cs.apm;
            apm.weights_tx = ComplexMatrix(32, 1);
            apm.weights_rx = ComplexMatrix(32, 1);
            for (std::size_t k = 0; k < 32; ++k) {
                apm.weights_tx.at(k, 0) = cs.apm.weights_tx.at(k, n);
                apm.weights_rx.at(k, 0) = cs.apm.weights_rx.at(k, n);
            }
            apm.type_b_groups = {cs.apm.type_b_groups[n]};
            singles.push_back(synthesize_cfr_adtr(apm, {cs.units[n]}, sweep));
        }
        const DelayProfiles pj = delay_profiles(joint, 1, 2);
        const DelayProfiles p0 = delay_profiles(singles[0], 1, 2);
        const DelayProfiles p1 = delay_profiles(singles[1], 1, 2);
        for (std::size_t k = 0; k < 32; ++k)
            for (std::size_t m = 0; m < pj.per_port[k].size(); ++m) {
                const auto sum = p0.per_port[k][m] + p1.per_port[k][m];
                CHECK(std::abs(pj.per_port[k][m] - sum) <= 1e-12 * std::abs(sum) + 1e-9);
            }
    }
}

TEST_CASE("padp_beamform and pas_slice") {
    const std::vector<double> elev = linear_grid(-88, 88, 2.0);
    const std::vector<double> azim = linear_grid(-88, 88, 2.0);

    SUBCASE("boresight target peaks at (0, 0)") {
        SensingScenario s = isac_test::adtr_two_drone_scenario(2, 51);
        Snapshot snap{"b", {s.snapshots[0].targets[0]}};
        snap.targets[0].direction = FarFieldDirection{0.0, 0.0};
        const CfrDataset d = synth_adtr(s, snap);
        const DelayProfiles prof = delay_profiles(d, 0, 4);
        const Padp padp = padp_beamform(prof, s.make_geometry(), elev, azim);

        std::size_t best_bin = 0;
        double best = -1e300;
        for (std::size_t m = 0; m < padp.delay_s.size(); ++m) {
            const double v = padp.db(elev.size() / 2, azim.size() / 2, m);
            if (v > best) {
                best = v;
                best_bin = m;
            }
        }
        const PasSlice slice = pas_slice(padp, best_bin);
        CHECK(*slice.peak.elevation_deg == 0.0);
        CHECK(*slice.peak.azimuth_deg == 0.0);
        CHECK(slice.peak.power_db == doctest::Approx(0.0));
    }

    SUBCASE("off-axis target peaks on its grid node") {
        SensingScenario s = isac_test::adtr_two_drone_scenario(2, 51);
        Snapshot snap{"o", {s.snapshots[0].targets[0]}}; // (50, -20)
        const CfrDataset d = synth_adtr(s, snap);
        const DelayProfiles prof = delay_profiles(d, 0, 4);
        const Padp padp = padp_beamform(prof, s.make_geometry(), elev, azim);
        double best = -1e300;
        std::size_t be = 0, ba = 0, bd = 0;
        for (std::size_t e = 0; e < elev.size(); ++e)
            for (std::size_t a = 0; a < azim.size(); ++a)
                for (std::size_t m = 0; m < padp.delay_s.size(); ++m)
                    if (padp.db(e, a, m) > best) {
                        best = padp.db(e, a, m);
                        be = e;
                        ba = a;
                        bd = m;
                    }
        CHECK(elev[be] == 50.0);
        CHECK(azim[ba] == -20.0);
        const PasSlice slice = pas_slice(padp, bd);
        CHECK(*slice.peak.elevation_deg == 50.0);
        CHECK(*slice.peak.azimuth_deg == -20.0);
    }

    SUBCASE("beam pattern matches the closed-form two-way array factor") {
        SensingScenario s = isac_test::adtr_two_drone_scenario();
        const ArrayGeometry geom = s.make_geometry();
        const auto b0 = two_way_signature(geom, {50.0, -20.0});
        const std::vector<double> fine_elev = linear_grid(-90, 90, 1.0);
        const std::vector<double> fine_azim = linear_grid(-90, 90, 1.0);
        const auto pas = beamform_two_way(b0, geom, fine_elev, fine_azim);
        double peak = 0.0;
        for (double p : pas) peak = std::max(peak, p);
        for (std::size_t e = 0; e < fine_elev.size(); ++e)
            for (std::size_t a = 0; a < fine_azim.size(); ++a) {
                const double model = two_way_af_power(50.0, -20.0, fine_elev[e], fine_azim[a]);
                const double model_db = 10.0 * std::log10(model / (32.0 * 32.0));
                if (model_db < -100.0) continue;
                const double est_db = 10.0 * std::log10(pas[e * fine_azim.size() + a] / peak);
                CHECK(std::abs(est_db - model_db) < 1e-9);
            }
    }

    SUBCASE("zero tensor slices to a flat guard value") {
        DelayProfiles prof;
        prof.delay_axis_s = {0.0, 1e-9, 2e-9};
        prof.per_port.assign(4, std::vector<std::complex<double>>(3, {0.0, 0.0}));
        const ArrayGeometry geom = build_upa(2, 2, 0.5, 3.5e9);
        const Padp padp = padp_beamform(prof, geom, elev, azim);
        const PasSlice slice = pas_slice(padp, 1);
        for (double v : slice.power_db) CHECK(v == -std::numeric_limits<double>::infinity());
        CHECK(slice.peak.power_db == -std::numeric_limits<double>::infinity());
    }

    SUBCASE("grid and size validation") {
        DelayProfiles prof;
        prof.delay_axis_s = {0.0};
        prof.per_port.assign(3, std::vector<std::complex<double>>(1));
        const ArrayGeometry geom = build_upa(2, 2, 0.5, 3.5e9);
        CHECK_THROWS_AS(padp_beamform(prof, geom, elev, azim), std::invalid_argument);
        DelayProfiles ok = prof;
        ok.per_port.assign(4, std::vector<std::complex<double>>(1));
        CHECK_THROWS_AS(padp_beamform(ok, geom, {}, azim), std::invalid_argument);
        const Padp padp = padp_beamform(ok, geom, elev, azim);
        CHECK_THROWS_AS(pas_slice(padp, 5), std::invalid_argument);
    }
}

TEST_CASE("PAS power fidelity on padded-bin delays") {
    // Delays sit exactly on padded bins, separated by a multiple of the
    // padding factor, so cross-target leakage vanishes and the peak powers
    // reproduce the configured gain difference exactly.
    SensingScenario s = isac_test::adtr_two_drone_scenario(4, 101);
    const double df = s.bandwidth_hz / 100.0;
    const double range_bin = kSpeedOfLight / (2.0 * 404.0 * df);
    s.snapshots.resize(1);
    auto& targets = s.snapshots[0].targets;
    targets[0].range_m = 50.0 * range_bin;
    targets[0].radial_velocity_mps = 0.0;
    targets[0].direction = FarFieldDirection{0.0, 0.0};
    targets[0].gain_db = 0.0;
    targets[1].range_m = 150.0 * range_bin;
    targets[1].radial_velocity_mps = 0.0;
    targets[1].direction = FarFieldDirection{20.0, 10.0};
    targets[1].gain_db = -7.0;

    const std::vector<double> elev = linear_grid(-89, 89, 1.0);
    const std::vector<double> azim = linear_grid(-89, 89, 1.0);

    SUBCASE("ideal weights: exact to 1e-6 dB") {
        const CfrDataset d = synth_adtr(s, s.snapshots[0]);
        const DelayProfiles prof = delay_profiles(d, 0, 4);
        const Padp padp = padp_beamform(prof, s.make_geometry(), elev, azim);
        const PasSlice s1 = pas_slice(padp, 50);
        const PasSlice s2 = pas_slice(padp, 150);
        CHECK(s1.peak.power_db == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(s2.peak.power_db - s1.peak.power_db == doctest::Approx(-7.0).epsilon(1e-7));
        CHECK(*s2.peak.elevation_deg == 20.0);
        CHECK(*s2.peak.azimuth_deg == 10.0);
    }

    SUBCASE("6-bit phase quantization stays within 1 dB") {
        s.quantization.ideal = false;
        s.quantization.phase_bits = 6;
        s.quantization.amp_step_db = 0.0;
        const CfrDataset d = synth_adtr(s, s.snapshots[0]);
        const DelayProfiles prof = delay_profiles(d, 0, 4);
        const Padp padp = padp_beamform(prof, s.make_geometry(), elev, azim);
        const PasSlice s1 = pas_slice(padp, 50);
        const PasSlice s2 = pas_slice(padp, 150);
        CHECK(std::abs((s2.peak.power_db - s1.peak.power_db) - (-7.0)) < 1.0);
    }
}

TEST_CASE("joint_range_angle_satr") {
    SensingScenario s = isac_test::satr_single_drone_scenario(101);
    const ArrayGeometry geom = s.make_geometry();
    const CompiledSnapshot cs = compile_satr(s, s.snapshots[0]);
    const CfrDataset d =
        synthesize_cfr_satr(cs.apm, cs.units, {s.carrier_hz, s.bandwidth_hz, s.n_freq});

    const auto range_grid = linear_grid(2.5, 3.5, 0.02);
    const auto angle_grid = linear_grid(25.0, 35.0, 0.25);

    SUBCASE("peak lands exactly on the true grid node") {
        const RangeAngleMap map =
            joint_range_angle_satr(d, geom, range_grid, angle_grid, Window::Hanning);
        CHECK(map.peak.range_m == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(*map.peak.azimuth_deg == doctest::Approx(30.0).epsilon(1e-12));
        CHECK(map.peak.power_db == 0.0);

        const RangeAngleMap unwindowed =
            joint_range_angle_satr(d, geom, range_grid, angle_grid, Window::None);
        CHECK(unwindowed.peak.range_m == doctest::Approx(3.0));
        CHECK(*unwindowed.peak.azimuth_deg == doctest::Approx(30.0));
    }

    SUBCASE("far-field model on the same data is biased away from the truth") {
        double best = -1.0;
        double best_angle = 0.0;
        const auto tx_idx = geom.tx_indices();
        const auto rx_idx = geom.rx_indices();
        const auto taper = window_weights(Window::Hanning, s.n_freq);
        for (double angle : angle_grid) {
            const auto steer = far_field_steering(geom, {0.0, angle});
            for (double range : range_grid) {
                const double tau = 2.0 * range / kSpeedOfLight;
                std::complex<double> acc{};
                for (std::size_t kr = 0; kr < rx_idx.size(); ++kr)
                    for (std::size_t kt = 0; kt < tx_idx.size(); ++kt) {
                        const auto m = steer[tx_idx[kt]] * steer[rx_idx[kr]];
                        for (std::size_t j = 0; j < s.n_freq; ++j) {
                            const double f_off = d.axes[2].values[j] - s.carrier_hz;
                            acc += taper[j] *
                                   std::conj(m * std::polar(1.0, 2.0 * kPi * f_off * tau)) *
                                   d.at(kr, kt, j);
                        }
                    }
                if (std::norm(acc) > best) {
                    best = std::norm(acc);
                    best_angle = angle;
                }
            }
        }
        CHECK(std::abs(best_angle - 30.0) >= 0.25); // at least one grid cell of bias
    }

    SUBCASE("empty grids rejected") {
        CHECK_THROWS_AS(joint_range_angle_satr(d, geom, {}, angle_grid, Window::Hanning),
                        std::invalid_argument);
    }

    SUBCASE("mode mismatch rejected") {
        SensingScenario sa = isac_test::adtr_two_drone_scenario(2, 16);
        const CfrDataset da = synth_adtr(sa, sa.snapshots[0]);
        CHECK_THROWS_AS(joint_range_angle_satr(da, geom, range_grid, angle_grid, Window::None),
                        std::invalid_argument);
        CHECK_THROWS_AS(range_velocity_map(d, 0, 4, 4, Window::None), std::invalid_argument);
    }
}

TEST_CASE("matched filter is globally maximized at the truth on a dense grid") {
    SensingScenario s = isac_test::satr_single_drone_scenario(51);
    s.array.count = 4;
    s.array.tx_count = 2;
    s.snapshots[0].targets[0].range_m = 2.4;
    s.snapshots[0].targets[0].direction = PlanarBearing{-10.0};
    const ArrayGeometry geom = s.make_geometry();
    const CompiledSnapshot cs = compile_satr(s, s.snapshots[0]);
    const CfrDataset d =
        synthesize_cfr_satr(cs.apm, cs.units, {s.carrier_hz, s.bandwidth_hz, s.n_freq});

    const auto range_grid = linear_grid(1.0, 4.0, 0.05);
    const auto angle_grid = linear_grid(-60.0, 60.0, 1.0);
    const RangeAngleMap map = joint_range_angle_satr(d, geom, range_grid, angle_grid, Window::None);
    CHECK(map.peak.range_m == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(*map.peak.azimuth_deg == doctest::Approx(-10.0).epsilon(1e-12));
    // truth node strictly dominates every other cell
    std::size_t at_peak = 0;
    for (std::size_t r = 0; r < map.range_axis_m.size(); ++r)
        for (std::size_t a = 0; a < map.angle_axis_deg.size(); ++a)
            if (map.db(r, a) >= -1e-12) ++at_peak;
    CHECK(at_peak == 1);
}
