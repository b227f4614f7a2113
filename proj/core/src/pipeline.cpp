#include "isac/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace isac {

// The scan stops short of +/-90: the monostatic two-way signature repeats at
// unit shifts of the direction cosines, so the poles alias boresight targets
// exactly. Inside the window ambiguities fall off-grid for generic targets.
std::vector<double> EstimationOptions::elevation_grid() const {
    return linear_grid(-89.0, 89.0, angle_step_deg);
}
std::vector<double> EstimationOptions::azimuth_grid() const {
    return linear_grid(-89.0, 89.0, angle_step_deg);
}
std::vector<double> EstimationOptions::satr_range_grid() const {
    return linear_grid(satr_range_min_m, satr_range_max_m, satr_range_step_m);
}
std::vector<double> EstimationOptions::satr_angle_grid() const {
    return linear_grid(-90.0, 90.0, satr_angle_step_deg);
}

namespace {

// Per-port residual slice at one time step, used for successive peak
// cancellation: the strongest target is read out and its exact single-delay
// response subtracted before the next readout, so delay-sidelobe leakage of a
// strong target cannot bias a weak one.
struct ResidualSlice {
    std::vector<std::complex<double>> data; // [port][freq]
    std::vector<double> f_off;
    std::size_t ports = 0;
    std::size_t n_freq = 0;

    ResidualSlice(const CfrDataset& ds, std::size_t time_index) {
        ports = ds.axis_len(2);
        n_freq = ds.axis_len(1);
        const double fc = ds.carrier_hz();
        f_off.resize(n_freq);
        for (std::size_t j = 0; j < n_freq; ++j) f_off[j] = ds.axes[1].values[j] - fc;
        data.resize(ports * n_freq);
        for (std::size_t k = 0; k < ports; ++k)
            for (std::size_t j = 0; j < n_freq; ++j) data[k * n_freq + j] = ds.at(time_index, j, k);
    }

    std::vector<std::complex<double>> correlate(double tau) const {
        std::vector<std::complex<double>> phasor(n_freq);
        for (std::size_t j = 0; j < n_freq; ++j)
            phasor[j] = std::polar(1.0, -2.0 * kPi * f_off[j] * tau);
        std::vector<std::complex<double>> out(ports);
        for (std::size_t k = 0; k < ports; ++k) {
            std::complex<double> acc{};
            const std::complex<double>* row = data.data() + k * n_freq;
            for (std::size_t j = 0; j < n_freq; ++j) acc += row[j] * phasor[j];
            out[k] = acc;
        }
        return out;
    }

    void subtract(double tau, const std::vector<std::complex<double>>& amplitudes, double sign = 1.0) {
        for (std::size_t k = 0; k < ports; ++k) {
            std::complex<double>* row = data.data() + k * n_freq;
            for (std::size_t j = 0; j < n_freq; ++j)
                row[j] -= sign * amplitudes[k] * std::polar(1.0, 2.0 * kPi * f_off[j] * tau);
        }
    }

    void add(double tau, const std::vector<std::complex<double>>& amplitudes) {
        subtract(tau, amplitudes, -1.0);
    }
};

// Golden-section maximization of the aggregate delay correlation around the
// detected bin.
double refine_delay(const ResidualSlice& slice, double tau_center, double half_width) {
    auto g = [&](double tau) {
        const auto x = slice.correlate(tau);
        double p = 0.0;
        for (const auto& v : x) p += std::norm(v);
        return p;
    };
    double a = std::max(0.0, tau_center - half_width);
    double b = tau_center + half_width;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = g(c), fd = g(d);
    for (int it = 0; it < 90 && (b - a) > 1e-18; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> to_own_peak_db(std::vector<double> linear) {
    double peak = 0.0;
    for (double p : linear) peak = std::max(peak, p);
    for (double& p : linear)
        p = (p > 0.0 && peak > 0.0) ? 10.0 * std::log10(p / peak)
                                    : -std::numeric_limits<double>::infinity();
    return linear;
}

std::size_t nearest_index(const std::vector<double>& grid, double value) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - value) < std::abs(grid[best] - value)) best = i;
    return best;
}

// Unit-shift aliases of a two-way beam peak: candidate grid cells whose
// direction cosines differ from the argmax by integers. Returns the candidate
// nearest to any prior direction among cells carrying at least a quarter of
// the peak power.
std::pair<std::size_t, std::size_t> snap_to_prior(const std::vector<double>& pas,
                                                  const std::vector<double>& elev,
                                                  const std::vector<double>& azim,
                                                  std::size_t be, std::size_t ba,
                                                  const std::vector<FarFieldDirection>& priors) {
    const double peak = pas[be * azim.size() + ba];
    const Vec3 u0 = direction_unit_vector({elev[be], azim[ba]});

    double best_dist = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best{be, ba};
    for (int dx = -1; dx <= 1; ++dx)
        for (int dz = -1; dz <= 1; ++dz) {
            const double ux = u0.x + dx;
            const double uz = u0.z + dz;
            if (ux * ux + uz * uz > 1.0 + 1e-12) continue;
            const double el = std::asin(std::clamp(uz, -1.0, 1.0)) * 180.0 / kPi;
            const double cos_el = std::cos(el * kPi / 180.0);
            const double az =
                cos_el < 1e-12 ? 0.0
                               : std::asin(std::clamp(ux / cos_el, -1.0, 1.0)) * 180.0 / kPi;
            const std::size_t e = nearest_index(elev, el);
            const std::size_t a = nearest_index(azim, az);
            if (pas[e * azim.size() + a] < 0.25 * peak) continue;
            for (const FarFieldDirection& p : priors) {
                const double d = (elev[e] - p.elevation_deg) * (elev[e] - p.elevation_deg) +
                                 (azim[a] - p.azimuth_deg) * (azim[a] - p.azimuth_deg);
                if (d < best_dist) {
                    best_dist = d;
                    best = {e, a};
                }
            }
        }
    return best;
}

} // namespace

SnapshotEstimate estimate_adtr_snapshot(const CfrDataset& dataset, const ArrayGeometry& geometry,
                                        std::size_t n_targets, const EstimationOptions& opt,
                                        bool keep_pas,
                                        const std::vector<FarFieldDirection>* prior_directions) {
    const RangeVelocityMap rv =
        range_velocity_map(dataset, opt.port, opt.pad_time, opt.pad_freq, opt.adtr_window);
    const PeakList peaks = detect_peaks(rv, n_targets, opt.guard_bins);

    const double df = (dataset.axes[1].values.back() - dataset.axes[1].values.front()) /
                      static_cast<double>(dataset.axis_len(1) - 1);
    const double tau_bin = 1.0 / (static_cast<double>(opt.pad_freq * dataset.axis_len(1)) * df);
    const auto elev = opt.elevation_grid();
    const auto azim = opt.azimuth_grid();

    SnapshotEstimate out;
    out.label = rv.snapshot_label;
    out.velocity_estimable = !rv.velocity_degenerate;
    out.truncated = peaks.truncated;

    // Successive readout in descending power order, then one refinement pass
    // so every target is read with all the others cancelled.
    ResidualSlice slice(dataset, opt.time_index);
    std::vector<std::vector<std::complex<double>>> amplitudes(peaks.peaks.size());

    auto read_target = [&](TargetEstimate& est, double tau_center) {
        est.refined_delay_s = refine_delay(slice, tau_center, tau_bin);
        const auto x = slice.correlate(est.refined_delay_s);
        const auto pas = beamform_two_way(x, geometry, elev, azim);

        std::size_t best = 0;
        for (std::size_t i = 1; i < pas.size(); ++i)
            if (pas[i] > pas[best]) best = i;
        std::size_t be = best / azim.size();
        std::size_t ba = best % azim.size();
        if (prior_directions && !prior_directions->empty())
            std::tie(be, ba) = snap_to_prior(pas, elev, azim, be, ba, *prior_directions);
        est.elevation_deg = elev[be];
        est.azimuth_deg = azim[ba];
        est.peak_power_linear = pas[be * azim.size() + ba];
        if (keep_pas) est.pas_db = to_own_peak_db(pas);

        std::vector<std::complex<double>> amp(x.size());
        for (std::size_t k = 0; k < x.size(); ++k)
            amp[k] = x[k] / static_cast<double>(slice.n_freq);
        slice.subtract(est.refined_delay_s, amp);
        return amp;
    };

    for (const DetectedTarget& p : peaks.peaks) {
        TargetEstimate est;
        est.range_m = p.range_m;
        est.velocity_mps = p.velocity_mps;
        amplitudes[out.targets.size()] = read_target(est, 2.0 * p.range_m / kSpeedOfLight);
        out.targets.push_back(std::move(est));
    }
    if (out.targets.size() > 1) {
        for (std::size_t i = 0; i < out.targets.size(); ++i) {
            slice.add(out.targets[i].refined_delay_s, amplitudes[i]);
            amplitudes[i] = read_target(out.targets[i], out.targets[i].refined_delay_s);
        }
    }
    return out;
}

SnapshotEstimate estimate_satr_snapshot(const CfrDataset& dataset, const ArrayGeometry& geometry,
                                        std::size_t n_targets, const EstimationOptions& opt) {
    const RangeAngleMap map = joint_range_angle_satr(dataset, geometry, opt.satr_range_grid(),
                                                     opt.satr_angle_grid(), opt.satr_window);
    const std::size_t R = map.range_axis_m.size();
    const std::size_t A = map.angle_axis_deg.size();

    SnapshotEstimate out;
    out.velocity_estimable = false;

    // Greedy maxima with guard exclusion, mirroring the range-velocity search.
    std::vector<bool> excluded(R * A, false);
    for (std::size_t p = 0; p < n_targets; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t br = 0, ba = 0;
        bool found = false;
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t a = 0; a < A; ++a)
                if (!excluded[r * A + a] && std::isfinite(map.db(r, a)) && map.db(r, a) > best) {
                    best = map.db(r, a);
                    br = r;
                    ba = a;
                    found = true;
                }
        if (!found) {
            out.truncated = true;
            break;
        }
        TargetEstimate est;
        est.range_m = map.range_axis_m[br];
        est.azimuth_deg = map.angle_axis_deg[ba];
        est.peak_power_linear = map.peak_power_linear * std::pow(10.0, best / 10.0);
        out.targets.push_back(est);

        const auto g = static_cast<std::ptrdiff_t>(opt.guard_bins);
        for (std::ptrdiff_t dr = -g; dr <= g; ++dr)
            for (std::ptrdiff_t da = -g; da <= g; ++da) {
                const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(br) + dr;
                const std::ptrdiff_t aa = static_cast<std::ptrdiff_t>(ba) + da;
                if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(R) || aa < 0 ||
                    aa >= static_cast<std::ptrdiff_t>(A))
                    continue;
                excluded[static_cast<std::size_t>(rr) * A + static_cast<std::size_t>(aa)] = true;
            }
    }
    return out;
}

std::string snapshot_metadata_json(const SensingScenario& s, const Snapshot& snap) {
    nlohmann::ordered_json j;
    j["label"] = snap.label;
    j["mode"] = mode_name(s.mode);
    j["carrier_hz"] = s.carrier_hz;
    j["bandwidth_hz"] = s.bandwidth_hz;
    j["n_freq"] = s.n_freq;
    j["n_time"] = s.n_time;
    j["update_interval_s"] = snapshot_update_interval_s(s, snap);
    nlohmann::ordered_json targets = nlohmann::ordered_json::array();
    for (const TargetState& t : snap.targets) {
        nlohmann::ordered_json tj;
        tj["range_m"] = t.range_m;
        tj["radial_velocity_mps"] = t.radial_velocity_mps;
        if (t.is_far_field()) {
            tj["elevation_deg"] = t.far_field().elevation_deg;
            tj["azimuth_deg"] = t.far_field().azimuth_deg;
        } else {
            tj["angle_deg"] = t.bearing().angle_deg;
        }
        if (t.gain_db) tj["gain_db"] = *t.gain_db;
        if (t.rcs_m2) tj["rcs_m2"] = *t.rcs_m2;
        targets.push_back(tj);
    }
    j["targets"] = targets;
    return j.dump();
}

CompiledSnapshot compile_snapshot(const SensingScenario& s, const Snapshot& snap) {
    return s.mode == Mode::Adtr ? compile_adtr(s, snap) : compile_satr(s, snap);
}

CfrDataset synthesize_snapshot(const SensingScenario& s, const CompiledSnapshot& cs) {
    const SweepParams sweep{s.carrier_hz, s.bandwidth_hz, s.n_freq};
    const Snapshot* snap = nullptr;
    for (const Snapshot& sn : s.snapshots)
        if (sn.label == cs.label) snap = &sn;
    const std::string meta = snap ? snapshot_metadata_json(s, *snap) : std::string{};

    CfrDataset d = s.mode == Mode::Adtr ? synthesize_cfr_adtr(cs.apm, cs.units, sweep, meta)
                                        : synthesize_cfr_satr(cs.apm, cs.units, sweep, meta);
    if (s.noise.snr_db) add_complex_awgn(d, *s.noise.snr_db, s.noise.seed);
    return d;
}

namespace {

// Greedy min-distance assignment of detections to truth targets.
std::vector<std::size_t> match_targets(const Snapshot& snap, const SnapshotEstimate& est,
                                       Mode mode) {
    const std::size_t n_truth = snap.targets.size();
    const std::size_t n_est = est.targets.size();
    std::vector<std::size_t> match(n_truth, std::numeric_limits<std::size_t>::max());

    struct Pair {
        double cost;
        std::size_t truth, est;
    };
    std::vector<Pair> pairs;
    for (std::size_t n = 0; n < n_truth; ++n) {
        const TargetState& t = snap.targets[n];
        for (std::size_t e = 0; e < n_est; ++e) {
            const TargetEstimate& te = est.targets[e];
            double cost = std::abs(te.range_m - t.range_m);
            if (mode == Mode::Adtr) {
                if (te.velocity_mps)
                    cost += std::abs(*te.velocity_mps - t.radial_velocity_mps);
            } else {
                cost += 0.05 * std::abs(*te.azimuth_deg - t.bearing().angle_deg);
            }
            pairs.push_back({cost, n, e});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.truth != b.truth) return a.truth < b.truth;
        return a.est < b.est;
    });
    std::vector<bool> truth_used(n_truth, false), est_used(n_est, false);
    for (const Pair& p : pairs) {
        if (truth_used[p.truth] || est_used[p.est]) continue;
        truth_used[p.truth] = true;
        est_used[p.est] = true;
        match[p.truth] = p.est;
    }
    return match;
}

ParameterCheck make_check(const std::string& name, double target, double estimated,
                          double tolerance, bool estimable = true) {
    ParameterCheck c;
    c.parameter = name;
    c.target = target;
    c.estimated = estimated;
    c.tolerance = tolerance;
    c.estimable = estimable;
    if (estimable) {
        c.abs_error = std::abs(estimated - target);
        c.pass = std::isfinite(c.abs_error) && c.abs_error <= tolerance;
    } else {
        c.abs_error = 0.0;
        c.pass = true;
    }
    return c;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

} // namespace

RunResult run_scenario(const SensingScenario& s, const RunOptions& opt,
                       const std::string& scenario_digest) {
    const auto violations = validate_scenario(s);
    if (!violations.empty())
        throw std::invalid_argument("invalid scenario: " + violations.front().path + ": " +
                                    violations.front().message);

    const auto t0 = std::chrono::steady_clock::now();
    const ArrayGeometry geometry = s.make_geometry();

    RunResult result;
    std::vector<CompiledSnapshot> compiled;
    for (const Snapshot& snap : s.snapshots) {
        CompiledSnapshot cs = compile_snapshot(s, snap);
        const CfrDataset ds = synthesize_snapshot(s, cs);
        SnapshotEstimate est;
        if (s.mode == Mode::Adtr) {
            std::vector<FarFieldDirection> priors;
            for (const TargetState& t : snap.targets) priors.push_back(t.far_field());
            est = estimate_adtr_snapshot(ds, geometry, snap.targets.size(), opt.est, opt.keep_pas,
                                         &priors);
        } else {
            est = estimate_satr_snapshot(ds, geometry, snap.targets.size(), opt.est);
        }
        est.label = snap.label;
        result.estimates.push_back(std::move(est));
        compiled.push_back(std::move(cs));
    }

    // Scenario-wide 0 dB references: strongest truth target and strongest
    // estimated peak across every snapshot.
    double ref_amp = 0.0;
    for (const Snapshot& snap : s.snapshots)
        for (const TargetState& t : snap.targets)
            ref_amp = std::max(ref_amp, target_amplitude(t, s.wavelength_m()));
    double ref_power = 0.0;
    for (const SnapshotEstimate& est : result.estimates)
        for (const TargetEstimate& te : est.targets)
            ref_power = std::max(ref_power, te.peak_power_linear);

    RunReport& report = result.report;
    report.scenario_digest = scenario_digest;
    report.quantization = s.quantization;
    for (std::size_t i = 0; i < s.snapshots.size(); ++i)
        report.rts_units_used = std::max(report.rts_units_used, compiled[i].units.size());

    const ToleranceTable& tol = opt.tolerances;
    for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
        const Snapshot& snap = s.snapshots[i];
        const SnapshotEstimate& est = result.estimates[i];
        const auto match = match_targets(snap, est, s.mode);
        result.match.push_back(match);

        SnapshotReport sr;
        sr.label = snap.label;
        for (std::size_t n = 0; n < snap.targets.size(); ++n) {
            const TargetState& t = snap.targets[n];
            const bool matched = match[n] != std::numeric_limits<std::size_t>::max();
            const TargetEstimate* te = matched ? &est.targets[match[n]] : nullptr;

            const double truth_db =
                20.0 * std::log10(target_amplitude(t, s.wavelength_m()) / ref_amp);
            const double est_db =
                te && te->peak_power_linear > 0.0 && ref_power > 0.0
                    ? 10.0 * std::log10(te->peak_power_linear / ref_power)
                    : kNan;

            TargetReport tr;
            tr.target_index = n;
            tr.checks.push_back(
                make_check("range_m", t.range_m, te ? te->range_m : kNan,
                           s.mode == Mode::Adtr ? tol.range_m : tol.satr_range_m));
            {
                const bool estimable = est.velocity_estimable;
                tr.checks.push_back(make_check(
                    "velocity_mps", t.radial_velocity_mps,
                    te && te->velocity_mps ? *te->velocity_mps : kNan, tol.velocity_mps,
                    estimable));
            }
            if (s.mode == Mode::Adtr) {
                tr.checks.push_back(make_check("elevation_deg", t.far_field().elevation_deg,
                                               te && te->elevation_deg ? *te->elevation_deg : kNan,
                                               tol.elevation_deg));
                tr.checks.push_back(make_check("azimuth_deg", t.far_field().azimuth_deg,
                                               te && te->azimuth_deg ? *te->azimuth_deg : kNan,
                                               tol.azimuth_deg));
            } else {
                tr.checks.push_back(make_check("angle_deg", t.bearing().angle_deg,
                                               te && te->azimuth_deg ? *te->azimuth_deg : kNan,
                                               tol.satr_angle_deg));
            }
            tr.checks.push_back(make_check("power_db", truth_db, est_db, tol.power_db));
            sr.targets.push_back(std::move(tr));
        }
        report.snapshots.push_back(std::move(sr));
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace isac
