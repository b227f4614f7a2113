#include "isac/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fft.hpp"
#include "parallel.hpp"

namespace isac {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double kahan_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void check_adtr(const CfrDataset& d) {
    if (d.mode != Mode::Adtr || d.axes.size() != 3 || d.axes[0].name != "time_s")
        throw std::invalid_argument("expected an ADTR dataset with [time, frequency, port] axes");
}

void check_satr(const CfrDataset& d) {
    if (d.mode != Mode::Satr || d.axes.size() != 3 || d.axes[0].name != "rx_port")
        throw std::invalid_argument("expected a SATR dataset with [rx, tx, frequency] axes");
}

double freq_step(const Axis& f) {
    if (f.values.size() < 2) return 0.0;
    return (f.values.back() - f.values.front()) / static_cast<double>(f.values.size() - 1);
}

// dB grid normalized to the peak; returns {peak, total} linear powers.
struct PowerStats {
    double peak = 0.0;
    double total = 0.0;
};

PowerStats to_db_in_place(std::vector<double>& power) {
    PowerStats st;
    for (double p : power) st.peak = std::max(st.peak, p);
    st.total = kahan_sum(power);
    for (double& p : power) p = p > 0.0 && st.peak > 0.0 ? 10.0 * std::log10(p / st.peak) : kNegInf;
    return st;
}

std::string label_from_metadata(const std::string& metadata_json) {
    // Cheap extraction; the metadata blob is our own snapshot echo.
    const auto pos = metadata_json.find("\"label\"");
    if (pos == std::string::npos) return {};
    const auto open = metadata_json.find('"', metadata_json.find(':', pos));
    if (open == std::string::npos) return {};
    const auto close = metadata_json.find('"', open + 1);
    if (close == std::string::npos) return {};
    return metadata_json.substr(open + 1, close - open - 1);
}

} // namespace

Window window_from_name(const std::string& name) {
    if (name == "none") return Window::None;
    if (name == "hanning") return Window::Hanning;
    throw std::invalid_argument("unknown window: " + name);
}

std::vector<double> window_weights(Window kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (kind == Window::Hanning && n > 1) {
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                         static_cast<double>(n - 1)));
    }
    return w;
}

std::vector<std::complex<double>> apply_window(std::vector<std::complex<double>> v, Window kind) {
    const auto w = window_weights(kind, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
    return v;
}

std::vector<double> linear_grid(double start, double stop, double step) {
    if (step <= 0.0 || stop < start) throw std::invalid_argument("linear_grid: bad bounds");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = start + static_cast<double>(i) * step;
    return g;
}

RangeVelocityMap range_velocity_map(const CfrDataset& dataset, std::size_t port,
                                    std::size_t pad_time, std::size_t pad_freq, Window window) {
    check_adtr(dataset);
    if (pad_time < 1 || pad_freq < 1) throw std::invalid_argument("padding factors must be >= 1");
    const std::size_t Nt = dataset.axis_len(0);
    const std::size_t Nf = dataset.axis_len(1);
    const std::size_t K = dataset.axis_len(2);
    if (port >= K) throw std::invalid_argument("port index out of range");
    if (Nf < 2) throw std::invalid_argument("need at least 2 frequency points");

    const double df = freq_step(dataset.axes[1]);
    const double lambda = kSpeedOfLight / dataset.carrier_hz();

    RangeVelocityMap map;
    map.port = port;
    map.snapshot_label = label_from_metadata(dataset.metadata_json);

    // Port slice, time-major.
    std::vector<std::complex<double>> slice(Nt * Nf);
    for (std::size_t i = 0; i < Nt; ++i)
        for (std::size_t j = 0; j < Nf; ++j) slice[i * Nf + j] = dataset.at(i, j, port);

    if (window == Window::Hanning) {
        const auto wt = window_weights(window, Nt);
        const auto wf = window_weights(window, Nf);
        for (std::size_t i = 0; i < Nt; ++i)
            for (std::size_t j = 0; j < Nf; ++j) slice[i * Nf + j] *= wt[i] * wf[j];
    }

    const std::size_t Mf = pad_freq * Nf;
    map.range_axis.resize(Mf);
    for (std::size_t c = 0; c < Mf; ++c)
        map.range_axis[c] =
            kSpeedOfLight * static_cast<double>(c) / (2.0 * static_cast<double>(Mf) * df);

    if (Nt == 1) {
        // Single time step: the velocity axis degenerates to a range profile.
        map.velocity_degenerate = true;
        map.velocity_axis = {0.0};
        const auto spec = detail::fft_forward_padded(slice.data(), Nf, Mf);
        map.power_db.resize(Mf);
        for (std::size_t c = 0; c < Mf; ++c) map.power_db[c] = std::norm(spec[c]);
        const PowerStats st = to_db_in_place(map.power_db);
        map.peak_power_linear = st.peak;
        map.total_power_linear = st.total;
        return map;
    }

    const double dt = dataset.axes[0].values[1] - dataset.axes[0].values[0];
    const std::size_t Mt = pad_time * Nt;
    const auto spec = detail::fft2_forward_padded(slice.data(), Nt, Nf, Mt, Mf);

    // Doppler bins above Mt/2 wrap to negative frequencies; reorder rows so the
    // axis runs from -(Mt-1)/2 to +Mt/2 bins (Nyquist edge kept positive).
    const auto s_min = -static_cast<std::ptrdiff_t>((Mt - 1) / 2);
    map.velocity_axis.resize(Mt);
    map.power_db.assign(Mt * Mf, 0.0);
    for (std::size_t k = 0; k < Mt; ++k) {
        const auto s = static_cast<std::ptrdiff_t>(k) <= static_cast<std::ptrdiff_t>(Mt / 2)
                           ? static_cast<std::ptrdiff_t>(k)
                           : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(Mt);
        const auto row = static_cast<std::size_t>(s - s_min);
        const double nu = static_cast<double>(s) / (static_cast<double>(Mt) * dt);
        map.velocity_axis[row] = lambda * nu / 2.0;
        for (std::size_t c = 0; c < Mf; ++c)
            map.power_db[row * Mf + c] = std::norm(spec[k * Mf + c]);
    }
    const PowerStats st = to_db_in_place(map.power_db);
    map.peak_power_linear = st.peak;
    map.total_power_linear = st.total;
    return map;
}

PeakList detect_peaks(const RangeVelocityMap& map, std::size_t n_peaks, std::size_t guard_bins) {
    if (n_peaks < 1) throw std::invalid_argument("detect_peaks: n_peaks must be >= 1");
    const std::size_t R = map.rows();
    const std::size_t C = map.cols();
    std::vector<bool> excluded(R * C, false);

    PeakList out;
    for (std::size_t p = 0; p < n_peaks; ++p) {
        double best = kNegInf;
        std::size_t br = 0, bc = 0;
        bool found = false;
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c) {
                const double v = map.db(r, c);
                if (!excluded[r * C + c] && v > best && v != kNegInf) {
                    best = v;
                    br = r;
                    bc = c;
                    found = true;
                }
            }
        if (!found) {
            out.truncated = true;
            break;
        }

        DetectedTarget t;
        t.range_m = map.range_axis[bc];
        if (!map.velocity_degenerate) t.velocity_mps = map.velocity_axis[br];
        t.power_db = best;
        out.peaks.push_back(t);

        const auto g = static_cast<std::ptrdiff_t>(guard_bins);
        for (std::ptrdiff_t dr = -g; dr <= g; ++dr) {
            // velocity axis is circular
            const std::size_t rr =
                static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(br) + dr) %
                                              static_cast<std::ptrdiff_t>(R) +
                                          static_cast<std::ptrdiff_t>(R)) %
                                         static_cast<std::ptrdiff_t>(R));
            for (std::ptrdiff_t dc = -g; dc <= g; ++dc) {
                const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(bc) + dc;
                if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(C)) continue;
                excluded[rr * C + static_cast<std::size_t>(cc)] = true;
            }
        }
    }
    return out;
}

DelayProfiles delay_profiles(const CfrDataset& dataset, std::size_t time_index,
                             std::size_t pad_freq) {
    check_adtr(dataset);
    if (pad_freq < 1) throw std::invalid_argument("padding factor must be >= 1");
    const std::size_t Nt = dataset.axis_len(0);
    const std::size_t Nf = dataset.axis_len(1);
    const std::size_t K = dataset.axis_len(2);
    if (time_index >= Nt) throw std::invalid_argument("time index out of range");

    const double df = freq_step(dataset.axes[1]);
    const std::size_t Mf = pad_freq * Nf;

    DelayProfiles out;
    out.delay_axis_s.resize(Mf);
    for (std::size_t m = 0; m < Mf; ++m)
        out.delay_axis_s[m] = static_cast<double>(m) / (static_cast<double>(Mf) * df);

    out.per_port.resize(K);
    detail::parallel_for(K, [&](std::size_t k) {
        std::vector<std::complex<double>> row(Nf);
        for (std::size_t j = 0; j < Nf; ++j) row[j] = dataset.at(time_index, j, k);
        out.per_port[k] = detail::fft_forward_padded(row.data(), Nf, Mf);
    });
    return out;
}

std::vector<std::complex<double>> delay_correlate_adtr(const CfrDataset& dataset,
                                                       std::size_t time_index, double tau_s) {
    check_adtr(dataset);
    const std::size_t Nf = dataset.axis_len(1);
    const std::size_t K = dataset.axis_len(2);
    const double fc = dataset.carrier_hz();

    std::vector<std::complex<double>> phasor(Nf);
    for (std::size_t j = 0; j < Nf; ++j) {
        const double f_off = dataset.axes[1].values[j] - fc;
        phasor[j] = std::polar(1.0, -2.0 * kPi * f_off * tau_s);
    }
    std::vector<std::complex<double>> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        std::complex<double> acc{};
        for (std::size_t j = 0; j < Nf; ++j) acc += dataset.at(time_index, j, k) * phasor[j];
        out[k] = acc;
    }
    return out;
}

std::vector<std::complex<double>> two_way_signature(const ArrayGeometry& geometry,
                                                    const FarFieldDirection& dir) {
    auto s = far_field_steering(geometry, dir);
    for (auto& v : s) v *= v;
    return s;
}

std::vector<double> beamform_two_way(std::span<const std::complex<double>> port_values,
                                     const ArrayGeometry& geometry,
                                     const std::vector<double>& elevation_deg,
                                     const std::vector<double>& azimuth_deg) {
    if (port_values.size() != geometry.size())
        throw std::invalid_argument("beamform_two_way: need one value per element");
    if (elevation_deg.empty() || azimuth_deg.empty())
        throw std::invalid_argument("beamform_two_way: empty angle grid");

    std::vector<double> power(elevation_deg.size() * azimuth_deg.size());
    detail::parallel_for(elevation_deg.size(), [&](std::size_t e) {
        for (std::size_t a = 0; a < azimuth_deg.size(); ++a) {
            const auto b = two_way_signature(geometry, {elevation_deg[e], azimuth_deg[a]});
            std::complex<double> acc{};
            for (std::size_t k = 0; k < b.size(); ++k) acc += std::conj(b[k]) * port_values[k];
            power[e * azimuth_deg.size() + a] = std::norm(acc);
        }
    });
    return power;
}

Padp padp_beamform(const DelayProfiles& profiles, const ArrayGeometry& geometry,
                   const std::vector<double>& elevation_deg,
                   const std::vector<double>& azimuth_deg) {
    if (profiles.per_port.size() != geometry.size())
        throw std::invalid_argument("padp_beamform: profile count != element count");
    if (elevation_deg.empty() || azimuth_deg.empty())
        throw std::invalid_argument("padp_beamform: empty angle grid");

    const std::size_t K = geometry.size();
    const std::size_t D = profiles.delay_axis_s.size();
    const std::size_t A = azimuth_deg.size();

    // Delay-major copy so the inner beamforming loop is contiguous.
    std::vector<std::complex<double>> delay_major(D * K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t d = 0; d < D; ++d) delay_major[d * K + k] = profiles.per_port[k][d];

    Padp padp;
    padp.elevation_deg = elevation_deg;
    padp.azimuth_deg = azimuth_deg;
    padp.delay_s = profiles.delay_axis_s;
    padp.power_db.resize(elevation_deg.size() * A * D);

    detail::parallel_for(elevation_deg.size(), [&](std::size_t e) {
        std::vector<std::complex<double>> w(K);
        for (std::size_t a = 0; a < A; ++a) {
            const auto b = two_way_signature(geometry, {elevation_deg[e], azimuth_deg[a]});
            for (std::size_t k = 0; k < K; ++k) w[k] = std::conj(b[k]);
            double* out = padp.power_db.data() + (e * A + a) * D;
            for (std::size_t d = 0; d < D; ++d) {
                const std::complex<double>* x = delay_major.data() + d * K;
                std::complex<double> acc{};
                for (std::size_t k = 0; k < K; ++k) acc += w[k] * x[k];
                out[d] = std::norm(acc);
            }
        }
    });

    const PowerStats st = to_db_in_place(padp.power_db);
    padp.peak_power_linear = st.peak;
    return padp;
}

PasSlice pas_slice(const Padp& padp, std::size_t delay_bin) {
    if (delay_bin >= padp.delay_s.size()) throw std::invalid_argument("delay bin out of range");
    const std::size_t E = padp.elevation_deg.size();
    const std::size_t A = padp.azimuth_deg.size();

    PasSlice slice;
    slice.elevation_deg = padp.elevation_deg;
    slice.azimuth_deg = padp.azimuth_deg;
    slice.power_db.resize(E * A);

    double best = kNegInf;
    std::size_t be = 0, ba = 0;
    for (std::size_t e = 0; e < E; ++e)
        for (std::size_t a = 0; a < A; ++a) {
            const double v = padp.db(e, a, delay_bin);
            slice.power_db[e * A + a] = v;
            if (v > best) {
                best = v;
                be = e;
                ba = a;
            }
        }

    slice.peak.range_m = kSpeedOfLight * padp.delay_s[delay_bin] / 2.0;
    slice.peak.elevation_deg = padp.elevation_deg[be];
    slice.peak.azimuth_deg = padp.azimuth_deg[ba];
    slice.peak.power_db = best;
    return slice;
}

RangeAngleMap joint_range_angle_satr(const CfrDataset& dataset, const ArrayGeometry& geometry,
                                     const std::vector<double>& range_grid_m,
                                     const std::vector<double>& angle_grid_deg, Window window) {
    check_satr(dataset);
    if (range_grid_m.empty() || angle_grid_deg.empty())
        throw std::invalid_argument("joint_range_angle_satr: empty grid");

    const std::size_t Kr = dataset.axis_len(0);
    const std::size_t Kt = dataset.axis_len(1);
    const std::size_t Nf = dataset.axis_len(2);
    const double fc = dataset.carrier_hz();

    std::vector<std::size_t> rx_el(Kr), tx_el(Kt);
    for (std::size_t k = 0; k < Kr; ++k)
        rx_el[k] = static_cast<std::size_t>(dataset.axes[0].values[k]);
    for (std::size_t k = 0; k < Kt; ++k)
        tx_el[k] = static_cast<std::size_t>(dataset.axes[1].values[k]);
    for (std::size_t k : rx_el)
        if (k >= geometry.size())
            throw std::invalid_argument("joint_range_angle_satr: dataset ports exceed geometry");
    for (std::size_t k : tx_el)
        if (k >= geometry.size())
            throw std::invalid_argument("joint_range_angle_satr: dataset ports exceed geometry");

    const auto taper = window_weights(window, Nf);
    std::vector<double> f_off(Nf);
    for (std::size_t j = 0; j < Nf; ++j) f_off[j] = dataset.axes[2].values[j] - fc;

    RangeAngleMap map;
    map.range_axis_m = range_grid_m;
    map.angle_axis_deg = angle_grid_deg;
    map.power_db.assign(range_grid_m.size() * angle_grid_deg.size(), 0.0);

    detail::parallel_for(range_grid_m.size(), [&](std::size_t ri) {
        const double range = range_grid_m[ri];
        const double tau = 2.0 * range / kSpeedOfLight;

        // Frequency correlation first: it depends on range only.
        std::vector<std::complex<double>> phasor(Nf);
        for (std::size_t j = 0; j < Nf; ++j)
            phasor[j] = taper[j] * std::polar(1.0, -2.0 * kPi * f_off[j] * tau);
        std::vector<std::complex<double>> Y(Kr * Kt);
        for (std::size_t kr = 0; kr < Kr; ++kr)
            for (std::size_t kt = 0; kt < Kt; ++kt) {
                std::complex<double> acc{};
                const std::complex<double>* x = dataset.samples.data() + (kr * Kt + kt) * Nf;
                for (std::size_t j = 0; j < Nf; ++j) acc += x[j] * phasor[j];
                Y[kr * Kt + kt] = acc;
            }

        double* out = map.power_db.data() + ri * angle_grid_deg.size();
        for (std::size_t ai = 0; ai < angle_grid_deg.size(); ++ai) {
            const double a = angle_grid_deg[ai] * kPi / 180.0;
            const NearFieldPoint pt{{range * std::sin(a), range * std::cos(a), 0.0}};
            const auto tx_ph = near_field_phases(geometry, pt, tx_el);
            const auto rx_ph = near_field_phases(geometry, pt, rx_el);
            std::complex<double> acc{};
            for (std::size_t kr = 0; kr < Kr; ++kr) {
                std::complex<double> inner{};
                const std::complex<double>* y = Y.data() + kr * Kt;
                for (std::size_t kt = 0; kt < Kt; ++kt) inner += std::conj(tx_ph[kt]) * y[kt];
                acc += std::conj(rx_ph[kr]) * inner;
            }
            out[ai] = std::norm(acc);
        }
    });

    double best = -1.0;
    std::size_t br = 0, ba = 0;
    for (std::size_t r = 0; r < range_grid_m.size(); ++r)
        for (std::size_t a = 0; a < angle_grid_deg.size(); ++a) {
            const double v = map.power_db[r * angle_grid_deg.size() + a];
            if (v > best) {
                best = v;
                br = r;
                ba = a;
            }
        }
    const PowerStats st = to_db_in_place(map.power_db);
    map.peak_power_linear = st.peak;
    map.peak.range_m = range_grid_m[br];
    map.peak.azimuth_deg = angle_grid_deg[ba];
    map.peak.power_db = 0.0;
    return map;
}

} // namespace isac
