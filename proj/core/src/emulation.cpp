#include "isac/emulation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace isac {

namespace {

std::vector<RtsUnitConfig> build_units(const SensingScenario& s, const Snapshot& snap) {
    const double dt = snapshot_update_interval_s(s, snap);
    const double lambda = s.wavelength_m();

    std::vector<RtsUnitConfig> units;
    units.reserve(snap.targets.size());
    for (std::size_t n = 0; n < snap.targets.size(); ++n) {
        const TargetState& t = snap.targets[n];
        const double amp = target_amplitude(t, lambda);
        const double nu = doppler_of(t.radial_velocity_mps, lambda);

        RtsUnitConfig u;
        u.unit_index = n;
        u.update_interval_s = dt;
        u.cir_sequence.reserve(s.n_time);
        for (std::size_t i = 0; i < s.n_time; ++i) {
            const double ti = static_cast<double>(i) * dt;
            CirRecord rec;
            const double range = s.range_migration
                                     ? t.range_m - t.radial_velocity_mps * ti
                                     : t.range_m;
            if (range <= 0.0)
                throw std::invalid_argument("range migration drives target through the array");
            rec.delay_s = delay_of(range);
            rec.gain = std::polar(amp, 2.0 * kPi * nu * ti);
            rec.doppler_hz = nu;
            u.cir_sequence.push_back(rec);
        }
        units.push_back(std::move(u));
    }
    return units;
}

void maybe_quantize(const SensingScenario& s, CompiledSnapshot& cs) {
    if (!s.quantization.ideal) {
        cs.apm = quantize_apm(cs.apm, s.quantization.phase_bits, s.quantization.amp_step_db);
        cs.apm.quantization = s.quantization;
    }
}

} // namespace

CompiledSnapshot compile_adtr(const SensingScenario& s, const Snapshot& snap) {
    if (s.mode != Mode::Adtr)
        throw std::invalid_argument("compile_adtr: scenario is not in ADTR mode");

    const ArrayGeometry geom = s.make_geometry();
    const std::size_t K = geom.size();
    const std::size_t N = snap.targets.size();

    CompiledSnapshot cs;
    cs.label = snap.label;
    cs.apm.mode = Mode::Adtr;
    cs.apm.type_a_count = K;
    cs.apm.weights_tx = ComplexMatrix(K, N);
    cs.apm.weights_rx = ComplexMatrix(K, N);
    for (std::size_t n = 0; n < N; ++n) {
        cs.apm.type_b_groups.push_back({static_cast<std::uint32_t>(2 * n),
                                        static_cast<std::uint32_t>(2 * n + 1)});
        const auto steer = far_field_steering(geom, snap.targets[n].far_field());
        for (std::size_t k = 0; k < K; ++k) {
            cs.apm.weights_tx.at(k, n) = steer[k];
            cs.apm.weights_rx.at(k, n) = steer[k]; // a_r and a_t identical in duplex mode
        }
    }
    cs.apm.tx_ports.resize(K);
    cs.apm.rx_ports.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        cs.apm.tx_ports[k] = static_cast<std::uint32_t>(k);
        cs.apm.rx_ports[k] = static_cast<std::uint32_t>(k);
    }

    cs.units = build_units(s, snap);
    maybe_quantize(s, cs);
    return cs;
}

CompiledSnapshot compile_satr(const SensingScenario& s, const Snapshot& snap) {
    if (s.mode != Mode::Satr)
        throw std::invalid_argument("compile_satr: scenario is not in SATR mode");

    const ArrayGeometry geom = s.make_geometry();
    const std::size_t K = geom.size();
    const std::size_t N = snap.targets.size();
    const auto tx_idx = geom.tx_indices();
    const auto rx_idx = geom.rx_indices();

    CompiledSnapshot cs;
    cs.label = snap.label;
    cs.apm.mode = Mode::Satr;
    cs.apm.type_a_count = K;
    cs.apm.weights_tx = ComplexMatrix(K, N);
    cs.apm.weights_rx = ComplexMatrix(K, N);
    for (std::size_t n = 0; n < N; ++n) {
        cs.apm.type_b_groups.push_back({static_cast<std::uint32_t>(2 * n),
                                        static_cast<std::uint32_t>(2 * n + 1)});
        const NearFieldPoint pt = snap.targets[n].near_field_point();
        const auto tx_phases = near_field_phases(geom, pt, tx_idx);
        const auto rx_phases = near_field_phases(geom, pt, rx_idx);
        for (std::size_t i = 0; i < tx_idx.size(); ++i)
            cs.apm.weights_tx.at(tx_idx[i], n) = tx_phases[i];
        for (std::size_t i = 0; i < rx_idx.size(); ++i)
            cs.apm.weights_rx.at(rx_idx[i], n) = rx_phases[i];
        // rows outside the masks stay zero: those APM links do not exist
    }
    cs.apm.tx_ports.assign(tx_idx.begin(), tx_idx.end());
    cs.apm.rx_ports.assign(rx_idx.begin(), rx_idx.end());

    cs.units = build_units(s, snap);
    maybe_quantize(s, cs);
    return cs;
}

ApmConfig quantize_apm(const ApmConfig& cfg, int phase_bits, double amp_step_db) {
    if (phase_bits < 1) throw std::invalid_argument("quantize_apm: phase_bits must be >= 1");
    if (amp_step_db < 0.0) throw std::invalid_argument("quantize_apm: amp_step_db must be >= 0");

    const double phase_step = 2.0 * kPi / std::pow(2.0, phase_bits);
    auto quantize = [&](std::complex<double> w) -> std::complex<double> {
        if (w == std::complex<double>{0.0, 0.0}) return w; // structural zero
        double amp = std::abs(w);
        const double phase = phase_step * std::round(std::arg(w) / phase_step);
        if (amp_step_db > 0.0) {
            const double amp_db = 20.0 * std::log10(amp);
            amp = std::pow(10.0, amp_step_db * std::round(amp_db / amp_step_db) / 20.0);
        }
        return std::polar(amp, phase);
    };

    ApmConfig out = cfg;
    for (auto& w : out.weights_tx.data) w = quantize(w);
    for (auto& w : out.weights_rx.data) w = quantize(w);
    out.quantization_applied = true;
    out.quantization.ideal = false;
    out.quantization.phase_bits = phase_bits;
    out.quantization.amp_step_db = amp_step_db;
    return out;
}

// --- config bundle serialization -------------------------------------------

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json complex_to_json(const std::complex<double>& c) {
    return ordered_json::array({c.real(), c.imag()});
}

std::complex<double> complex_from_json(const ordered_json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

ordered_json matrix_to_json(const ComplexMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(complex_to_json(m.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

ComplexMatrix matrix_from_json(const ordered_json& j) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = complex_from_json(j.at(r).at(c));
    return m;
}

} // namespace

void write_config_bundle(const CompiledSnapshot& cs, const std::filesystem::path& path) {
    ordered_json j;
    j["schema_version"] = 1;
    j["label"] = cs.label;
    j["mode"] = mode_name(cs.apm.mode);

    ordered_json apm;
    apm["type_a_count"] = cs.apm.type_a_count;
    ordered_json groups = ordered_json::array();
    for (const PortGroup& g : cs.apm.type_b_groups)
        groups.push_back(ordered_json{{"tx_port", g.tx_port}, {"rx_port", g.rx_port}});
    apm["type_b_groups"] = groups;
    apm["tx_ports"] = cs.apm.tx_ports;
    apm["rx_ports"] = cs.apm.rx_ports;
    apm["weights_tx"] = matrix_to_json(cs.apm.weights_tx);
    apm["weights_rx"] = matrix_to_json(cs.apm.weights_rx);
    apm["quantization_applied"] = cs.apm.quantization_applied;
    if (cs.apm.quantization_applied) {
        apm["quantization"] = ordered_json{{"phase_bits", cs.apm.quantization.phase_bits},
                                           {"amp_step_db", cs.apm.quantization.amp_step_db}};
    }
    j["apm"] = apm;

    ordered_json units = ordered_json::array();
    for (const RtsUnitConfig& u : cs.units) {
        ordered_json uj;
        uj["unit_index"] = u.unit_index;
        uj["update_interval_s"] = u.update_interval_s;
        ordered_json recs = ordered_json::array();
        for (const CirRecord& r : u.cir_sequence) {
            recs.push_back(ordered_json{{"delay_s", r.delay_s},
                                        {"gain", complex_to_json(r.gain)},
                                        {"doppler_hz", r.doppler_hz}});
        }
        uj["cir_sequence"] = recs;
        units.push_back(uj);
    }
    j["rts_units"] = units;
    j["rts_units_used"] = cs.units.size();

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write config bundle: " + path.string());
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

CompiledSnapshot read_config_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config bundle: " + path.string());
    ordered_json j = ordered_json::parse(in);

    CompiledSnapshot cs;
    cs.label = j.at("label").get<std::string>();
    const ordered_json& apm = j.at("apm");
    cs.apm.mode = mode_from_name(j.at("mode").get<std::string>());
    cs.apm.type_a_count = apm.at("type_a_count").get<std::size_t>();
    for (const ordered_json& g : apm.at("type_b_groups"))
        cs.apm.type_b_groups.push_back({g.at("tx_port").get<std::uint32_t>(),
                                        g.at("rx_port").get<std::uint32_t>()});
    cs.apm.tx_ports = apm.at("tx_ports").get<std::vector<std::uint32_t>>();
    cs.apm.rx_ports = apm.at("rx_ports").get<std::vector<std::uint32_t>>();
    cs.apm.weights_tx = matrix_from_json(apm.at("weights_tx"));
    cs.apm.weights_rx = matrix_from_json(apm.at("weights_rx"));
    cs.apm.quantization_applied = apm.value("quantization_applied", false);
    if (cs.apm.quantization_applied) {
        cs.apm.quantization.ideal = false;
        cs.apm.quantization.phase_bits = apm.at("quantization").at("phase_bits").get<int>();
        cs.apm.quantization.amp_step_db = apm.at("quantization").at("amp_step_db").get<double>();
    }

    for (const ordered_json& uj : j.at("rts_units")) {
        RtsUnitConfig u;
        u.unit_index = uj.at("unit_index").get<std::size_t>();
        u.update_interval_s = uj.at("update_interval_s").get<double>();
        for (const ordered_json& rj : uj.at("cir_sequence")) {
            CirRecord r;
            r.delay_s = rj.at("delay_s").get<double>();
            r.gain = complex_from_json(rj.at("gain"));
            r.doppler_hz = rj.at("doppler_hz").get<double>();
            u.cir_sequence.push_back(r);
        }
        cs.units.push_back(std::move(u));
    }
    return cs;
}

} // namespace isac
