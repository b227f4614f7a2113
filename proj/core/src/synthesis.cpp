#include "isac/synthesis.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "parallel.hpp"

namespace isac {

namespace {

std::vector<double> baseband_offsets(const SweepParams& sweep) {
    std::vector<double> f(sweep.n_freq);
    if (sweep.n_freq == 1) {
        f[0] = 0.0;
        return f;
    }
    const double df = sweep.bandwidth_hz / static_cast<double>(sweep.n_freq - 1);
    for (std::size_t j = 0; j < sweep.n_freq; ++j)
        f[j] = -0.5 * sweep.bandwidth_hz + static_cast<double>(j) * df;
    return f;
}

void check_inputs(const ApmConfig& apm, const std::vector<RtsUnitConfig>& units,
                  const SweepParams& sweep) {
    if (sweep.n_freq < 1 || sweep.bandwidth_hz <= 0.0 || sweep.carrier_hz <= 0.0)
        throw std::invalid_argument("synthesize: bad sweep parameters");
    if (units.empty()) throw std::invalid_argument("synthesize: no RTS units");
    if (apm.weights_tx.cols != units.size() || apm.weights_rx.cols != units.size())
        throw std::invalid_argument("synthesize: APM column count != RTS unit count");
    if (apm.weights_tx.rows != apm.type_a_count || apm.weights_rx.rows != apm.type_a_count)
        throw std::invalid_argument("synthesize: APM row count != type-A port count");
    const std::size_t nt = units.front().cir_sequence.size();
    const double dt = units.front().update_interval_s;
    for (const RtsUnitConfig& u : units) {
        if (u.cir_sequence.empty()) throw std::invalid_argument("synthesize: empty CIR sequence");
        if (u.cir_sequence.size() != nt || u.update_interval_s != dt)
            throw std::invalid_argument("synthesize: RTS units disagree on the time grid");
    }
}

// exp(j*2*pi*f'_j*delay_n) for every (target, frequency) pair.
std::vector<std::complex<double>> delay_phasors(const std::vector<double>& f,
                                                const std::vector<double>& delays) {
    std::vector<std::complex<double>> out(delays.size() * f.size());
    for (std::size_t n = 0; n < delays.size(); ++n)
        for (std::size_t j = 0; j < f.size(); ++j)
            out[n * f.size() + j] = std::polar(1.0, 2.0 * kPi * f[j] * delays[n]);
    return out;
}

bool constant_delays(const RtsUnitConfig& u) {
    for (const CirRecord& r : u.cir_sequence)
        if (r.delay_s != u.cir_sequence.front().delay_s) return false;
    return true;
}

} // namespace

CfrDataset synthesize_cfr_adtr(const ApmConfig& apm, const std::vector<RtsUnitConfig>& units,
                               const SweepParams& sweep, std::string metadata_json) {
    if (apm.mode != Mode::Adtr)
        throw std::invalid_argument("synthesize_cfr_adtr: APM config is not ADTR");
    check_inputs(apm, units, sweep);

    const std::size_t K = apm.type_a_count;
    const std::size_t N = units.size();
    const std::size_t Nt = units.front().cir_sequence.size();
    const std::size_t Nf = sweep.n_freq;
    const double dt = units.front().update_interval_s;
    const std::vector<double> f = baseband_offsets(sweep);

    CfrDataset d;
    d.mode = Mode::Adtr;
    d.axes.resize(3);
    d.axes[0].name = "time_s";
    d.axes[0].values.resize(Nt);
    for (std::size_t i = 0; i < Nt; ++i) d.axes[0].values[i] = static_cast<double>(i) * dt;
    d.axes[1].name = "frequency_hz";
    d.axes[1].values.resize(Nf);
    for (std::size_t j = 0; j < Nf; ++j) d.axes[1].values[j] = sweep.carrier_hz + f[j];
    d.axes[2].name = "port";
    d.axes[2].values.resize(K);
    for (std::size_t k = 0; k < K; ++k) d.axes[2].values[k] = static_cast<double>(k);
    d.metadata_json = std::move(metadata_json);
    d.samples.assign(Nt * Nf * K, {});

    // Monostatic two-way spatial factor per (port, target).
    std::vector<std::complex<double>> spatial(K * N);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t n = 0; n < N; ++n)
            spatial[k * N + n] = apm.weights_tx.at(k, n) * apm.weights_rx.at(k, n);

    bool hoist = true;
    for (const RtsUnitConfig& u : units) hoist = hoist && constant_delays(u);
    std::vector<std::complex<double>> freq_fixed;
    if (hoist) {
        std::vector<double> delays(N);
        for (std::size_t n = 0; n < N; ++n) delays[n] = units[n].cir_sequence.front().delay_s;
        freq_fixed = delay_phasors(f, delays);
    }

    detail::parallel_for(Nt, [&](std::size_t i) {
        std::vector<std::complex<double>> freq_local;
        const std::complex<double>* F = freq_fixed.data();
        if (!hoist) {
            std::vector<double> delays(N);
            for (std::size_t n = 0; n < N; ++n) delays[n] = units[n].cir_sequence[i].delay_s;
            freq_local = delay_phasors(f, delays);
            F = freq_local.data();
        }
        std::vector<std::complex<double>> h(N);
        std::complex<double>* row = d.samples.data() + i * Nf * K;
        for (std::size_t j = 0; j < Nf; ++j) {
            for (std::size_t n = 0; n < N; ++n)
                h[n] = units[n].cir_sequence[i].gain * F[n * Nf + j];
            for (std::size_t k = 0; k < K; ++k) {
                std::complex<double> acc{};
                const std::complex<double>* a = spatial.data() + k * N;
                for (std::size_t n = 0; n < N; ++n) acc += a[n] * h[n];
                row[j * K + k] = acc;
            }
        }
    });
    return d;
}

CfrDataset synthesize_cfr_satr(const ApmConfig& apm, const std::vector<RtsUnitConfig>& units,
                               const SweepParams& sweep, std::string metadata_json) {
    if (apm.mode != Mode::Satr)
        throw std::invalid_argument("synthesize_cfr_satr: APM config is not SATR");
    check_inputs(apm, units, sweep);
    if (units.front().cir_sequence.size() != 1)
        throw std::invalid_argument("synthesize_cfr_satr: static acquisition needs n_time = 1");

    const std::size_t Kr = apm.rx_ports.size();
    const std::size_t Kt = apm.tx_ports.size();
    const std::size_t N = units.size();
    const std::size_t Nf = sweep.n_freq;
    const std::vector<double> f = baseband_offsets(sweep);

    CfrDataset d;
    d.mode = Mode::Satr;
    d.axes.resize(3);
    d.axes[0].name = "rx_port";
    d.axes[0].values.resize(Kr);
    for (std::size_t k = 0; k < Kr; ++k) d.axes[0].values[k] = static_cast<double>(apm.rx_ports[k]);
    d.axes[1].name = "tx_port";
    d.axes[1].values.resize(Kt);
    for (std::size_t k = 0; k < Kt; ++k) d.axes[1].values[k] = static_cast<double>(apm.tx_ports[k]);
    d.axes[2].name = "frequency_hz";
    d.axes[2].values.resize(Nf);
    for (std::size_t j = 0; j < Nf; ++j) d.axes[2].values[j] = sweep.carrier_hz + f[j];
    d.metadata_json = std::move(metadata_json);
    d.samples.assign(Kr * Kt * Nf, {});

    std::vector<double> delays(N);
    for (std::size_t n = 0; n < N; ++n) delays[n] = units[n].cir_sequence.front().delay_s;
    const auto F = delay_phasors(f, delays);

    detail::parallel_for(Kr, [&](std::size_t kr) {
        const std::size_t row_r = apm.rx_ports[kr];
        for (std::size_t kt = 0; kt < Kt; ++kt) {
            const std::size_t row_t = apm.tx_ports[kt];
            std::complex<double>* out = d.samples.data() + (kr * Kt + kt) * Nf;
            for (std::size_t n = 0; n < N; ++n) {
                const std::complex<double> c = apm.weights_tx.at(row_t, n) *
                                               apm.weights_rx.at(row_r, n) *
                                               units[n].cir_sequence.front().gain;
                const std::complex<double>* Fn = F.data() + n * Nf;
                for (std::size_t j = 0; j < Nf; ++j) out[j] += c * Fn[j];
            }
        }
    });
    return d;
}

void add_complex_awgn(CfrDataset& d, double snr_db, std::uint64_t seed) {
    if (d.samples.empty()) return;
    double mean_power = 0.0;
    for (const auto& c : d.samples) mean_power += std::norm(c);
    mean_power /= static_cast<double>(d.samples.size());
    const double noise_power = mean_power / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_power / 2.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (auto& c : d.samples) c += std::complex<double>(gauss(rng), gauss(rng));
}

} // namespace isac
