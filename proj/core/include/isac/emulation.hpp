#ifndef ISAC_EMULATION_HPP
#define ISAC_EMULATION_HPP

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::complex<double>> data; // row-major

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
    std::complex<double>& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const std::complex<double>& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// One Type-B port pair per emulated target: signal leaves the APM toward the
// RTS input on tx_port and returns from the RTS output on rx_port.
struct PortGroup {
    std::uint32_t tx_port = 0;
    std::uint32_t rx_port = 0;
};

struct ApmConfig {
    Mode mode = Mode::Adtr;
    std::size_t type_a_count = 0;           // K antenna-side ports
    std::vector<PortGroup> type_b_groups;   // N target groups
    ComplexMatrix weights_tx;               // K x N, antenna port -> Bn_T
    ComplexMatrix weights_rx;               // K x N, Bn_R -> antenna port
    // Antenna ports participating in each direction; duplex arrays list all
    // ports on both sides, split arrays list the disjoint Tx/Rx subsets.
    // Rows of weights_tx / weights_rx outside these sets are structurally zero.
    std::vector<std::uint32_t> tx_ports;
    std::vector<std::uint32_t> rx_ports;
    bool quantization_applied = false;
    Quantization quantization;
};

struct CirRecord {
    double delay_s = 0.0;
    std::complex<double> gain; // amplitude gain with the stepped Doppler phasor applied
    double doppler_hz = 0.0;
};

struct RtsUnitConfig {
    std::size_t unit_index = 0;
    double update_interval_s = 0.0;
    std::vector<CirRecord> cir_sequence; // one record per CIR time step
};

struct CompiledSnapshot {
    std::string label;
    ApmConfig apm;
    std::vector<RtsUnitConfig> units;
};

// Duplex-mode compiler: one steering-vector column per target in each weight
// matrix (Tx and Rx columns identical), per-target delay/Doppler/gain in the
// RTS units. Applies the scenario quantization unless it is "ideal".
CompiledSnapshot compile_adtr(const SensingScenario& s, const Snapshot& snap);

// Split-array compiler: spherical-wavefront per-element phases over the Tx and
// Rx subsets, uniform amplitude; delay/Doppler/gain in the RTS units.
CompiledSnapshot compile_satr(const SensingScenario& s, const Snapshot& snap);

// Rounds every weight phase to the nearest multiple of 2*pi/2^phase_bits and,
// when amp_step_db > 0, the amplitude in dB to the nearest multiple of
// amp_step_db. Structural zeros stay zero.
ApmConfig quantize_apm(const ApmConfig& cfg, int phase_bits, double amp_step_db);

// JSON bundle with the APM matrices and RTS unit CIR sequences; deterministic.
void write_config_bundle(const CompiledSnapshot& cs, const std::filesystem::path& path);
CompiledSnapshot read_config_bundle(const std::filesystem::path& path);

} // namespace isac

#endif
