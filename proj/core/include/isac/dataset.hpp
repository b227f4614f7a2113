#ifndef ISAC_DATASET_HPP
#define ISAC_DATASET_HPP

#include <complex>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

struct Axis {
    std::string name;           // "time_s", "frequency_hz", "port", ...
    std::vector<double> values; // grid values in axis units
};

// Recorded channel-frequency-response tensor.
//   ADTR: axes [time_s, frequency_hz, port], one monostatic port per element.
//   SATR: axes [rx_port, tx_port, frequency_hz] (static, single time step).
// Samples are stored with the last axis fastest.
struct CfrDataset {
    Mode mode = Mode::Adtr;
    std::vector<Axis> axes;
    std::vector<std::complex<double>> samples;
    std::string metadata_json; // echo of the generating snapshot

    std::size_t axis_len(std::size_t i) const { return axes.at(i).values.size(); }
    std::size_t sample_count() const;
    std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2) const {
        return (i0 * axis_len(1) + i1) * axis_len(2) + i2;
    }
    const std::complex<double>& at(std::size_t i0, std::size_t i1, std::size_t i2) const {
        return samples[index(i0, i1, i2)];
    }
    std::complex<double>& at(std::size_t i0, std::size_t i1, std::size_t i2) {
        return samples[index(i0, i1, i2)];
    }
    // Center of the frequency axis (the carrier for a symmetric sweep).
    double carrier_hz() const;
    const Axis& frequency_axis() const;
};

class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& msg, std::size_t byte_offset)
        : std::runtime_error(msg + " (at byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// ISACCFR1 container, little-endian throughout:
//   magic "ISACCFR1" | u32 version | u8 mode | u8 axis_count | u32 lengths[...]
//   | f64 axis grids in order | interleaved f64 (re, im) samples, last axis
//   fastest | u32 metadata byte length | UTF-8 metadata.
// Writes are atomic (temp file + rename); round trips are bit-exact.
void write_dataset(const CfrDataset& d, const std::filesystem::path& path);
CfrDataset read_dataset(const std::filesystem::path& path);

} // namespace isac

#endif
