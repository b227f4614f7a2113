#include "fft.hpp"

#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace isac::detail {

namespace {
// FFTW planning (and plan destruction) is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

std::vector<std::complex<double>> fft_forward_padded(const std::complex<double>* in, std::size_t n,
                                                     std::size_t m) {
    if (m < n || m == 0) throw std::invalid_argument("fft_forward_padded: bad lengths");
    std::vector<std::complex<double>> buf(m);
    std::memcpy(buf.data(), in, n * sizeof(std::complex<double>));

    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(m), data, data, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!plan) throw std::runtime_error("fftw_plan_dft_1d failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return buf;
}

std::vector<std::complex<double>> fft2_forward_padded(const std::complex<double>* in,
                                                      std::size_t r0, std::size_t c0,
                                                      std::size_t m0, std::size_t m1) {
    if (m0 < r0 || m1 < c0 || m0 == 0 || m1 == 0)
        throw std::invalid_argument("fft2_forward_padded: bad lengths");
    std::vector<std::complex<double>> buf(m0 * m1);
    for (std::size_t r = 0; r < r0; ++r)
        std::memcpy(buf.data() + r * m1, in + r * c0, c0 * sizeof(std::complex<double>));

    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(m0), static_cast<int>(m1), data, data,
                                FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!plan) throw std::runtime_error("fftw_plan_dft_2d failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return buf;
}

} // namespace isac::detail
