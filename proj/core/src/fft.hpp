#ifndef ISAC_SRC_FFT_HPP
#define ISAC_SRC_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace isac::detail {

// Forward (exp(-j...)) DFT of the input zero-padded to length m. Unnormalized.
std::vector<std::complex<double>> fft_forward_padded(const std::complex<double>* in, std::size_t n,
                                                     std::size_t m);

// Forward 2D DFT of an r0 x c0 row-major block zero-padded to m0 x m1.
std::vector<std::complex<double>> fft2_forward_padded(const std::complex<double>* in,
                                                      std::size_t r0, std::size_t c0,
                                                      std::size_t m0, std::size_t m1);

} // namespace isac::detail

#endif
