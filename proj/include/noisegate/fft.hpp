#pragma once

#include <complex>
#include <vector>

namespace ng::fft {

// Complex DFT of arbitrary length. Thread-safe; plans are cached internally.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& x);

// Inverse DFT including the 1/n normalization.
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& x);

std::vector<std::complex<double>> forward_real(const std::vector<double>& x);

}  // namespace ng::fft
