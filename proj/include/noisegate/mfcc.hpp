#pragma once

#include <cstddef>
#include <vector>

#include "noisegate/audio_io.hpp"

namespace ng {

inline constexpr std::size_t kNumMfcc = 33;

struct MfccMatrix {
    std::vector<std::vector<double>> coeffs;  // [frame][33]
    std::vector<std::vector<double>> delta1;
    std::vector<std::vector<double>> delta2;
};

double mel_from_hz(double hz);
double hz_from_mel(double mel);

// Central differences across frames (x[n+1] - x[n-1]) with replicated
// endpoints.
std::vector<std::vector<double>> frame_deltas(const std::vector<std::vector<double>>& m);

// 33 cepstral coefficients per frame from a 33-filter mel bank spanning
// [fmin, fmax], plus first and second deltas.
MfccMatrix mfcc(const AudioBuffer& buf, double fmin_hz, double fmax_hz,
                std::size_t window_len = 512, std::size_t hop = 256);

}  // namespace ng
