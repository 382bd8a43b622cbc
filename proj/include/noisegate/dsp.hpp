#pragma once

#include <cstddef>
#include <vector>

#include "noisegate/audio_io.hpp"

namespace ng {

using FirKernel = std::vector<double>;

// Magnitude spectrogram. Magnitudes are scaled so a full-scale sine lands at
// ~1.0 in its bin, which keeps the spectral-cover thresholds meaningful.
struct Spectrogram {
    std::vector<std::vector<double>> mags;  // [frame][bin]
    int sample_rate = 0;
    std::size_t window_len = 0;
    std::size_t hop = 0;

    std::size_t frames() const { return mags.size(); }
    std::size_t bins() const { return mags.empty() ? 0 : mags.front().size(); }
    double bin_hz() const { return static_cast<double>(sample_rate) / static_cast<double>(window_len); }
    double frame_seconds() const { return static_cast<double>(hop) / sample_rate; }
};

Spectrogram stft(const AudioBuffer& buf, std::size_t window_len = 512, std::size_t hop = 256);

// Magnitude of the analytic signal (Hilbert transform via full-length FFT).
std::vector<double> analytic_envelope(const AudioBuffer& buf);

// Blackman-windowed sinc designs. taps must be odd.
FirKernel design_highpass(double cutoff_hz, int sample_rate, std::size_t taps);
FirKernel design_bandstop(double low_hz, double high_hz, int sample_rate, std::size_t taps);

// Approximate width in Hz of the transition region of the designs above.
double fir_transition_hz(std::size_t taps, int sample_rate);

// Zero-phase application: output has the same length as the input, with the
// group delay compensated and edges treated as zero-padded.
AudioBuffer apply_fir(const AudioBuffer& buf, const FirKernel& kernel);

// Short-time spectral amplitude noise reduction (decision-directed a-priori
// SNR, alpha 0.98; per-bin noise floor from the modal magnitude over frames).
AudioBuffer mmse_stsa(const AudioBuffer& buf, std::size_t window_len = 512, std::size_t hop = 256);

}  // namespace ng
