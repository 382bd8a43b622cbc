#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "noisegate/dsp.hpp"

namespace ng {

struct BandSpec {
    double low_hz = 0.0;
    double high_hz = 0.0;
    std::string name;
};

struct BackgroundNoiseEstimate {
    double mode = 0.0;     // center of the modal histogram bin
    double std_dev = 0.0;  // envelope standard deviation
    double bgn = 0.0;      // mode + std_dev
};

inline constexpr double kCoverLowThreshold = 0.0001;
inline constexpr double kCoverMedThreshold = 0.0003;

// The seven analysis bands; the last one runs up to Nyquist so the bands tile
// the whole spectrum.
const std::vector<BandSpec>& canonical_bands();
// Bands that survive a 1 kHz high-pass (drops the two sub-1 kHz bands).
std::vector<BandSpec> active_bands(bool highpassed);
BandSpec full_band(int sample_rate);
BandSpec rain_band();  // 600-1200 Hz

// Indices of spectrogram bins whose center frequency falls in the band.
std::vector<std::size_t> band_bins(const Spectrogram& spec, const BandSpec& band);

// Entropy of the normalized envelope, scaled to [0, 1]. Degenerate input
// (all-zero or single-sample) maps to 1.0.
double temporal_entropy(const std::vector<double>& envelope);

// Per-frame entropy of the in-band magnitude distribution, normalized by
// log(bin count) and averaged across frames.
double spectral_entropy(const Spectrogram& spec, const BandSpec& band);

// Histogram-mode background level (100 bins over [0, max]) plus envelope
// standard deviation.
BackgroundNoiseEstimate background_noise(const std::vector<double>& envelope);

// Mean in-band magnitude over all frames.
double psd(const Spectrogram& spec, const BandSpec& band);

// Mean over std of per-bin time-averaged magnitudes (inverse coefficient of
// variation across frequency). Returns 1e9 when the profile is exactly flat.
double snr_spectral(const Spectrogram& spec, const BandSpec& band);

// Coefficient of variation of per-frame summed intensity. 0 for silence.
double isnr(const Spectrogram& spec);
double isnr(const Spectrogram& spec, const BandSpec& band);

// Mean of isnr over consecutive 0.1 s frame groups.
double ssnr(const Spectrogram& spec);
double ssnr(const Spectrogram& spec, const BandSpec& band);

// Per-bin sum of absolute successive-frame differences over the bin's total
// intensity, averaged across in-band bins.
double aci(const Spectrogram& spec, const BandSpec& band);

// Fraction of in-band spectrogram cells above the threshold.
double spectral_cover(const Spectrogram& spec, const BandSpec& band, double threshold);

}  // namespace ng
