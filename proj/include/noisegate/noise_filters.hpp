#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noisegate/audio_io.hpp"
#include "noisegate/classifiers.hpp"
#include "noisegate/dsp.hpp"

namespace ng {

struct GateResult {
    std::vector<Segment> kept;
    std::vector<Segment> dropped;
    std::vector<double> probabilities;  // input order
    std::vector<std::string> errors;
};

// Drops a segment when the model's rain probability reaches the threshold.
GateResult gate_rain(const std::vector<Segment>& segments, const TrainedModel& model,
                     double threshold);

// Fixed-rule rain baseline on the 600-1200 Hz band: rain when
// psd > 3e-5*x^2 - 3e-5*x and snr > 0.64 + 0.01*x.
bool bedoya_classify(const Segment& seg, double x);

// Area under the operating curve traced by sweeping x.
double bedoya_sweep_auc(const std::vector<Segment>& segments, const std::vector<int>& labels,
                        double x_lo = 0.0, double x_hi = 50.0, double step = 1.0);

inline constexpr double kCicadaPmfThreshold = 0.0125;
inline constexpr double kCicadaRsdLimit = 70.0;  // percent

struct CicadaBandProfile {
    std::vector<double> mean_pmf;  // per bin, sums to ~1
    std::vector<double> rsd;       // percent; +inf where the mean is zero
    double bin_hz = 0.0;
};

// Per-frame spectral PMFs averaged over frames, with relative standard
// deviation per bin. Needs >= 10 non-silent frames.
CicadaBandProfile cicada_band_profile(const Spectrogram& spec);

struct CicadaBand {
    double low_hz = 0.0;
    double high_hz = 0.0;
    double score = 0.0;  // summed mean PMF of the run
};

// Best run (>= 2 consecutive bins) with mean PMF above 0.0125 and RSD below
// 70%; ties go to the lower-frequency run. Band edges are the outer bin
// edges.
std::optional<CicadaBand> select_cicada_band(const CicadaBandProfile& prof);

// Band selection + band-stop filtering, unconditionally (no detector).
// Returns the input untouched when no band qualifies.
std::pair<AudioBuffer, std::optional<CicadaBand>> apply_cicada_bandstop(
    const AudioBuffer& buf, std::size_t taps = 1001);

struct CicadaFilterResult {
    Segment segment;
    double probability = 0.0;
    std::optional<CicadaBand> band;
    bool filtered = false;
};

// Detector-gated version: below the threshold the segment passes through
// bit-identically.
CicadaFilterResult filter_cicada(const Segment& seg, const TrainedModel& detector,
                                 double threshold);

}  // namespace ng
